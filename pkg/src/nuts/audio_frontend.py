"""WAV decoding and the log-MEL frontend.

A 1-second 16 kHz mono utterance becomes an 80-bin x 100-frame log-MEL grid
(25 ms Hann window, 10 ms hop, centered frames with reflection padding,
triangular filters spanning 0-8000 Hz), then a min-max normalized vector of
8000 values in [0, 1], flattened bin-major: index = bin * 100 + frame.
"""

from __future__ import annotations

import functools
import wave
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import NutsError

SAMPLE_RATE = 16000
CLIP_SAMPLES = 16000  # exactly one second after pad_or_truncate
N_MELS = 80
N_FRAMES = 100
FEATURE_DIM = N_MELS * N_FRAMES


class AudioError(NutsError):
    pass


class NotWav(AudioError):
    """File is not a RIFF/WAVE container."""


class UnsupportedFormat(AudioError):
    """WAV exists but is not PCM 16-bit mono 16 kHz."""


@dataclass(frozen=True)
class FrontendConfig:
    window_ms: float = 25.0
    hop_ms: float = 10.0
    n_mels: int = N_MELS
    floor: float = 1e-10  # applied before log; padded silence stays finite
    fmin: float = 0.0
    fmax: float = SAMPLE_RATE / 2.0


@dataclass(frozen=True, eq=False)
class PcmBuffer:
    samples: np.ndarray  # int16, 1-D
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        if self.sample_rate != SAMPLE_RATE:
            raise UnsupportedFormat(f"sample rate must be {SAMPLE_RATE}, got {self.sample_rate}")
        samples = np.asarray(self.samples)
        if samples.dtype != np.int16:
            samples = samples.astype(np.int16)
        if samples.ndim != 1:
            raise UnsupportedFormat("samples must be a 1-D mono buffer")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)


def load_wav(path) -> PcmBuffer:
    """Decode a RIFF/WAVE file; must be PCM 16-bit mono 16 kHz. No resampling."""
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise NotWav(f"{path}: not a RIFF/WAVE file")
    try:
        with wave.open(str(path), "rb") as w:
            nch = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            if nch != 1 or width != 2 or rate != SAMPLE_RATE:
                raise UnsupportedFormat(
                    f"{path}: need PCM16 mono {SAMPLE_RATE} Hz, "
                    f"got {nch} channel(s), {8 * width} bit, {rate} Hz")
            raw = w.readframes(w.getnframes())
    except (wave.Error, EOFError) as e:
        raise UnsupportedFormat(f"{path}: {e}") from e
    return PcmBuffer(np.frombuffer(raw, dtype="<i2"), rate)


def pad_or_truncate(pcm: PcmBuffer, target: int = CLIP_SAMPLES) -> PcmBuffer:
    """Zero-pad at the end, or truncate, to exactly `target` samples."""
    n = len(pcm.samples)
    if n == target:
        return pcm
    if n > target:
        return PcmBuffer(pcm.samples[:target].copy(), pcm.sample_rate)
    out = np.zeros(target, dtype=np.int16)
    out[:n] = pcm.samples
    return PcmBuffer(out, pcm.sample_rate)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


@functools.lru_cache(maxsize=8)
def _mel_filterbank(n_mels: int, n_fft: int, sample_rate: int,
                    fmin: float, fmax: float) -> np.ndarray:
    """(n_mels, n_fft//2+1) triangular filters, centers equally spaced in mel."""
    freqs = np.linspace(0.0, sample_rate / 2.0, n_fft // 2 + 1)
    pts = _mel_to_hz(np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2))
    lo, ctr, hi = pts[:-2, None], pts[1:-1, None], pts[2:, None]
    up = (freqs[None, :] - lo) / (ctr - lo)
    down = (hi - freqs[None, :]) / (hi - ctr)
    return np.clip(np.minimum(up, down), 0.0, None)


def mel_filter_centers(cfg: FrontendConfig = FrontendConfig(),
                       sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Center frequency (Hz) of each triangular filter."""
    pts = _mel_to_hz(np.linspace(_hz_to_mel(cfg.fmin), _hz_to_mel(cfg.fmax),
                                 cfg.n_mels + 2))
    return pts[1:-1]


def mel_spectrogram(pcm: PcmBuffer, cfg: FrontendConfig = FrontendConfig()) -> np.ndarray:
    """(n_mels, n_frames) log-MEL energy grid of a one-second buffer."""
    if len(pcm.samples) != CLIP_SAMPLES:
        raise ValueError(f"expected {CLIP_SAMPLES} samples; run pad_or_truncate first")
    x = pcm.samples.astype(np.float64) / 32768.0
    win = round(pcm.sample_rate * cfg.window_ms / 1000.0)
    hop = round(pcm.sample_rate * cfg.hop_ms / 1000.0)
    n_frames = len(x) // hop

    xp = np.pad(x, win // 2, mode="reflect")
    frames = sliding_window_view(xp, win)[::hop][:n_frames]
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(win) / win)
    power = np.abs(np.fft.rfft(frames * window, axis=1)) ** 2

    fb = _mel_filterbank(cfg.n_mels, win, pcm.sample_rate, cfg.fmin, cfg.fmax)
    mel = power @ fb.T  # (n_frames, n_mels)
    return np.log(np.maximum(mel, cfg.floor)).T


def normalize(grid: np.ndarray) -> np.ndarray:
    """Per-utterance min-max scaling to [0, 1], flattened bin-major.

    A constant grid (no dynamic range) maps to all zeros.
    """
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite")
    lo = grid.min()
    hi = grid.max()
    if hi == lo:
        return np.zeros(grid.size)
    return ((grid - lo) / (hi - lo)).ravel()


def feature_vector(pcm: PcmBuffer, cfg: FrontendConfig = FrontendConfig()) -> np.ndarray:
    """Full frontend: clip/pad to 1 s, log-MEL grid, min-max normalize, flatten."""
    return normalize(mel_spectrogram(pad_or_truncate(pcm), cfg))
