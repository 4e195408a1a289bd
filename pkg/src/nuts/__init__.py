"""NUTS: few-shot spoken-word identification via log-MEL features, seeded
random projection, Narsese property encoding, closest-instance preprocessing
and a minimal non-axiomatic reasoning core."""

from .audio_frontend import (FrontendConfig, PcmBuffer, feature_vector,
                             load_wav, mel_spectrogram, normalize,
                             pad_or_truncate)
from .classifier import (FewShotModel, TrialConfig, TrialResult, evaluate,
                         fit, predict, run_trials)
from .dimreduce import (Calibration, ProjectionMatrix, calibrate,
                        generate_projection, project, subsample,
                        to_unit_interval)
from .encoder import (PropertyJudgment, PropertyNaming, encode_instance,
                      label_judgment, label_question)
from .errors import NutsError
from .harness import (DESK_CLASSES, SPEECH_COMMANDS_WORDS, SweepGrid,
                      ingest_dataset, run_sweep, run_synthetic_experiment,
                      write_csv)
from .nal_core import Judgment, Memory, analogy, choose, expectation, revise
from .nalifier import Nalifier, similarity
from .narsese import (DEFAULT_CONFIDENCE, Sentence, Statement, Term,
                      TruthValue, parse, render)
from .synthetic import SyntheticSpec, gen_triple

__version__ = "0.1.0"
