"""Semi-supervised classification in kernel space: transductive label
propagation with jointly learned adaptive weights, two inductive
out-of-sample predictors, a positive/negative label-propagation baseline,
a seeded experiment harness, and an interactive image segmentation
service."""

from .backend import NUMBA_ENABLED, backend_name
from .datasets import Dataset, load_csv, make_blobs, make_two_moons, normalize_features, save_csv
from .errors import (
    ConfigError,
    DegenerateInputError,
    IngestionError,
    InputError,
    MissingClassError,
    SolverError,
)
from .experiment import ExperimentConfig, RunReport, run_experiment, split, sweep
from .graphs import NeighborIndex, WeightMatrix, gaussian_weights, knn, symmetrize_normalize
from .inductive import InductiveConfig, predict, predict_map, predict_recons
from .kernels import CrossGram, GramMatrix, KernelSpec, cross_gram, gram, kernel_eval
from .labels import (
    UNLABELED,
    ConfidenceWeights,
    LabelMatrices,
    LabelSet,
    SoftLabels,
    build_confidence,
    encode_labels,
)
from .pnlp import PnlpConfig, pnlp_solve
from .solver import (
    SolverConfig,
    SolverState,
    TrainedModel,
    adaptive_weights,
    decode,
    fit,
    init_state,
    l21_norm,
    objective,
    update_q,
    update_v,
    update_w,
)

__version__ = "0.1.0"
