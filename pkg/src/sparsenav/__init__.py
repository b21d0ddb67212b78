"""sparsenav: sparse expansion hashing and visual route following in 2D.

Three interchangeable visual-memory encoders (expansion hash, sign-projection
hash, raw-image memory) drive a lateralised-steering agent through a
deterministic raycast world, with efficiency accounting for storage,
compression bounds, capacity and run-time operations.
"""

__version__ = "0.1.0"

from .analysis import (
    OpCountReport,
    StorageReport,
    bernoulli_entropy,
    compression_lower_bound,
    csr_hash_bits,
    instrumented_counts,
    memory_capacity,
    op_counts,
    storage_size,
)
from .encoders import (
    Encoder,
    EncoderConfig,
    HashVector,
    Model,
    OpCounters,
    ProjectionMatrix,
    build_matrix,
    encode,
    init_flyhash_weights,
    init_lsh_weights,
    k_wta,
    load_matrix,
    save_matrix,
)
from .errors import ConfigError, StateError, TrainingCollisionError
from .harness import (
    RouteScript,
    Segment,
    SweepRow,
    TrialConfig,
    TrialRecord,
    distance_to_trajectory,
    load_route,
    reference_route,
    run_sweep,
    run_test,
    run_training,
    run_trial,
    save_route,
    trial_seed,
)
from .memory import (
    EUCLIDEAN,
    HAMMING,
    MemoryStore,
    NoveltyResult,
    dissimilarity,
    evaluate_novelty,
    load_store,
    save_store,
    store_for,
    store_item,
)
from .simworld import (
    Arena,
    Pose,
    ProcessedView,
    Wall,
    check_collision,
    load_arena,
    preprocess,
    reference_arena,
    render,
    save_arena,
    step,
    wrap_angle,
)
from .steering import SteeringCommand, SteeringParams, compute_turn
