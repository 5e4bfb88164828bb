"""Software twin of a force-guided folding particle chain.

Plan chain folds that approximate a planar curve on a triangular lattice,
simulate the shared-bus electronics and the timed folding sequence, and
evaluate the mechanical scaling model.
"""

from .errors import (
    AnchorMismatch,
    BusInPowerMode,
    ChainTooShort,
    EmptyPlan,
    EmptyStrip,
    FoldchainError,
    MasterDesynced,
    NoSuchNode,
    NoSuchParticle,
    NotAChain,
    NotCoTriangular,
    NotLocalized,
    OutOfWorkArea,
    OvervoltageDamage,
    PolarityConflict,
    SchemaError,
    SelfIntersection,
    UnbalancedChains,
)
from .geometry import (
    AnchorPose,
    ApproxError,
    ChainGeometry,
    Curve,
    FoldDirection,
    LatticeEdge,
    StripElement,
    TriangleStrip,
    TriCoord,
    WorkArea,
    approximation_error,
    locate_point,
    neighbors,
    sample_curve,
    strip_from_plan,
    triangle_vertices,
    vertex_xy,
)
from .planner import (
    EdgeCrossing,
    FoldPlan,
    PlanResult,
    TruncatedBranchWarning,
    crossing_sequence,
    fold_direction,
    normalize_curve,
    plan_curve,
)
from .bus import (
    BusMode,
    BusModel,
    BusSnapshot,
    Polarity,
    RomId,
    StrapCircuit,
    SwitchNode,
    crc8,
    make_chain_bus,
)
from .control import (
    ChainState,
    FoldResult,
    MotorEncoderModel,
    MultiChainSchedule,
    ParticleStatus,
    SpoolCheck,
    Timeline,
    TimelineEvent,
    TimingParams,
    UnfoldReport,
    fold_sequence,
    folding_time,
    full_fold_spool_check,
    run_motor_until,
    schedule_multi_chain,
    unfold,
)
from .mechanics import (
    FeasibilityReport,
    MechParams,
    feasibility_report,
    gf_to_n,
    kgf_to_n,
    max_particles,
    mechanical_advantage,
    n_to_gf,
    n_to_kgf,
    required_unlock_force,
    sma_lateral_force,
    sma_stroke,
    worst_case_thread_force,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
