"""Optimal transmit covariances and rate-energy regions for MIMO SWIPT broadcast links."""

from .core import (
    ChannelPair,
    NoiseSplit,
    REBoundary,
    REPoint,
    Scheme,
    SweepFailure,
    TransmitCovariance,
    harvested_power,
    hermitian_eig,
    hermitian_eig_and_svd,
    mutual_information,
)
from .errors import (
    ConfigError,
    DimensionError,
    DualInfeasibleError,
    InfeasibleError,
    NonFiniteError,
    NotPSDError,
    SwiptError,
)
from .kernels import BACKEND
from .solvers import (
    DualPoint,
    P3Solution,
    WaterfillResult,
    corners,
    solve_p1,
    solve_p2,
    solve_p3,
    solve_p3_colocated,
    solve_p3_dual_inner,
    solve_p3_miso,
    solve_p3_miso_miso_closed,
    waterfill,
)
from .regions import (
    AntennaPartition,
    CornerHandling,
    SplitVector,
    SweepSpec,
    trace_antenna_switching,
    trace_colocated_outer,
    trace_ps_general,
    trace_separated,
    trace_simo_closed,
    trace_siso_ps_case,
    trace_ts1,
    trace_ts2,
    trace_ups,
)
from .scenario import ScenarioConfig, generate_rayleigh_channel, load_config, run_scenario

__version__ = "0.1.0"
