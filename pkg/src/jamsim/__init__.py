"""Link-level simulator for a multi-user MIMO uplink under worst-case
jamming, with sensing-assisted receive filter designs."""

from .channel import (
    ArrayGeometry,
    ConfigurationError,
    PathSet,
    ReceiverKnowledge,
    Scenario,
    ScenarioConfig,
    beamspace_channel,
    db_to_linear,
    jammer_manifold,
    receiver_knowledge,
    sample_scenario,
    steering,
)
from .harness import (
    SweepConfig,
    SweepResult,
    SweepRow,
    cli_main,
    emit_csv,
    read_csv,
    run_selftest,
    run_sweep,
)
from .jammer import JammerStrategy, jammer_objective, worst_case_covariance
from .metrics import (
    RateReport,
    compute_eta,
    rate_report,
    sinr_a,
    sinr_b,
    sinr_lower_bound,
)
from .numerics import (
    SdpInfeasibleError,
    SdpNumericalError,
    hermitian_eig,
    psd_project_trace,
    solve_small_sdp,
)
from .txrx import (
    DegenerateScenarioError,
    FilterBank,
    QosTarget,
    analytic_receiver,
    beampattern,
    minsinr_receiver,
    pad_angles,
    svd_precoder,
    zf_receiver,
)

__all__ = [
    "ArrayGeometry",
    "ConfigurationError",
    "DegenerateScenarioError",
    "FilterBank",
    "JammerStrategy",
    "PathSet",
    "QosTarget",
    "RateReport",
    "ReceiverKnowledge",
    "Scenario",
    "ScenarioConfig",
    "SdpInfeasibleError",
    "SdpNumericalError",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "analytic_receiver",
    "beampattern",
    "beamspace_channel",
    "cli_main",
    "compute_eta",
    "db_to_linear",
    "emit_csv",
    "hermitian_eig",
    "jammer_manifold",
    "jammer_objective",
    "minsinr_receiver",
    "pad_angles",
    "psd_project_trace",
    "rate_report",
    "read_csv",
    "receiver_knowledge",
    "run_selftest",
    "run_sweep",
    "sample_scenario",
    "sinr_a",
    "sinr_b",
    "sinr_lower_bound",
    "solve_small_sdp",
    "steering",
    "svd_precoder",
    "worst_case_covariance",
    "zf_receiver",
]
