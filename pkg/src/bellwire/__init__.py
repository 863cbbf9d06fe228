"""bellwire: bipartite Bell-box behaviors, nonlocality-free wirings, and
relative-entropy nonlocality quantifiers."""

from . import errors, jsonio
from .behaviors import (
    Behavior,
    InputDistribution,
    JointDistribution,
    Scenario,
    behavior_from_array,
    doubling_pair,
    doubling_pair_first,
    doubling_pair_second,
    pr_box,
    product_with_inputs,
    tsirelson_four_setting,
    white_noise,
    TSIRELSON_P,
)
from .divergence import (
    DivergenceValue,
    behavior_re,
    conditional_re,
    kl,
    per_setting_kl,
)
from .geometry import (
    BellCertificate,
    DeterministicStrategy,
    LocalModel,
    MembershipResult,
    NoSignalingReport,
    enumerate_local_vertices,
    is_local,
    is_no_signaling,
    local_vertex_matrix,
    random_behavior,
    random_local_behavior,
    random_ns_behavior,
)
from .monotones import (
    AuditReport,
    AuditRow,
    MonotoneResult,
    apply_wiring,
    convexity_audit,
    evaluate_quantifier,
    monotonicity_audit,
    s_c,
    s_c_alternating,
    s_nl,
    s_u,
    s_uc,
)
from .wirings import (
    BothMeasureBranch,
    GlobalWiring,
    LosrWiring,
    OneMeasuresBranch,
    UclosrWiring,
    WpiccWiring,
    apply_gw,
    apply_losr,
    apply_uclosr,
    apply_wpicc,
    bypass_global_wiring,
    feedback_copy_wiring,
    identity_global_wiring,
    losr_to_gw,
    random_global_wiring,
    random_losr_wiring,
    random_uclosr_wiring,
    random_wpicc_wiring,
    setting_fold_wiring,
    uclosr_decomposition,
    wpicc_local_part,
)

__all__ = [name for name in dir() if not name.startswith("_")]
