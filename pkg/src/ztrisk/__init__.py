"""Discrete Bayesian-network risk engine for Zero Trust adoption decisions."""

from .network import (
    ACTIVE,
    INACTIVE,
    ENABLER,
    INHIBITOR,
    ArityMismatch,
    CycleDetected,
    ExplicitTable,
    MissingAssignment,
    Negation,
    Network,
    NodeSpec,
    NoisyOr,
    NoisyOrEntry,
    UnknownNode,
    build_network,
    cpd_prob,
    joint_probability,
    noisy_or_prob,
)
from .inference import (
    EMPTY_EVIDENCE,
    EvidenceSet,
    InconsistentEvidence,
    MpeResult,
    ScenarioRow,
    forward_scenario,
    mpe,
    posterior_marginals,
    probability_of_evidence,
)
from .priors import (
    BetaParams,
    CountOutOfRange,
    InfeasibleMoments,
    ProportionEvidence,
    RandomStream,
    beta_from_mean_ess,
    beta_from_proportion,
    beta_moments,
    beta_posterior_update,
    beta_sample,
    fit_beta_moments,
)
from .montecarlo import (
    DEFAULT_DRAWS,
    DEFAULT_SEED,
    EmptySamples,
    McParent,
    McSpec,
    PosteriorSummary,
    PredictiveCheckRow,
    prior_predictive_check,
    propagate_mean_closed_form,
    propagate_noisy_or,
    propagate_samples,
    render_summary_table,
    strength_posterior,
    summarize_samples,
)
from .dataprep import (
    ASSETS,
    DEFAULT_CAUSE_MAPPING,
    DEFAULT_RULES,
    UNASSIGNED,
    AttackAssignment,
    AttackRule,
    BreachStrengthTable,
    ClassificationRules,
    ConditionalTable,
    CountExceedsTotal,
    EmptyBreachSet,
    FilterResult,
    IncidentRecord,
    MissingColumn,
    asset_conditionals,
    attack_priors,
    breach_strengths,
    classify_attacks,
    count_attacks,
    filter_smb_incidents,
    read_incident_csv,
    read_smb_csv,
    summary_json,
)
from .fixtures import (
    CellPlan,
    FixtureProfile,
    InfeasibleProfile,
    default_profile,
    generate_fixture,
    small_profile,
)
from .ztmodel import (
    MANIFEST_ENV_VAR,
    STATUS_CALIBRATED,
    STATUS_REPRODUCED,
    STATUS_UNRECONCILED,
    CalibrationReport,
    CalibrationResult,
    FittedLeak,
    LeakSpec,
    LinkDecl,
    NodeDecl,
    Preset,
    PresetRow,
    ProvenanceMismatch,
    ReferenceOutcome,
    ReferenceValue,
    ScenarioSuite,
    SchemaError,
    SuiteCell,
    SuiteRow,
    TornadoPreset,
    UnknownPreset,
    ZtManifest,
    build_ztnetwork,
    calibrate,
    calibrated_network,
    default_manifest_path,
    evidence_from_document,
    load_default_manifest,
    load_manifest,
    noisy_or_expected,
    pillar_mc_specs,
    render_calibration_table,
    render_suite_table,
    run_mpe_preset,
    run_scenario_suite,
)
from .sensitivity import (
    ParameterRef,
    PerturbationOutOfRange,
    TargetInCandidates,
    TornadoBar,
    evidence_tornado,
    parameter_tornado,
    render_tornado_table,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
