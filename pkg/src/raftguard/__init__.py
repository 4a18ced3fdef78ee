"""Coverage and authentication analysis for consensus IoT networks.

Closed-form coverage probabilities for a leader/follower network under
annular jamming, pathloss-fingerprint authentication error rates, and
seeded Monte Carlo engines that cross-validate every closed form.
"""

from raftguard.auth import (
    AuthProfile,
    ErrorProbabilities,
    Hypothesis,
    decide,
    error_probabilities,
    ground_truth_from_deployment,
    lq_db_to_sigma,
    ml_identify,
    p_fa_closed_form,
    p_md_closed_form,
    p_md_expected,
    p_mc_closed_form,
    roc_curve,
    sample_fingerprints,
    sigma_to_lq_db,
    threshold_for_pfa,
)
from raftguard.channel import NetworkParams, pathloss_db
from raftguard.coverage import (
    CoverageMethod,
    CoverageResult,
    coverage_dl,
    coverage_joint,
    coverage_ul,
    laplace_interference,
)
from raftguard.geometry import AnnulusRegion, Deployment, DiskRegion
from raftguard.montecarlo import (
    ConsensusOutcome,
    TrialConfig,
    estimate_coverage,
    simulate_auth,
    simulate_consensus,
)
from raftguard.specfun import ConvergenceError, Tolerance, hyp2f1, q_function, q_inverse

__version__ = "0.1.0"

__all__ = [
    "AnnulusRegion",
    "AuthProfile",
    "ConsensusOutcome",
    "ConvergenceError",
    "CoverageMethod",
    "CoverageResult",
    "Deployment",
    "DiskRegion",
    "ErrorProbabilities",
    "Hypothesis",
    "NetworkParams",
    "Tolerance",
    "TrialConfig",
    "coverage_dl",
    "coverage_joint",
    "coverage_ul",
    "decide",
    "error_probabilities",
    "estimate_coverage",
    "ground_truth_from_deployment",
    "hyp2f1",
    "laplace_interference",
    "lq_db_to_sigma",
    "ml_identify",
    "p_fa_closed_form",
    "p_md_closed_form",
    "p_md_expected",
    "p_mc_closed_form",
    "pathloss_db",
    "q_function",
    "q_inverse",
    "roc_curve",
    "sample_fingerprints",
    "sigma_to_lq_db",
    "simulate_auth",
    "simulate_consensus",
    "threshold_for_pfa",
    "__version__",
]
