"""Bayesian feature selection in spatially varying coefficient models.

Sparse, piecewise-smooth coefficient fields get thresholded multiscale
Gaussian process priors; posterior computation rides on the closed-form
eigensystem of a modified squared-exponential kernel.
"""

from .data import (
    Dataset,
    GroundTruth,
    SpatialDomain,
    TruthSpec,
    grid_domain,
    logit_falff,
    read_dataset,
    simulate,
    standardize,
    truth_preset,
    write_dataset,
)
from .elicitation import LambdaPrior, LambdaProfile, elicit, elicit_priors, ols_basis_fit, profile
from .errors import (
    DataFormatError,
    ElicitationError,
    NumericalError,
    SingularDesignError,
    SvcmError,
)
from .inference import SvcfEstimate, estimate, estimate_voxel, predict, selection_prob
from .kernel import (
    EigenSystem,
    KernelParams,
    basis_matrix,
    eigenfunction,
    eigenvalue,
    gram,
    hermite,
    kernel_eval,
    multi_index,
    truncation_level,
)
from .mcmc import ChainOutput, ChainState, McmcConfig, kmeans_blocks, run_chain
from .metrics import ScoreReport, fdr_metric, fnr_metric, partial_auc, remse, roc_sweep
from .baselines import GlmFit, bh_fdr, bonferroni, glm_fit, threshold_naive_t
from .tmgp import SvcfDraw, TmgpParams, sample_global, sample_local, sample_svcf, threshold_regional, threshold_voxel

__version__ = "0.1.0"
