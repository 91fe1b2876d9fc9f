"""Normalized signature kernels and MMD two-sample tests for sequential data."""
from .estimators import FlatRBFKernel, MMDTwoSampleTest, SignatureKernel, SignatureTransformer
from .exceptions import ConvergenceError, ShapeMismatchError
from .mmd import TestResult, mmd2_unbiased, permutation_test, threshold_test
from .normalize import (
    NormalizationResult,
    NormalizationSpec,
    normalize_tensor,
    normalized_inner,
    psi_of_norm,
    solve_lambda,
)
from .sigkernel import (
    SigKernelConfig,
    gram_matrix,
    increment_gram,
    level_inner_products,
    sig_kernel,
)
from .signature import PathSample, add_lags, sig_linear, time_augment
from .statekernel import StateKernelConfig, kappa, median_heuristic
from .tensor import (
    GroupElement,
    chen_product,
    dilate,
    inner_product_levels,
    level_norms_sq,
    segment_exp,
    unit,
)

__version__ = "0.1.0"
