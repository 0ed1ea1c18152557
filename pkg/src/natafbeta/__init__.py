"""Random-field classifier with Beta class-probability marginals.

Class counts observed at attribute vectors are treated as evidence about
a latent class-probability curve: Beta marginals at every point, coupled
by a Gaussian copula, with count evidence spread across attribute space
by an RBF kernel whose length scales are fitted by gradient ascent on
the marginal likelihood.
"""

from .classify import (
    BinaryModel,
    FitConfig,
    MulticlassPrediction,
    Observation,
    PredictiveResult,
    UnfittableDataError,
    fit,
    fit_multiclass,
    load_model,
    log_likelihood,
    predict,
    predict_multiclass,
    save_model,
)
from .data import (
    Dataset,
    GridFunction,
    ParseError,
    SimulationSpec,
    impute_means,
    load_csv,
    save_csv,
    simulate,
    true_metrics,
)
from .evaluate import CvReport, ccr, cross_validate, pcc
from .field import NatafBetaField, credible_band, nataf_beta_log_pdf, sample_field
from .kernel import (
    CountField,
    LognormalFieldParams,
    condition_lognormal_single,
    count_observations,
    cross_correlation,
    propagate_counts,
    rbf_correlation,
)
from .special import (
    BetaParams,
    DivergentDensityError,
    DomainError,
    SingularMatrixError,
    beta_cdf,
    beta_inv_cdf,
    beta_log_pdf,
    log_beta_function,
)

__version__ = "0.1.0"

__all__ = [
    "BetaParams",
    "BinaryModel",
    "CountField",
    "CvReport",
    "Dataset",
    "DivergentDensityError",
    "DomainError",
    "FitConfig",
    "GridFunction",
    "LognormalFieldParams",
    "MulticlassPrediction",
    "NatafBetaField",
    "Observation",
    "ParseError",
    "PredictiveResult",
    "SimulationSpec",
    "SingularMatrixError",
    "UnfittableDataError",
    "beta_cdf",
    "beta_inv_cdf",
    "beta_log_pdf",
    "ccr",
    "condition_lognormal_single",
    "count_observations",
    "credible_band",
    "cross_correlation",
    "cross_validate",
    "fit",
    "fit_multiclass",
    "impute_means",
    "load_csv",
    "load_model",
    "log_beta_function",
    "log_likelihood",
    "nataf_beta_log_pdf",
    "pcc",
    "predict",
    "predict_multiclass",
    "propagate_counts",
    "rbf_correlation",
    "sample_field",
    "save_csv",
    "save_model",
    "simulate",
    "true_metrics",
    "__version__",
]
