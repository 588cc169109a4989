"""swcd: training-free perceptual color differences from multiscale sliced
Wasserstein distances over CIELAB patch distributions."""

from .color import lab_to_srgb, srgb_to_lab
from .evaluation import (
    EvalRecord,
    EvalSummary,
    augment,
    fit_logistic4,
    load_manifest,
    logistic4,
    pixelwise_de76,
    plcc,
    run_benchmark,
    srcc,
    stress,
)
from .imgio import load_image, resize_bilinear, save_image
from .metric import CdMap, CdScore, SlicedWassersteinColorDistance
from .optim import (
    ColorTransfer,
    OptimConfig,
    OptimResult,
    color_transfer,
    gaussian_noise_image,
    recover_reference,
    transfer_video,
)
from .projections import ProjectionSet, load_projections, sample_projections, save_projections
from .pyramid import Pyramid, PyramidUnderflowError, gaussian_pyramid
from .sliced import project_image, swd_at_scale, wd1d, wd1d_oracle

__version__ = "0.1.0"

__all__ = [
    "CdMap",
    "CdScore",
    "ColorTransfer",
    "EvalRecord",
    "EvalSummary",
    "OptimConfig",
    "OptimResult",
    "ProjectionSet",
    "Pyramid",
    "PyramidUnderflowError",
    "SlicedWassersteinColorDistance",
    "augment",
    "color_transfer",
    "fit_logistic4",
    "gaussian_noise_image",
    "gaussian_pyramid",
    "lab_to_srgb",
    "load_image",
    "load_manifest",
    "load_projections",
    "logistic4",
    "pixelwise_de76",
    "plcc",
    "project_image",
    "recover_reference",
    "resize_bilinear",
    "run_benchmark",
    "sample_projections",
    "save_image",
    "save_projections",
    "srcc",
    "srgb_to_lab",
    "stress",
    "swd_at_scale",
    "transfer_video",
    "wd1d",
    "wd1d_oracle",
]
