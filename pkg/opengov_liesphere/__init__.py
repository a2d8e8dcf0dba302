"""OpenGov-LieSphere - Computational Lie sphere geometry and Dupin hypersurface analysis."""

__version__ = "0.1.0"
__author__ = "Nik Jois"
__email__ = "nikjois@llamasearch.ai"

from opengov_liesphere.config import settings
from opengov_liesphere.core.models import LieLine, LieTransform, LieVector
from opengov_liesphere.core.legendre import LegendreMap, lift_euclidean, lift_spherical
from opengov_liesphere.core.curvature import curvature_spheres
from opengov_liesphere.core.dupin import dupin_verify, isoparametric_criterion, reducibility_test
from opengov_liesphere.core.zoo import build_generator

__all__ = [
    "settings",
    "LieVector",
    "LieLine",
    "LieTransform",
    "LegendreMap",
    "lift_euclidean",
    "lift_spherical",
    "curvature_spheres",
    "dupin_verify",
    "reducibility_test",
    "isoparametric_criterion",
    "build_generator",
    "__version__",
]
