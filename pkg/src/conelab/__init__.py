"""Numerical laboratory for natural cones, the separable cone P1 (x) P2 and its dual."""

from .cones import (
    ConeParams,
    ConeVerdict,
    WitnessCertificate,
    certificate_margin,
    decomposition_search,
    in_dual_sep_cone,
    in_natural_cone,
    in_sep_cone,
    ppt_min_eigenvalue,
    seesaw_min_product,
)
from .decomposition import SeparableDecomposition
from .errors import ConsistencyError, InvalidInputError, NotFaithfulError, ReplicationFailure
from .replication import build_eta, build_sigma, build_theta, run_replication
from .standard_form import StandardForm, make_composite, make_standard_form, representative_vector

__version__ = "0.1.0"
