"""Deformation quantization on torus fibrations.

Quantum-torus star products with polynomial base coefficients, theta-frame
quantum states with parallel transport over the Siegel space, the twisted
Toeplitz transform and its inverse, and integral-affine atlas bookkeeping
with brute-force verification oracles for every closed-form identity.
"""

from importlib.metadata import PackageNotFoundError, version as _dist_version

try:
    __version__ = _dist_version("torusquant")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .atlas import (
    BraneAtlas,
    RawBraneData,
    Transition,
    builtin_example,
    cocycle_check,
    derive_transition,
    holomorphic_symplectic_form,
    reduce_to_skew_smith,
    validate_chart,
)
from .fiber import (
    BraneChart,
    DolbeaultForm,
    FourierPolynomial,
    dolbeault,
    graded_star,
    poisson_bracket,
    semiclassical_defect,
    star_product,
)
from .lattice import (
    IntSkewForm,
    SemiCharacter,
    SiegelPoint,
    TwistedSymplectic,
    frame_transport_check,
    siegel_action,
    skew_smith_normal_form,
)
from .mirror import (
    EndoMatrix,
    MirrorConnection,
    curvature_form,
    mirror_homomorphism_check,
    reconstruct_symbol,
    toeplitz_quadrature_oracle,
    twisted_toeplitz_matrix,
)
from .theta import (
    FiberPoint,
    QuantumState,
    ThetaFrame,
    bks_transform,
    pairing_lattice_sum,
    pairing_quadrature,
    theta_basis_eval,
)
from .verify import run_suite

__all__ = [
    "__version__",
    "BraneAtlas", "RawBraneData", "Transition", "builtin_example",
    "cocycle_check", "derive_transition", "holomorphic_symplectic_form",
    "reduce_to_skew_smith", "validate_chart",
    "BraneChart", "DolbeaultForm", "FourierPolynomial", "dolbeault",
    "graded_star", "poisson_bracket", "semiclassical_defect", "star_product",
    "IntSkewForm", "SemiCharacter", "SiegelPoint", "TwistedSymplectic",
    "frame_transport_check", "siegel_action", "skew_smith_normal_form",
    "EndoMatrix", "MirrorConnection", "curvature_form",
    "mirror_homomorphism_check", "reconstruct_symbol",
    "toeplitz_quadrature_oracle", "twisted_toeplitz_matrix",
    "FiberPoint", "QuantumState", "ThetaFrame", "bks_transform",
    "pairing_lattice_sum", "pairing_quadrature", "theta_basis_eval",
    "run_suite",
]
