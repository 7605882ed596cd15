"""dcohom: exact Hochschild / de Rham cohomology and infinitesimal
deformations for algebras of differential operators on localized polynomial
coordinate algebras."""

__version__ = "0.1.0"

from .algebra import AlgebraElement
from .forms import (
    DerivationVector,
    DifferentialForm,
    apply_derivation,
    de_rham_d,
    dr_cohomology_dims,
    find_potential,
    kunneth_dr,
    lie_bracket,
)
from .koszul import (
    CohomologyReport,
    KoszulCochain,
    hh_homology_via_koszul,
    hh_via_de_rham,
    hh_via_koszul,
    koszul_differential,
    koszul_resolution_check,
    vdb_check,
)
from .linalg import Rational, SparseMatrix, Subspace, kernel_basis, quotient_dim, rank
from .operators import (
    DiffOperator,
    Filtration,
    center_truncated,
    commutator,
    commutator_reduction,
    multiply,
)
from .spaces import SpaceSpec, affine, localized, mixed, product, torus

__all__ = [
    "AlgebraElement",
    "CohomologyReport",
    "DerivationVector",
    "DiffOperator",
    "DifferentialForm",
    "Filtration",
    "KoszulCochain",
    "Rational",
    "SparseMatrix",
    "SpaceSpec",
    "Subspace",
    "affine",
    "apply_derivation",
    "center_truncated",
    "commutator",
    "commutator_reduction",
    "de_rham_d",
    "dr_cohomology_dims",
    "find_potential",
    "hh_homology_via_koszul",
    "hh_via_de_rham",
    "hh_via_koszul",
    "kernel_basis",
    "koszul_differential",
    "koszul_resolution_check",
    "kunneth_dr",
    "lie_bracket",
    "localized",
    "mixed",
    "multiply",
    "product",
    "quotient_dim",
    "rank",
    "torus",
    "vdb_check",
]
