"""Differential forms, the de Rham differential, and exact de Rham cohomology.

Three computation routes, one per catalog family:

* monomial spaces (polynomial / Laurent variables): the complex is graded by
  the multidegree mu = alpha + chi_S, which d preserves, so cohomology is a
  finite per-multidegree computation and only the all-zeros multidegree
  contributes;
* r = 1 with a squarefree denominator f: Hermite reduction lowers the
  denominator power, leaving the residue classes x^j/f dx, j < deg f;
* products: Künneth convolution of the factors' Betti numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .algebra import AlgebraElement, coeff_basis_keys
from .errors import DegreeOverflow, NotClosed, NotStabilized, SpaceMismatch, UnsupportedSpace
from .linalg import kernel_vectors, rank_of_vectors, solve_columns
from .spaces import (
    SpaceSpec,
    poly_add,
    poly_bezout,
    poly_degree,
    poly_derivative,
    poly_divmod,
    poly_mul,
    poly_scale,
)

Index = tuple[int, ...]


@dataclass(frozen=True)
class DerivationVector:
    """A derivation of the coordinate algebra: sum v_i d/dx_i."""

    space: SpaceSpec
    components: tuple[AlgebraElement, ...]

    @staticmethod
    def make(space: SpaceSpec, components) -> "DerivationVector":
        comps = tuple(components)
        if len(comps) != space.num_vars:
            raise ValueError("component count must equal the number of variables")
        return DerivationVector(space, comps)

    @staticmethod
    def coordinate(space: SpaceSpec, i: int) -> "DerivationVector":
        comps = [AlgebraElement.zero(space)] * space.num_vars
        comps[i] = AlgebraElement.one(space)
        return DerivationVector.make(space, comps)


@dataclass(frozen=True)
class DifferentialForm:
    """Degree-k form with coefficients on the wedge basis dx_{i1} ^ ... ^ dx_{ik}."""

    space: SpaceSpec
    degree: int
    coeffs: tuple[tuple[Index, AlgebraElement], ...]

    @staticmethod
    def make(space: SpaceSpec, degree: int, coeffs: dict) -> "DifferentialForm":
        # degrees above r are allowed only for the zero form (no index tuples
        # exist), so e.g. the zero 2-form on a line is a valid trivial twist
        if degree < 0 or (degree > space.num_vars and coeffs):
            raise DegreeOverflow(f"form degree {degree} outside 0..{space.num_vars}")
        clean = {}
        for idx, a in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {degree}")
            if any(not 0 <= i < space.num_vars for i in idx):
                raise ValueError(f"index out of range in {idx}")
            if a.space != space:
                raise SpaceMismatch("form coefficient over a different space")
            if not a.is_zero:
                clean[idx] = clean.get(idx, AlgebraElement.zero(space)) + a
        clean = {i: a for i, a in clean.items() if not a.is_zero}
        return DifferentialForm(space, degree, tuple(sorted(clean.items())))

    @staticmethod
    def zero(space: SpaceSpec, degree: int) -> "DifferentialForm":
        return DifferentialForm.make(space, degree, {})

    def coeff_dict(self) -> dict[Index, AlgebraElement]:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if self.space != other.space or self.degree != other.degree:
            raise SpaceMismatch("cannot add forms of different space or degree")
        merged = self.coeff_dict()
        for idx, a in other.coeffs:
            merged[idx] = merged.get(idx, AlgebraElement.zero(self.space)) + a
        return DifferentialForm.make(self.space, self.degree, merged)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + other.scale(Fraction(-1))

    def scale(self, c) -> "DifferentialForm":
        return DifferentialForm.make(
            self.space, self.degree, {i: a.scale(Fraction(c)) for i, a in self.coeffs}
        )

    def evaluate1(self, v: DerivationVector) -> AlgebraElement:
        """lambda(v) for a 1-form."""
        if self.degree != 1:
            raise ValueError("evaluate1 needs a 1-form")
        out = AlgebraElement.zero(self.space)
        for (i,), a in self.coeffs:
            out = out + a * v.components[i]
        return out

    def evaluate2(self, v: DerivationVector, w: DerivationVector) -> AlgebraElement:
        """omega(v, w) for a 2-form."""
        if self.degree != 2:
            raise ValueError("evaluate2 needs a 2-form")
        out = AlgebraElement.zero(self.space)
        for (i, j), a in self.coeffs:
            out = out + a * (v.components[i] * w.components[j] - v.components[j] * w.components[i])
        return out


def apply_derivation(v: DerivationVector, g: AlgebraElement) -> AlgebraElement:
    """v(g) = sum_i v_i * dg/dx_i."""
    if v.space != g.space:
        raise SpaceMismatch("derivation and element over different spaces")
    out = AlgebraElement.zero(g.space)
    for i, comp in enumerate(v.components):
        if not comp.is_zero:
            out = out + comp * g.derivative(i)
    return out


def lie_bracket(v: DerivationVector, w: DerivationVector) -> DerivationVector:
    """[v, w]_i = v(w_i) - w(v_i)."""
    if v.space != w.space:
        raise SpaceMismatch("brackets need a common space")
    comps = [apply_derivation(v, w.components[i]) - apply_derivation(w, v.components[i])
             for i in range(v.space.num_vars)]
    return DerivationVector.make(v.space, comps)


def de_rham_d(phi: DifferentialForm) -> DifferentialForm:
    """Exterior derivative; raises DegreeOverflow at top degree."""
    space = phi.space
    r = space.num_vars
    if phi.degree >= r:
        raise DegreeOverflow("cannot raise the degree of a top form")
    out: dict[Index, AlgebraElement] = {}
    for idx, a in phi.coeffs:
        for i in range(r):
            if i in idx:
                continue
            da = a.derivative(i)
            if da.is_zero:
                continue
            pos = sum(1 for j in idx if j < i)
            sign = Fraction(-1) ** pos
            new_idx = tuple(sorted(idx + (i,)))
            term = da.scale(sign)
            out[new_idx] = out.get(new_idx, AlgebraElement.zero(space)) + term
    return DifferentialForm.make(space, phi.degree + 1, out)


def is_closed(phi: DifferentialForm) -> bool:
    if phi.degree >= phi.space.num_vars:
        return True
    return de_rham_d(phi).is_zero


@dataclass(frozen=True)
class NonExactCertificate:
    """Finite evidence that a closed form has nonzero class.

    For monomial spaces: the offending multidegree, the residual component
    there, and the (finite) dimension of the potential candidate space the
    solver exhausted.  For Hermite reduction: the nonzero residue numerator.
    """

    reason: str
    residual: DifferentialForm
    candidate_dim: int


def _mu_of(idx: Index, alpha, r: int) -> tuple[int, ...]:
    chi = [0] * r
    for i in idx:
        chi[i] = 1
    return tuple(a + c for a, c in zip(alpha, chi))


def _block_basis(space: SpaceSpec, mu: tuple[int, ...], degree: int) -> list[Index]:
    """Wedge indices S with alpha = mu - chi_S a valid exponent, |S| = degree.

    Sorted descending so solver witnesses prefer high-index differentials
    (d(x1 dx2) = dx1^dx2 picks beta = x1 dx2, not -x2 dx1).
    """
    r = space.num_vars
    out = []
    for S in combinations(range(r), degree):
        alpha = [m - (1 if i in S else 0) for i, m in enumerate(mu)]
        if all(a >= 0 or i in space.laurent for i, a in enumerate(alpha)):
            out.append(S)
    out.sort(reverse=True)
    return out


def _block_d_column(space: SpaceSpec, mu, S: Index) -> dict:
    """Coordinates of d(x^{mu-chi_S} dx_S) in the degree+1 block basis."""
    r = space.num_vars
    alpha = tuple(m - (1 if i in S else 0) for i, m in enumerate(mu))
    col: dict = {}
    for i in range(r):
        if i in S or alpha[i] == 0:
            continue
        pos = sum(1 for j in S if j < i)
        new_S = tuple(sorted(S + (i,)))
        col[new_S] = col.get(new_S, Fraction(0)) + Fraction(alpha[i]) * Fraction(-1) ** pos
    return {k: v for k, v in col.items() if v}


def _block_cohomology_dims(space: SpaceSpec, mu) -> list[int]:
    """Cohomology dimensions of the finite multidegree-mu subcomplex."""
    r = space.num_vars
    sizes = []
    ranks = []
    for k in range(r + 1):
        basis = _block_basis(space, mu, k)
        sizes.append(len(basis))
        if k < r:
            cols = [_block_d_column(space, mu, S) for S in basis]
            ranks.append(rank_of_vectors(cols))
        else:
            ranks.append(0)
    dims = []
    for k in range(r + 1):
        below = ranks[k - 1] if k > 0 else 0
        dims.append(sizes[k] - ranks[k] - below)
    return dims


def _iter_multidegrees(space: SpaceSpec, total: int):
    """All multidegrees mu with 1 <= |mu| <= total (abs on Laurent slots)."""
    r = space.num_vars

    def rec(i: int, budget: int, prefix: list):
        if i == r:
            if any(prefix):
                yield tuple(prefix)
            return
        lo = -budget if i in space.laurent else 0
        for e in range(lo, budget + 1):
            prefix.append(e)
            yield from rec(i + 1, budget - abs(e), prefix)
            prefix.pop()

    yield from rec(0, total, [])


def _monomial_dr_dims(space: SpaceSpec, window: int) -> list[int]:
    for w in (window, window + 2):
        for mu in _iter_multidegrees(space, w):
            dims = _block_cohomology_dims(space, mu)
            if any(dims):
                raise NotStabilized(
                    f"multidegree {mu} contributes {dims}; grading argument violated"
                )
    return _block_cohomology_dims(space, (0,) * space.num_vars)


def _localized_dr_dims(space: SpaceSpec, window: int) -> list[int]:
    """Windowed kernel/cokernel of d on the partial-fraction basis."""

    def h0(w: int) -> int:
        keys = coeff_basis_keys(space, w)
        cols = [AlgebraElement.from_coeff_key(space, k).derivative(0).decompose() for k in keys]
        return len(kernel_vectors(cols))

    def h1(w: int) -> int:
        window_keys = coeff_basis_keys(space, w)
        z = [{k: Fraction(1)} for k in window_keys]
        images = [
            AlgebraElement.from_coeff_key(space, k).derivative(0).decompose()
            for k in coeff_basis_keys(space, w + 2)
        ]
        images = [im for im in images if im]
        return rank_of_vectors(z + images) - rank_of_vectors(images)

    dims_a = [h0(window), h1(window)]
    dims_b = [h0(window + 2), h1(window + 2)]
    if dims_a != dims_b:
        raise NotStabilized(f"de Rham dims did not stabilize: {dims_a} vs {dims_b}")
    return dims_b


def kunneth_dr(a_dims: list[int], b_dims: list[int]) -> list[int]:
    """Convolution of Betti vectors."""
    out = [0] * (len(a_dims) + len(b_dims) - 1)
    for i, a in enumerate(a_dims):
        for j, b in enumerate(b_dims):
            out[i + j] += a * b
    return out


def dr_cohomology_dims(space: SpaceSpec, window: int = 6) -> list[int]:
    """Exact Betti numbers dim H^k_dR for k = 0..r.

    Answers are window-independent for catalog spaces; the window bounds the
    verification sweep, re-run at window+2 as a stabilization check.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if not space.is_atomic:
        dims = [1]
        for factor in space.factors:
            dims = kunneth_dr(dims, dr_cohomology_dims(factor, window))
        return dims
    if space.denominator is not None:
        return _localized_dr_dims(space, window)
    return _monomial_dr_dims(space, window)


def _hermite_potential(phi: DifferentialForm):
    """Potential of a 1-form on a localized line, or a residue certificate."""
    space = phi.space
    f = space.f_poly
    coeff = phi.coeff_dict().get((0,), AlgebraElement.zero(space))
    g = {a[0]: c for a, c in coeff.terms}
    k = coeff.den_power
    potential = AlgebraElement.zero(space)
    _, _, t_pol = poly_bezout(f, poly_derivative(f))
    while k >= 2:
        _, b = poly_divmod(poly_mul(t_pol, g), f)
        a = poly_divmod(poly_add(g, poly_scale(poly_mul(b, poly_derivative(f)), Fraction(-1))), f)[0]
        piece = AlgebraElement.make(space, {(e,): Fraction(c, -(k - 1)) for e, c in b.items()}, k - 1)
        potential = potential + piece
        g = poly_add(a, poly_scale(poly_derivative(b), Fraction(1, k - 1)))
        k -= 1
    if k == 1:
        q, rem = poly_divmod(g, f)
    else:
        q, rem = g, {}
    for e, c in q.items():
        potential = potential + AlgebraElement.make(space, {(e + 1,): Fraction(c, e + 1)})
    if rem:
        residual = DifferentialForm.make(
            space, 1, {(0,): AlgebraElement.make(space, {(e,): c for e, c in rem.items()}, 1)}
        )
        cert = NonExactCertificate(
            reason="Hermite-reduced residue g/f dx with g nonzero of degree < deg f",
            residual=residual,
            candidate_dim=poly_degree(f),
        )
        return None, cert
    return potential, None


def potential_with_certificate(phi: DifferentialForm):
    """(beta, None) with d(beta) = phi, or (None, certificate) when [phi] != 0."""
    space = phi.space
    if not space.is_atomic:
        raise UnsupportedSpace("flatten the space before seeking potentials")
    if phi.degree < 1:
        raise DegreeOverflow("potentials only exist for degree >= 1")
    if not is_closed(phi):
        raise NotClosed("the form is not closed")
    if space.denominator is not None:
        return _hermite_potential(phi)
    r = space.num_vars
    components: dict[tuple[int, ...], dict[Index, Fraction]] = {}
    for idx, a in phi.coeffs:
        for alpha, c in a.terms:
            mu = _mu_of(idx, alpha, r)
            components.setdefault(mu, {})[idx] = components.setdefault(mu, {}).get(idx, Fraction(0)) + c
    beta = DifferentialForm.zero(space, phi.degree - 1)
    for mu, rhs in sorted(components.items()):
        rhs = {k: v for k, v in rhs.items() if v}
        if not rhs:
            continue
        candidates = _block_basis(space, mu, phi.degree - 1)
        cols = [_block_d_column(space, mu, S) for S in candidates]
        sol = solve_columns(cols, rhs)
        if sol is None:
            residual = DifferentialForm.make(
                space,
                phi.degree,
                {
                    idx: AlgebraElement.make(
                        space, {tuple(m - (1 if i in idx else 0) for i, m in enumerate(mu)): v}
                    )
                    for idx, v in rhs.items()
                },
            )
            cert = NonExactCertificate(
                reason=(
                    f"multidegree {mu}: the potential candidate space has dimension "
                    f"{len(candidates)} and d misses the component there"
                ),
                residual=residual,
                candidate_dim=len(candidates),
            )
            return None, cert
        terms: dict[Index, AlgebraElement] = {}
        for j, v in sol.items():
            S = candidates[j]
            alpha = tuple(m - (1 if i in S else 0) for i, m in enumerate(mu))
            terms[S] = terms.get(S, AlgebraElement.zero(space)) + AlgebraElement.make(space, {alpha: v})
        beta = beta + DifferentialForm.make(space, phi.degree - 1, terms)
    return beta, None


def find_potential(phi: DifferentialForm) -> DifferentialForm | None:
    """beta with d(beta) = phi when [phi] = 0, else None; NotClosed otherwise."""
    beta, _ = potential_with_certificate(phi)
    return beta
