"""Infinitesimal deformations of D(A): the Atiyah bracket, twisted products
over the dual numbers, singular-extension witnesses, the comparison cocycles
c1 and c2, explicit trivializations, and infinitesimal automorphisms.

The deformed algebra is represented with the PBW split baked in: an element is
a pair (body, tangent) standing for body + t·tangent with t^2 = 0.  The
product normal-orders the body in the twisted relations: swapping d_j past
d_i with j > i introduces +t·omega(d_j, d_i), and every correction is pushed
into the tangent slot where the untwisted calculus applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .algebra import AlgebraElement
from .errors import (
    ExtensionAxiomFailure,
    NotADerivation,
    NotClosed,
    SpaceMismatch,
    TwistMismatch,
)
from .forms import (
    DerivationVector,
    DifferentialForm,
    apply_derivation,
    is_closed,
    lie_bracket,
    potential_with_certificate,
)
from .hochschild import Cochain, Derivation
from .operators import (
    DiffOperator,
    Filtration,
    OpKey,
    _iter_derivatives,
    key_letters,
    letter_operator,
    multiply,
    op_basis_keys,
)
from .spaces import SpaceSpec


@dataclass(frozen=True)
class AtiyahElement:
    """(f, v) in the Atiyah algebra O + T twisted by a closed 2-form."""

    space: SpaceSpec
    function_part: AlgebraElement
    vector_part: DerivationVector
    twist: DifferentialForm

    @staticmethod
    def make(space, f, v, twist) -> "AtiyahElement":
        if f.space != space or v.space != space or twist.space != space:
            raise SpaceMismatch("all parts must share the space")
        if twist.degree != 2 or not is_closed(twist):
            raise NotClosed("twist must be a closed 2-form")
        return AtiyahElement(space, f, v, twist)


def atiyah_bracket(a: AtiyahElement, b: AtiyahElement) -> AtiyahElement:
    """[(f,v),(g,w)] = (v(g) - w(f) + omega(v,w), [v,w])."""
    if a.space != b.space:
        raise SpaceMismatch("bracket needs a common space")
    if a.twist != b.twist:
        raise TwistMismatch("bracket needs a common twist")
    f_part = (
        apply_derivation(a.vector_part, b.function_part)
        - apply_derivation(b.vector_part, a.function_part)
        + a.twist.evaluate2(a.vector_part, b.vector_part)
    )
    return AtiyahElement.make(a.space, f_part, lie_bracket(a.vector_part, b.vector_part), a.twist)


@dataclass(frozen=True)
class DeformedOperator:
    """body + t·tangent in the deformation D_{t omega}."""

    space: SpaceSpec
    twist: DifferentialForm
    body: DiffOperator
    tangent: DiffOperator

    @staticmethod
    def make(space, twist, body, tangent) -> "DeformedOperator":
        if body.space != space or tangent.space != space or twist.space != space:
            raise SpaceMismatch("parts over different spaces")
        if twist.degree != 2 or not is_closed(twist):
            raise NotClosed("twist must be a closed 2-form")
        return DeformedOperator(space, twist, body, tangent)

    @staticmethod
    def lift(op: DiffOperator, twist: DifferentialForm) -> "DeformedOperator":
        """The PBW section rho: u -> u + t·0."""
        return DeformedOperator.make(op.space, twist, op, DiffOperator.zero(op.space))

    def __add__(self, other: "DeformedOperator") -> "DeformedOperator":
        self._compat(other)
        return DeformedOperator(self.space, self.twist, self.body + other.body, self.tangent + other.tangent)

    def __sub__(self, other: "DeformedOperator") -> "DeformedOperator":
        self._compat(other)
        return DeformedOperator(self.space, self.twist, self.body - other.body, self.tangent - other.tangent)

    def scale(self, c) -> "DeformedOperator":
        return DeformedOperator(self.space, self.twist, self.body.scale(c), self.tangent.scale(c))

    @property
    def is_zero(self) -> bool:
        return self.body.is_zero and self.tangent.is_zero

    def _compat(self, other):
        if self.space != other.space:
            raise SpaceMismatch("operands over different spaces")
        if self.twist != other.twist:
            raise TwistMismatch("operands over different twists")


class _TwistContext:
    """Memoized tangent corrections for right multiplication by one d_i."""

    def __init__(self, space: SpaceSpec, twist: DifferentialForm):
        self.space = space
        self.twist = twist
        self.omega_fn: dict[tuple[int, int], AlgebraElement] = {}
        self.tang_cache: dict = {}

    def omega(self, j: int, i: int) -> AlgebraElement:
        if (j, i) not in self.omega_fn:
            vj = DerivationVector.coordinate(self.space, j)
            vi = DerivationVector.coordinate(self.space, i)
            self.omega_fn[(j, i)] = self.twist.evaluate2(vj, vi)
        return self.omega_fn[(j, i)]

    def tangent_of_d_append(self, mu: tuple[int, ...], i: int) -> DiffOperator:
        """t-part of d^mu · d_i: each swap past d_j (j > i) yields omega(d_j, d_i)."""
        key = (mu, i)
        if key in self.tang_cache:
            return self.tang_cache[key]
        space = self.space
        j = max((k for k in range(len(mu)) if mu[k] > 0 and k > i), default=None)
        if j is None:
            out = DiffOperator.zero(space)
        else:
            mu_less = mu[:j] + (mu[j] - 1,) + mu[j + 1:]
            inner = self.tangent_of_d_append(mu_less, i)
            out = multiply(inner, DiffOperator.partial(space, j))
            correction = multiply(
                DiffOperator.make(space, {mu_less: AlgebraElement.one(space)}),
                DiffOperator.from_coefficient(self.omega(j, i)),
            )
            out = out + correction
        self.tang_cache[key] = out
        return out


_context_cache: dict = {}


def _twist_context(space: SpaceSpec, twist: DifferentialForm) -> _TwistContext:
    key = (space, twist)
    if key not in _context_cache:
        _context_cache[key] = _TwistContext(space, twist)
    return _context_cache[key]


def product_correction(space: SpaceSpec, twist: DifferentialForm, u: DiffOperator, v: DiffOperator) -> DiffOperator:
    """The t-part of rho(u)·rho(v) - rho(uv): the structural 2-cocycle values."""
    ctx = _twist_context(space, twist)
    r = space.num_vars
    out = DiffOperator.zero(space)
    for beta, a in u.terms:
        for gamma, b in v.terms:
            for kappa, db in _iter_derivatives(b, beta):
                coeff = 1
                for i in range(r):
                    coeff *= comb(beta[i], kappa[i])
                mid = (a * db).scale(coeff)
                if mid.is_zero:
                    continue
                mu = tuple(beta[i] - kappa[i] for i in range(r))
                coeff_op = DiffOperator.from_coefficient(mid)
                tang = DiffOperator.zero(space)
                body_exp = mu
                for i in range(r):
                    for _ in range(gamma[i]):
                        tang = multiply(tang, DiffOperator.partial(space, i))
                        tang = tang + multiply(coeff_op, ctx.tangent_of_d_append(body_exp, i))
                        body_exp = body_exp[:i] + (body_exp[i] + 1,) + body_exp[i + 1:]
                out = out + tang
    return out


def deformed_multiply(a: DeformedOperator, b: DeformedOperator) -> DeformedOperator:
    """The product of D_{t omega} in the PBW split, exact over K[t]/t^2."""
    a._compat(b)
    body = multiply(a.body, b.body)
    tangent = (
        multiply(a.body, b.tangent)
        + multiply(a.tangent, b.body)
        + product_correction(a.space, a.twist, a.body, b.body)
    )
    return DeformedOperator(a.space, a.twist, body, tangent)


# -- singular extensions ----------------------------------------------------------

@dataclass
class SingularExtensionWitness:
    """sigma, rho, iota of the extension 0 -> tD -> D_{t omega} -> D -> 0,
    together with the bound on which the axioms were verified."""

    space: SpaceSpec
    twist: DifferentialForm
    bound: Filtration
    checked_axioms: tuple[str, ...]

    def sigma(self, el: DeformedOperator) -> DiffOperator:
        return el.body

    def rho(self, op: DiffOperator) -> DeformedOperator:
        return DeformedOperator.lift(op, self.twist)

    def iota(self, op: DiffOperator) -> DeformedOperator:
        return DeformedOperator.make(self.space, self.twist, DiffOperator.zero(self.space), op)


def _spanning_keys(space: SpaceSpec, bound: Filtration, cap: int = 24) -> list[OpKey]:
    keys = op_basis_keys(space, bound)
    if len(keys) <= cap:
        return keys
    step = max(1, len(keys) // cap)
    picked = keys[::step][:cap]
    for key in (op_basis_keys(space, Filtration(1, 1))):
        if key not in picked:
            picked.append(key)
    return picked


def _assoc_span(space: SpaceSpec) -> list[OpKey]:
    """Pure d-monomials to order 2 plus mixed first-order monomials."""
    picked = []
    for key in op_basis_keys(space, Filtration(2, 0)):
        if key not in picked:
            picked.append(key)
    for key in op_basis_keys(space, Filtration(1, 1)):
        if key not in picked:
            picked.append(key)
    return picked


def _check_extension_axioms(space, twist, bound, product_fn) -> tuple[str, ...]:
    """Run the singular-extension axioms against an injected product."""
    keys = op_basis_keys(space, bound)
    span = _spanning_keys(space, bound)
    ops = {k: DiffOperator.from_op_key(space, k) for k in keys}
    zero = DiffOperator.zero(space)

    def lift(u):
        return DeformedOperator.make(space, twist, u, zero)

    def tpart(u):
        return DeformedOperator.make(space, twist, zero, u)

    for k in keys:
        if product_fn(lift(ops[k]), lift(DiffOperator.identity(space))).body != ops[k]:
            raise ExtensionAxiomFailure(f"sigma∘rho != id at {k}")
    for k1 in span:
        for k2 in span:
            p = product_fn(lift(ops[k1]), lift(ops[k2]))
            if p.body != multiply(ops[k1], ops[k2]):
                raise ExtensionAxiomFailure(f"sigma not multiplicative at ({k1},{k2})")
            if not product_fn(tpart(ops[k1]), tpart(ops[k2])).is_zero:
                raise ExtensionAxiomFailure(f"ideal not square-zero at ({k1},{k2})")
            left = product_fn(lift(ops[k1]), tpart(ops[k2]))
            if left.body != zero or left.tangent != multiply(ops[k1], ops[k2]):
                raise ExtensionAxiomFailure(f"bimodule structure twisted at ({k1},{k2})")
    small = _assoc_span(space)
    for k1 in small:
        for k2 in small:
            for k3 in small:
                lhs = product_fn(product_fn(lift(ops[k1]), lift(ops[k2])), lift(ops[k3]))
                rhs = product_fn(lift(ops[k1]), product_fn(lift(ops[k2]), lift(ops[k3])))
                if not (lhs - rhs).is_zero:
                    raise ExtensionAxiomFailure(f"associativity fails at ({k1},{k2},{k3})")
    return ("sigma-rho-id", "sigma-multiplicative", "square-zero-ideal", "bimodule-untwisted", "associativity")


def verify_singular_extension(space: SpaceSpec, omega: DifferentialForm, bound: Filtration) -> SingularExtensionWitness:
    """Construct and check the witness for 0 -> tD -> D_{t omega} -> D -> 0."""
    flat = space.flatten()
    if flat is None:
        from .errors import UnsupportedSpace

        raise UnsupportedSpace("extension verification needs a flattenable space")
    if omega.degree != 2 or not is_closed(omega):
        raise NotClosed("twist must be a closed 2-form")
    axioms = _check_extension_axioms(flat, omega, bound, deformed_multiply)
    return SingularExtensionWitness(flat, omega, bound, axioms)


def extension_cocycle(witness: SingularExtensionWitness, bound: Filtration) -> Cochain:
    """The 2-cochain (a,b) -> rho(a)rho(b) - rho(ab), tabulated within bound."""
    space = witness.space
    keys = op_basis_keys(space, bound)
    values = {}
    for k1 in keys:
        for k2 in keys:
            val = product_correction(
                space, witness.twist, DiffOperator.from_op_key(space, k1), DiffOperator.from_op_key(space, k2)
            )
            if not val.is_zero:
                values[(k1, k2)] = val
    return Cochain.tabulated(space, 2, bound, values)


def c2_cocycle(space: SpaceSpec, omega: DifferentialForm, bound: Filtration) -> Cochain:
    """The structural comparison 2-cocycle c2(omega) through the PBW split."""
    flat = space.flatten()
    if flat is None:
        from .errors import UnsupportedSpace

        raise UnsupportedSpace("c2 needs a flattenable space")
    if omega.degree != 2 or not is_closed(omega):
        raise NotClosed("c2 needs a closed 2-form")

    def rule(a, b):
        return product_correction(flat, omega, a, b)

    return Cochain.structural(flat, 2, rule)


# -- trivializations and automorphisms ---------------------------------------------

@dataclass
class EquivalenceMap:
    """x + ty -> x + t(eta(x) + y), with eta tabulated on generator letters."""

    space: SpaceSpec
    source_twist: DifferentialForm
    eta_letter: dict
    _eta_cache: dict

    def eta(self, op: DiffOperator) -> DiffOperator:
        out = DiffOperator.zero(self.space)
        for key, c in op.decompose().items():
            out = out + self._eta_key(key).scale(c)
        return out

    def _eta_key(self, key: OpKey) -> DiffOperator:
        if key not in self._eta_cache:
            letters = key_letters(self.space, key)
            body = DiffOperator.identity(self.space)
            tang = DiffOperator.zero(self.space)
            for letter in letters:
                lop = letter_operator(self.space, letter)
                leta = self.eta_letter.get(letter, DiffOperator.zero(self.space))
                tang = multiply(tang, lop) + multiply(body, leta)
                body = multiply(body, lop)
            self._eta_cache[key] = tang
        return self._eta_cache[key]

    def apply(self, el: DeformedOperator) -> DeformedOperator:
        zero_twist = DifferentialForm.zero(self.space, 2)
        return DeformedOperator.make(
            self.space, zero_twist, el.body, self.eta(el.body) + el.tangent
        )


@dataclass
class TrivializationOutcome:
    trivial: bool
    witness_potential: DifferentialForm | None = None
    equivalence: EquivalenceMap | None = None
    certificate: object | None = None


def trivialize_deformation(space: SpaceSpec, omega: DifferentialForm, bound: Filtration) -> TrivializationOutcome:
    """Trivialize D_{t omega} when [omega] = 0; certify nontriviality otherwise.

    The trivializing map sends L_v to L_v + t·beta(v) for a potential beta of
    omega; its multiplicativity within the bound is re-verified before the
    outcome is returned.
    """
    flat = space.flatten()
    if flat is None:
        from .errors import UnsupportedSpace

        raise UnsupportedSpace("trivialization needs a flattenable space")
    if omega.degree != 2 or not is_closed(omega):
        raise NotClosed("the twist must be a closed 2-form")
    beta, cert = potential_with_certificate(omega)
    if beta is None:
        return TrivializationOutcome(trivial=False, certificate=cert)
    eta_letter = {}
    coeffs = beta.coeff_dict()
    for i in range(flat.num_vars):
        bi = coeffs.get((i,))
        if bi is not None:
            eta_letter[('d', i)] = DiffOperator.from_coefficient(bi)
    eq = EquivalenceMap(flat, omega, eta_letter, {})
    _verify_equivalence(flat, omega, eq, bound)
    return TrivializationOutcome(trivial=True, witness_potential=beta, equivalence=eq)


def _verify_equivalence(space, omega, eq: EquivalenceMap, bound: Filtration):
    span = _spanning_keys(space, bound)
    zero_twist = DifferentialForm.zero(space, 2)
    for k1 in span:
        for k2 in span:
            a = DeformedOperator.lift(DiffOperator.from_op_key(space, k1), omega)
            b = DeformedOperator.lift(DiffOperator.from_op_key(space, k2), omega)
            lhs = eq.apply(deformed_multiply(a, b))
            rhs = deformed_multiply(eq.apply(a), eq.apply(b))
            if not (lhs - rhs).is_zero:
                raise ExtensionAxiomFailure(
                    f"trivializing map not multiplicative at ({k1},{k2})"
                )


def derivation_to_automorphism(d: Derivation, bound: Filtration) -> EquivalenceMap:
    """phi_d(x + ty) = x + t(d(x) + y) on the trivial extension."""
    space = d.space
    imgs = d.image_dict()
    eta_letter: dict = {}
    for g, op in imgs.items():
        eta_letter[g] = op
    x_imgs = {i: imgs[('x', i)] for i in range(space.num_vars)}
    for i in range(space.num_vars):
        if i in space.laurent:
            inv = DiffOperator.coordinate(space, i, -1)
            eta_letter[('xinv', i)] = multiply(multiply(inv, x_imgs[i]), inv).scale(-1)
    if d.d_f_inverse is not None:
        eta_letter[('finv', 0)] = d.d_f_inverse
    eq = EquivalenceMap(space, DifferentialForm.zero(space, 2), eta_letter, {})
    zero_twist = DifferentialForm.zero(space, 2)
    span = _spanning_keys(space, bound)
    for k1 in span:
        for k2 in span:
            a = DeformedOperator.lift(DiffOperator.from_op_key(space, k1), zero_twist)
            b = DeformedOperator.lift(DiffOperator.from_op_key(space, k2), zero_twist)
            lhs = eq.apply(deformed_multiply(a, b))
            rhs = deformed_multiply(eq.apply(a), eq.apply(b))
            if not (lhs - rhs).is_zero:
                raise NotADerivation(f"phi_d not multiplicative at ({k1},{k2})")
    return eq
