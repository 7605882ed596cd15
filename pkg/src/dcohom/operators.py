"""The algebra D(A) of differential operators in PBW normal form.

An operator is a finite sum a_beta(x) d^beta with coefficients on the left.
Products are normal-ordered through the closed Leibniz rule

    d^beta . b(x) = sum_kappa binom(beta, kappa) (d^kappa b) d^(beta-kappa),

the batched form of the rewriting step d.a = a.d + da.  Also here: the
filtration bookkeeping, PBW basis enumeration per space, the truncated center
computation, and the monomial-by-monomial commutator reduction behind
HH_0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .algebra import AlgebraElement, coeff_basis_keys, coeff_key_degree
from .errors import CenterAnomaly, ReductionFailure, SpaceMismatch, UnsupportedSpace
from .linalg import Subspace, kernel_vectors_blocked
from .spaces import SpaceSpec

Beta = tuple[int, ...]
OpKey = tuple  # (coefficient basis key, beta)


@dataclass(frozen=True)
class Filtration:
    """Truncation bound: total d-degree and coefficient filtration degree."""

    op_order: int
    coeff_degree: int

    def shifted(self, k: int) -> "Filtration":
        return Filtration(self.op_order + k, self.coeff_degree + k)

    def admits(self, other: "Filtration") -> bool:
        return other.op_order <= self.op_order and other.coeff_degree <= self.coeff_degree


@dataclass(frozen=True)
class DiffOperator:
    """Canonical PBW form: map from d-exponent beta to a nonzero coefficient."""

    space: SpaceSpec
    terms: tuple[tuple[Beta, AlgebraElement], ...]

    @staticmethod
    def make(space: SpaceSpec, terms: dict) -> "DiffOperator":
        if not space.is_atomic:
            raise UnsupportedSpace("operators live over atomic spaces")
        clean: dict[Beta, AlgebraElement] = {}
        for beta, a in terms.items():
            beta = tuple(beta)
            if len(beta) != space.num_vars or any(b < 0 for b in beta):
                raise ValueError(f"invalid d-exponent {beta}")
            if a.space != space:
                raise SpaceMismatch("coefficient over a different space")
            if not a.is_zero:
                cur = clean.get(beta)
                clean[beta] = a if cur is None else cur + a
        clean = {b: a for b, a in clean.items() if not a.is_zero}
        return DiffOperator(space, tuple(sorted(clean.items())))

    @staticmethod
    def zero(space: SpaceSpec) -> "DiffOperator":
        return DiffOperator.make(space, {})

    @staticmethod
    def identity(space: SpaceSpec) -> "DiffOperator":
        return DiffOperator.from_scalar(space, 1)

    @staticmethod
    def from_scalar(space: SpaceSpec, c) -> "DiffOperator":
        return DiffOperator.make(
            space, {(0,) * space.num_vars: AlgebraElement.constant(space, Fraction(c))}
        )

    @staticmethod
    def from_coefficient(a: AlgebraElement) -> "DiffOperator":
        return DiffOperator.make(a.space, {(0,) * a.space.num_vars: a})

    @staticmethod
    def coordinate(space: SpaceSpec, i: int, power: int = 1) -> "DiffOperator":
        return DiffOperator.from_coefficient(AlgebraElement.coordinate(space, i, power))

    @staticmethod
    def partial(space: SpaceSpec, i: int, power: int = 1) -> "DiffOperator":
        beta = [0] * space.num_vars
        beta[i] = power
        return DiffOperator.make(
            space, {tuple(beta): AlgebraElement.one(space)}
        )

    @staticmethod
    def from_op_key(space: SpaceSpec, key: OpKey, coeff=Fraction(1)) -> "DiffOperator":
        ck, beta = key
        return DiffOperator.make(space, {beta: AlgebraElement.from_coeff_key(space, ck, coeff)})

    def term_dict(self) -> dict[Beta, AlgebraElement]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        zero = (0,) * self.space.num_vars
        if len(self.terms) == 1 and self.terms[0][0] == zero:
            return self.terms[0][1].constant_value()
        return None

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        self._same_space(other)
        merged = self.term_dict()
        for b, a in other.terms:
            merged[b] = merged.get(b, AlgebraElement.zero(self.space)) + a
        return DiffOperator.make(self.space, merged)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(self.space, tuple((b, -a) for b, a in self.terms))

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scale(self, c) -> "DiffOperator":
        c = Fraction(c)
        if not c:
            return DiffOperator.zero(self.space)
        return DiffOperator(self.space, tuple((b, a.scale(c)) for b, a in self.terms))

    def _same_space(self, other: "DiffOperator"):
        if self.space != other.space:
            raise SpaceMismatch("operators over different spaces")

    def decompose(self) -> dict[OpKey, Fraction]:
        out: dict[OpKey, Fraction] = {}
        for beta, a in self.terms:
            for ck, c in a.decompose().items():
                out[(ck, beta)] = out.get((ck, beta), Fraction(0)) + c
        return {k: v for k, v in out.items() if v}

    def filtration(self) -> Filtration:
        if not self.terms:
            return Filtration(0, 0)
        return Filtration(
            max(sum(b) for b, _ in self.terms),
            max(a.coeff_degree() for _, a in self.terms),
        )


def multiply(u: DiffOperator, v: DiffOperator) -> DiffOperator:
    """PBW normal form of u·v (associative, unit preserving)."""
    u._same_space(v)
    space = u.space
    r = space.num_vars
    out: dict[Beta, AlgebraElement] = {}
    for beta, a in u.terms:
        for gamma, b in v.terms:
            for kappa, db in _iter_derivatives(b, beta):
                coeff = 1
                for i in range(r):
                    coeff *= comb(beta[i], kappa[i])
                target = tuple(beta[i] - kappa[i] + gamma[i] for i in range(r))
                term = (a * db).scale(coeff)
                cur = out.get(target)
                out[target] = term if cur is None else cur + term
    return DiffOperator.make(space, out)


def _iter_derivatives(b: AlgebraElement, beta: Beta):
    """(kappa, d^kappa b) for kappa <= beta with nonzero derivative."""
    frontier = {(0,) * len(beta): b}
    while frontier:
        yield from frontier.items()
        nxt: dict[Beta, AlgebraElement] = {}
        for kappa, el in frontier.items():
            for i in range(len(beta)):
                if kappa[i] < beta[i]:
                    nk = kappa[:i] + (kappa[i] + 1,) + kappa[i + 1:]
                    if nk not in nxt:
                        d = el.derivative(i)
                        if not d.is_zero:
                            nxt[nk] = d
        frontier = nxt


def commutator(u: DiffOperator, v: DiffOperator) -> DiffOperator:
    """uv - vu in normal form."""
    return multiply(u, v) - multiply(v, u)


# -- PBW basis bookkeeping ----------------------------------------------------

def beta_tuples(r: int, max_total: int) -> list[Beta]:
    out = []

    def rec(i, budget, prefix):
        if i == r:
            out.append(tuple(prefix))
            return
        for e in range(budget + 1):
            prefix.append(e)
            rec(i + 1, budget - e, prefix)
            prefix.pop()

    rec(0, max_total, [])
    return out


def op_basis_keys(space: SpaceSpec, bound: Filtration) -> list[OpKey]:
    """PBW basis monomials within the filtration bound, in a stable order."""
    cks = coeff_basis_keys(space, bound.coeff_degree)
    betas = beta_tuples(space.num_vars, bound.op_order)
    return [(ck, beta) for ck in sorted(cks) for beta in betas]


def op_key_weight(space: SpaceSpec, key: OpKey):
    """Conserved multidegree alpha - beta; None for localized spaces."""
    if space.denominator is not None:
        return None
    ck, beta = key
    return tuple(a - b for a, b in zip(ck, beta))


def op_key_within(space: SpaceSpec, key: OpKey, bound: Filtration) -> bool:
    ck, beta = key
    return sum(beta) <= bound.op_order and coeff_key_degree(space, ck) <= bound.coeff_degree


GENERATORS_X = 'x'
GENERATORS_D = 'd'


def generator_op(space: SpaceSpec, kind: str, i: int) -> DiffOperator:
    return DiffOperator.coordinate(space, i) if kind == GENERATORS_X else DiffOperator.partial(space, i)


def ad_on_key(space: SpaceSpec, kind: str, i: int, key: OpKey) -> dict[OpKey, Fraction]:
    """[gen, m] for a PBW basis monomial m, as sparse basis coordinates.

    Values are small ints on monomial spaces (kept as int for speed) and
    Fractions on localized spaces.
    """
    ck, beta = key
    if kind == GENERATORS_X:
        if beta[i] == 0:
            return {}
        nb = beta[:i] + (beta[i] - 1,) + beta[i + 1:]
        return {(ck, nb): -beta[i]}
    if space.denominator is None:
        if ck[i] == 0:
            return {}
        nc = ck[:i] + (ck[i] - 1,) + ck[i + 1:]
        return {(nc, beta): ck[i]}
    d = AlgebraElement.from_coeff_key(space, ck).derivative(i)
    return {(nck, beta): c for nck, c in d.decompose().items()}


def center_truncated(space: SpaceSpec, bound: Filtration) -> Subspace:
    """Basis of {z within bound : [z, x_i] = [z, d_i] = 0 for all i}.

    For connected catalog spaces the result must be span{1}; anything larger
    raises CenterAnomaly rather than being reported as a discovery.
    """
    if not space.is_atomic:
        space = _flat_or_raise(space)
    keys = op_basis_keys(space, bound)
    r = space.num_vars
    columns = []
    for key in keys:
        col: dict = {}
        for kind in (GENERATORS_X, GENERATORS_D):
            for i in range(r):
                for out_key, c in ad_on_key(space, kind, i, key).items():
                    col[(kind, i, out_key)] = c
        columns.append(col)
    weights = [op_key_weight(space, k) for k in keys]
    kernel = kernel_vectors_blocked(columns, weights)
    unit_index = keys.index(_unit_key(space))
    if len(kernel) != 1 or set(kernel[0]) != {unit_index}:
        raise CenterAnomaly(
            f"center within {bound} has dimension {len(kernel)}, expected span{{1}}"
        )
    return Subspace(len(keys), kernel)


def center_operators(space: SpaceSpec, bound: Filtration) -> list[DiffOperator]:
    flat = space if space.is_atomic else _flat_or_raise(space)
    sub = center_truncated(flat, bound)
    keys = op_basis_keys(flat, bound)
    return [operator_from_coords(flat, keys, vec) for vec in sub.basis]


def operator_from_coords(space: SpaceSpec, keys: list[OpKey], vec: dict[int, Fraction]) -> DiffOperator:
    out = DiffOperator.zero(space)
    for idx, c in vec.items():
        out = out + DiffOperator.from_op_key(space, keys[idx], c)
    return out


def _unit_key(space: SpaceSpec) -> OpKey:
    beta = (0,) * space.num_vars
    if space.denominator is None:
        return (beta, beta)
    return (('x', 0), beta)


def _flat_or_raise(space: SpaceSpec) -> SpaceSpec:
    flat = space.flatten()
    if flat is None:
        raise UnsupportedSpace("space does not flatten to an atomic catalog entry")
    return flat


def key_letters(space: SpaceSpec, key: OpKey) -> list[tuple[str, int]]:
    """Factor a PBW basis monomial into generator letters.

    Letters are ('x', i), ('xinv', i), ('d', i) and ('finv', 0); the product
    of the letters in order reproduces the monomial.
    """
    ck, beta = key
    letters: list[tuple[str, int]] = []
    if space.denominator is None:
        for i, a in enumerate(ck):
            letters.extend([('x', i)] * a if a > 0 else [('xinv', i)] * (-a))
    elif ck[0] == 'x':
        letters.extend([('x', 0)] * ck[1])
    else:
        _, j, k = ck
        letters.extend([('x', 0)] * j)
        letters.extend([('finv', 0)] * k)
    for i, b in enumerate(beta):
        letters.extend([('d', i)] * b)
    return letters


def letter_operator(space: SpaceSpec, letter: tuple[str, int]) -> DiffOperator:
    kind, i = letter
    if kind == 'x':
        return DiffOperator.coordinate(space, i)
    if kind == 'xinv':
        return DiffOperator.coordinate(space, i, -1)
    if kind == 'd':
        return DiffOperator.partial(space, i)
    return DiffOperator.from_coefficient(AlgebraElement.inverse_denominator(space))


def commutator_reduction(u: DiffOperator) -> list[tuple[DiffOperator, DiffOperator]]:
    """Write u as a sum of commutators, one pair per PBW monomial.

    x^a d^b with a_i != -1 uses [d_i, x^(a+e_i) d^b] = (a_i+1) x^a d^b; the
    all-minus-one Laurent corner uses [x_i, x^a d^(b+e_i)] = -(b_i+1) x^a d^b.
    Only polynomial/torus atomic spaces are supported.
    """
    space = u.space
    if space.denominator is not None:
        raise UnsupportedSpace("commutator reduction needs a polynomial or torus space")
    r = space.num_vars
    pairs: list[tuple[DiffOperator, DiffOperator]] = []
    for (alpha, beta), c in sorted(u.decompose().items()):
        i = next((j for j in range(r) if alpha[j] != -1), None)
        if i is not None:
            na = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1:]
            q = DiffOperator.from_op_key(space, (na, beta), Fraction(c, alpha[i] + 1))
            pairs.append((DiffOperator.partial(space, i), q))
        else:
            i = 0
            nb = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
            q = DiffOperator.from_op_key(space, (alpha, nb), Fraction(-c, beta[i] + 1))
            pairs.append((DiffOperator.coordinate(space, i), q))
    total = DiffOperator.zero(space)
    for p, q in pairs:
        total = total + commutator(p, q)
    if total != u:
        raise ReductionFailure("reduction did not re-evaluate to its input")
    return pairs
