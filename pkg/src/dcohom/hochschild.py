"""Bar-complex machinery: cochains and chains with their differentials, the
cyclic and Connes operators, cup products, the derivation solver behind the
outer-derivation count, and noncommutative 1-forms.

Chains store tuples with the module slot last, matching the homology
differential's displayed formula.  The cyclic operator acts literally on the
stored tensor factors; the Connes operator conjugates by the rotation that
moves the module slot first, which is what makes it a chain map against this
differential (verified by the anticommutation property tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import AlgebraElement
from .errors import (
    BoundExceeded,
    NotADerivation,
    NotClosed,
    NotStabilized,
    SpaceMismatch,
    UndefinedClass,
)
from .forms import DifferentialForm, is_closed
from .linalg import Subspace, kernel_vectors_blocked, rank_increment
from .operators import (
    DiffOperator,
    Filtration,
    OpKey,
    ad_on_key,
    key_letters,
    letter_operator,
    multiply,
    op_basis_keys,
    op_key_weight,
    op_key_within,
)
from .spaces import SpaceSpec

_prod_cache: dict = {}


def _key_product(space: SpaceSpec, k1: OpKey, k2: OpKey) -> dict[OpKey, Fraction]:
    ck = (space, k1, k2)
    if ck not in _prod_cache:
        _prod_cache[ck] = multiply(
            DiffOperator.from_op_key(space, k1), DiffOperator.from_op_key(space, k2)
        ).decompose()
    return _prod_cache[ck]


def _unit_key(space: SpaceSpec) -> OpKey:
    beta = (0,) * space.num_vars
    return (beta, beta) if space.denominator is None else (('x', 0), beta)


# -- chains ---------------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    """Degree-n element of the bar chain complex: sums of (n+1)-tuples.

    Terms are stored multilinearly expanded over PBW basis keys.
    """

    space: SpaceSpec
    degree: int
    terms: tuple[tuple[tuple[OpKey, ...], Fraction], ...]

    @staticmethod
    def make(space: SpaceSpec, degree: int, terms: dict) -> "Chain":
        clean: dict = {}
        for tup, c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            if len(tup) != degree + 1:
                raise ValueError(f"tuple length {len(tup)} != degree+1 = {degree + 1}")
            clean[tup] = clean.get(tup, Fraction(0)) + c
        clean = {t: c for t, c in clean.items() if c}
        return Chain(space, degree, tuple(sorted(clean.items())))

    @staticmethod
    def from_operators(space: SpaceSpec, degree: int, items) -> "Chain":
        """items: iterable of (tuple of DiffOperators, coefficient)."""
        out: dict = {}
        for ops, c in items:
            c = Fraction(c)
            if len(ops) != degree + 1:
                raise ValueError("operator tuple length must be degree+1")
            expansions = [op.decompose() for op in ops]
            partial = [((), c)]
            for dec in expansions:
                partial = [
                    (prefix + (k,), pc * kc)
                    for prefix, pc in partial
                    for k, kc in dec.items()
                ]
            for tup, pc in partial:
                out[tup] = out.get(tup, Fraction(0)) + pc
        return Chain.make(space, degree, out)

    @staticmethod
    def zero(space: SpaceSpec, degree: int) -> "Chain":
        return Chain.make(space, degree, {})

    def term_dict(self):
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Chain") -> "Chain":
        if self.space != other.space or self.degree != other.degree:
            raise SpaceMismatch("chains of different space or degree")
        merged = self.term_dict()
        for t, c in other.terms:
            merged[t] = merged.get(t, Fraction(0)) + c
        return Chain.make(self.space, self.degree, merged)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def scale(self, c) -> "Chain":
        return Chain.make(self.space, self.degree, {t: v * Fraction(c) for t, v in self.terms})


def delta_chain(c: Chain) -> Chain:
    """The homology differential; degree-0 chains map to zero."""
    if c.degree == 0:
        return Chain.zero(c.space, 0)
    n = c.degree
    space = c.space
    out: dict = {}

    def emit(prefix, products, suffix, sign, coeff):
        for k, kc in products.items():
            tup = prefix + (k,) + suffix
            v = out.get(tup, Fraction(0)) + sign * coeff * kc
            if v:
                out[tup] = v
            elif tup in out:
                del out[tup]

    for tup, coeff in c.terms:
        # a_2 x ... x a_n x (m a_1)
        emit(tup[1:n], _key_product(space, tup[n], tup[0]), (), 1, coeff)
        for i in range(1, n):
            emit(
                tup[: i - 1],
                _key_product(space, tup[i - 1], tup[i]),
                tup[i + 1:],
                (-1) ** i,
                coeff,
            )
        emit(tup[: n - 1], _key_product(space, tup[n - 1], tup[n]), (), (-1) ** n, coeff)
    return Chain.make(space, n - 1, out)


def cyclic_operator(c: Chain) -> Chain:
    """t_n: signed cyclic permutation of the stored tensor factors."""
    n = c.degree
    sign = (-1) ** n
    return Chain.make(
        c.space, n, {(t[-1],) + t[:-1]: sign * v for t, v in c.terms}
    )


def norm_operator(c: Chain) -> Chain:
    """N_n = 1 + t_n + ... + t_n^n."""
    out = c
    cur = c
    for _ in range(c.degree):
        cur = cyclic_operator(cur)
        out = out + cur
    return out


def _prepend_unit(c: Chain) -> Chain:
    u = _unit_key(c.space)
    return Chain.make(c.space, c.degree + 1, {(u,) + t: v for t, v in c.terms})


def _to_module_first(c: Chain) -> Chain:
    return Chain.make(c.space, c.degree, {(t[-1],) + t[:-1]: v for t, v in c.terms})


def _to_module_last(c: Chain) -> Chain:
    return Chain.make(c.space, c.degree, {t[1:] + (t[0],): v for t, v in c.terms})


def connes_B(c: Chain) -> Chain:
    """B = (1 - t) s N, computed in the module-first presentation.

    The chain differential is displayed for module-last tuples; rotating the
    module slot to the front, applying (1 - t_{n+1}) s_n N_n literally, and
    rotating back is what makes B^2 = 0 and the anticommutation with the
    differential exact identities.
    """
    mf = _to_module_first(c)
    n = mf.degree
    s = _prepend_unit(norm_operator(mf))
    out = s - cyclic_operator(s)
    return _to_module_last(out)


# -- cochains -------------------------------------------------------------------

@dataclass(frozen=True)
class Cochain:
    """Multilinear rule on n-tuples of operators.

    Either tabulated on PBW basis tuples inside ``bound`` (evaluation outside
    the bound raises BoundExceeded) or structural through ``rule``.
    """

    space: SpaceSpec
    arity: int
    rule: Callable | None = None
    table: tuple | None = None
    bound: Filtration | None = None

    @staticmethod
    def structural(space: SpaceSpec, arity: int, rule: Callable) -> "Cochain":
        return Cochain(space, arity, rule=rule)

    @staticmethod
    def tabulated(space: SpaceSpec, arity: int, bound: Filtration, values: dict) -> "Cochain":
        table = tuple(sorted((k, v) for k, v in values.items() if not v.is_zero))
        return Cochain(space, arity, table=table, bound=bound)

    def table_dict(self) -> dict:
        return dict(self.table or ())

    def evaluate(self, ops: tuple[DiffOperator, ...]) -> DiffOperator:
        if len(ops) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(ops)}")
        if self.rule is not None:
            return self.rule(*ops)
        table = self.table_dict()
        out = DiffOperator.zero(self.space)
        partial = [((), Fraction(1))]
        for op in ops:
            dec = op.decompose()
            for key in dec:
                if not op_key_within(self.space, key, self.bound):
                    raise BoundExceeded(f"argument key {key} outside tabulation bound {self.bound}")
            partial = [
                (prefix + (k,), pc * kc) for prefix, pc in partial for k, kc in dec.items()
            ]
        for tup, pc in partial:
            val = table.get(tup)
            if val is not None:
                out = out + val.scale(pc)
        return out


def delta_cochain(c: Cochain) -> Cochain:
    """The bar-complex cochain differential, as a structural cochain."""
    n = c.arity

    def rule(*ops):
        out = multiply(ops[0], c.evaluate(ops[1:]))
        for i in range(1, n + 1):
            merged = ops[: i - 1] + (multiply(ops[i - 1], ops[i]),) + ops[i + 1:]
            out = out + c.evaluate(merged).scale((-1) ** i)
        out = out + multiply(c.evaluate(ops[:n]), ops[n]).scale((-1) ** (n + 1))
        return out

    return Cochain.structural(c.space, n + 1, rule)


def cup(f: Cochain, g: Cochain) -> Cochain:
    """(f cup g)(a_1..a_{m+n}) = f(a_1..a_m) g(a_{m+1}..a_{m+n})."""
    if f.space != g.space:
        raise SpaceMismatch("cup needs a common space")
    m = f.arity

    def rule(*ops):
        return multiply(f.evaluate(ops[:m]), g.evaluate(ops[m:]))

    return Cochain.structural(f.space, f.arity + g.arity, rule)


# -- derivations ------------------------------------------------------------------

GenLabel = tuple[str, int]  # ('x', i) or ('d', i)


def _gen_labels(space: SpaceSpec) -> list[GenLabel]:
    r = space.num_vars
    return [('x', i) for i in range(r)] + [('d', i) for i in range(r)]


def _gen_weight(space: SpaceSpec, g: GenLabel):
    if space.denominator is not None:
        return None
    w = [0] * space.num_vars
    w[g[1]] = 1 if g[0] == 'x' else -1
    return tuple(w)


@dataclass(frozen=True)
class Derivation:
    """A derivation of D(A) encoded by its images on the algebra generators.

    The linearized relation constraints are verified at construction; for
    localized spaces d(1/f) is forced by f·(1/f) = 1 and stored alongside.
    """

    space: SpaceSpec
    images: tuple[tuple[GenLabel, DiffOperator], ...]
    d_f_inverse: DiffOperator | None = None

    @staticmethod
    def make(space: SpaceSpec, images: dict, check: bool = True) -> "Derivation":
        imgs = {}
        for g in _gen_labels(space):
            op = images.get(g, DiffOperator.zero(space))
            if op.space != space:
                raise SpaceMismatch("image over a different space")
            imgs[g] = op
        d_f_inv = None
        if space.denominator is not None:
            d_f = _nc_polynomial_image(space, space.f_poly, imgs[('x', 0)])
            inv = DiffOperator.from_coefficient(AlgebraElement.inverse_denominator(space))
            d_f_inv = multiply(multiply(inv, d_f), inv).scale(-1)
        der = Derivation(space, tuple(sorted(imgs.items())), d_f_inv)
        if check:
            errs = der.constraint_defects()
            if any(not e.is_zero for e in errs):
                raise NotADerivation("generator images violate a linearized relation")
        return der

    def image_dict(self):
        return dict(self.images)

    def constraint_defects(self) -> list[DiffOperator]:
        """The linearized relation combinations; all must vanish."""
        space = self.space
        r = space.num_vars
        imgs = self.image_dict()
        out = []
        xs = [DiffOperator.coordinate(space, i) for i in range(r)]
        ds = [DiffOperator.partial(space, i) for i in range(r)]

        def comm(a, b):
            return multiply(a, b) - multiply(b, a)

        for i in range(r):
            for j in range(r):
                out.append(comm(imgs[('d', i)], xs[j]) + comm(ds[i], imgs[('x', j)]))
        for i in range(r):
            for j in range(i + 1, r):
                out.append(comm(imgs[('x', i)], xs[j]) + comm(xs[i], imgs[('x', j)]))
                out.append(comm(imgs[('d', i)], ds[j]) + comm(ds[i], imgs[('d', j)]))
        if self.d_f_inverse is not None:
            f_op = DiffOperator.from_coefficient(
                AlgebraElement.make(space, {(e,): c for e, c in space.f_poly.items()})
            )
            inv = DiffOperator.from_coefficient(AlgebraElement.inverse_denominator(space))
            d_f = _nc_polynomial_image(space, space.f_poly, self.image_dict()[('x', 0)])
            out.append(multiply(f_op, self.d_f_inverse) + multiply(d_f, inv))
        return out

    def apply(self, op: DiffOperator) -> DiffOperator:
        """Extend by the Leibniz rule along the PBW word of each monomial."""
        out = DiffOperator.zero(self.space)
        for key, c in op.decompose().items():
            out = out + self._apply_key(key).scale(c)
        return out

    def _apply_key(self, key: OpKey) -> DiffOperator:
        space = self.space
        letters = key_letters(space, key)
        imgs = self.image_dict()
        out = DiffOperator.zero(space)
        for pos in range(len(letters)):
            piece = None
            for q, letter in enumerate(letters):
                factor = self._letter_image(letter, imgs) if q == pos else letter_operator(space, letter)
                piece = factor if piece is None else multiply(piece, factor)
            if piece is not None:
                out = out + piece
        return out

    def _letter_image(self, letter, imgs):
        space = self.space
        kind, i = letter
        if kind == 'x':
            return imgs[('x', i)]
        if kind == 'd':
            return imgs[('d', i)]
        if kind == 'xinv':
            inv = DiffOperator.coordinate(space, i, -1)
            return multiply(multiply(inv, imgs[('x', i)]), inv).scale(-1)
        return self.d_f_inverse


def _nc_polynomial_image(space: SpaceSpec, poly, dx: DiffOperator) -> DiffOperator:
    """d(f(x_1)) for a univariate f via the noncommutative Leibniz rule."""
    x = DiffOperator.coordinate(space, 0)
    out = DiffOperator.zero(space)
    for e, c in poly.items():
        for pos in range(e):
            piece = DiffOperator.from_scalar(space, c)
            for q in range(e):
                piece = multiply(piece, dx if q == pos else x)
            out = out + piece
    return out


def inner_derivation(u: DiffOperator) -> Derivation:
    """ad(u): a -> [u, a], restricted to generator images."""
    space = u.space
    images = {}
    for g in _gen_labels(space):
        gen = letter_operator(space, g)
        images[g] = multiply(u, gen) - multiply(gen, u)
    return Derivation.make(space, images, check=False)


def solve_derivations(space: SpaceSpec, bound: Filtration):
    """(derivation space, inner span, outer dimension) at the given bound.

    Derivations are kernel vectors of the linearized relation constraints on
    generator images within ``bound``; inner derivations come from ad(u) with
    u one filtration level higher.  outer_dim must agree between ``bound``
    and ``bound+2`` or NotStabilized is raised.
    """
    flat = space.flatten()
    if flat is None:
        from .errors import UnsupportedSpace

        raise UnsupportedSpace("derivation solve needs a flattenable space")
    space = flat

    def stage(b: Filtration):
        gens = _gen_labels(space)
        keys = op_basis_keys(space, b)
        unknowns = [(g, k) for g in gens for k in keys]
        columns = []
        weights = []
        for g, k in unknowns:
            col: dict = {}
            _derivation_constraint_column(space, g, k, col)
            columns.append(col)
            wg = _gen_weight(space, g)
            wk = op_key_weight(space, k)
            weights.append(None if wg is None else tuple(a - b2 for a, b2 in zip(wk, wg)))
        der_vecs_idx = kernel_vectors_blocked(columns, weights)
        der_vecs = [
            {unknowns[j]: v for j, v in vec.items()} for vec in der_vecs_idx
        ]
        inner_vecs = []
        for u_key in op_basis_keys(space, b.shifted(1)):
            vec: dict = {}
            for g in gens:
                kind, i = g
                for out_key, c in ad_on_key(space, kind, i, u_key).items():
                    vec[(g, out_key)] = vec.get((g, out_key), 0) - c
            vec = {k: v for k, v in vec.items() if v}
            if vec:
                inner_vecs.append(vec)
        outer = rank_increment(inner_vecs, der_vecs)
        return unknowns, der_vecs, inner_vecs, outer

    unknowns, der_vecs, inner_vecs, outer = stage(bound)
    _, _, _, outer2 = stage(bound.shifted(2))
    if outer != outer2:
        raise NotStabilized(f"outer dimension did not stabilize: {outer} vs {outer2}")

    index = {u: j for j, u in enumerate(unknowns)}
    for vec in inner_vecs:
        for k in vec:
            index.setdefault(k, len(index))
    der_sub = Subspace(len(index), [{index[k]: Fraction(v) for k, v in vec.items()} for vec in der_vecs])
    inner_sub = Subspace(len(index), [{index[k]: Fraction(v) for k, v in vec.items()} for vec in inner_vecs])
    return der_sub, inner_sub, outer


def _derivation_constraint_column(space: SpaceSpec, g: GenLabel, key: OpKey, col: dict):
    """Contributions of one unknown (generator image coordinate) to all rows."""
    r = space.num_vars
    kind, idx = g

    def add(row, val):
        v = col.get(row, 0) + val
        if v:
            col[row] = v
        elif row in col:
            del col[row]

    if kind == 'd':
        # rows ('pdx', i=idx, j): [d(d_i), x_j] term = -[x_j, m]
        for j in range(r):
            for out_key, c in ad_on_key(space, 'x', j, key).items():
                add(('pdx', idx, j, out_key), -c)
        # rows ('dd', i, j): [d(d_i), d_j] for i<j, [d_i, d(d_j)] for i>j
        for j in range(idx + 1, r):
            for out_key, c in ad_on_key(space, 'd', j, key).items():
                add(('dd', idx, j, out_key), -c)
        for i in range(idx):
            for out_key, c in ad_on_key(space, 'd', i, key).items():
                add(('dd', i, idx, out_key), c)
    else:
        # rows ('pdx', i, j=idx): [d_i, d(x_j)] term
        for i in range(r):
            for out_key, c in ad_on_key(space, 'd', i, key).items():
                add(('pdx', i, idx, out_key), c)
        for j in range(idx + 1, r):
            for out_key, c in ad_on_key(space, 'x', j, key).items():
                add(('xx', idx, j, out_key), -c)
        for i in range(idx):
            for out_key, c in ad_on_key(space, 'x', i, key).items():
                add(('xx', i, idx, out_key), c)


def derivation_from_vector(space: SpaceSpec, unknown_index: list, vec: dict) -> Derivation:
    images: dict = {}
    for j, c in vec.items():
        g, key = unknown_index[j]
        images[g] = images.get(g, DiffOperator.zero(space)) + DiffOperator.from_op_key(space, key, c)
    return Derivation.make(space, images)


def c1_derivation(lam: DifferentialForm) -> Derivation:
    """The derivation with d(x_i) = 0 and d(d_i) = lambda(d_i), lambda closed."""
    if lam.degree != 1:
        raise ValueError("c1 needs a 1-form")
    if not is_closed(lam):
        raise NotClosed("c1 needs a closed 1-form")
    space = lam.space
    coeffs = lam.coeff_dict()
    images = {}
    for i in range(space.num_vars):
        a = coeffs.get((i,))
        if a is not None:
            images[('d', i)] = DiffOperator.from_coefficient(a)
    return Derivation.make(space, images)


def is_inner_within(d: Derivation, bound: Filtration) -> bool:
    """Whether d agrees with some ad(u), u within bound+1, on all generators."""
    space = d.space
    gens = _gen_labels(space)
    imgs = d.image_dict()
    target: dict = {}
    for g in gens:
        for key, c in imgs[g].decompose().items():
            target[(g, key)] = c
    inner_vecs = []
    for u_key in op_basis_keys(space, bound.shifted(1)):
        vec: dict = {}
        for g in gens:
            kind, i = g
            for out_key, c in ad_on_key(space, kind, i, u_key).items():
                vec[(g, out_key)] = vec.get((g, out_key), 0) - c
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            inner_vecs.append(vec)
    return rank_increment(inner_vecs, [target]) == 0 if target else True


def corepresent_derivation(d: Derivation, sample: list[DiffOperator]) -> bool:
    """Leibniz consistency of the induced bimodule map on all sample pairs."""
    for a in sample:
        for b in sample:
            lhs = d.apply(multiply(a, b))
            rhs = multiply(a, d.apply(b)) + multiply(d.apply(a), b)
            if lhs != rhs:
                return False
    return True


# -- noncommutative one-forms ----------------------------------------------------

@dataclass(frozen=True)
class NcOneForm:
    """Element of ker(A^e -> A) presented as a sum of u·d(v) with canonical
    tensor expansion sum u (x) v - uv (x) 1."""

    space: SpaceSpec
    tensor: tuple[tuple[tuple[OpKey, OpKey], Fraction], ...]

    @staticmethod
    def make(space: SpaceSpec, tensor: dict) -> "NcOneForm":
        clean = {k: Fraction(v) for k, v in tensor.items() if v}
        nc = NcOneForm(space, tuple(sorted(clean.items())))
        image = nc.multiplication_image()
        if any(image.values()):
            raise ValueError("tensor does not lie in the kernel of multiplication")
        return nc

    @staticmethod
    def from_pairs(space: SpaceSpec, pairs) -> "NcOneForm":
        unit = _unit_key(space)
        tensor: dict = {}

        def add(k1, k2, c):
            v = tensor.get((k1, k2), Fraction(0)) + c
            if v:
                tensor[(k1, k2)] = v
            elif (k1, k2) in tensor:
                del tensor[(k1, k2)]

        for u, v in pairs:
            du = u.decompose()
            dv = v.decompose()
            for k1, c1 in du.items():
                for k2, c2 in dv.items():
                    add(k1, k2, c1 * c2)
            for k, c in multiply(u, v).decompose().items():
                add(k, unit, -c)
        return NcOneForm.make(space, tensor)

    def multiplication_image(self) -> dict[OpKey, Fraction]:
        out: dict = {}
        for (k1, k2), c in self.tensor:
            for k, kc in _key_product(self.space, k1, k2).items():
                v = out.get(k, Fraction(0)) + c * kc
                if v:
                    out[k] = v
                elif k in out:
                    del out[k]
        return out

    @property
    def is_zero(self) -> bool:
        return not self.tensor

    def __add__(self, other: "NcOneForm") -> "NcOneForm":
        if self.space != other.space:
            raise SpaceMismatch("forms over different spaces")
        merged = dict(self.tensor)
        for k, c in other.tensor:
            merged[k] = merged.get(k, Fraction(0)) + c
        return NcOneForm.make(self.space, merged)

    def __sub__(self, other: "NcOneForm") -> "NcOneForm":
        return self + other.scale(-1)

    def scale(self, c) -> "NcOneForm":
        return NcOneForm.make(self.space, {k: v * Fraction(c) for k, v in self.tensor})

    def right_multiply(self, w: DiffOperator) -> "NcOneForm":
        """(a (x) b)·w = a (x) bw, the right bimodule action."""
        dw = w.decompose()
        out: dict = {}
        for (k1, k2), c in self.tensor:
            for kw, cw in dw.items():
                for k2w, c2 in _key_product(self.space, k2, kw).items():
                    kk = (k1, k2w)
                    v = out.get(kk, Fraction(0)) + c * cw * c2
                    if v:
                        out[kk] = v
                    elif kk in out:
                        del out[kk]
        return NcOneForm.make(self.space, out)

    def left_multiply(self, w: DiffOperator) -> "NcOneForm":
        dw = w.decompose()
        out: dict = {}
        for (k1, k2), c in self.tensor:
            for kw, cw in dw.items():
                for k1w, c1 in _key_product(self.space, kw, k1).items():
                    kk = (k1w, k2)
                    v = out.get(kk, Fraction(0)) + c * cw * c1
                    if v:
                        out[kk] = v
                    elif kk in out:
                        del out[kk]
        return NcOneForm.make(self.space, out)


def universal_derivation(u: DiffOperator) -> NcOneForm:
    """d(u) = 1 (x) u - u (x) 1 in Omega^1_nc."""
    return NcOneForm.from_pairs(u.space, [(DiffOperator.identity(u.space), u)])


# -- class-level bracket from a BV operator ---------------------------------------

@dataclass
class ClassAlgebra:
    """A finite graded algebra of cohomology-class labels with caller-supplied
    cup products and BV data."""

    degrees: dict
    cup_table: dict = field(default_factory=dict)
    delta_table: dict = field(default_factory=dict)

    def _check(self, label):
        if label not in self.degrees:
            raise UndefinedClass(f"unknown class label {label!r}")

    def as_element(self, x) -> dict:
        if isinstance(x, dict):
            for k in x:
                self._check(k)
            return {k: Fraction(v) for k, v in x.items() if v}
        self._check(x)
        return {x: Fraction(1)}

    def degree_of(self, el: dict) -> int:
        degs = {self.degrees[k] for k in el}
        if len(degs) > 1:
            raise UndefinedClass("element is not homogeneous")
        return degs.pop() if degs else 0

    def cup(self, a, b) -> dict:
        a, b = self.as_element(a), self.as_element(b)
        out: dict = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                if (ka, kb) not in self.cup_table:
                    raise UndefinedClass(f"cup product of {ka!r} and {kb!r} undefined")
                for k, c in self.cup_table[(ka, kb)].items():
                    self._check(k)
                    v = out.get(k, Fraction(0)) + ca * cb * Fraction(c)
                    if v:
                        out[k] = v
                    elif k in out:
                        del out[k]
        return out

    def delta(self, a) -> dict:
        a = self.as_element(a)
        out: dict = {}
        for k, c in a.items():
            if k not in self.delta_table:
                raise UndefinedClass(f"BV image of {k!r} undefined")
            for kk, cc in self.delta_table[k].items():
                self._check(kk)
                v = out.get(kk, Fraction(0)) + c * Fraction(cc)
                if v:
                    out[kk] = v
                elif kk in out:
                    del out[kk]
        return out


def bracket_from_bv(algebra: ClassAlgebra, alpha, beta) -> dict:
    """[a, b] = Delta(a cup b) - Delta(a) cup b - (-1)^|a| a cup Delta(b)."""
    a = algebra.as_element(alpha)
    b = algebra.as_element(beta)
    deg_a = algebra.degree_of(a)
    out = algebra.delta(algebra.cup(a, b))
    for k, c in algebra.cup(algebra.delta(a), b).items():
        v = out.get(k, Fraction(0)) - c
        if v:
            out[k] = v
        elif k in out:
            del out[k]
    sign = (-1) ** deg_a
    for k, c in algebra.cup(a, algebra.delta(b)).items():
        v = out.get(k, Fraction(0)) - sign * c
        if v:
            out[k] = v
        elif k in out:
            del out[k]
    return out
