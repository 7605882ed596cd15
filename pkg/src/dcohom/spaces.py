"""Space catalog: localized polynomial coordinate algebras.

An atomic space is Q[x_1..x_r] with an optional set of inverted (Laurent)
variables, or, when r = 1, an optional squarefree localizing denominator
f(x_1).  Products of spaces combine by Künneth; products whose factors are
all denominator-free flatten to a single atomic space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSquarefree, UnsupportedSpace

Poly = dict[int, Fraction]  # univariate, exponent -> coefficient


def poly_normalize(p: Poly) -> Poly:
    return {e: Fraction(c) for e, c in p.items() if c}


def poly_degree(p: Poly) -> int:
    return max(p) if p else -1


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, Fraction(0)) + c
        if v:
            out[e] = v
        elif e in out:
            del out[e]
    return out


def poly_scale(p: Poly, c: Fraction) -> Poly:
    return {} if not c else {e: v * c for e, v in p.items()}


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            v = out.get(e, Fraction(0)) + c1 * c2
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


def poly_divmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = dict(p)
    quo: Poly = {}
    dq = poly_degree(q)
    lq = q[dq]
    while rem and poly_degree(rem) >= dq:
        dr = poly_degree(rem)
        c = rem[dr] / lq
        quo[dr - dq] = c
        for e, v in q.items():
            ee = dr - dq + e
            nv = rem.get(ee, Fraction(0)) - c * v
            if nv:
                rem[ee] = nv
            elif ee in rem:
                del rem[ee]
    return quo, rem


def poly_derivative(p: Poly) -> Poly:
    return {e - 1: c * e for e, c in p.items() if e > 0}


def poly_gcd(p: Poly, q: Poly) -> Poly:
    a, b = dict(p), dict(q)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[poly_degree(a)]
        a = poly_scale(a, 1 / lead)
    return a


def poly_bezout(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, s, t) with s p + t q = g = gcd(p, q), g monic."""
    r0, r1 = dict(p), dict(q)
    s0, s1 = {0: Fraction(1)}, {}
    t0, t1 = {}, {0: Fraction(1)}
    while r1:
        quo, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_add(s0, poly_scale(poly_mul(quo, s1), Fraction(-1)))
        t0, t1 = t1, poly_add(t0, poly_scale(poly_mul(quo, t1), Fraction(-1)))
    if r0:
        lead = r0[poly_degree(r0)]
        r0, s0, t0 = poly_scale(r0, 1 / lead), poly_scale(s0, 1 / lead), poly_scale(t0, 1 / lead)
    return r0, s0, t0


def is_squarefree(p: Poly) -> bool:
    g = poly_gcd(p, poly_derivative(p))
    return poly_degree(g) == 0


@dataclass(frozen=True)
class SpaceSpec:
    """Either an atomic coordinate algebra or a product of spaces.

    ``laurent`` holds 0-based indices of inverted variables.  ``denominator``
    is a univariate squarefree polynomial in x_1, allowed only for r = 1
    atomic spaces with no Laurent variables.  Exactly one of the atomic data
    and ``factors`` is populated.
    """

    num_vars: int
    laurent: frozenset[int] = frozenset()
    denominator: tuple[tuple[int, Fraction], ...] | None = None
    factors: tuple["SpaceSpec", ...] | None = None

    @property
    def is_atomic(self) -> bool:
        return self.factors is None

    @property
    def f_poly(self) -> Poly | None:
        if self.denominator is None:
            return None
        return dict(self.denominator)

    @property
    def deg_f(self) -> int:
        return poly_degree(self.f_poly) if self.denominator is not None else 0

    def flatten(self) -> "SpaceSpec | None":
        """Single atomic spec with the same algebra, or None if impossible."""
        if self.is_atomic:
            return self
        flats = []
        for fac in self.factors:
            ff = fac.flatten()
            if ff is None or ff.denominator is not None:
                return None
            flats.append(ff)
        laurent = set()
        offset = 0
        for ff in flats:
            laurent.update(offset + i for i in ff.laurent)
            offset += ff.num_vars
        return SpaceSpec(num_vars=offset, laurent=frozenset(laurent))

    def atoms(self) -> list["SpaceSpec"]:
        if self.is_atomic:
            return [self]
        out = []
        for fac in self.factors:
            out.extend(fac.atoms())
        return out


def affine(r: int) -> SpaceSpec:
    if r < 1:
        raise UnsupportedSpace("need at least one variable")
    return SpaceSpec(num_vars=r)


def torus(r: int) -> SpaceSpec:
    if r < 1:
        raise UnsupportedSpace("need at least one variable")
    return SpaceSpec(num_vars=r, laurent=frozenset(range(r)))


def mixed(r: int, laurent_indices) -> SpaceSpec:
    idx = frozenset(laurent_indices)
    if any(not 0 <= i < r for i in idx):
        raise UnsupportedSpace("laurent index out of range")
    return SpaceSpec(num_vars=r, laurent=idx)


def localized(f: Poly) -> SpaceSpec:
    f = poly_normalize(f)
    if poly_degree(f) < 1:
        raise UnsupportedSpace("denominator must be non-constant")
    if not is_squarefree(f):
        raise NotSquarefree("denominator is not squarefree")
    return SpaceSpec(num_vars=1, denominator=tuple(sorted(f.items())))


def product(*specs: SpaceSpec) -> SpaceSpec:
    if len(specs) < 2:
        raise UnsupportedSpace("a product needs at least two factors")
    return SpaceSpec(num_vars=sum(s.num_vars for s in specs), factors=tuple(specs))
