"""Elements of the coordinate algebra: Laurent polynomials over Q, with an
optional power of the localizing denominator.

An element is stored as a single fraction g / f^k in canonical form: no zero
coefficients, f does not divide g when k > 0, and negative exponents occur
only on Laurent variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SpaceMismatch, UnsupportedSpace
from .spaces import (
    SpaceSpec,
    poly_add,
    poly_degree,
    poly_derivative,
    poly_divmod,
    poly_mul,
    poly_scale,
)

Exponent = tuple[int, ...]


def _check_exponent(space: SpaceSpec, alpha: Exponent):
    if len(alpha) != space.num_vars:
        raise ValueError("exponent length does not match the number of variables")
    for i, a in enumerate(alpha):
        if a < 0 and i not in space.laurent:
            raise ValueError(f"negative exponent on non-Laurent variable x{i + 1}")


@dataclass(frozen=True)
class AlgebraElement:
    """A canonical fraction g / f^k in the coordinate algebra of ``space``."""

    space: SpaceSpec
    terms: tuple[tuple[Exponent, Fraction], ...]
    den_power: int = 0

    @staticmethod
    def make(space: SpaceSpec, terms: dict, den_power: int = 0) -> "AlgebraElement":
        if not space.is_atomic:
            raise UnsupportedSpace("algebra elements live over atomic spaces")
        if den_power and space.denominator is None:
            raise ValueError("denominator power on a space without denominator")
        clean = {}
        for alpha, c in terms.items():
            alpha = tuple(alpha)
            c = Fraction(c)
            if c:
                _check_exponent(space, alpha)
                clean[alpha] = clean.get(alpha, Fraction(0)) + c
        clean = {a: c for a, c in clean.items() if c}
        if not clean:
            return AlgebraElement(space, (), 0)
        if den_power:
            f = space.f_poly
            g = {a[0]: c for a, c in clean.items()}
            while den_power > 0:
                quo, rem = poly_divmod(g, f)
                if rem:
                    break
                g = quo
                den_power -= 1
            clean = {(e,): c for e, c in g.items()}
        return AlgebraElement(space, tuple(sorted(clean.items())), den_power)

    @staticmethod
    def zero(space: SpaceSpec) -> "AlgebraElement":
        return AlgebraElement.make(space, {})

    @staticmethod
    def constant(space: SpaceSpec, c) -> "AlgebraElement":
        return AlgebraElement.make(space, {(0,) * space.num_vars: Fraction(c)})

    @staticmethod
    def one(space: SpaceSpec) -> "AlgebraElement":
        return AlgebraElement.constant(space, 1)

    @staticmethod
    def coordinate(space: SpaceSpec, i: int, power: int = 1) -> "AlgebraElement":
        alpha = [0] * space.num_vars
        alpha[i] = power
        return AlgebraElement.make(space, {tuple(alpha): Fraction(1)})

    @staticmethod
    def inverse_denominator(space: SpaceSpec, k: int = 1) -> "AlgebraElement":
        if space.denominator is None:
            raise ValueError("space has no denominator")
        return AlgebraElement.make(space, {(0,): Fraction(1)}, den_power=k)

    def term_dict(self) -> dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        """The scalar value if the element is constant, else None."""
        if not self.terms:
            return Fraction(0)
        if self.den_power:
            return None
        zero = (0,) * self.space.num_vars
        if len(self.terms) == 1 and self.terms[0][0] == zero:
            return self.terms[0][1]
        return None

    def _same_space(self, other: "AlgebraElement"):
        if self.space != other.space:
            raise SpaceMismatch("algebra elements over different spaces")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same_space(other)
        if self.den_power == other.den_power:
            merged = self.term_dict()
            for a, c in other.terms:
                merged[a] = merged.get(a, Fraction(0)) + c
            return AlgebraElement.make(self.space, merged, self.den_power)
        f = self.space.f_poly
        k = max(self.den_power, other.den_power)
        g1 = _scale_numerator(self, f, k - self.den_power)
        g2 = _scale_numerator(other, f, k - other.den_power)
        return AlgebraElement.make(self.space, {(e,): c for e, c in poly_add(g1, g2).items()}, k)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.space, tuple((a, -c) for a, c in self.terms), self.den_power)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        self._same_space(other)
        out: dict[Exponent, Fraction] = {}
        for a1, c1 in self.terms:
            for a2, c2 in other.terms:
                key = tuple(x + y for x, y in zip(a1, a2))
                v = out.get(key, Fraction(0)) + c1 * c2
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
        return AlgebraElement.make(self.space, out, self.den_power + other.den_power)

    __rmul__ = __mul__

    def scale(self, c: Fraction) -> "AlgebraElement":
        c = Fraction(c)
        if not c:
            return AlgebraElement.zero(self.space)
        return AlgebraElement(self.space, tuple((a, v * c) for a, v in self.terms), self.den_power)

    def derivative(self, i: int) -> "AlgebraElement":
        """Partial derivative along x_{i+1} with the quotient rule on f^k."""
        if self.den_power == 0:
            out = {}
            for alpha, c in self.terms:
                if alpha[i]:
                    na = list(alpha)
                    na[i] -= 1
                    out[tuple(na)] = out.get(tuple(na), Fraction(0)) + c * alpha[i]
            return AlgebraElement.make(self.space, out)
        f = self.space.f_poly
        g = {a[0]: c for a, c in self.terms}
        num = poly_add(
            poly_mul(poly_derivative(g), f),
            poly_scale(poly_mul(g, poly_derivative(f)), Fraction(-self.den_power)),
        )
        return AlgebraElement.make(self.space, {(e,): c for e, c in num.items()}, self.den_power + 1)

    def decompose(self) -> dict:
        """Coordinates in the canonical Q-basis of the algebra.

        Monomial spaces use exponent tuples as keys; localized spaces use
        ('x', a) for x^a and ('f', j, k) for x^j / f^k with j < deg f, k >= 1.
        """
        if self.space.denominator is None:
            return {a: c for a, c in self.terms}
        f = self.space.f_poly
        d = poly_degree(f)
        out: dict = {}
        g = {a[0]: c for a, c in self.terms}
        k = self.den_power
        while k > 0:
            quo, rem = poly_divmod(g, f)
            for j, c in rem.items():
                key = ('f', j, k)
                v = out.get(key, Fraction(0)) + c
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
            g = quo
            k -= 1
        for a, c in g.items():
            key = ('x', a)
            v = out.get(key, Fraction(0)) + c
            if v:
                out[key] = v
            elif key in out:
                del out[key]
        return out

    @staticmethod
    def from_coeff_key(space: SpaceSpec, key, coeff=Fraction(1)) -> "AlgebraElement":
        if space.denominator is None:
            return AlgebraElement.make(space, {key: coeff})
        if key[0] == 'x':
            return AlgebraElement.make(space, {(key[1],): coeff})
        _, j, k = key
        return AlgebraElement.make(space, {(j,): coeff}, den_power=k)

    def coeff_degree(self) -> int:
        """Filtration degree: max sum of |exponents|, plus k·deg(f)."""
        if not self.terms:
            return 0
        if self.space.denominator is None:
            return max(sum(abs(e) for e in a) for a, _ in self.terms)
        return max(self.coeff_key_degree(key) for key in self.decompose())

    def coeff_key_degree(self, key) -> int:
        return coeff_key_degree(self.space, key)


def coeff_key_degree(space: SpaceSpec, key) -> int:
    """Degree of a canonical coefficient basis key under the filtration."""
    if space.denominator is None:
        return sum(abs(e) for e in key)
    if key[0] == 'x':
        return key[1]
    _, j, k = key
    return j + k * poly_degree(space.f_poly)


def coeff_basis_keys(space: SpaceSpec, max_degree: int) -> list:
    """All coefficient basis keys of filtration degree <= max_degree."""
    if space.denominator is not None:
        keys: list = [('x', a) for a in range(max_degree + 1)]
        d = poly_degree(space.f_poly)
        k = 1
        while k * d <= max_degree:
            for j in range(d):
                if j + k * d <= max_degree:
                    keys.append(('f', j, k))
            k += 1
        return keys
    r = space.num_vars
    keys = []

    def rec(i: int, budget: int, prefix: list):
        if i == r:
            keys.append(tuple(prefix))
            return
        lo = -budget if i in space.laurent else 0
        for e in range(lo, budget + 1):
            prefix.append(e)
            rec(i + 1, budget - abs(e), prefix)
            prefix.pop()

    rec(0, max_degree, [])
    return keys


def _scale_numerator(el: AlgebraElement, f, power: int):
    g = {a[0]: c for a, c in el.terms}
    for _ in range(power):
        g = poly_mul(g, f)
    return g
