"""Expression grammars for spaces, differential forms, and operators.

Space expressions:   affine(2), torus(1), localized(f = x1^2 + 1),
                     product(torus(1), affine(1))
Form expressions:    terms `coef * x1^a1 ... * dx1^dx2` joined by +/-;
                     whitespace and `*` between factors are optional, `^`
                     binds wedge between dx atoms and power elsewhere; on
                     localized spaces `f^-k` divides by the denominator.
Operator expressions: atoms x1..xr, d1..dr (x1^-1 on Laurent variables),
                     rational coefficients p/q, products with `*`, sums
                     with +/-.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import AlgebraElement
from .errors import ParseError
from .forms import DifferentialForm
from .operators import DiffOperator, multiply
from .spaces import SpaceSpec, affine, localized, product, torus

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[()+\-*/^=,]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.lastgroup == "num":
            tokens.append(("num", int(m.group("num")), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("sym", m.group("sym"), m.start("sym")))
        pos = m.end()
    return tokens


class _Stream:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        t, v, p = self.next()
        if t != kind or (value is not None and v != value):
            raise ParseError(f"expected {value or kind}, found {v!r}", p)
        return v

    @property
    def done(self):
        return self.i >= len(self.tokens)


def _signed_int(s: _Stream) -> int:
    sign = 1
    t, v, p = s.peek()
    if t == "sym" and v in "+-":
        s.next()
        sign = -1 if v == "-" else 1
    t, v, p = s.next()
    if t != "num":
        raise ParseError("expected an integer exponent", p)
    return sign * v


def parse_space(expr: str) -> SpaceSpec:
    """Parse a space expression; squarefree-ness of denominators is checked."""
    s = _Stream(_tokenize(expr), expr)
    spec = _parse_space_inner(s)
    if not s.done:
        raise ParseError("trailing input after space expression", s.peek()[2])
    return spec


def _parse_space_inner(s: _Stream) -> SpaceSpec:
    t, name, p = s.next()
    if t != "name":
        raise ParseError("expected a space constructor", p)
    s.expect("sym", "(")
    if name == "affine":
        r = _expect_num(s)
        s.expect("sym", ")")
        return affine(r)
    if name == "torus":
        r = _expect_num(s)
        s.expect("sym", ")")
        return torus(r)
    if name == "localized":
        s.expect("name")  # the letter f (any identifier accepted)
        s.expect("sym", "=")
        poly = _parse_univariate(s)
        s.expect("sym", ")")
        return localized(poly)
    if name == "product":
        factors = [_parse_space_inner(s)]
        while True:
            t, v, p = s.peek()
            if t == "sym" and v == ",":
                s.next()
                factors.append(_parse_space_inner(s))
            else:
                break
        s.expect("sym", ")")
        return product(*factors)
    raise ParseError(f"unknown space constructor {name!r}", p)


def _expect_num(s: _Stream) -> int:
    t, v, p = s.next()
    if t != "num":
        raise ParseError("expected a number", p)
    return v


def _parse_univariate(s: _Stream) -> dict:
    """Sum of c * x1^k terms, up to the closing parenthesis."""
    poly: dict[int, Fraction] = {}
    sign = Fraction(1)
    first = True
    while True:
        t, v, p = s.peek()
        if t is None or (t == "sym" and v == ")"):
            break
        if t == "sym" and v in "+-":
            s.next()
            sign = Fraction(1) if v == "+" else Fraction(-1)
            first = False
            continue
        coeff, exp = sign, 0
        got = False
        while True:
            t, v, p = s.peek()
            if t == "num":
                s.next()
                coeff *= v
                nt, nv, _ = s.peek()
                if nt == "sym" and nv == "/":
                    s.next()
                    coeff /= _expect_num(s)
                got = True
            elif t == "name" and v == "x1":
                s.next()
                e = 1
                nt, nv, _ = s.peek()
                if nt == "sym" and nv == "^":
                    s.next()
                    e = _signed_int(s)
                exp += e
                got = True
            elif t == "sym" and v == "*":
                s.next()
            else:
                break
        if not got:
            raise ParseError("expected a polynomial term", p)
        poly[exp] = poly.get(exp, Fraction(0)) + coeff
        sign = Fraction(1)
    return {e: c for e, c in poly.items() if c}


_VAR = re.compile(r"^(d?x|d)(\d+)$")


def _atom_info(name: str):
    m = _VAR.match(name)
    if not m:
        return None
    prefix, idx = m.group(1), int(m.group(2))
    if idx < 1:
        return None
    return prefix, idx - 1


def parse_form(space: SpaceSpec, expr: str) -> DifferentialForm:
    """Parse a differential form over an atomic space."""
    s = _Stream(_tokenize(expr), expr)
    terms = []  # (coeff Fraction, exps list, den_power, wedge list)
    sign = Fraction(1)
    r = space.num_vars
    degree = None
    current = None

    def flush(pos):
        nonlocal current
        if current is None:
            return
        coeff, exps, den, wedge = current
        perm, idx = _wedge_sign(wedge)
        if perm != 0:
            try:
                elt = AlgebraElement.make(space, {tuple(exps): coeff * perm}, den)
            except ValueError as exc:
                raise ParseError(str(exc), pos) from exc
            terms.append((idx, elt))
        current = None

    while not s.done:
        t, v, p = s.peek()
        if t == "sym" and v in "+-":
            flush(p)
            s.next()
            sign = Fraction(1) if v == "+" else Fraction(-1)
            continue
        if current is None:
            current = [sign, [0] * r, 0, []]
            sign = Fraction(1)
        if t == "sym" and v == "*":
            s.next()
            continue
        if t == "num":
            s.next()
            current[0] *= v
            nt, nv, _ = s.peek()
            if nt == "sym" and nv == "/":
                s.next()
                current[0] /= _expect_num(s)
            continue
        if t == "name":
            info = _atom_info(v)
            if info and info[0] == "x":
                s.next()
                i = info[1]
                if i >= r:
                    raise ParseError(f"variable x{i + 1} out of range", p)
                e = 1
                nt, nv, _ = s.peek()
                if nt == "sym" and nv == "^":
                    s.next()
                    e = _signed_int(s)
                current[1][i] += e
                continue
            if info and info[0] == "dx":
                s.next()
                i = info[1]
                if i >= r:
                    raise ParseError(f"differential dx{i + 1} out of range", p)
                current[3].append(i)
                while True:
                    nt, nv, np_ = s.peek()
                    if nt == "sym" and nv == "^":
                        save = s.i
                        s.next()
                        t2, v2, p2 = s.peek()
                        info2 = _atom_info(v2) if t2 == "name" else None
                        if info2 and info2[0] == "dx":
                            s.next()
                            j = info2[1]
                            if j >= r:
                                raise ParseError(f"differential dx{j + 1} out of range", p2)
                            current[3].append(j)
                            continue
                        s.i = save
                    break
                continue
            if v == "f" and space.denominator is not None:
                s.next()
                e = -1
                nt, nv, _ = s.peek()
                if nt == "sym" and nv == "^":
                    s.next()
                    e = _signed_int(s)
                if e >= 0:
                    raise ParseError("only negative powers of f are supported", p)
                current[2] += -e
                continue
            raise ParseError(f"unknown atom {v!r}", p)
        raise ParseError(f"unexpected token {v!r}", p)
    flush(len(expr))
    if not terms:
        raise ParseError("empty form expression", 0)
    degrees = {len(idx) for idx, _ in terms}
    if len(degrees) != 1:
        raise ParseError("mixed-degree form expression", 0)
    degree = degrees.pop()
    coeffs: dict = {}
    for idx, elt in terms:
        coeffs[idx] = coeffs.get(idx, AlgebraElement.zero(space)) + elt
    return DifferentialForm.make(space, degree, coeffs)


def _wedge_sign(wedge: list[int]):
    """Sort a wedge index list; return (sign, tuple) with sign 0 on repeats."""
    if len(set(wedge)) != len(wedge):
        return 0, ()
    sign = 1
    items = list(wedge)
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


def parse_operator(space: SpaceSpec, expr: str) -> DiffOperator:
    """Parse a differential operator; factors multiply in written order."""
    s = _Stream(_tokenize(expr), expr)
    total = DiffOperator.zero(space)
    sign = Fraction(1)
    current: DiffOperator | None = None
    while not s.done:
        t, v, p = s.peek()
        if t == "sym" and v in "+-":
            if current is not None:
                total = total + current
                current = None
            s.next()
            sign = Fraction(1) if v == "+" else Fraction(-1)
            continue
        if current is None:
            current = DiffOperator.from_scalar(space, sign)
            sign = Fraction(1)
        if t == "sym" and v == "*":
            s.next()
            continue
        factor = _parse_operator_atom(s, space, p)
        current = multiply(current, factor)
    if current is not None:
        total = total + current
    return total


def _parse_operator_atom(s: _Stream, space: SpaceSpec, p: int) -> DiffOperator:
    t, v, p = s.next()
    if t == "num":
        coeff = Fraction(v)
        nt, nv, _ = s.peek()
        if nt == "sym" and nv == "/":
            s.next()
            coeff /= _expect_num(s)
        return DiffOperator.from_scalar(space, coeff)
    if t == "name":
        info = _atom_info(v)
        if info and info[0] == "x":
            i = info[1]
            if i >= space.num_vars:
                raise ParseError(f"variable x{i + 1} out of range", p)
            e = _optional_power(s)
            try:
                return DiffOperator.coordinate(space, i, e)
            except ValueError as exc:
                raise ParseError(str(exc), p) from exc
        if info and info[0] == "d":
            i = info[1]
            if i >= space.num_vars:
                raise ParseError(f"generator d{i + 1} out of range", p)
            e = _optional_power(s)
            if e < 0:
                raise ParseError("negative powers of d are not operators", p)
            return DiffOperator.partial(space, i, e)
        if v == "f" and space.denominator is not None:
            e = _optional_power(s)
            if e >= 0:
                raise ParseError("only negative powers of f are supported", p)
            return DiffOperator.from_coefficient(AlgebraElement.inverse_denominator(space, -e))
    raise ParseError(f"unexpected token {v!r}", p)


def _optional_power(s: _Stream) -> int:
    nt, nv, _ = s.peek()
    if nt == "sym" and nv == "^":
        s.next()
        return _signed_int(s)
    return 1


# -- rendering -------------------------------------------------------------------

def render_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_space(spec: SpaceSpec) -> str:
    if not spec.is_atomic:
        return "product(" + ", ".join(render_space(f) for f in spec.factors) + ")"
    if spec.denominator is not None:
        return f"localized(f = {render_univariate(spec.f_poly)})"
    if not spec.laurent:
        return f"affine({spec.num_vars})"
    if len(spec.laurent) == spec.num_vars:
        return f"torus({spec.num_vars})"
    inner = ", ".join(
        "torus(1)" if i in spec.laurent else "affine(1)" for i in range(spec.num_vars)
    )
    return f"product({inner})"


def render_univariate(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for e in sorted(poly, reverse=True):
        c = poly[e]
        mono = "x1" if e == 1 else (f"x1^{e}" if e else "")
        if mono:
            cs = "" if c == 1 else ("-" if c == -1 else render_fraction(c) + "*")
            parts.append(f"{cs}{mono}")
        else:
            parts.append(render_fraction(c))
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


def render_algebra_element(a: AlgebraElement) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for alpha, c in a.terms:
        monos = [
            f"x{i + 1}" + (f"^{e}" if e != 1 else "")
            for i, e in enumerate(alpha)
            if e
        ]
        body = "*".join(monos)
        if body:
            if c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{render_fraction(c)}*{body}")
        else:
            parts.append(render_fraction(c))
    out = " + ".join(parts).replace("+ -", "- ")
    if a.den_power:
        out = f"({out})*f^-{a.den_power}" if len(a.terms) > 1 else f"{out}*f^-{a.den_power}"
    return out


def render_form(phi: DifferentialForm) -> str:
    if phi.is_zero:
        return "0"
    parts = []
    for idx, a in phi.coeffs:
        wedge = "^".join(f"dx{i + 1}" for i in idx)
        coeff = render_algebra_element(a)
        if coeff == "1" and wedge:
            parts.append(wedge)
        elif wedge:
            coeff = f"({coeff})" if " " in coeff else coeff
            parts.append(f"{coeff}*{wedge}")
        else:
            parts.append(coeff)
    return " + ".join(parts)


def render_operator(op: DiffOperator) -> str:
    if op.is_zero:
        return "0"
    parts = []
    for beta, a in op.terms:
        ds = "*".join(f"d{i + 1}" + (f"^{e}" if e != 1 else "") for i, e in enumerate(beta) if e)
        coeff = render_algebra_element(a)
        if not ds:
            parts.append(coeff)
        elif coeff == "1":
            parts.append(ds)
        else:
            coeff = f"({coeff})" if " " in coeff else coeff
            parts.append(f"{coeff}*{ds}")
    return " + ".join(parts)
