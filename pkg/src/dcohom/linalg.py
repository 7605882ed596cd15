"""Exact sparse linear algebra over the rationals.

Scalars are ``fractions.Fraction`` (aliased ``Rational``); elimination is
fraction-free: rows are scaled to integers once, then reduced with
gcd-normalized integer row operations under Markowitz pivoting.  The cohomology
matrices produced elsewhere in this package are extremely sparse (a handful of
integer entries per column), which is what the pivoting strategy targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import ContainmentError

Rational = Fraction


def _integerize(row: dict) -> dict[int, int]:
    """Scale a sparse row (int or Fraction entries) to coprime integers."""
    if not row:
        return {}
    lcm = 1
    for v in row.values():
        d = v.denominator if isinstance(v, Fraction) else 1
        if d != 1:
            lcm = lcm * d // gcd(lcm, d)
    if lcm == 1:
        ints = {c: int(v) for c, v in row.items()}
    else:
        ints = {c: int(v * lcm) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def _row_reduce(rows: list[dict[int, int]]) -> list[tuple[int, dict[int, int]]]:
    """Sparse integer elimination; returns (pivot_col, row) in retirement order.

    Each step picks a nonzero entry with small Markowitz count
    (nnz(row)-1)*(nnz(col)-1) through a lazily revalidated heap and eliminates
    its column from every other active row via r <- r*p - p_row*r_c followed
    by content reduction, so no fractions ever appear.
    """
    import heapq

    active: dict[int, dict[int, int]] = {i: r for i, r in enumerate(rows) if r}
    col_index: dict[int, set[int]] = {}
    for i, r in active.items():
        for c in r:
            col_index.setdefault(c, set()).add(i)

    def score(i: int, c: int) -> int:
        return (len(active[i]) - 1) * (len(col_index[c]) - 1)

    heap: list[tuple[int, int, int]] = []
    for i, r in active.items():
        for c in r:
            heap.append((score(i, c), i, c))
    heapq.heapify(heap)
    pivots: list[tuple[int, dict[int, int]]] = []

    while active:
        while True:
            s, pi, pc = heapq.heappop(heap)
            if pi not in active or pc not in active[pi]:
                continue
            cur = score(pi, pc)
            if cur == s:
                break
            heapq.heappush(heap, (cur, pi, pc))
        prow = active.pop(pi)
        for c in prow:
            col_index[c].discard(pi)
        pval = prow[pc]
        for j in list(col_index.get(pc, ())):
            row = active[j]
            rv = row.pop(pc)
            col_index[pc].discard(j)
            for c in row:
                row[c] *= pval
            for c, v in prow.items():
                if c == pc:
                    continue
                nv = row.get(c, 0) - v * rv
                if nv:
                    row[c] = nv
                    col_index.setdefault(c, set()).add(j)
                elif c in row:
                    del row[c]
                    col_index[c].discard(j)
            if row:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                if g > 1:
                    for c in row:
                        row[c] //= g
                for c in row:
                    heapq.heappush(heap, (score(j, c), j, c))
            else:
                del active[j]
        col_index.pop(pc, None)
        pivots.append((pc, prow))
    return pivots


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix; absent entries are zero, stored entries are not."""

    rows: int
    cols: int
    entries: dict[tuple[int, int], Fraction]

    def __post_init__(self):
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r},{c}) out of bounds")
            if v == 0:
                raise ValueError("stored entries must be nonzero")

    @staticmethod
    def from_rows(dense: list[list]) -> "SparseMatrix":
        nr = len(dense)
        nc = len(dense[0]) if dense else 0
        entries = {}
        for i, row in enumerate(dense):
            for j, v in enumerate(row):
                v = Fraction(v)
                if v:
                    entries[(i, j)] = v
        return SparseMatrix(nr, nc, entries)

    def row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def column(self, j: int) -> dict[int, Fraction]:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, Fraction(0)) + v * x
        return {r: v for r, v in out.items() if v}


@dataclass
class Subspace:
    """A list of sparse basis vectors inside Q^ambient_dim."""

    ambient_dim: int
    basis: list[dict[int, Fraction]] = field(default_factory=list)

    def dim(self) -> int:
        return len(self.basis)

    def verify(self) -> bool:
        """Check declared independence and coordinate bounds."""
        for v in self.basis:
            for c in v:
                if not 0 <= c < self.ambient_dim:
                    return False
        return rank_of_vectors(self.basis) == len(self.basis)


def rank(m: SparseMatrix) -> int:
    """Exact rank over Q."""
    rows = [_integerize(r) for r in m.row_dicts()]
    return len(_row_reduce(rows))


def rank_of_vectors(vecs: list[dict]) -> int:
    """Rank of a family of sparse vectors keyed by arbitrary hashable keys."""
    index: dict = {}
    rows = []
    for v in vecs:
        row = {}
        for k, val in v.items():
            if val:
                row[index.setdefault(k, len(index))] = val
        rows.append(_integerize(row))
    return len(_row_reduce(rows))


def intersection_dim(a: list[dict], b: list[dict]) -> int:
    """dim(span(a) ∩ span(b)) via rank(a) + rank(b) - rank(a ∪ b)."""
    return rank_of_vectors(a) + rank_of_vectors(b) - rank_of_vectors(list(a) + list(b))


def rank_increment(base: list[dict], extra: list[dict]) -> int:
    """rank(base ∪ extra) - rank(base) with a single elimination of ``base``.

    The retired pivot rows of the base elimination are applied to each extra
    vector in retirement order (later pivot rows never reintroduce earlier
    pivot columns), then the reduced extras are eliminated on their own.
    """
    index: dict = {}

    def to_row(v: dict) -> dict[int, int]:
        row = {}
        for k, val in v.items():
            if val:
                row[index.setdefault(k, len(index))] = val
        return _integerize(row)

    base_rows = [to_row(v) for v in base]
    pivots = _row_reduce(base_rows)
    reduced = []
    for v in extra:
        row = to_row(v)
        for pc, prow in pivots:
            rv = row.get(pc)
            if not rv:
                continue
            pval = prow[pc]
            del row[pc]
            for c in row:
                row[c] *= pval
            for c, val in prow.items():
                if c == pc:
                    continue
                nv = row.get(c, 0) - val * rv
                if nv:
                    row[c] = nv
                elif c in row:
                    del row[c]
            if row:
                g = 0
                for val in row.values():
                    g = gcd(g, val)
                if g > 1:
                    row = {c: val // g for c, val in row.items()}
        if row:
            reduced.append(row)
    return len(_row_reduce(reduced))


def _normalize_vector(vec: dict[int, Fraction]) -> dict[int, Fraction]:
    """Clear denominators, divide by content, make leading coordinate positive."""
    if not vec:
        return {}
    ints = _integerize(vec)
    lead = min(ints)
    if ints[lead] < 0:
        ints = {c: -v for c, v in ints.items()}
    return {c: Fraction(v) for c, v in ints.items()}


def kernel_vectors(columns: list[dict], nrows_hint: int = 0) -> list[dict[int, Fraction]]:
    """Right-kernel basis of the matrix whose j-th column is ``columns[j]``.

    Column entries may be keyed by arbitrary hashable row keys.  Returns one
    sparse coordinate vector (dict col-index -> Fraction) per free column.
    """
    ncols = len(columns)
    row_key_index: dict = {}
    rows_acc: dict[int, dict[int, Fraction]] = {}
    for j, col in enumerate(columns):
        for rk, v in col.items():
            if not v:
                continue
            ri = row_key_index.setdefault(rk, len(row_key_index))
            rows_acc.setdefault(ri, {})[j] = Fraction(v)
    rows = [_integerize(rows_acc[i]) for i in sorted(rows_acc)]
    pivots = _row_reduce(rows)
    pivot_cols = {pc for pc, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        x: dict[int, Fraction] = {free: Fraction(1)}
        for pc, prow in reversed(pivots):
            s = Fraction(0)
            for c, v in prow.items():
                if c != pc:
                    xv = x.get(c)
                    if xv:
                        s += v * xv
            if s:
                x[pc] = -s / prow[pc]
        basis.append(_normalize_vector(x))
    return basis


def kernel_basis(m: SparseMatrix) -> Subspace:
    """Basis of {v : m v = 0}; dim = cols - rank(m)."""
    cols = [m.column(j) for j in range(m.cols)]
    return Subspace(m.cols, kernel_vectors(cols))


def kernel_vectors_blocked(columns: list[dict], weights: list) -> list[dict[int, Fraction]]:
    """Kernel basis of a block-diagonal system, block by block.

    ``weights[j]`` tags column j; columns with different tags must touch
    disjoint row-key sets (the caller's grading guarantees this).  Indices in
    the returned vectors refer to the full column list.
    """
    groups: dict = {}
    for j, w in enumerate(weights):
        groups.setdefault(w, []).append(j)
    out = []
    for w in sorted(groups, key=repr):
        idx = groups[w]
        for vec in kernel_vectors([columns[j] for j in idx]):
            out.append({idx[j]: v for j, v in vec.items()})
    return out


def rank_blocked(vec_groups: dict) -> int:
    """Sum of ranks over weight blocks: {weight: list of sparse vectors}."""
    return sum(rank_of_vectors(vecs) for vecs in vec_groups.values())


def quotient_dim(sub: Subspace, within: Subspace) -> int:
    """dim(within / sub) for sub contained in span(within).

    Raises ContainmentError when some basis vector of ``sub`` falls outside
    span(within).
    """
    r_within = rank_of_vectors(within.basis)
    if rank_of_vectors(list(within.basis) + list(sub.basis)) != r_within:
        raise ContainmentError("sub is not contained in the span of within")
    return r_within - rank_of_vectors(sub.basis)


def solve_columns(columns: list[dict], rhs: dict) -> dict[int, Fraction] | None:
    """One solution x of (columns)·x = rhs, or None when inconsistent.

    Free variables are pinned to zero, so with a fixed column order the
    returned witness is canonical.
    """
    ncols = len(columns)
    aug = list(columns) + [rhs]
    row_key_index: dict = {}
    rows_acc: dict[int, dict[int, Fraction]] = {}
    for j, col in enumerate(aug):
        for rk, v in col.items():
            if not v:
                continue
            ri = row_key_index.setdefault(rk, len(row_key_index))
            rows_acc.setdefault(ri, {})[j] = Fraction(v)
    rows = [_integerize(rows_acc[i]) for i in sorted(rows_acc)]
    pivots = _row_reduce(rows)
    if any(pc == ncols for pc, _ in pivots):
        return None
    x: dict[int, Fraction] = {ncols: Fraction(-1)}
    for pc, prow in reversed(pivots):
        s = Fraction(0)
        for c, v in prow.items():
            if c != pc:
                xv = x.get(c)
                if xv:
                    s += v * xv
        x[pc] = -s / prow[pc] if s else Fraction(0)
    del x[ncols]
    return {c: v for c, v in x.items() if v}
