"""Integer Smith normal form and sparse invariant-factor computation.

The dense routine tracks the four transform matrices (U, U^-1, V, V^-1 with
U*M*V = D) and is used when homology generators are wanted.  The sparse
routine computes only rank and invariant factors: it eliminates unit pivots
on a dict-of-dicts representation and hands any residue without unit entries
to a small dense diagonalisation.  Everything is exact integer arithmetic;
Python ints keep it arbitrary precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def identity(k: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def mat_mul(a, b):
    if not a or not b:
        return [[0] * (len(b[0]) if b else 0) for _ in a]
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


@dataclass
class SmithForm:
    """U * M * V = D with D in Smith normal form.

    diagonal holds min(rows, cols) entries (zeros included), non-negative,
    each dividing the next nonzero one.  The transforms and their inverses
    are None when the caller asked to skip them.
    """

    rows: int
    cols: int
    diagonal: list[int]
    U: list[list[int]] | None = None
    U_inv: list[list[int]] | None = None
    V: list[list[int]] | None = None
    V_inv: list[list[int]] | None = None

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d]


class _Tracker:
    """Row/column operation engine keeping U, U^-1, V, V^-1 in sync."""

    def __init__(self, mat, transforms: bool):
        self.a = [row[:] for row in mat]
        self.m = len(self.a)
        self.n = len(self.a[0]) if self.a else 0
        self.transforms = transforms
        if transforms:
            self.u = identity(self.m)
            self.ui = identity(self.m)
            self.v = identity(self.n)
            self.vi = identity(self.n)

    # row ops act on the left: A <- E A, U <- E U, U^-1 <- U^-1 E^-1
    def row_swap(self, r, s):
        if r == s:
            return
        self.a[r], self.a[s] = self.a[s], self.a[r]
        if self.transforms:
            self.u[r], self.u[s] = self.u[s], self.u[r]
            for row in self.ui:
                row[r], row[s] = row[s], row[r]

    def row_negate(self, r):
        self.a[r] = [-x for x in self.a[r]]
        if self.transforms:
            self.u[r] = [-x for x in self.u[r]]
            for row in self.ui:
                row[r] = -row[r]

    def row_addmul(self, r, s, k):
        """row r += k * row s"""
        if not k:
            return
        ar, as_ = self.a[r], self.a[s]
        for j in range(self.n):
            ar[j] += k * as_[j]
        if self.transforms:
            ur, us = self.u[r], self.u[s]
            for j in range(self.m):
                ur[j] += k * us[j]
            for row in self.ui:
                row[s] -= k * row[r]

    # column ops act on the right: A <- A F, V <- V F, V^-1 <- F^-1 V^-1
    def col_swap(self, r, s):
        if r == s:
            return
        for row in self.a:
            row[r], row[s] = row[s], row[r]
        if self.transforms:
            for row in self.v:
                row[r], row[s] = row[s], row[r]
            self.vi[r], self.vi[s] = self.vi[s], self.vi[r]

    def col_negate(self, r):
        for row in self.a:
            row[r] = -row[r]
        if self.transforms:
            for row in self.v:
                row[r] = -row[r]
            self.vi[r] = [-x for x in self.vi[r]]

    def col_addmul(self, r, s, k):
        """col r += k * col s"""
        if not k:
            return
        for row in self.a:
            row[r] += k * row[s]
        if self.transforms:
            for row in self.v:
                row[r] += k * row[s]
            vir, vis = self.vi[r], self.vi[s]
            for j in range(self.n):
                vis[j] -= k * vir[j]


def smith_normal_form(mat, transforms: bool = True) -> SmithForm:
    """Diagonalise an integer matrix, smallest-pivot strategy.

    Works on a copy.  The diagonal is normalised non-negative with the
    divisibility chain enforced.
    """
    t = _Tracker(mat, transforms)
    m, n = t.m, t.n
    size = min(m, n)
    pos = 0
    while pos < size:
        # pick the entry of smallest nonzero magnitude in the working block
        best = None
        for i in range(pos, m):
            row = t.a[i]
            for j in range(pos, n):
                x = row[j]
                if x:
                    ax = abs(x)
                    if best is None or ax < best[0]:
                        best = (ax, i, j)
                        if ax == 1:
                            break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, bi, bj = best
        t.row_swap(pos, bi)
        t.col_swap(pos, bj)
        while True:
            pivot = t.a[pos][pos]
            again = False
            for i in range(pos + 1, m):
                x = t.a[i][pos]
                if x:
                    q = x // pivot
                    t.row_addmul(i, pos, -q)
                    if t.a[i][pos]:  # remainder smaller than pivot: promote it
                        t.row_swap(pos, i)
                        again = True
                        break
            if again:
                continue
            for j in range(pos + 1, n):
                x = t.a[pos][j]
                if x:
                    q = x // pivot
                    t.col_addmul(j, pos, -q)
                    if t.a[pos][j]:
                        t.col_swap(pos, j)
                        again = True
                        break
            if again:
                continue
            # row and column are clear; enforce divisibility of the rest
            pivot = t.a[pos][pos]
            bad = None
            for i in range(pos + 1, m):
                row = t.a[i]
                for j in range(pos + 1, n):
                    if row[j] % pivot:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            t.row_addmul(pos, bad, 1)
        if t.a[pos][pos] < 0:
            t.row_negate(pos)
        pos += 1
    diagonal = [t.a[k][k] for k in range(size)]
    return SmithForm(
        rows=m,
        cols=n,
        diagonal=diagonal,
        U=t.u if transforms else None,
        U_inv=t.ui if transforms else None,
        V=t.v if transforms else None,
        V_inv=t.vi if transforms else None,
    )


def _divisibility_chain(factors: list[int]) -> list[int]:
    """Normalise a multiset of nonzero factors into a divisibility chain."""
    fs = sorted(abs(f) for f in factors)
    changed = True
    while changed:
        changed = False
        for i in range(len(fs) - 1):
            a, b = fs[i], fs[i + 1]
            if b % a:
                g = gcd(a, b)
                fs[i], fs[i + 1] = g, a * b // g
                changed = True
        fs.sort()
    return fs


def sparse_invariant_factors(columns, num_rows: int):
    """(rank, invariant_factors) of a matrix given as sparse columns.

    columns: iterable of {row_index: value} dicts.  Unit pivots are
    eliminated greedily, preferring short rows to limit fill-in; whatever is
    left without unit entries goes through the dense routine.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            if v:
                rows.setdefault(r, {})[j] = v
                cols.setdefault(j, set()).add(r)
    unit_pivots = 0

    def pick_unit():
        best = None
        for r, row in rows.items():
            ln = len(row)
            for j, v in row.items():
                if v in (1, -1):
                    score = (ln - 1) * (len(cols[j]) - 1)
                    if best is None or score < best[0]:
                        best = (score, r, j)
                    if score == 0:
                        return best
        return best

    while True:
        found = pick_unit()
        if found is None:
            break
        _, pr, pc = found
        pv = rows[pr][pc]
        prow = rows.pop(pr)
        for j in prow:
            cols[j].discard(pr)
            if not cols[j]:
                del cols[j]
        # clear the pivot column with row operations
        for r in list(cols.get(pc, ())):
            row = rows[r]
            k = row.pop(pc) * pv
            cols[pc].discard(r)
            for j, v in prow.items():
                if j == pc:
                    continue
                nv = row.get(j, 0) - k * v
                if nv:
                    row[j] = nv
                    cols.setdefault(j, set()).add(r)
                else:
                    if j in row:
                        del row[j]
                        cols[j].discard(r)
                        if not cols[j]:
                            del cols[j]
            if not row:
                del rows[r]
        cols.pop(pc, None)
        unit_pivots += 1

    factors = [1] * unit_pivots
    if rows:
        # dense residue: no unit entries remain
        row_ids = sorted(rows)
        col_ids = sorted({j for row in rows.values() for j in row})
        cmap = {j: k for k, j in enumerate(col_ids)}
        dense = [[0] * len(col_ids) for _ in row_ids]
        for i, r in enumerate(row_ids):
            for j, v in rows[r].items():
                dense[i][cmap[j]] = v
        sf = smith_normal_form(dense, transforms=False)
        factors.extend(sf.invariant_factors)
    factors = _divisibility_chain(factors)
    return len(factors), factors
