"""Dense two-phase simplex over exact rationals.

Solves ``maximize c.x  subject to  A x = b, x >= 0`` with Bland's rule, so
it terminates on degenerate problems.  Intended for tens of variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple[Fraction, ...]
    pivots: int


def _frac_row(row) -> list[Fraction]:
    return [Fraction(v) for v in row]


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by Gaussian elimination."""
    m = [_frac_row(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        for i in range(r + 1, len(m)):
            f = m[i][col] / pv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


class _Tableau:
    def __init__(self, A: list[list[Fraction]], b: list[Fraction], basis: list[int]):
        self.A = A
        self.b = b
        self.basis = basis
        self.pivots = 0

    def pivot(self, row: int, col: int):
        A, b = self.A, self.b
        pv = A[row][col]
        A[row] = [v / pv for v in A[row]]
        b[row] = b[row] / pv
        for i in range(len(A)):
            if i != row and A[i][col] != 0:
                f = A[i][col]
                A[i] = [u - f * v for u, v in zip(A[i], A[row])]
                b[i] -= f * b[row]
        self.basis[row] = col
        self.pivots += 1

    def reduced_costs(self, c: list[Fraction], allowed: Sequence[int]) -> dict[int, Fraction]:
        cb = [c[j] for j in self.basis]
        out = {}
        for j in allowed:
            out[j] = c[j] - sum((cb[i] * self.A[i][j] for i in range(len(self.A))
                                 if self.A[i][j] != 0), Fraction(0))
        return out

    def optimize(self, c: list[Fraction], allowed: Sequence[int], max_pivots: int):
        allowed = sorted(allowed)
        while True:
            if self.pivots > max_pivots:
                raise LPError("pivot limit exceeded")
            basic = set(self.basis)
            rc = self.reduced_costs(c, [j for j in allowed if j not in basic])
            # Bland: lowest-index improving column, lowest-index basic variable on ties
            entering = next((j for j in sorted(rc) if rc[j] > 0), None)
            if entering is None:
                return
            best = None
            for i, row in enumerate(self.A):
                if row[entering] > 0:
                    ratio = self.b[i] / row[entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective is unbounded")
            self.pivot(best[1], entering)


def maximize(c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence,
             max_pivots: int = 10_000) -> LPResult:
    """Maximize ``c.x`` over ``{x >= 0 : A_eq x = b_eq}`` exactly.

    Redundant equality rows are detected and dropped after phase one.
    """
    n = len(c)
    A = [_frac_row(r) for r in A_eq]
    b = [Fraction(v) for v in b_eq]
    if any(len(r) != n for r in A):
        raise ValueError("A_eq has rows of the wrong width")
    for i in range(len(A)):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    m = len(A)

    # phase one: artificial variables n..n+m-1
    A1 = [row + [Fraction(int(i == k)) for k in range(m)] for i, row in enumerate(A)]
    tab = _Tableau(A1, list(b), list(range(n, n + m)))
    c1 = [Fraction(0)] * n + [Fraction(-1)] * m
    tab.optimize(c1, range(n + m), max_pivots)
    if sum(tab.b[i] for i in range(m) if tab.basis[i] >= n) != 0:
        raise Infeasible("equality constraints admit no nonnegative solution")

    # drive remaining (zero-level) artificials out, dropping redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            col = next((j for j in range(n) if tab.A[i][j] != 0), None)
            if col is None:
                continue
            tab.pivot(i, col)
        keep.append(i)
    tab.A = [tab.A[i][:n] for i in keep]
    tab.b = [tab.b[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    cc = _frac_row(c)
    tab.optimize(cc, range(n), max_pivots)
    x = [Fraction(0)] * n
    for i, j in enumerate(tab.basis):
        x[j] = tab.b[i]
    value = sum((ci * xi for ci, xi in zip(cc, x)), Fraction(0))
    return LPResult(value, tuple(x), tab.pivots)
