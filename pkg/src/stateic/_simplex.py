"""Dense two-phase simplex over exact rationals (gmpy2.mpq), Bland's rule.

Solves ``min c.x  s.t.  M x = d, x >= 0``.  Only used on the small systems
produced by region projection, so the tableau is a plain list of lists.
"""

from __future__ import annotations

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _pivot(T, basis, r, k):
    row = T[r]
    p = row[k]
    if p != ONE:
        inv = ONE / p
        T[r] = row = [v * inv for v in row]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[k]
        if f:
            T[i] = [a - f * b if b else a for a, b in zip(other, row)]
    basis[r] = k


def _run(T, basis, ncols, stop=None):
    """Minimise the objective stored in the last row; columns ``>= ncols`` are frozen."""
    obj = T[-1]
    while True:
        if stop is not None and -obj[-1] <= stop:
            return OPTIMAL
        k = next((j for j in range(ncols) if obj[j] < 0), None)
        if k is None:
            return OPTIMAL
        best = None
        for i in range(len(T) - 1):
            a = T[i][k]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], k)
        obj = T[-1]


def solve(c, M, d, stop=None):
    """Return ``(status, value, x)``.

    ``stop``: phase 2 may return early once the objective is ``<= stop``
    (the value then is an upper bound on the optimum, ``x`` feasible).
    """
    m, n = len(M), len(c)
    rows = []
    for i in range(m):
        r = [mpq(v) for v in M[i]]
        b = mpq(d[i])
        if b < 0:
            r, b = [-v for v in r], -b
        rows.append(r + [ONE if j == i else ZERO for j in range(m)] + [b])
    width = n + m
    # phase 1 objective: sum of artificials, expressed in non-basic terms
    obj = [ZERO] * (width + 1)
    for r in rows:
        for j in range(n):
            obj[j] -= r[j]
        obj[-1] -= r[-1]
    T = rows + [obj]
    basis = list(range(n, n + m))
    _run(T, basis, n)
    if -T[-1][-1] != 0:
        return INFEASIBLE, None, None
    # drive artificials out of the basis; drop rows that are linearly dependent
    i = 0
    while i < len(T) - 1:
        if basis[i] >= n:
            k = next((j for j in range(n) if T[i][j] != 0), None)
            if k is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, k)
        i += 1
    T = [r[:n] + [r[-1]] for r in T[:-1]]
    obj = [mpq(v) for v in c] + [ZERO]
    for i, b in enumerate(basis):
        f = obj[b]
        if f:
            obj = [a - f * v for a, v in zip(obj, T[i])]
    T.append(obj)
    status = _run(T, basis, n, stop)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [ZERO] * n
    for i, b in enumerate(basis):
        x[b] = T[i][-1]
    return OPTIMAL, -T[-1][-1], x
