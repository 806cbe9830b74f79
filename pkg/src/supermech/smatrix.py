"""Exact linear algebra for supermatrices: body operations plus nilpotent-soul
corrections.

A supported matrix entry is a constant plus a "soul" in which every term
contains at least one odd generator; such souls are nilpotent, so inverses
and linear solves terminate exactly.
"""
from __future__ import annotations

from .errors import NonNumericBody, SingularBody
from .superalgebra import (
    C_ONE,
    C_ZERO,
    SuperPoly,
    ZERO,
    as_poly,
    const_poly,
)


def soul_terms(p):
    return [m for m in as_poly(p).terms if m.factors]


def has_nilpotent_soul(p):
    """True when every non-constant term carries an odd generator."""
    return all(
        any(g.parity for g, _ in m.factors) for m in soul_terms(as_poly(p))
    )


def soul_of(p):
    p = as_poly(p)
    return p - const_poly(p.body)


def check_numeric_body(p):
    if not has_nilpotent_soul(p):
        raise NonNumericBody(f"entry {p} has a non-constant even part")


def body_matrix(m):
    for row in m:
        for entry in row:
            check_numeric_body(entry)
    return [[as_poly(entry).body for entry in row] for row in m]


def body_rank(b):
    """Rank of a matrix of Coefficients via fraction-exact elimination."""
    rows = [list(row) for row in b]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if not rows[r][col].is_zero), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(nrows):
            if r != rank and not rows[r][col].is_zero:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def body_inverse(b):
    """Gauss-Jordan inverse of a Coefficient matrix; raises SingularBody."""
    n = len(b)
    aug = [list(row) + [C_ONE if i == j else C_ZERO for j in range(n)]
           for i, row in enumerate(b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not aug[r][col].is_zero), None)
        if pivot is None:
            raise SingularBody("matrix body is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inv()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def body_nullspace(b):
    """Right null vectors of a Coefficient matrix, first component normalized."""
    nrows = len(b)
    ncols = len(b[0]) if nrows else 0
    rows = [list(row) for row in b]
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if not rows[r][col].is_zero), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(nrows):
            if r != rank and not rows[r][col].is_zero:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [C_ZERO] * ncols
        vec[fc] = C_ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def mat_identity(n):
    return [[ONE_P if i == j else ZERO for j in range(n)] for i in range(n)]


ONE_P = const_poly(1)


def mat_from_bodies(b):
    return [[const_poly(x) for x in row] for row in b]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if k else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ZERO
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_is_zero(m):
    return all(entry.is_zero for row in m for entry in row)


def invert_supermatrix(m):
    """Exact inverse: body inverse composed with a terminating Neumann series.

    Requires an invertible body and nilpotent souls; m @ result is exactly
    the identity.
    """
    n = len(m)
    if n == 0:
        return []
    bodies = body_matrix(m)
    binv = mat_from_bodies(body_inverse(bodies))
    souls = [[soul_of(entry) for entry in row] for row in m]
    if mat_is_zero(souls):
        return binv
    x = mat_mul(binv, souls)
    series = mat_identity(n)
    power = mat_identity(n)
    n_odd = len({g for row in souls for entry in row
                 for mono in entry.terms for g, _ in mono.factors if g.parity})
    for _ in range(n_odd + 1):
        power = [[-entry for entry in row] for row in mat_mul(power, x)]
        if mat_is_zero(power):
            break
        series = [[series[i][j] + power[i][j] for j in range(n)] for i in range(n)]
    else:
        raise NonNumericBody("soul part is not nilpotent")
    return mat_mul(series, binv)


def solve_left(m, rhs):
    """Solve sum_j m[i][j] * x[j] = rhs[i] for the column x."""
    inv = invert_supermatrix(m)
    return [sum((inv[i][j] * rhs[j] for j in range(len(rhs))), ZERO)
            for i in range(len(rhs))]


def invert_poly(p):
    """Inverse of a ring element with invertible body and nilpotent soul."""
    p = as_poly(p)
    check_numeric_body(p)
    body = p.body
    if body.is_zero:
        raise SingularBody(f"{p} has zero body")
    binv = body.inv()
    soul = soul_of(p)
    if soul.is_zero:
        return const_poly(binv)
    x = soul * binv
    series = ONE_P
    power = ONE_P
    n_odd = len({g for m in soul.terms for g, _ in m.factors if g.parity})
    for _ in range(n_odd + 1):
        power = -(power * x)
        if power.is_zero:
            break
        series = series + power
    return series * binv


def solve_linear_rows(rows, unknowns, reduce_fn):
    """Jointly solve rows of the form const + sum_k coeff_k * x_k = 0.

    rows: (label, const: SuperPoly, {unknown_key: coeff SuperPoly}).
    Unknowns are eliminated one at a time where a body-invertible single
    pivot exists, falling back to a block solve over a body-invertible
    square subsystem.  Returns (solution, pivot_labels, residual_rows,
    implicit_rows): residual rows lost all unknowns but kept a nonzero
    constant part; implicit rows could not be solved.
    """
    solution = {}
    pivot_labels = set()
    residuals = []
    pending = list(rows)
    for _ in range(len(unknowns) + 2):
        next_rows = []
        progress = False
        for label, const, coeffs in pending:
            acc = const
            live = {}
            for key, c in coeffs.items():
                if key in solution:
                    acc = acc + c * solution[key]
                else:
                    live[key] = c
            acc = reduce_fn(acc)
            live = {k: reduce_fn(c) for k, c in live.items()}
            live = {k: c for k, c in live.items() if not c.is_zero}
            if not live:
                if not acc.is_zero:
                    residuals.append((label, acc))
                continue
            if len(live) == 1:
                (key, c), = live.items()
                if not c.body.is_zero and has_nilpotent_soul(c):
                    solution[key] = reduce_fn(-(invert_poly(c) * acc))
                    pivot_labels.add(label)
                    progress = True
                    continue
            next_rows.append((label, acc, live))
        if progress:
            pending = next_rows
            continue
        # block fallback: square body-invertible subsystem
        present = [u for u in unknowns
                   if u not in solution and any(u in live for _, _, live in next_rows)]
        if not present or not next_rows:
            pending = next_rows
            break
        chosen = []
        mat = []
        for row in next_rows:
            vec = [row[2].get(u, ZERO) for u in present]
            if not all(has_nilpotent_soul(v) for v in vec):
                continue
            trial = mat + [vec]
            if body_rank([[v.body for v in r] for r in trial]) == len(trial):
                mat.append(vec)
                chosen.append(row)
                if len(mat) == len(present):
                    break
        if len(mat) != len(present):
            pending = next_rows
            break
        rhs = [-row[1] for row in chosen]
        values = solve_left(mat, rhs)
        for u, v in zip(present, values):
            solution[u] = reduce_fn(v)
        pivot_labels.update(row[0] for row in chosen)
        pending = next_rows
    return solution, pivot_labels, residuals, pending


class SpanReducer:
    """Row-echelon reduction of expressions over their monomial supports.

    Coefficients of the eliminating combinations are rational constants,
    so the reduction never invents relations that do not already hold.
    """

    def __init__(self, exprs=()):
        self.pivots = []  # (pivot fkey, {fkey: coeff}, {fkey: factors})
        for e in exprs:
            self.add(e)

    @staticmethod
    def _vec(p):
        coeffs = {}
        shapes = {}
        for m in as_poly(p).terms:
            key = m.fkey
            coeffs[key] = m.coeff
            shapes[key] = m.factors
        return coeffs, shapes

    def _reduce_vec(self, coeffs):
        for key, row, _ in self.pivots:
            c = coeffs.get(key)
            if c is None or c.is_zero:
                continue
            for k, v in row.items():
                nv = coeffs.get(k, C_ZERO) - c * v
                if nv.is_zero:
                    coeffs.pop(k, None)
                else:
                    coeffs[k] = nv
        return coeffs

    def add(self, expr):
        coeffs, shapes = self._vec(expr)
        coeffs = self._reduce_vec(coeffs)
        live = sorted((k for k, v in coeffs.items() if not v.is_zero))
        if not live:
            return
        pivot = live[0]
        inv = coeffs[pivot].inv()
        row = {k: v * inv for k, v in coeffs.items() if not v.is_zero}
        self.pivots.append((pivot, row, shapes))
        self.pivots.sort(key=lambda item: item[0])

    def reduce(self, p):
        coeffs, shapes = self._vec(p)
        coeffs = self._reduce_vec(coeffs)
        monos = []
        for key, c in coeffs.items():
            if c.is_zero:
                continue
            factors = shapes.get(key)
            if factors is None:
                for _, row, rshapes in self.pivots:
                    if key in rshapes:
                        factors = rshapes[key]
                        break
            monos.append((key, c, factors))
        monos.sort(key=lambda item: item[0])
        from .superalgebra import Monomial

        return SuperPoly(tuple(Monomial(c, f) for _, c, f in monos))
