"""Exact linear algebra over QQ and ZZ.

Everything here works on tuples of ints / fractions.Fraction; no floats, no
machine-word arithmetic.  Three layers:

* rational Gauss-Jordan (rref, rank, solvers, affine solution spaces),
* integer lattice normal forms (row-style Hermite form, Smith form with
  transforms, kernels, right inverses),
* Fourier-Motzkin feasibility for mixed strict/non-strict rational systems,
  with witness-point extraction.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]
IntVec = tuple[int, ...]


def frac_vec(v: Sequence) -> Vec:
    return tuple(Fraction(x) for x in v)


def frac_mat(rows: Sequence[Sequence]) -> Mat:
    return tuple(frac_vec(r) for r in rows)


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dot: length mismatch {len(a)} vs {len(b)}")
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def vec_add(a: Sequence, b: Sequence) -> Vec:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def vec_sub(a: Sequence, b: Sequence) -> Vec:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


def vec_scale(c, a: Sequence) -> Vec:
    c = Fraction(c)
    return tuple(c * Fraction(x) for x in a)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Mat:
    bt = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def identity_mat(n: int) -> Mat:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> Mat:
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0]))) if m else ()


# ---------------------------------------------------------------------------
# rational elimination


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r]], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve_square(a: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """Solve a*x = b for square a; None when a is singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(bb)] for row, bb in zip(a, b)]
    reduced, pivots = rref(aug)
    if len(pivots) != n or pivots != list(range(n)):
        return None
    return tuple(reduced[i][n] for i in range(n))


def solve_general(a: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """One rational solution of a*x = b, or None when inconsistent."""
    if not a:
        return ()
    n = len(a[0])
    aug = [list(map(Fraction, row)) + [Fraction(bb)] for row, bb in zip(a, b)]
    reduced, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(reduced, pivots):
        x[p] = row[n]
    return tuple(x)


def nullspace(a: Sequence[Sequence], n: Optional[int] = None) -> list[Vec]:
    """Basis of {x in QQ^n : a*x = 0}."""
    if n is None:
        n = len(a[0]) if a else 0
    reduced, pivots = rref(a) if a else ([], [])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def affine_solution_space(
    eqs: Sequence[tuple[Sequence, Fraction]], n: int
) -> Optional[tuple[Vec, list[Vec]]]:
    """Solutions of the system {a.x = c}: (particular point, direction basis),
    or None when inconsistent."""
    if not eqs:
        return tuple(Fraction(0) for _ in range(n)), list(identity_mat(n))
    a = [list(coef) for coef, _ in eqs]
    b = [c for _, c in eqs]
    point = solve_general(a, b)
    if point is None:
        return None
    return point, nullspace(a, n)


# ---------------------------------------------------------------------------
# integer lattice normal forms


def vec_content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def hnf_rows(mat: Sequence[Sequence[int]]) -> tuple[IntVec, ...]:
    """Canonical Hermite basis of the row lattice of ``mat``.

    Pivots are positive, entries above a pivot are reduced into [0, pivot).
    Equal row lattices produce identical output, so this is usable as a
    structural-equality key.
    """
    rows = [list(map(int, r)) for r in mat if any(r)]
    if not rows:
        return ()
    n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise ValueError("ragged matrix")
    pr = 0
    for col in range(n):
        idx = [i for i in range(pr, len(rows)) if rows[i][col]]
        if not idx:
            continue
        while len(idx) > 1:
            idx.sort(key=lambda i: abs(rows[i][col]))
            base = idx[0]
            for i in idx[1:]:
                q = rows[i][col] // rows[base][col]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[base])]
            idx = [i for i in range(pr, len(rows)) if rows[i][col]]
        i0 = idx[0]
        rows[pr], rows[i0] = rows[i0], rows[pr]
        if rows[pr][col] < 0:
            rows[pr] = [-a for a in rows[pr]]
        p = rows[pr][col]
        for i in range(pr):
            q = rows[i][col] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[pr])]
        pr += 1
        if pr == len(rows):
            break
    return tuple(tuple(r) for r in rows[:pr])


def integer_kernel(mat: Sequence[Sequence[int]], n: int) -> tuple[IntVec, ...]:
    """Canonical basis of {v in ZZ^n : mat * v = 0} (always a saturated
    sublattice of ZZ^n)."""
    m = len(mat)
    if m == 0:
        return hnf_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)])
    # Row-reduce [mat^T | I_n]; rows with vanishing head record kernel vectors.
    big = [[int(mat[j][i]) for j in range(m)] + [1 if k == i else 0 for k in range(n)]
           for i in range(n)]
    reduced = hnf_rows(big)
    kernel = [row[m:] for row in reduced if not any(row[:m])]
    return hnf_rows(kernel) if kernel else ()


def smith_normal_form(
    mat: Sequence[Sequence[int]],
) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith form: returns (d, u, v) with d = u * mat * v diagonal,
    d[i][i] | d[i+1][i+1], and u, v unimodular."""
    a = [list(map(int, r)) for r in mat]
    m = len(a)
    n = len(a[0]) if a else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        # move a pivot of minimal magnitude into (t, t)
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    # enforce divisibility chain
    t = min(m, n)
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if dj % max(di, 1) != 0 and di != 0:
                # fold d_{i+1} into position (i, i) via one extra cycle
                add_col(i, i + 1, -1)
                # re-clear column/row i
                q = a[i + 1][i] // a[i][i] if a[i][i] else 0
                while a[i + 1][i]:
                    q = a[i + 1][i] // a[i][i]
                    add_row(i + 1, i, q)
                    if a[i + 1][i] == 0:
                        break
                    swap_rows(i, i + 1)
                while a[i][i + 1]:
                    q = a[i][i + 1] // a[i][i]
                    add_col(i + 1, i, q)
                    if a[i][i + 1] == 0:
                        break
                    swap_cols(i, i + 1)
                if a[i][i] < 0:
                    negate_row(i)
                if a[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return a, u, v


def smith_diagonal(mat: Sequence[Sequence[int]]) -> list[int]:
    d, _, _ = smith_normal_form(mat)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def integer_right_inverse(mat: Sequence[Sequence[int]]) -> Optional[list[list[int]]]:
    """Integer S with mat * S = I; exists iff mat is surjective onto ZZ^k."""
    k = len(mat)
    n = len(mat[0]) if mat else 0
    d, u, v = smith_normal_form(mat)
    diag = [d[i][i] for i in range(min(k, n))]
    if len(diag) < k or any(x not in (1, -1) for x in diag[:k]):
        return None
    # mat = u^-1 d v^-1, so S = v * d^+ * u satisfies mat*S = I.
    dplus = [[(1 if (i == j and diag[i] == 1) else (-1 if i == j else 0))
              for j in range(k)] for i in range(n)]
    s = mat_mul(frac_mat(v), mat_mul(frac_mat(dplus), frac_mat(u)))
    return [[int(x) for x in row] for row in s]


def invert_unimodular(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(mat)
    aug = [list(map(Fraction, row)) + list(identity_mat(n)[i]) for i, row in enumerate(mat)]
    reduced, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is not invertible")
    inv = [row[n:] for row in reduced]
    for row in inv:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility

# A constraint is (coefs, rhs, strict) and reads  coefs . x  >=  rhs
# (strictly when strict=True).
Constraint = tuple[Vec, Fraction, bool]


def _normalize_constraint(coefs: Vec, rhs: Fraction, strict: bool) -> Constraint:
    lead = next((c for c in coefs if c != 0), None)
    if lead is None:
        return coefs, rhs, strict
    scale = abs(lead)
    return tuple(c / scale for c in coefs), rhs / scale, strict


def _prune(cons: list[Constraint]) -> list[Constraint]:
    best: dict[Vec, tuple[Fraction, bool]] = {}
    order: list[Vec] = []
    for coefs, rhs, strict in cons:
        coefs, rhs, strict = _normalize_constraint(coefs, rhs, strict)
        if coefs not in best:
            best[coefs] = (rhs, strict)
            order.append(coefs)
        else:
            orhs, ostrict = best[coefs]
            if rhs > orhs or (rhs == orhs and strict and not ostrict):
                best[coefs] = (rhs, strict)
    return [(c, best[c][0], best[c][1]) for c in order]


def _eliminate_var(cons: list[Constraint], j: int) -> Optional[list[Constraint]]:
    """FM-eliminate variable j; None signals detected infeasibility."""
    lower, upper, rest = [], [], []
    for coefs, rhs, strict in cons:
        cj = coefs[j]
        if cj > 0:
            lower.append((coefs, rhs, strict))
        elif cj < 0:
            upper.append((coefs, rhs, strict))
        else:
            rest.append((coefs, rhs, strict))
    out = list(rest)
    for lc, lr, ls in lower:
        for uc, ur, us in upper:
            # (lr - sum lc_k x_k)/lc_j <= x_j <= (ur - sum uc)/uc_j combine:
            a = tuple(lc[k] * (-uc[j]) + uc[k] * lc[j] for k in range(len(lc)))
            rhs = lr * (-uc[j]) + ur * lc[j]
            strict = ls or us
            if not any(a):
                if rhs > 0 or (rhs == 0 and strict):
                    return None
                continue
            out.append((a, rhs, strict))
    return _prune(out)


def _feasible_reduced(cons: list[Constraint], nvars: int) -> Optional[Vec]:
    """Feasibility of a pure-inequality system; returns a witness point."""
    cons = _prune(cons)
    # constant-only sanity
    for coefs, rhs, strict in cons:
        if not any(coefs):
            if rhs > 0 or (rhs == 0 and strict):
                return None
    levels = [cons]
    for j in range(nvars - 1, -1, -1):
        nxt = _eliminate_var(levels[-1], j)
        if nxt is None:
            return None
        levels.append(nxt)
    # back substitution, assigning x_0, x_1, ... in turn
    values: list[Fraction] = []
    for j in range(nvars):
        sys_j = levels[nvars - 1 - j]  # constraints on x_0..x_j
        lo: Optional[tuple[Fraction, bool]] = None
        hi: Optional[tuple[Fraction, bool]] = None
        for coefs, rhs, strict in sys_j:
            cj = coefs[j]
            if cj == 0:
                continue
            resid = rhs - sum(coefs[k] * values[k] for k in range(j))
            bound = resid / cj
            if cj > 0:
                if lo is None or bound > lo[0] or (bound == lo[0] and strict):
                    lo = (bound, strict)
            else:
                if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                    hi = (bound, strict)
        if lo is None and hi is None:
            values.append(Fraction(0))
        elif lo is None:
            values.append(hi[0] - 1 if hi[1] else hi[0])
        elif hi is None:
            values.append(lo[0] + 1 if lo[1] else lo[0])
        else:
            if lo[0] == hi[0]:
                values.append(lo[0])
            else:
                values.append((lo[0] + hi[0]) / 2)
    return tuple(values)


def feasible_point(
    n: int,
    equalities: Sequence[tuple[Sequence, object]] = (),
    inequalities: Sequence[tuple[Sequence, object, bool]] = (),
) -> Optional[Vec]:
    """Witness of {x in QQ^n : a.x = c for equalities, a.x >= c (or >) for
    inequalities}, or None if the system is infeasible.

    Equalities are eliminated by substitution first, then Fourier-Motzkin
    runs on the reduced strict/non-strict system.
    """
    eqs = [(frac_vec(a), Fraction(c)) for a, c in equalities]
    sol = affine_solution_space(eqs, n)
    if sol is None:
        return None
    point, basis = sol
    k = len(basis)
    cons: list[Constraint] = []
    for a, c, strict in inequalities:
        av = frac_vec(a)
        c = Fraction(c)
        coefs = tuple(dot(av, b) for b in basis)
        rhs = c - dot(av, point)
        if not any(coefs):
            if rhs > 0 or (rhs == 0 and strict):
                return None
            continue
        cons.append((coefs, rhs, strict))
    t = _feasible_reduced(cons, k)
    if t is None:
        return None
    x = list(point)
    for tj, b in zip(t, basis):
        x = [xi + tj * bi for xi, bi in zip(x, b)]
    return tuple(x)
