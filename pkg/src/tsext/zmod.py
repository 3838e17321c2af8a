"""Exact integer linear algebra over mixed moduli.

Matrices are plain lists of rows of Python ints, so there is no overflow.
A modulus of 0 stands for Z itself (a free coordinate or an exact equation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix, inner: int | None = None) -> IntMatrix:
    if inner is None:
        inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def matvec(a: IntMatrix, v) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: IntMatrix, ncols: int | None = None) -> IntMatrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


@dataclass
class SnfResult:
    """``u @ m @ v == d`` with u, v unimodular and d diagonal, d1 | d2 | ... (zeros last).

    ``u_inv`` is filled only when requested; ``u`` or ``v`` may be None when
    tracking was switched off.
    """

    d: IntMatrix
    u: IntMatrix | None
    v: IntMatrix | None
    u_inv: IntMatrix | None
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))]


def smith_normal_form(
    m: IntMatrix,
    ncols: int | None = None,
    *,
    track_u: bool = True,
    track_v: bool = True,
    track_u_inv: bool = False,
) -> SnfResult:
    """Smith normal form with deterministic pivoting.

    Each stage pivots on the entry of least nonzero absolute value in the
    remaining block, ties broken by lowest (row, col).
    """
    R = len(m)
    C = len(m[0]) if R else (ncols or 0)
    D = [[int(x) for x in row] for row in m]
    if any(len(row) != C for row in D):
        raise ValueError("ragged matrix")
    U = identity(R) if track_u else None
    Ui = identity(R) if track_u_inv else None
    V = identity(C) if track_v else None

    def row_swap(i, k):
        if i == k:
            return
        D[i], D[k] = D[k], D[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]
        if Ui is not None:
            for row in Ui:
                row[i], row[k] = row[k], row[i]

    def col_swap(j, l):
        if j == l:
            return
        for row in D:
            row[j], row[l] = row[l], row[j]
        if V is not None:
            for row in V:
                row[j], row[l] = row[l], row[j]

    def row_addmul(i, k, q):
        # row_i += q * row_k
        ri, rk = D[i], D[k]
        for j in range(C):
            if rk[j]:
                ri[j] += q * rk[j]
        if U is not None:
            ui, uk = U[i], U[k]
            for j in range(R):
                if uk[j]:
                    ui[j] += q * uk[j]
        if Ui is not None:
            for row in Ui:
                if row[i]:
                    row[k] -= q * row[i]

    def col_addmul(j, l, q):
        # col_j += q * col_l
        for row in D:
            if row[l]:
                row[j] += q * row[l]
        if V is not None:
            for row in V:
                if row[l]:
                    row[j] += q * row[l]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]
        if Ui is not None:
            for row in Ui:
                row[i] = -row[i]

    t = 0
    while t < min(R, C):
        best = None
        for i in range(t, R):
            row = D[i]
            for j in range(t, C):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = D[t][t]
            clean = True
            for i in range(t + 1, R):
                if D[i][t]:
                    row_addmul(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, C):
                if D[t][j]:
                    col_addmul(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                cand = [(abs(D[i][t]), i, t) for i in range(t, R) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, C) if D[t][j]]
                _, i, j = min(cand)
                row_swap(t, i)
                col_swap(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, R) if any(x % p for x in D[i][t + 1:])),
                None,
            )
            if bad is None:
                break
            row_addmul(t, bad, 1)
        if D[t][t] < 0:
            negate_row(t)
        t += 1
    return SnfResult(d=D, u=U, v=V, u_inv=Ui, rank=t)


# ---------------------------------------------------------------------------
# Congruence systems


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _reduce_rows(rows: list[list[int]], modulus: int, ncols: int) -> list[list[int]]:
    """Row echelon form over Z (entries reduced mod ``modulus`` when positive).

    Only unimodular row operations are used, so the set of solutions of
    ``row . x = 0 (mod modulus)`` is unchanged. At most ``ncols`` rows survive.
    """
    pivots: dict[int, list[int]] = {}
    order: list[int] = []

    def red(row):
        return [x % modulus for x in row] if modulus else row

    for row in rows:
        r = red(list(row))
        j = 0
        while j < ncols:
            if r[j] == 0:
                j += 1
                continue
            p = pivots.get(j)
            if p is None:
                pivots[j] = r
                order.append(j)
                break
            a, b = p[j], r[j]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            newp = red([x * u + y * v for u, v in zip(p, r)])
            r = red([ag * v - bg * u for u, v in zip(p, r)])
            pivots[j] = newp
            j += 1
    return [pivots[j] for j in sorted(order)]


def _group_rows(m: IntMatrix, target_moduli, ncols: int, extra=None):
    if len(m) != len(target_moduli):
        raise ValueError(f"{len(m)} rows but {len(target_moduli)} target moduli")
    for row in m:
        if len(row) != ncols:
            raise ValueError(f"row length {len(row)} does not match {ncols} unknowns")
    groups: dict[int, list[list[int]]] = {}
    for i, (row, t) in enumerate(zip(m, target_moduli)):
        if t < 0:
            raise ValueError("moduli must be nonnegative")
        r = list(row) + ([extra[i]] if extra is not None else [])
        groups.setdefault(int(t), []).append(r)
    return groups


def _lifted_system(m, target_moduli, ncols, rhs=None):
    """Pre-reduced rows of [m | diag(t)], plus the reduced right-hand side if given."""
    width = ncols + (1 if rhs is not None else 0)
    groups = _group_rows(m, target_moduli, ncols, rhs)
    rows, mods = [], []
    for t in sorted(groups):
        for r in _reduce_rows(groups[t], t, width):
            rows.append(r)
            mods.append(t)
    slack = [i for i, t in enumerate(mods) if t]
    A, b = [], []
    for i, r in enumerate(rows):
        A.append(r[:ncols] + [mods[i] if i == s else 0 for s in slack])
        b.append(r[ncols] if rhs is not None else 0)
    return A, b, ncols + len(slack)


def kernel_mod(m: IntMatrix, target_moduli, source_moduli) -> list[list[int]]:
    """Generators of {x in prod Z_s : m x = 0 componentwise mod target_moduli}.

    Each equation row must be well defined on the source group, i.e. shifting
    x_j by s_j must not change it modulo the row's target. The system is
    lifted to an integer system with one slack column per modular row and
    its integer kernel is read off from the Smith normal form.
    """
    n = len(source_moduli)
    A, _, width = _lifted_system(m, target_moduli, n)
    if not A:
        gens = [[int(i == j) for i in range(n)] for j in range(n)]
    else:
        snf = smith_normal_form(A, width, track_u=False)
        V = snf.v
        gens = [[V[i][c] for i in range(n)] for c in range(snf.rank, width)]
    out, seen = [], set()
    for v in gens:
        v = [x % s if s else x for x, s in zip(v, source_moduli)]
        key = tuple(v)
        if any(v) and key not in seen:
            seen.add(key)
            out.append(v)
    return out


def solve_mod(m: IntMatrix, rhs, target_moduli, source_moduli) -> list[int] | None:
    """One solution x of m x = rhs (mod target_moduli), or None if there is none."""
    n = len(source_moduli)
    A, b, width = _lifted_system(m, target_moduli, n, rhs=list(rhs))
    if not A:
        return [0] * n
    snf = smith_normal_form(A, width, track_u=True)
    ub = matvec(snf.u, b)
    y = [0] * width
    for i, val in enumerate(ub):
        if i < snf.rank:
            q, r = divmod(val, snf.d[i][i])
            if r:
                return None
            y[i] = q
        elif val:
            return None
    w = matvec(snf.v, y)
    return [x % s if s else x for x, s in zip(w[:n], source_moduli)]


# ---------------------------------------------------------------------------
# Quotients of lattices


class NotInLatticeError(ValueError):
    pass


@dataclass
class Subquotient:
    """The finite abelian group M / N for integer lattices N <= M in Z^n.

    ``factors`` are the nontrivial invariant factors (0 marks a free Z
    summand); ``generators`` are integer vectors of M whose classes are the
    standard generators; ``coordinates`` maps a vector of M to its class.
    """

    n: int
    factors: tuple[int, ...]
    generators: list[list[int]]
    _u1: IntMatrix
    _d1: list[int]
    _u2: IntMatrix
    _keep: list[int]

    @property
    def order(self) -> int:
        if 0 in self.factors:
            raise ValueError("infinite quotient")
        return math.prod(self.factors)

    def lattice_coordinates(self, x) -> list[int]:
        y = matvec(self._u1, x)
        r = len(self._d1)
        out = []
        for i, val in enumerate(y):
            if i < r:
                q, rem = divmod(val, self._d1[i])
                if rem:
                    raise NotInLatticeError("vector is not in the lattice")
                out.append(q)
            elif val:
                raise NotInLatticeError("vector is not in the lattice")
        return out

    def contains(self, x) -> bool:
        try:
            self.lattice_coordinates(x)
        except NotInLatticeError:
            return False
        return True

    def coordinates(self, x) -> tuple[int, ...]:
        c = matvec(self._u2, self.lattice_coordinates(x))
        return tuple(c[i] % f if f else c[i] for i, f in zip(self._keep, self.factors))


def subquotient(m_gens, n_gens, n: int) -> Subquotient:
    """Structure of span(m_gens) / span(n_gens); requires span(n_gens) <= span(m_gens)."""
    M = transpose([list(v) for v in m_gens], n) if m_gens else [[] for _ in range(n)]
    s1 = smith_normal_form(M, len(m_gens), track_u=True, track_v=False, track_u_inv=True)
    r = s1.rank
    d1 = [s1.d[i][i] for i in range(r)]
    # basis of M: b_i = d1_i * (column i of u^-1)
    basis = [[s1.u_inv[row][i] * d1[i] for row in range(n)] for i in range(r)]
    sq = Subquotient(n, (), [], s1.u, d1, [], [])
    X = transpose([sq.lattice_coordinates(v) for v in n_gens], r) if n_gens else [[] for _ in range(r)]
    s2 = smith_normal_form(X, len(n_gens), track_u=True, track_v=False, track_u_inv=True)
    d2 = [s2.d[i][i] if i < s2.rank else 0 for i in range(r)]
    keep = [i for i in range(r) if d2[i] != 1]
    gens = []
    for i in keep:
        # column i of (basis @ u2^-1)
        col = [s2.u_inv[k][i] for k in range(r)]
        gens.append([sum(basis[k][row] * col[k] for k in range(r)) for row in range(n)])
    sq.factors = tuple(d2[i] for i in keep)
    sq.generators = gens
    sq._u2 = s2.u
    sq._keep = keep
    return sq


def cokernel_invariants(generators, ambient_moduli):
    """Invariant factors of (prod Z_a) / span(generators) and the projection onto them.

    ``generators`` is a list of vectors (the columns of the generator
    matrix). Returns ``(factors, project)`` where ``project(x)`` gives the
    coordinates of the class of x.
    """
    n = len(ambient_moduli)
    for v in generators:
        if len(v) != n:
            raise ValueError(f"generator of length {len(v)} in ambient of rank {n}")
    unit = [[int(i == j) for i in range(n)] for j in range(n)]
    rel = [list(v) for v in generators]
    rel += [[a if i == j else 0 for i in range(n)] for j, a in enumerate(ambient_moduli) if a]
    sq = subquotient(unit, rel, n)
    return sq.factors, sq.coordinates
