"""Independent reference computations the test suite checks the package against.

Each oracle deliberately takes a different route than the library code:

* ``determinantal_divisors`` recovers Smith invariant factors from gcds of
  minors, with no elimination at all.
* ``bar_cohomology_cyclic`` computes group cohomology of a finite cyclic
  group from the unnormalized bar resolution, instead of the 2-periodic
  resolution the library uses.
* ``projector_chern`` integrates gauge-invariant projector curvature on a
  fine mesh, instead of discrete link variables.

They are slow and simple on purpose.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from crystalphase.exactlinalg import (
    FinAbGroup,
    IntMatrix,
    cokernel,
    kernel_basis,
    solve_integer,
)


def determinantal_divisors(mat: IntMatrix) -> tuple[int, ...]:
    """Invariant factors of ``mat`` as ratios of gcds of k x k minors.

    d_k = gcd(all k-minors) / gcd(all (k-1)-minors), with trailing zeros
    once every minor of that size vanishes.  Pure gcd arithmetic; no row
    operations, so it cannot share a bug with an elimination routine.
    """
    r = min(mat.rows, mat.cols)
    out = []
    prev_gcd = 1
    for k in range(1, r + 1):
        g = 0
        for rows in itertools.combinations(range(mat.rows), k):
            for cols in itertools.combinations(range(mat.cols), k):
                g = math.gcd(g, mat.submatrix(rows, cols).det())
        if g == 0:
            out.extend([0] * (r - k + 1))
            break
        out.append(g // prev_gcd)
        prev_gcd = g
    return tuple(out)


def _subquotient(ker_of: IntMatrix, im_of: IntMatrix) -> FinAbGroup:
    """ker(ker_of) / im(im_of) for a two-step complex, as an abelian group."""
    k_basis = kernel_basis(ker_of)
    if k_basis.cols == 0:
        return FinAbGroup.trivial()
    if im_of.cols == 0:
        return FinAbGroup.free(k_basis.cols)
    coords = solve_integer(k_basis, im_of)
    return cokernel(coords.transpose())


def bar_cohomology_cyclic(sigma: IntMatrix, n: int, degree: int) -> FinAbGroup:
    """H^degree(Z_n; Z^d) with the generator acting by ``sigma``.

    Uses the full (unnormalized) bar resolution: C^k has one Z^d summand
    per k-tuple of group elements, and the usual alternating coboundary.
    Exponential in ``degree``, so keep n and degree small.
    """
    d = sigma.rows
    powers = [IntMatrix.identity(d)]
    for _ in range(n - 1):
        powers.append(sigma @ powers[-1])
    if (sigma @ powers[-1]) != IntMatrix.identity(d):
        raise ValueError("sigma does not have the stated order")

    def coboundary(k: int) -> IntMatrix:
        # C^k -> C^{k+1}; empty tuple handles k = 0
        src_tuples = list(itertools.product(range(n), repeat=k))
        dst_tuples = list(itertools.product(range(n), repeat=k + 1))
        src_index = {t: i for i, t in enumerate(src_tuples)}
        rows = [[0] * (d * len(src_tuples)) for _ in range(d * len(dst_tuples))]

        def add_block(dst_t, src_t, mat, sign):
            r0 = dst_tuples.index(dst_t) * d
            c0 = src_index[src_t] * d
            for i in range(d):
                for j in range(d):
                    rows[r0 + i][c0 + j] += sign * mat.get(i, j)

        ident = IntMatrix.identity(d)
        for g in dst_tuples:
            add_block(g, g[1:], powers[g[0]], 1)
            for i in range(1, k + 1):
                merged = g[: i - 1] + ((g[i - 1] + g[i]) % n,) + g[i + 1 :]
                add_block(g, merged, ident, -1 if i % 2 else 1)
            add_block(g, g[:-1], ident, -1 if (k + 1) % 2 else 1)
        return IntMatrix.from_rows(rows)

    if degree == 0:
        return _subquotient(coboundary(0), IntMatrix.zeros(d, 0))
    return _subquotient(coboundary(degree), coboundary(degree - 1))


def projector_chern(h_of_k, n_filled: int, mesh: int = 31, eps: float = 1.0e-5) -> float:
    """Chern number of the lowest ``n_filled`` bands by projector curvature.

    ``h_of_k`` maps reduced momentum (kx, ky), each in units of one
    reciprocal lattice vector, to a Hermitian matrix.  The curvature
    2 Im tr(P dP/dk1 dP/dk2) equals the Berry curvature d1 A2 - d2 A1
    of the occupied frame, needs no gauge choice, and its Riemann sum
    over a smooth periodic integrand converges fast in ``mesh``.
    """

    def projector(kx: float, ky: float) -> np.ndarray:
        h = np.asarray(h_of_k(kx, ky))
        vals, vecs = np.linalg.eigh(h)
        occ = vecs[:, :n_filled]
        return occ @ occ.conj().T

    total = 0.0
    for ix in range(mesh):
        for iy in range(mesh):
            kx, ky = ix / mesh, iy / mesh
            p = projector(kx, ky)
            dp1 = (projector(kx + eps, ky) - projector(kx - eps, ky)) / (2 * eps)
            dp2 = (projector(kx, ky + eps) - projector(kx, ky - eps)) / (2 * eps)
            total += 2.0 * np.imag(np.trace(p @ dp1 @ dp2))
    return total / (2.0 * math.pi * mesh * mesh)


def random_unimodular(rng, dim: int, rounds: int = 12) -> IntMatrix:
    """Random determinant +-1 integer matrix from elementary operations.

    Composes shears with small coefficients, row swaps, and sign flips,
    so entries stay modest while covering GL(d, Z) thoroughly enough for
    property tests.
    """
    mat = IntMatrix.identity(dim)
    for _ in range(rounds):
        kind = rng.integers(0, 3)
        rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
        if kind == 0 and dim > 1:
            i, j = rng.choice(dim, size=2, replace=False)
            rows[int(i)][int(j)] = int(rng.integers(-2, 3)) or 1
        elif kind == 1 and dim > 1:
            i, j = rng.choice(dim, size=2, replace=False)
            i, j = int(i), int(j)
            rows[i][i] = rows[j][j] = 0
            rows[i][j] = rows[j][i] = 1
        else:
            i = int(rng.integers(0, dim))
            rows[i][i] = -1
        mat = mat @ IntMatrix.from_rows(rows)
    return mat
