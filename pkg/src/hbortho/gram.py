"""Inner products of polynomials in H(b), computed from the symbol's Taylor data.

Convention (used everywhere in this package, stated once): the inner product
conjugates its *second* argument, so for monomials with j <= k

    <z^j, z^k>  =  delta_{j,k} + sum_{s=0}^{j} conj(phi_s) phi_{k-j+s},

and the Hermitian extension <z^j, z^k> = conj(<z^k, z^j>) covers j > k.  The
finite sum comes from pairing the conjugate-Toeplitz images of the monomials,
since ||f||^2 in H(b) equals ||f||_2^2 + ||T f||_2^2 with T the conjugate
symbol Toeplitz action.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .catalog import CatalogEntry
from .symbol import SmirnovSymbol, SymbolLike


def monomial_inner(phi: SymbolLike, j: int, k: int) -> complex:
    """<z^j, z^k> in H(b) for the given symbol."""
    if j < 0 or k < 0:
        raise ValueError("monomial exponents must be >= 0")
    if j > k:
        return complex(np.conj(monomial_inner(phi, k, j)))
    coeffs = phi.taylor(k + 1)
    value = np.dot(np.conj(coeffs[: j + 1]), coeffs[k - j : k + 1])
    if j == k:
        value += 1.0
    return complex(value)


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian positive-definite matrix of monomial inner products."""

    entries: np.ndarray  # (n+1, n+1) complex128, entries[j, k] = <z^j, z^k>
    symbol: SymbolLike

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def system_matrix(self) -> np.ndarray:
        """Matrix of the orthogonality equations: row k is <., z^k>.

        Row k, column j holds <z^j, z^k>, i.e. the transpose (= conjugate,
        by Hermitian symmetry) of ``entries``.
        """
        return np.conj(self.entries)

    def quadratic_form(self, p: np.ndarray, q: np.ndarray | None = None) -> complex:
        """<p, q> evaluated through the matrix; q defaults to p."""
        if q is None:
            q = p
        n = self.size
        pv = np.zeros(n, dtype=complex)
        pv[: len(p)] = p
        qv = np.zeros(n, dtype=complex)
        qv[: len(q)] = q
        return complex(pv @ (self.entries @ np.conj(qv)))


def gram_matrix(phi: SymbolLike, n: int) -> GramMatrix:
    """Assemble the (n+1) x (n+1) Gram matrix of z^0 .. z^n.

    Work is O(n^2): along the diagonal at offset d the lemma sum telescopes,
    so each diagonal is a single cumulative sum of conj(phi_s) phi_{s+d}.
    Summation order within a diagonal is fixed, which keeps results
    bit-identical no matter how assembly is scheduled.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    coeffs = phi.taylor(n + 1)
    m = np.zeros((n + 1, n + 1), dtype=complex)
    conj_coeffs = np.conj(coeffs)
    for d in range(n + 1):
        diag = np.cumsum(conj_coeffs[: n + 1 - d] * coeffs[d : n + 1])
        idx = np.arange(n + 1 - d)
        m[idx, idx + d] = diag
        if d == 0:
            m[idx, idx] += 1.0
        else:
            m[idx + d, idx] = np.conj(diag)
    return GramMatrix(m, phi)


def gram_matrix_mp(phi: SmirnovSymbol, n: int) -> list[list[mpmath.mpc]]:
    """High-precision Gram matrix as nested lists (call inside workprec)."""
    coeffs = phi.taylor_mp(n + 1)
    conj_coeffs = [mpmath.conj(c) for c in coeffs]
    m = [[mpmath.mpc(0) for _ in range(n + 1)] for _ in range(n + 1)]
    for d in range(n + 1):
        acc = mpmath.mpc(0)
        for j in range(n + 1 - d):
            acc += conj_coeffs[j] * coeffs[j + d]
            m[j][j + d] = acc + 1 if d == 0 else acc
            if d > 0:
                m[j + d][j] = mpmath.conj(m[j][j + d])
    return m


def assert_positive_definite(gram: GramMatrix, pivot_floor: float = 0.0) -> np.ndarray:
    """Cholesky-factor the matrix, returning the diagonal pivots.

    Raises ``numpy.linalg.LinAlgError`` when the matrix fails to be positive
    definite at working precision.
    """
    factor, _ = cho_factor(gram.entries, lower=True)
    pivots = np.real(np.diag(factor)) ** 2
    if pivot_floor and pivots.min() < pivot_floor * pivots.max():
        raise np.linalg.LinAlgError("pivot collapse in Cholesky factorization")
    return pivots


def toeplitz_conj_apply(phi: SymbolLike, p: np.ndarray) -> np.ndarray:
    """Apply the conjugate-symbol Toeplitz operator to a polynomial.

    (T p)_m = sum_{k >= m} p_k conj(phi_{k-m}); the degree never increases.
    """
    p = np.asarray(p, dtype=complex)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("p must be a nonempty 1-d coefficient array")
    deg1 = len(p)
    cc = np.conj(phi.taylor(deg1))
    return np.convolve(p[::-1], cc)[:deg1][::-1]


def hb_norm_squared(phi: SymbolLike, p: np.ndarray) -> float:
    """||p||^2 in H(b) = ||p||_2^2 + ||T p||_2^2."""
    p = np.asarray(p, dtype=complex)
    tp = toeplitz_conj_apply(phi, p)
    return float(np.sum(np.abs(p) ** 2) + np.sum(np.abs(tp) ** 2))


def poly_inner(phi: SymbolLike, p: np.ndarray, q: np.ndarray) -> complex:
    """<p, q> in H(b) via the Toeplitz route (independent of gram_matrix)."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    width = max(len(p), len(q))
    pv = np.zeros(width, dtype=complex)
    pv[: len(p)] = p
    qv = np.zeros(width, dtype=complex)
    qv[: len(q)] = q
    tp = toeplitz_conj_apply(phi, pv)
    tq = toeplitz_conj_apply(phi, qv)
    return complex(np.dot(pv, np.conj(qv)) + np.dot(tp, np.conj(tq)))


def kernel_truncation_check(
    entry: CatalogEntry, w: complex, p: np.ndarray, K: int
) -> float:
    """|<p, k_w^(K)> - p(w)| for the degree-K truncated reproducing kernel.

    k_w(z) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z) for the entry's rational
    b; the truncation keeps its Taylor coefficients up to z^K.  The returned
    defect decays geometrically in K for |w| < 1.
    """
    w = complex(w)
    if abs(w) >= 1:
        raise ValueError("evaluation point must lie inside the open disc")
    p = np.asarray(p, dtype=complex)
    if K < len(p) - 1:
        raise ValueError("truncation order must be at least deg p")
    b_series = entry.b.taylor(K + 1)
    bw = entry.b(w)
    g = -np.conj(bw) * b_series
    g[0] += 1.0
    geo = np.power(np.conj(w), np.arange(K + 1))
    kernel = np.convolve(g, geo)[: K + 1]
    pw = 0j
    for c in reversed(p):
        pw = pw * w + c
    return abs(poly_inner(entry.phi, p, kernel) - pw)


def orthonormality_defect(phi: SymbolLike, polys: list[np.ndarray]) -> float:
    """max_{i,j} |<p_i, p_j> - delta_{i,j}| over a family of polynomials."""
    worst = 0.0
    n = max(len(p) for p in polys) - 1
    gm = gram_matrix(phi, n)
    for i, p in enumerate(polys):
        for j, q in enumerate(polys[: i + 1]):
            val = gm.quadratic_form(p, q)
            worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
    return worst


def solve_system_cholesky(entries: np.ndarray, rhs: np.ndarray, pivot_floor: float):
    """Solve conj(M) u = rhs for Hermitian positive-definite M.

    Uses M conj(u) = conj(rhs) so a single Cholesky factorization of M serves.
    Returns (u, pivots); raises LinAlgError when M is not numerically PD.
    """
    factor = cho_factor(entries, lower=True)
    pivots = np.real(np.diag(factor[0])) ** 2
    if pivots.min() < pivot_floor * pivots.max():
        raise np.linalg.LinAlgError("pivot collapse in Cholesky factorization")
    u = np.conj(cho_solve(factor, np.conj(rhs)))
    return u, pivots
