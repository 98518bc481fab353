"""Brute-force orthonormal polynomials: solve the Gram system per degree.

The degree-n orthonormal polynomial p_n = sum c_k z^k is pinned down by

    <p_n, z^k> = 0   (k < n),      ||p_n|| = 1,      c_n > 0.

Writing the normalization through a positive mute variable t = 1/c_n, the
vector c solves  conj(M) c = t e_n  with M the Gram matrix.  We solve once at
t = 1, getting u with u_n real positive (it is a diagonal entry of an inverse
of a positive-definite matrix), and rescale: c = u / sqrt(u_n).

Per-degree bordered solves are used instead of sequential Gram-Schmidt, which
loses orthogonality catastrophically at these condition numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from . import gram as gram_mod
from .backends import resolve_precision, workprec
from .symbol import SmirnovSymbol, SymbolLike, rotate_symbol

#: relative pivot threshold that flags a double-precision factorization as unusable
PIVOT_BREAKDOWN_RATIO = 1e-13

#: tolerance (relative to ||u||) for the imaginary part of the normalizing entry
POSITIVITY_TOL = 1e-12


class NumericalBreakdown(ArithmeticError):
    """Double-precision factorization lost too much accuracy; retry in "hp"."""


class DegenerateSystem(ArithmeticError):
    """The Gram system is singular: impossible for a valid symbol, so this
    signals an invariant violation upstream."""


@dataclass(frozen=True)
class OrthoPoly:
    """Orthonormal polynomial with positive real leading coefficient."""

    degree: int
    coefficients: np.ndarray
    hp_coefficients: tuple | None = None

    @property
    def leading(self) -> float:
        return float(self.coefficients[-1].real)


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal polynomials for degrees 0..n under one symbol."""

    polys: tuple[OrthoPoly, ...]
    symbol: SymbolLike
    precision: str
    residual: float

    @property
    def degree(self) -> int:
        return len(self.polys) - 1

    def coefficient_arrays(self) -> list[np.ndarray]:
        return [p.coefficients for p in self.polys]


def orthopoly(phi: SymbolLike, n: int, precision: str | None = None) -> OrthoPoly:
    """Orthonormal polynomial of exact degree n for the symbol ``phi``."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    tag = resolve_precision(precision, n)
    if tag == "hp":
        return _orthopoly_hp(phi, n)
    try:
        return _orthopoly_f64(phi, n)
    except NumericalBreakdown:
        if precision is not None:
            raise
        return _orthopoly_hp(phi, n)


def _orthopoly_f64(phi: SymbolLike, n: int) -> OrthoPoly:
    m = gram_mod.gram_matrix(phi, n)
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[n] = 1.0
    try:
        u, _ = gram_mod.solve_system_cholesky(m.entries, rhs, PIVOT_BREAKDOWN_RATIO)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(str(exc)) from exc
    return OrthoPoly(n, _normalize(u))


def _normalize(u: np.ndarray) -> np.ndarray:
    un = u[-1]
    if abs(un.imag) > POSITIVITY_TOL * np.linalg.norm(u) or un.real <= 0:
        raise NumericalBreakdown(
            f"normalizing entry {un} is not real positive at working precision"
        )
    return u / np.sqrt(un.real)


def _orthopoly_hp(phi: SymbolLike, n: int) -> OrthoPoly:
    if not isinstance(phi, SmirnovSymbol):
        raise TypeError("the high-precision path needs a SmirnovSymbol")
    with workprec():
        m = gram_mod.gram_matrix_mp(phi, n)
        lower = _cholesky_mp(m)
        coeffs = _hp_solve_degree(lower, n)
        f64 = np.array([complex(c) for c in coeffs], dtype=complex)
    return OrthoPoly(n, f64, hp_coefficients=tuple(coeffs))


def _cholesky_mp(m: list[list[mpmath.mpc]]) -> list[list[mpmath.mpc]]:
    n = len(m)
    lower = [[mpmath.mpc(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            acc = m[i][j]
            for k in range(j):
                acc -= lower[i][k] * mpmath.conj(lower[j][k])
            if i == j:
                if mpmath.re(acc) <= 0:
                    raise DegenerateSystem("nonpositive pivot in hp Cholesky")
                lower[i][j] = mpmath.sqrt(mpmath.re(acc))
            else:
                lower[i][j] = acc / lower[j][j]
    return lower


def _hp_solve_degree(lower, k: int) -> list[mpmath.mpc]:
    """Solve conj(M_k) u = e_k using the leading block of the hp factor."""
    # M x = e_k by forward/back substitution, then u = conj(x)
    y = [mpmath.mpc(0)] * (k + 1)
    for i in range(k + 1):
        acc = mpmath.mpc(1) if i == k else mpmath.mpc(0)
        for j in range(i):
            acc -= lower[i][j] * y[j]
        y[i] = acc / lower[i][i]
    x = [mpmath.mpc(0)] * (k + 1)
    for i in range(k, -1, -1):
        acc = y[i]
        for j in range(i + 1, k + 1):
            acc -= mpmath.conj(lower[j][i]) * x[j]
        x[i] = acc / lower[i][i]
    u = [mpmath.conj(v) for v in x]
    un = u[k]
    scale = mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in u))
    if abs(mpmath.im(un)) > mpmath.mpf(POSITIVITY_TOL) * scale or mpmath.re(un) <= 0:
        raise DegenerateSystem(f"normalizing entry {un} is not real positive")
    root = mpmath.sqrt(mpmath.re(un))
    return [v / root for v in u]


def orthobasis(phi: SymbolLike, n: int, precision: str | None = None) -> OrthoBasis:
    """All orthonormal polynomials p_0 .. p_n, with the orthonormality defect."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    tag = resolve_precision(precision, n)
    if tag == "hp":
        return _orthobasis_hp(phi, n)
    try:
        return _orthobasis_f64(phi, n)
    except NumericalBreakdown:
        if precision is not None:
            raise
        return _orthobasis_hp(phi, n)


def _orthobasis_f64(phi: SymbolLike, n: int) -> OrthoBasis:
    m = gram_mod.gram_matrix(phi, n)
    polys = []
    for k in range(n + 1):
        rhs = np.zeros(k + 1, dtype=complex)
        rhs[k] = 1.0
        try:
            u, _ = gram_mod.solve_system_cholesky(
                m.entries[: k + 1, : k + 1], rhs, PIVOT_BREAKDOWN_RATIO
            )
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown(str(exc)) from exc
        polys.append(OrthoPoly(k, _normalize(u)))
    residual = _residual_f64(m, polys)
    return OrthoBasis(tuple(polys), phi, "f64", residual)


def _residual_f64(m: gram_mod.GramMatrix, polys: list[OrthoPoly]) -> float:
    worst = 0.0
    for i, p in enumerate(polys):
        for j in range(i + 1):
            val = m.quadratic_form(p.coefficients, polys[j].coefficients)
            worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
    return worst


def _orthobasis_hp(phi: SymbolLike, n: int) -> OrthoBasis:
    if not isinstance(phi, SmirnovSymbol):
        raise TypeError("the high-precision path needs a SmirnovSymbol")
    with workprec():
        m = gram_mod.gram_matrix_mp(phi, n)
        lower = _cholesky_mp(m)
        all_coeffs = [_hp_solve_degree(lower, k) for k in range(n + 1)]
        worst = _residual_hp(m, all_coeffs)
        polys = tuple(
            OrthoPoly(
                k,
                np.array([complex(c) for c in coeffs], dtype=complex),
                hp_coefficients=tuple(coeffs),
            )
            for k, coeffs in enumerate(all_coeffs)
        )
        residual = float(worst)
    return OrthoBasis(polys, phi, "hp", residual)


def _residual_hp(m, all_coeffs) -> mpmath.mpf:
    worst = mpmath.mpf(0)
    for i, p in enumerate(all_coeffs):
        # v = conj(M)^T action: w_s = sum_r p_r m[r][s]
        w = []
        for s in range(i + 1):
            acc = mpmath.mpc(0)
            for r in range(i + 1):
                acc += p[r] * m[r][s]
            w.append(acc)
        for j in range(i + 1):
            q = all_coeffs[j]
            val = mpmath.fsum(
                (w[s] * mpmath.conj(q[s]) for s in range(min(i, j) + 1)),
                absolute=False,
            )
            target = 1 if i == j else 0
            worst = max(worst, abs(val - target))
    return worst


def rotate_basis(basis: OrthoBasis, gamma: float) -> OrthoBasis:
    """Transport a basis to the rotated symbol z -> phi(e^{i gamma} z).

    The transported polynomials are e^{-i n gamma} p_n(e^{i gamma} z); the
    prefactor is exactly what keeps the leading coefficients positive.
    """
    polys = []
    for p in basis.polys:
        n = p.degree
        phases = np.exp(1j * gamma * (np.arange(n + 1) - n))
        hp = None
        if p.hp_coefficients is not None:
            with workprec():
                g = mpmath.mpf(gamma)
                hp = tuple(
                    c * mpmath.exp(mpmath.mpc(0, 1) * g * (k - n))
                    for k, c in enumerate(p.hp_coefficients)
                )
        polys.append(OrthoPoly(n, p.coefficients * phases, hp_coefficients=hp))
    if isinstance(basis.symbol, SmirnovSymbol):
        new_symbol: SymbolLike = rotate_symbol(basis.symbol, gamma)
    else:
        new_symbol = basis.symbol.rotated(gamma)
    return OrthoBasis(tuple(polys), new_symbol, basis.precision, basis.residual)
