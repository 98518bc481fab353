"""Closed-form orthonormal bases and the detectors that recognize them.

Covered families:

* ``phi = A + B/(1-z)`` with ``conj(A) B = -(1 + |A|^2)``: the orthogonal
  family is 1, z-1, z(z-1), z^2(z-1), ... with norms sqrt(1 + 1/|A|^2) and
  |A| + 1/|A|.
* ``b = (1 + z^N)/2``: monomials z^j/sqrt(2) below degree N, then shifted
  copies of (z^N - 1)/2.
* re-indexing transport of any basis under z -> z^N.

Also included: the classical orthogonal family of the local Dirichlet space
(Fricain--Mashreghi polynomials), whose coefficients are odd-indexed
Fibonacci numbers, used as an independent cross-check of the norm machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gram as gram_mod
from .oracle import OrthoBasis, OrthoPoly
from .symbol import PoleTerm, SmirnovSymbol, SymbolLike

#: tolerance scale for the algebraic relation conj(A) B = -(1+|A|^2)
RELATION_TOL = 1e-12


class PreconditionViolated(ValueError):
    """A closed-form constructor was called outside its validity region."""


@dataclass(frozen=True)
class RationalABForm:
    """Single simple pole at 1: phi = A + B/(1-z)."""

    A: complex
    B: complex

    @property
    def satisfies_theorem(self) -> bool:
        """Whether conj(A) B = -(1 + |A|^2) holds within tolerance.

        The relation forces A != 0 (a purely singular B/(1-z) never has an
        orthogonal shifted-monomial family).
        """
        lhs = np.conj(self.A) * self.B + 1.0 + abs(self.A) ** 2
        scale = 1.0 + abs(self.A) ** 2 + abs(self.A * self.B)
        return abs(lhs) <= RELATION_TOL * scale

    def symbol(self) -> SmirnovSymbol:
        return SmirnovSymbol(self.A, (PoleTerm(1.0, 1, self.B),))


def detect_rational_ab(phi: SmirnovSymbol) -> RationalABForm | None:
    """Recognize symbols whose orthonormal family is the shifted-monomial one.

    Requires exactly one pole, simple, located at 1 (rotate the symbol first
    if its pole sits elsewhere), and the algebraic relation on (A, B).
    """
    if len(phi.pole_terms) != 1:
        return None
    term = phi.pole_terms[0]
    if term.order != 1 or abs(term.pole - 1.0) > 1e-12:
        return None
    form = RationalABForm(phi.constant_term, term.coefficient)
    return form if form.satisfies_theorem else None


def rational_ab_basis(form: RationalABForm, n: int) -> OrthoBasis:
    """Normalized basis 1/||1||, z^{k-1}(z-1)/||.|| up to degree n."""
    if not form.satisfies_theorem:
        raise PreconditionViolated(
            "rational_ab_basis requires conj(A) B = -(1+|A|^2)"
        )
    a = abs(form.A)
    norm0 = math.sqrt(1.0 + 1.0 / a**2)
    norm_tail = a + 1.0 / a
    polys = [OrthoPoly(0, np.array([1.0 / norm0], dtype=complex))]
    for k in range(1, n + 1):
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[k] = 1.0 / norm_tail
        coeffs[k - 1] = -1.0 / norm_tail
        polys.append(OrthoPoly(k, coeffs))
    return OrthoBasis(tuple(polys), form.symbol(), "closed-form", 0.0)


def power_basis(N: int, n: int) -> OrthoBasis:
    """Orthonormal basis for b = (1 + z^N)/2 up to degree n.

    Degrees below N are monomials over sqrt(2); degree Nk+i (k >= 1) is
    z^{N(k-1)+i} (z^N - 1)/2.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    from .catalog import power_symbol  # local import to avoid a cycle

    polys = []
    for d in range(n + 1):
        coeffs = np.zeros(d + 1, dtype=complex)
        if d < N:
            coeffs[d] = 1.0 / math.sqrt(2.0)
        else:
            coeffs[d] = 0.5
            coeffs[d - N] = -0.5
        polys.append(OrthoPoly(d, coeffs))
    return OrthoBasis(tuple(polys), power_symbol(N), "closed-form", 0.0)


def compose_basis(base: OrthoBasis, N: int) -> OrthoBasis:
    """Transport a basis under z -> z^N by coefficient re-indexing.

    The polynomial of composed degree Nl+i is z^i p_l(z^N): coefficient k of
    p_l lands at power Nk+i.  Covers degrees 0 .. N(deg base)+N-1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return base
    polys = []
    for l, p in enumerate(base.polys):
        for i in range(N):
            deg = N * l + i
            coeffs = np.zeros(deg + 1, dtype=complex)
            coeffs[np.arange(l + 1) * N + i] = p.coefficients
            polys.append((deg, OrthoPoly(deg, coeffs)))
    polys.sort(key=lambda item: item[0])
    if isinstance(base.symbol, SmirnovSymbol):
        from .symbol import CompositionOrderError, compose_monomial

        try:
            new_symbol: SymbolLike = compose_monomial(base.symbol, N)
        except CompositionOrderError:
            new_symbol = base.symbol.stream().composed_monomial(N)
    else:
        new_symbol = base.symbol.composed_monomial(N)
    return OrthoBasis(
        tuple(p for _, p in polys), new_symbol, base.precision, base.residual
    )


# ---------------------------------------------------------------------------
# Local Dirichlet space cross-check family
# ---------------------------------------------------------------------------

_SQRT5 = math.sqrt(5.0)
_GOLDEN = (1.0 + _SQRT5) / 2.0
_GOLDEN_CONJ = (1.0 - _SQRT5) / 2.0

#: growth ratio of the cross-check norms: (3 + sqrt 5)/2
FM_NORM_RATIO = (3.0 + _SQRT5) / 2.0

#: limit of ||Q_n|| / ratio^n: 2 * 5^(1/4) / 5
FM_NORM_LIMIT = 2.0 * 5.0**0.25 / 5.0


def fm_coefficient(k: int) -> float:
    """a_k = (phi^{2k+1} - psi^{2k+1}) / sqrt(5): odd-indexed Fibonacci numbers.

    The classical family defines a_k for k >= 1; extending the same Binet
    expression to k = 0 gives a_0 = 1, which is exactly the value the basis
    expansion below requires.
    """
    if k < 0:
        raise ValueError("index must be >= 0")
    return (_GOLDEN ** (2 * k + 1) - _GOLDEN_CONJ ** (2 * k + 1)) / _SQRT5


def fm_polynomial(n: int) -> np.ndarray:
    """Q_0 = 1 and Q_n = 1 + (z-1)(a_0 + a_1 z + ... + a_{n-1} z^{n-1})."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.array([1.0 + 0j])
    a = np.array([fm_coefficient(k) for k in range(n)])
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0 - a[0]
    coeffs[1:n] = a[:-1] - a[1:]
    coeffs[n] = a[-1]
    return coeffs


def fm_norm_b(n: int) -> float:
    """||Q_n|| in H(b) for b = (1+z)/2, via two independent evaluations.

    Direct route: ||Q_n||^2 = 2 + 4 sum_{k<n} a_k^2 from the expansion
    Q_n = sqrt(2) p_0 + 2 sum a_{k-1} p_k in the orthonormal basis.
    Closed route: the geometric-series evaluation of the same sum,

        sum_{k<n} a_k^2 = (3+s)/10 * (1-alpha^n)/(1-alpha)
                        + (3-s)/10 * (1-beta^n)/(1-beta) + 2n/5,

    with s = sqrt 5, alpha = (7+3s)/2, beta = (7-3s)/2.  Both are computed
    and asserted equal before the value is returned.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    direct = 2.0 + 4.0 * sum(fm_coefficient(k) ** 2 for k in range(n))
    alpha = (7.0 + 3.0 * _SQRT5) / 2.0
    beta = (7.0 - 3.0 * _SQRT5) / 2.0
    geo = (
        (3.0 + _SQRT5) / 10.0 * (1.0 - alpha**n) / (1.0 - alpha)
        + (3.0 - _SQRT5) / 10.0 * (1.0 - beta**n) / (1.0 - beta)
        + 0.4 * n
    )
    closed = 2.0 + 4.0 * geo
    if abs(direct - closed) > 1e-10 * max(abs(direct), abs(closed)):
        raise ArithmeticError(
            f"norm evaluations disagree at n={n}: {direct} vs {closed}"
        )
    return math.sqrt(direct)


def monomial_orthogonality_witness(
    phi: SymbolLike, bound: int, tol: float = 1e-9
) -> tuple[int, int] | None:
    """Smallest (j, k), j < k <= bound, with <z^j, z^k> != 0.

    Monomials can only be mutually orthogonal when the space is the plain
    Hardy space, so for any nontrivial symbol a witness pair exists; ``None``
    is consistent with phi being a monomial (or zero) up to the bound.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    for j in range(bound):
        for k in range(j + 1, bound + 1):
            if abs(gram_mod.monomial_inner(phi, j, k)) > tol:
                return (j, k)
    return None
