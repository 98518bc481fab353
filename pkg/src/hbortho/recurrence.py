"""Closed-form orthonormal polynomials for phi = A + B/(1-z) via recurrence.

For this family the orthogonality equations row-reduce to a three-term
recurrence on the coefficients of p_n:

    conj(t0) c_{k+1} + (t1 - t0) c_k + t0 c_{k-1} = 0,   k = 1 .. n-2,

with t0 = 1 + |A|^2 + A conj(B) and t1 = -conj(t0) - |B|^2.  The remaining
three equations (two trailing rows plus one aggregated row) pin down c_0, c_1
and c_n together with the positive normalizing variable t = 1/c_n.

The characteristic quadratic  q(z) = conj(t0) z^2 + (t1-t0) z + t0  drives a
case split: t0 = 0 collapses the recurrence to the shifted-monomial family;
otherwise q has two roots with product t0/conj(t0).  Its middle coefficient
is real and its discriminant works out to

    disc = (2 Re t0 + |B|^2)^2 - 4 |t0|^2  >=  4 |B|^2  >  0,

so for genuine (A, B) the roots are always simple, one strictly inside and
one strictly outside the unit circle.  The double-root formulas are still
implemented (the classification is total and synthetic data can exercise
them), but no admissible symbol reaches that branch exactly.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import oracle as oracle_mod
from .backends import to_mpc, workprec
from .closed_forms import RationalABForm, rational_ab_basis
from .gram import gram_matrix, hb_norm_squared
from .oracle import OrthoPoly
from .symbol import PoleTerm, SmirnovSymbol

log = logging.getLogger(__name__)

#: |t0| below this multiple of (1 + |A|^2 + |A||B|) counts as the degenerate case
DEGENERATE_TOL = 1e-12

#: |disc| below eps_case * (|t0|+|t1|)^2 classifies as a double root
EPS_CASE = 1e-9

#: ratios in (EPS_CASE, BOUNDARY_BAND) are ambiguous; defer to the oracle there
BOUNDARY_BAND = 1e-6

CASE_DEGENERATE = "degenerate-linear"
CASE_SIMPLE = "simple-roots"
CASE_DOUBLE = "double-root"


class CaseBoundary(ArithmeticError):
    """Discriminant sits in the ambiguous band; use the dense oracle instead."""


class SingularBorder(ArithmeticError):
    """The small border system is numerically singular; escalate precision."""


@dataclass(frozen=True)
class RecurrenceData:
    """Scalars of the reduced system for phi = A + B/(1-z).

    ``rho`` is the squared-norm constant 1 + |A+B|^2; t0, t1 are the
    recurrence weights; t2 = rho - conj(t0) is the aggregated-row constant
    and t3, t4 the two surviving entries of the aggregated row.  ``roots``
    holds the characteristic roots ordered by modulus (then phase).
    """

    A: complex
    B: complex
    rho: float
    t0: complex
    t1: complex
    t2: complex
    t3: complex
    t4: complex
    disc: float
    disc_ratio: float
    case_tag: str
    roots: tuple[complex, complex] | None
    double_root: complex | None

    @property
    def in_boundary_band(self) -> bool:
        return EPS_CASE < self.disc_ratio < BOUNDARY_BAND

    def characteristic(self) -> tuple[complex, complex, complex]:
        """Coefficients (z^2, z^1, z^0) of the characteristic quadratic."""
        return (np.conj(self.t0), self.t1 - self.t0, self.t0)


def build_recurrence(A: complex, B: complex) -> RecurrenceData:
    """Compute all reduction scalars for phi = A + B/(1-z) and classify."""
    A = complex(A)
    B = complex(B)
    if B == 0:
        raise ValueError("B must be nonzero")
    rho = 1.0 + abs(A + B) ** 2
    t0 = 1.0 + abs(A) ** 2 + A * np.conj(B)
    t1 = -np.conj(t0) - abs(B) ** 2
    t2 = rho - np.conj(t0)
    bb = abs(B) ** 2
    t3 = rho + t0 * t2 / bb
    t4 = -np.conj(t0) * t2 / bb
    disc_c = (t1 - t0) ** 2 - 4.0 * t0 * np.conj(t0)
    disc = float(disc_c.real)  # imaginary part is roundoff: the middle coefficient is real
    scale_sq = (abs(t0) + abs(t1)) ** 2
    disc_ratio = abs(disc) / scale_sq if scale_sq > 0 else 0.0

    if abs(t0) <= DEGENERATE_TOL * (1.0 + abs(A) ** 2 + abs(A) * abs(B)):
        return RecurrenceData(
            A, B, rho, t0, t1, t2, t3, t4, disc, disc_ratio, CASE_DEGENERATE, None, None
        )
    if disc_ratio <= EPS_CASE:
        lam = t0 / abs(t0)
        return RecurrenceData(
            A, B, rho, t0, t1, t2, t3, t4, disc, disc_ratio, CASE_DOUBLE, None, lam
        )
    roots = _quadratic_roots(np.conj(t0), t1 - t0, t0)
    return RecurrenceData(
        A, B, rho, t0, t1, t2, t3, t4, disc, disc_ratio, CASE_SIMPLE, roots, None
    )


def _quadratic_roots(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of a z^2 + b z + c, cancellation-free, ordered small to large."""
    sq = cmath.sqrt(b * b - 4.0 * a * c)
    if abs(-b + sq) >= abs(-b - sq):
        big = (-b + sq) / (2.0 * a)
    else:
        big = (-b - sq) / (2.0 * a)
    small = c / (a * big)
    pair = sorted((small, big), key=lambda z: (abs(z), cmath.phase(z)))
    return (pair[0], pair[1])


def coefficients_via_recurrence(
    data: RecurrenceData, n: int, precision: str = "f64"
) -> OrthoPoly:
    """Orthonormal polynomial of degree n from the closed-form recurrence.

    Degrees 0 and 1 sit below the recurrence machinery and fall through to
    the dense oracle.  Raises :class:`CaseBoundary` inside the ambiguous
    discriminant band and :class:`SingularBorder` when the bordered system
    cannot be solved reliably (retry with precision="hp").
    """
    if n < 2:
        phi = SmirnovSymbol(data.A, (PoleTerm(1.0, 1, data.B),))
        return oracle_mod.orthopoly(phi, n, precision="f64")
    if data.case_tag == CASE_DEGENERATE:
        basis = rational_ab_basis(RationalABForm(data.A, data.B), n)
        return basis.polys[n]
    if data.in_boundary_band:
        raise CaseBoundary(
            f"discriminant ratio {data.disc_ratio:.3e} is inside the ambiguous band"
        )
    if precision == "hp":
        return _recurrence_hp(data, n)
    if data.case_tag == CASE_SIMPLE:
        coeffs = _simple_roots_f64(data, n)
    else:
        coeffs = _double_root_f64(data, n)
    poly = OrthoPoly(n, coeffs)
    _validate(data, poly)
    return poly


def _simple_roots_f64(data: RecurrenceData, n: int) -> np.ndarray:
    l1, l2 = data.roots
    if (n - 1) * math.log10(max(abs(l2), 1.0)) > 280:
        raise SingularBorder(
            "root powers exceed the double-precision range; use hp or the oracle"
        )
    t0, t1 = data.t0, data.t1
    t0c = np.conj(t0)

    def v(j: int) -> complex:
        return l2**j - l1**j

    v1 = v(1)
    prod = l1 * l2
    border = np.array(
        [
            [prod * (v(n - 2) * (t0 - t1) - v(n - 3) * t0) / v1,
             (v(n - 2) * t0 + (t1 - t0) * v(n - 1)) / v1,
             t0c],
            [-t0 * prod * v(n - 2) / v1, t0 * v(n - 1) / v1, t1],
            [data.t3, data.t4, 0.0],
        ],
        dtype=complex,
    )
    rhs = np.array([1.0, -1.0, 0.0], dtype=complex)
    try:
        u0, u1, un = np.linalg.solve(border, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBorder(str(exc)) from exc
    t = _branch(un, np.array([u0, u1, un]))
    c0, c1 = t * u0, t * u1
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[n] = t * un
    for k in range(n):
        coeffs[k] = (c1 * v(k) - c0 * prod * v(k - 1)) / v1
    return coeffs


def _double_root_f64(data: RecurrenceData, n: int) -> np.ndarray:
    lam = data.double_root
    lamc = np.conj(lam)
    if abs(data.t4) == 0:
        raise SingularBorder("aggregated row vanished; double-root data inconsistent")
    r = data.t3 / data.t4
    mod_t0 = abs(data.t0)
    border = np.array(
        [
            [((n - 1) * lam + n * r) * lam ** (n - 1), 1.0],
            [((2 - n) - lamc * r * (n - 1)) * lam**n, lam - 2.0],
        ],
        dtype=complex,
    )
    rhs = np.array([lam / mod_t0, -1.0 / mod_t0], dtype=complex)
    try:
        u0, un = np.linalg.solve(border, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBorder(str(exc)) from exc
    t = _branch(un, np.array([u0, un]))
    c0 = t * u0
    c1 = -r * c0
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[n] = t * un
    for k in range(n):
        coeffs[k] = ((1 - k) * c0 + k * lamc * c1) * lam**k
    return coeffs


def _branch(un: complex, u: np.ndarray) -> float:
    """The positive normalizer t with c_n t = t^2 u_n = 1.

    Of the two candidates +-1/sqrt(u_n), only the positive one makes
    c_n = t u_n positive; u_n must be real positive for either to exist.
    """
    scale = np.linalg.norm(u)
    if abs(un.imag) > 1e-12 * scale or un.real <= 0:
        raise SingularBorder(
            f"normalizing entry {un} is not real positive at working precision"
        )
    return 1.0 / math.sqrt(un.real)


def _validate(data: RecurrenceData, poly: OrthoPoly) -> None:
    c = poly.coefficients
    n = poly.degree
    top = float(np.max(np.abs(c)))
    res = recurrence_residual(data, c)
    if res > 1e-9 * top:
        raise SingularBorder(f"recurrence residual {res:.3e} too large")
    phi = SmirnovSymbol(data.A, (PoleTerm(1.0, 1, data.B),))
    norm_sq = hb_norm_squared(phi, c)
    if abs(norm_sq - 1.0) > 1e-7:
        raise SingularBorder(f"norm^2 of the result is {norm_sq}, not 1")
    if not c[n].real > 0:
        raise SingularBorder("leading coefficient is not positive")


def recurrence_residual(data: RecurrenceData, coeffs: np.ndarray) -> float:
    """max_k |conj(t0) c_{k+1} + (t1-t0) c_k + t0 c_{k-1}|, 1 <= k <= n-2."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 3:
        return 0.0
    t0c = np.conj(data.t0)
    mid = data.t1 - data.t0
    vals = t0c * c[2:n] + mid * c[1 : n - 1] + data.t0 * c[0 : n - 2]
    return float(np.max(np.abs(vals)))


def _recurrence_hp(data: RecurrenceData, n: int) -> OrthoPoly:
    """High-precision evaluation of the closed forms (both root cases)."""
    with workprec():
        A = to_mpc(data.A)
        B = to_mpc(data.B)
        rho = 1 + abs(A + B) ** 2
        t0 = 1 + abs(A) ** 2 + A * mpmath.conj(B)
        t1 = -mpmath.conj(t0) - abs(B) ** 2
        t2 = rho - mpmath.conj(t0)
        bb = abs(B) ** 2
        t3 = rho + t0 * t2 / bb
        t4 = -mpmath.conj(t0) * t2 / bb
        t0c = mpmath.conj(t0)
        if data.case_tag == CASE_SIMPLE:
            b_mid = t1 - t0
            sq = mpmath.sqrt(b_mid * b_mid - 4 * t0c * t0)
            big = (-b_mid + sq) / (2 * t0c)
            if abs(-b_mid - sq) > abs(-b_mid + sq):
                big = (-b_mid - sq) / (2 * t0c)
            small = t0 / (t0c * big)
            l1, l2 = sorted((small, big), key=lambda z: (abs(z), mpmath.arg(z)))

            def v(j):
                return l2**j - l1**j

            v1 = v(1)
            prod = l1 * l2
            border = mpmath.matrix(
                [
                    [prod * (v(n - 2) * (t0 - t1) - v(n - 3) * t0) / v1,
                     (v(n - 2) * t0 + (t1 - t0) * v(n - 1)) / v1,
                     t0c],
                    [-t0 * prod * v(n - 2) / v1, t0 * v(n - 1) / v1, t1],
                    [t3, t4, mpmath.mpc(0)],
                ]
            )
            rhs = mpmath.matrix([1, -1, 0])
            u = mpmath.lu_solve(border, rhs)
            u0, u1, un = u[0], u[1], u[2]
            if mpmath.re(un) <= 0:
                raise SingularBorder("hp normalizing entry not positive")
            t = 1 / mpmath.sqrt(mpmath.re(un))
            c0, c1 = t * u0, t * u1
            coeffs = [(c1 * v(k) - c0 * prod * v(k - 1)) / v1 for k in range(n)]
            coeffs.append(t * un)
        else:
            lam = t0 / abs(t0)
            lamc = mpmath.conj(lam)
            r = t3 / t4
            mod_t0 = abs(t0)
            border = mpmath.matrix(
                [
                    [((n - 1) * lam + n * r) * lam ** (n - 1), mpmath.mpc(1)],
                    [((2 - n) - lamc * r * (n - 1)) * lam**n, lam - 2],
                ]
            )
            rhs = mpmath.matrix([lam / mod_t0, -1 / mod_t0])
            u = mpmath.lu_solve(border, rhs)
            u0, un = u[0], u[1]
            if mpmath.re(un) <= 0:
                raise SingularBorder("hp normalizing entry not positive")
            t = 1 / mpmath.sqrt(mpmath.re(un))
            c0 = t * u0
            c1 = -r * c0
            coeffs = [((1 - k) * c0 + k * lamc * c1) * lam**k for k in range(n)]
            coeffs.append(t * un)
        f64 = np.array([complex(c) for c in coeffs], dtype=complex)
    return OrthoPoly(n, f64, hp_coefficients=tuple(coeffs))


# ---------------------------------------------------------------------------
# Row-reduction replay
# ---------------------------------------------------------------------------

def reduced_matrix_check(A: complex, B: complex, n: int, tol: float = 1e-9) -> bool:
    """Replay the elementary row reduction and compare with the closed pattern.

    Assembles the augmented orthogonality system for p_n (rows are the
    equations <p_n, z^k>, the extra column carries the coefficient of the
    normalizing variable t), performs the four reduction stages

      1. R_j <- R_j - R_{j+1} for j = 0..n-1,
      2. R_n <- R_n + sum_{j<n} R_j,
      3. R_j <- R_j - R_{j+1} for j = 0..n-2,
      4. R_n <- R_n + (t2/|B|^2) sum_{j<n} R_j,

    and checks the result entrywise: banded rows (t0, t1-t0, conj(t0)) with
    zero elsewhere, the two boundary rows, and the aggregated last row
    (t3, t4, 0, ..., 0).  Returns False (with a logged diagnostic) on any
    deviation above ``tol`` times the magnitude scale of the reduced matrix.
    """
    if n < 4:
        raise ValueError("the replay needs n >= 4")
    data = build_recurrence(A, B)
    phi = SmirnovSymbol(data.A, (PoleTerm(1.0, 1, data.B),))
    m = gram_matrix(phi, n)
    sys = np.conj(m.entries)  # row k = equation <p_n, z^k>
    aug = np.zeros(n + 1, dtype=complex)
    aug[n] = 1.0  # coefficient of t
    r = np.hstack([sys, aug[:, None]])

    r = np.vstack([r[:-1] - r[1:], r[-1:]])          # stage 1
    r[-1] = r[-1] + r[:-1].sum(axis=0)               # stage 2
    r[:-2] = r[:-2] - r[1:-1]                        # stage 3
    r[-1] = r[-1] + (data.t2 / abs(B) ** 2) * r[:-1].sum(axis=0)  # stage 4

    expected = np.zeros_like(r)
    band = (data.t0, data.t1 - data.t0, np.conj(data.t0))
    for k in range(n - 1):
        for off, val in enumerate(band):
            expected[k, k + off] = val
    expected[n - 2, -1] = 1.0          # t column of the upper boundary row
    expected[n - 1, n - 1] = data.t0
    expected[n - 1, n] = data.t1
    expected[n - 1, -1] = -1.0
    expected[n, 0] = data.t3
    expected[n, 1] = data.t4

    scale = float(np.max(np.abs(r)))
    deviation = np.abs(r - expected)
    worst = float(deviation.max())
    if worst > tol * scale:
        i, j = np.unravel_index(int(deviation.argmax()), deviation.shape)
        log.warning(
            "reduction replay mismatch for A=%s B=%s n=%d: entry (%d, %d) "
            "is %s, expected %s (scale %.3e)",
            A, B, n, i, j, r[i, j], expected[i, j], scale,
        )
        return False
    return True
