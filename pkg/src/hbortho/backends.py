"""Precision backends for the numerical kernels.

Two backends are supported:

* ``"f64"`` -- IEEE double precision through numpy/scipy.  This is the fast
  path and the default for moderate degrees.
* ``"hp"``  -- software floating point through mpmath with at least 128 bits
  of mantissa (160 by default).  Gram systems become ill-conditioned as the
  degree grows, so every solver can be re-run on this backend when the double
  path reports a breakdown.

The environment variable ``HB_PRECISION`` overrides the automatic default
used by the CLI ("f64" or "hp").
"""

from __future__ import annotations

import os

import mpmath

HP_PREC_BITS = 160

#: degree above which the automatic policy switches from "f64" to "hp"
AUTO_HP_DEGREE = 32

VALID_TAGS = ("f64", "hp")


def resolve_precision(tag: str | None, n: int) -> str:
    """Turn a user supplied precision tag into a concrete backend name.

    ``None`` selects the automatic policy: double precision up to degree
    ``AUTO_HP_DEGREE``, high precision above, unless ``HB_PRECISION`` is set.
    """
    if tag is None:
        tag = os.environ.get("HB_PRECISION")
    if tag is None:
        return "f64" if n <= AUTO_HP_DEGREE else "hp"
    if tag not in VALID_TAGS:
        raise ValueError(f"unknown precision tag {tag!r}; expected one of {VALID_TAGS}")
    return tag


def workprec():
    """mpmath working-precision context for the "hp" backend."""
    return mpmath.workprec(HP_PREC_BITS)


def to_mpc(z) -> mpmath.mpc:
    z = complex(z)
    return mpmath.mpc(z.real, z.imag)
