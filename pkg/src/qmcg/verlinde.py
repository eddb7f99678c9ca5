"""Verlinde dimension counts for SU(2) at level k.

Two different numbers live here and are never mixed up:

* ``twisted_dim``: d_g(k) = (k+1)^(g-1) sum_{j=1}^{2k+1} (-1)^(j+1) sin(pi j / (2(k+1)))^(2-2g),
  the rank of the bundle built from powers of the ample generator.
* ``untwisted_dim``: the S-matrix character sum sum_a S_0a^(2-2g) S_la / S_0a,
  which counts admissible colorings of a spine (zero for odd boundary label).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, PrecisionError

INTEGRALITY_TOL = 1e-6
ESCALATED_DPS = 50


@dataclass(frozen=True)
class GenusLevel:
    g: int
    k: int

    def __post_init__(self):
        if int(self.g) != self.g or int(self.k) != self.k:
            raise DomainError(f"genus and level must be integers, got {self.g}, {self.k}")
        if self.g < 1 or self.k < 1:
            raise DomainError(f"need g >= 1 and k >= 1, got g={self.g}, k={self.k}")


def _as_gl(gl, k=None) -> GenusLevel:
    if isinstance(gl, GenusLevel):
        return gl
    return GenusLevel(int(gl), int(k))


def _round_checked(value: float, tol: float) -> int | None:
    # past 2^52 a double cannot tell an integer from its neighbours
    if not math.isfinite(value) or abs(value) >= 2.0**52:
        return None
    n = round(value)
    return int(n) if abs(value - n) <= tol else None


def _twisted_float(g: int, k: int) -> float:
    j = np.arange(1, 2 * k + 2)
    terms = (-1.0) ** (j + 1) * np.sin(np.pi * j / (2 * (k + 1))) ** (2 - 2 * g)
    return float((k + 1) ** (g - 1) * math.fsum(terms))


def _twisted_mp(g: int, k: int):
    s = mpmath.fsum(
        (-1) ** (j + 1) * mpmath.sin(mpmath.pi * j / (2 * (k + 1))) ** (2 - 2 * g) for j in range(1, 2 * k + 2)
    )
    return (k + 1) ** (g - 1) * s


def _untwisted_float(g: int, k: int, lam: int) -> float:
    a = np.arange(k + 1)
    s0 = np.sqrt(2 / (k + 2)) * np.sin((a + 1) * np.pi / (k + 2))
    sl = np.sqrt(2 / (k + 2)) * np.sin((lam + 1) * (a + 1) * np.pi / (k + 2))
    return float(math.fsum(s0 ** (2 - 2 * g) * sl / s0))


def _untwisted_mp(g: int, k: int, lam: int):
    n = k + 2
    c = mpmath.sqrt(mpmath.mpf(2) / n)
    total = mpmath.mpf(0)
    for a in range(k + 1):
        s0 = c * mpmath.sin((a + 1) * mpmath.pi / n)
        sl = c * mpmath.sin((lam + 1) * (a + 1) * mpmath.pi / n)
        total += s0 ** (2 - 2 * g) * sl / s0
    return total


def _evaluate(fast, slow, what: str, tol: float, extended: bool = False) -> tuple[int, float]:
    """(nearest integer, distance to it) of the value actually used."""
    value = fast()
    n = None if extended else _round_checked(value, tol)
    if n is not None:
        return n, abs(value - n)
    # one escalation step, with enough digits to hold the integer part
    digits = int(math.log10(abs(value))) + 1 if math.isfinite(value) and value != 0 else 0
    with mpmath.workdps(ESCALATED_DPS + digits):
        precise = slow()
        nearest = mpmath.nint(precise)
        gap = float(abs(precise - nearest))
    if gap > tol:
        raise PrecisionError(f"{what}: value {mpmath.nstr(precise, 20)} not within {tol:g} of an integer", gap=gap)
    return int(nearest), gap


def twisted_dim_checked(gl, k=None, tol: float = INTEGRALITY_TOL, extended: bool = False) -> tuple[int, float]:
    """twisted_dim together with the integrality gap of the evaluated sum."""
    gl = _as_gl(gl, k)
    if gl.g < 2:
        raise DomainError(f"twisted Verlinde formula needs g >= 2, got g={gl.g}")
    return _evaluate(
        lambda: _twisted_float(gl.g, gl.k), lambda: _twisted_mp(gl.g, gl.k), f"twisted_dim(g={gl.g}, k={gl.k})", tol, extended
    )


def twisted_dim(gl, k=None, tol: float = INTEGRALITY_TOL, extended: bool = False) -> int:
    return twisted_dim_checked(gl, k, tol, extended)[0]


def untwisted_dim(
    gl, k=None, boundary_label: int | None = None, tol: float = INTEGRALITY_TOL, extended: bool = False
) -> int:
    gl = _as_gl(gl, k)
    lam = 0 if boundary_label is None else int(boundary_label)
    if not 0 <= lam <= gl.k:
        raise DomainError(f"boundary label {lam} outside 0..{gl.k}")
    n, _ = _evaluate(
        lambda: _untwisted_float(gl.g, gl.k, lam),
        lambda: _untwisted_mp(gl.g, gl.k, lam),
        f"untwisted_dim(g={gl.g}, k={gl.k}, label={lam})",
        tol,
        extended,
    )
    return n


def traceless_dim(gl, k=None) -> int:
    """Dimension of the traceless endomorphisms of the twisted space: d^2 - 1."""
    d = twisted_dim(gl, k)
    return d * d - 1


def verlinde_rows(g: int, k_max: int):
    """(g, k, twisted, untwisted) for k = 1..k_max."""
    return [(g, k, twisted_dim(g, k), untwisted_dim(g, k)) for k in range(1, k_max + 1)]
