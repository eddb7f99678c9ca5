"""Level-k theta functions on the torus: the genus-one abelian model.

Conventions
-----------
Torus points are fixed symplectic coordinates ``(a, b)`` in ``[0, 1)^2``; at
modular parameter ``tau`` the complex coordinate is ``z = a + tau * b``.

    theta_j(z, tau) = sum_n exp(pi i k tau (n + j/k)^2 + 2 pi i k (n + j/k) z)

with Hermitian weight ``exp(-2 pi k (Im z)^2 / Im tau)`` and area form
``da db``. All inner products are computed in the tau-independent unitary
trivialization

    psi_j(a, b) = exp(pi i k tau b^2) * theta_j(a + tau b, tau)
                = sum_n exp(pi i k tau (n + j/k + b)^2) exp(2 pi i (k n + j) a),

where the metric is the flat one, ``|psi|^2 = |theta|^2 * weight``. Sections
at different ``tau`` then live in one common L2 space, which is what the
two-structure Toeplitz operators need.

The theta frame is covariantly constant for the heat-equation connection,
so transport between modular parameters is the identity on theta-frame
matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np

from .errors import DegeneratePointError, DomainError, PrecisionError

MIN_IM_TAU = 0.1
TAIL_TOL = 1e-14
QUAD_TOL = 1e-10
MAX_GRID = 2048


# -- parameters and points ---------------------------------------------------


def check_tau(tau) -> complex:
    tau = complex(tau)
    if not tau.imag >= MIN_IM_TAU:
        raise DomainError(f"Im(tau) = {tau.imag:g} below working region {MIN_IM_TAU}")
    return tau


@dataclass(frozen=True)
class TorusPoint:
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a) % 1.0)
        object.__setattr__(self, "b", float(self.b) % 1.0)

    def key(self, digits: int = 12):
        # 1 - 1e-15 and 0 are the same point
        return tuple(round(v, digits) % 1.0 for v in (self.a, self.b))


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of {self.entries} is not 1")

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "ModularMatrix") -> "ModularMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ModularMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def mobius(self, tau) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)


IDENTITY = ModularMatrix(1, 0, 0, 1)
S = ModularMatrix(0, -1, 1, 0)
T = ModularMatrix(1, 1, 0, 1)
GENERATORS = {"S": S, "T": T}


def parse_word(word: str) -> str:
    word = word.strip().upper()
    if word in ("", "I", "ID", "IDENTITY", "E"):
        return ""
    bad = set(word) - set(GENERATORS)
    if bad:
        raise DomainError(f"unknown generator(s) {sorted(bad)} in word {word!r}")
    return word


def word_matrix(word: str) -> ModularMatrix:
    """Product of generators, read left to right: ``"TS"`` is ``T @ S``."""
    return reduce(lambda m, ch: m @ GENERATORS[ch], parse_word(word), IDENTITY)


def act_point(gamma: ModularMatrix, x: TorusPoint) -> TorusPoint:
    return TorusPoint(gamma.a * x.a + gamma.b * x.b, gamma.c * x.a + gamma.d * x.b)


@dataclass(frozen=True)
class TorsionSet:
    points: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def keys(self):
        return {p.key() for p in self.points}


def torsion_set(m: int) -> TorsionSet:
    if m < 2:
        raise DomainError(f"torsion order must be >= 2, got {m}")
    return TorsionSet(tuple(TorusPoint(p / m, q / m) for p in range(m) for q in range(m)))


def is_closed(X: TorsionSet, gammas=(S, T)) -> bool:
    keys = X.keys()
    return all(act_point(g, x).key() in keys for g in gammas for x in X)


# -- trigonometric polynomials -----------------------------------------------


@dataclass(frozen=True)
class TrigPoly:
    """f(a, b) = sum of c * exp(2 pi i (p a + q b)) over the modes (p, q, c)."""

    modes: tuple = ()

    def __post_init__(self):
        merged = {}
        for p, q, c in self.modes:
            merged[(int(p), int(q))] = merged.get((int(p), int(q)), 0) + complex(c)
        object.__setattr__(self, "modes", tuple((p, q, c) for (p, q), c in sorted(merged.items()) if c != 0))

    @classmethod
    def constant(cls, c=1.0):
        return cls(((0, 0, c),))

    @classmethod
    def mode(cls, p, q, c=1.0):
        return cls(((p, q, c),))

    @classmethod
    def cos(cls, p, q):
        return cls(((p, q, 0.5), (-p, -q, 0.5)))

    @classmethod
    def sin(cls, p, q):
        return cls(((p, q, -0.5j), (-p, -q, 0.5j)))

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(tuple((p1 + p2, q1 + q2, c1 * c2) for p1, q1, c1 in self.modes for p2, q2, c2 in other.modes))

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(self.modes + other.modes)

    def scale(self, s) -> "TrigPoly":
        return TrigPoly(tuple((p, q, s * c) for p, q, c in self.modes))

    def conj(self) -> "TrigPoly":
        return TrigPoly(tuple((-p, -q, np.conj(c)) for p, q, c in self.modes))

    def is_real(self, tol=1e-14) -> bool:
        mine = dict(((p, q), c) for p, q, c in self.modes)
        other = dict(((p, q), c) for p, q, c in self.conj().modes)
        return all(abs(mine.get(key, 0) - other.get(key, 0)) <= tol for key in set(mine) | set(other))

    def __call__(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = np.zeros(np.broadcast(a, b).shape, dtype=complex)
        for p, q, c in self.modes:
            out += c * np.exp(2j * np.pi * ((p * a + q * b) % 1.0))
        return out

    def grid(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self(a[:, None], b[None, :])

    def dz(self, tau) -> "TrigPoly":
        """Holomorphic derivative d/dz with z = a + tau b."""
        tau = complex(tau)
        denom = tau - tau.conjugate()
        return TrigPoly(tuple((p, q, c * 2j * np.pi * (q - tau.conjugate() * p) / denom) for p, q, c in self.modes))

    def sup_abs(self, n: int = 512) -> float:
        s = (np.arange(n) + 0.5) / n
        return float(np.abs(self.grid(s, s)).max())

    @property
    def max_frequency(self) -> int:
        return max((max(abs(p), abs(q)) for p, q, _ in self.modes), default=0)


# -- theta values ------------------------------------------------------------


def _tail_radius(k: int, im_tau: float, extra_poly: float = 0.0) -> float:
    """Smallest T with sum over |t| > T of exp(-pi k Im(tau) t^2) (times (1+|t|)^extra) below TAIL_TOL."""
    c = math.pi * k * im_tau
    T = 0.0
    while True:
        T += 0.05
        decay = math.exp(-c * T * T)
        geometric = 1.0 / (1.0 - math.exp(-2 * c * T))
        if 2 * decay * geometric * (1.0 + 2 * math.pi * k * (T + 1)) ** extra_poly < TAIL_TOL:
            return T


def _n_range(k: int, j: np.ndarray, bmin: float, bmax: float, radius: float):
    lo = math.floor(-radius - bmax - 1)
    hi = math.ceil(radius - bmin + 1)
    return np.arange(lo, hi + 1)


def section_values(k: int, tau, a, b, derivative: bool = False) -> np.ndarray:
    """psi_j on the tensor grid ``a x b``; shape (k, len(a), len(b)).

    With ``derivative`` the covariant derivative along d/dz is returned
    instead (Chern connection of the weighted metric).
    """
    tau = check_tau(tau)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    radius = _tail_radius(k, tau.imag, 1.0 if derivative else 0.0)
    j = np.arange(k)
    n = _n_range(k, j, b.min(), b.max(), radius)
    u = n[None, :] + j[:, None] / k  # (k, nn)
    t = u[:, :, None] + b[None, None, :]  # (k, nn, nb)
    gauss = np.exp(1j * np.pi * k * tau * t * t)
    if derivative:
        gauss = gauss * (2j * np.pi * k * t)
    freq = (k * n[None, :] + j[:, None]).astype(float)  # (k, nn)
    phase = np.exp(2j * np.pi * ((freq[:, :, None] * a[None, None, :]) % 1.0))  # (k, nn, na)
    return np.einsum("jnb,jna->jab", gauss, phase)


def theta_value(j: int, k: int, x: TorusPoint, tau, lift=(0, 0)) -> complex:
    """theta_j(z, tau) at ``z = (a + m) + tau (b + n)`` for the lift ``(m, n)``."""
    tau = check_tau(tau)
    if not 0 <= j < k:
        raise DomainError(f"label {j} outside 0..{k - 1}")
    a = x.a + lift[0]
    b = x.b + lift[1]
    radius = _tail_radius(k, tau.imag)
    n = np.arange(math.floor(-radius - b - 1), math.ceil(radius - b + 1) + 1)
    u = n + j / k
    z = a + tau * b
    return complex(np.exp(1j * np.pi * k * tau * u * u + 2j * np.pi * k * u * z).sum())


# -- quadrature --------------------------------------------------------------


def _start_grid(k: int, tau0: complex, tau1: complex, fmax: int) -> int:
    im = min(tau0.imag, tau1.imag)
    width = 1.0 / math.sqrt(4 * math.pi * k * im)
    need = max(2.0 / width, 6 * math.sqrt(k) + 2 * fmax, 8)
    return 1 << math.ceil(math.log2(need))


def _raw_elements(k, tau_in, tau_out, f: TrigPoly | None, n: int, derivative=False, weight: TrigPoly | None = None):
    """sum over the n x n grid of (weight * D psi_l^in) * f * conj(psi_j^out) / n^2; D = 1 or nabla_z."""
    s = np.arange(n) / n
    src = section_values(k, tau_in, s, s, derivative=derivative)
    dst = src if (tau_out == tau_in and not derivative) else section_values(k, tau_out, s, s)
    mult = np.ones((n, n), dtype=complex)
    if f is not None:
        mult = mult * f.grid(s, s)
    if weight is not None:
        mult = mult * weight.grid(s, s)
    src = (src * mult[None]).reshape(k, n * n)
    return dst.reshape(k, n * n).conj() @ src.T / (n * n)


def _converged(compute, n0: int, what: str):
    n = n0
    prev = compute(n)
    while True:
        n *= 2
        if n > MAX_GRID:
            raise PrecisionError(f"{what}: quadrature did not converge to {QUAD_TOL:g} by grid {MAX_GRID}")
        cur = compute(n)
        if np.max(np.abs(cur - prev)) < QUAD_TOL:
            return cur, n
        prev = cur


@dataclass(frozen=True)
class GramResult:
    k: int
    tau: complex
    matrix: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)  # sqrt of the diagonal
    grid: int = 0


@lru_cache(maxsize=256)
def gram_matrix(k: int, tau) -> GramResult:
    if k < 1:
        raise DomainError(f"level must be >= 1, got {k}")
    tau = check_tau(tau)
    G, n = _converged(lambda n: _raw_elements(k, tau, tau, None, n), _start_grid(k, tau, tau, 0), f"gram k={k}")
    G = 0.5 * (G + G.conj().T)
    diag = G.diagonal().real
    off = np.abs(G - np.diag(diag)).max() if k > 1 else 0.0
    if off > QUAD_TOL or np.ptp(diag) > QUAD_TOL:
        raise PrecisionError(f"gram k={k}: not a multiple of identity (off-diagonal {off:.2e}, spread {np.ptp(diag):.2e})")
    G.flags.writeable = False
    scale = np.sqrt(diag)
    scale.flags.writeable = False
    return GramResult(k, tau, G, scale, n)


def gram_closed_form(k: int, tau) -> float:
    """Diagonal Gram entry from the unfolded Gaussian integral: 1/sqrt(2 k Im tau)."""
    return 1.0 / math.sqrt(2 * k * complex(tau).imag)


# -- operators ---------------------------------------------------------------


@dataclass(frozen=True)
class ThetaFrameOperator:
    k: int
    tau: complex
    matrix: np.ndarray = field(repr=False)
    hermitian: bool = False

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def _as_trig(f) -> TrigPoly:
    if isinstance(f, TrigPoly):
        return f
    if np.isscalar(f):
        return TrigPoly.constant(f)
    return TrigPoly(tuple(f))


def toeplitz_matrix(f, k: int, tau) -> ThetaFrameOperator:
    """Matrix of T_f = pi(f .) in the orthonormal theta frame: entry (j, l) = <f psi_l, psi_j>."""
    f = _as_trig(f)
    tau = check_tau(tau)
    g = gram_matrix(k, tau)
    raw, _ = _converged(
        lambda n: _raw_elements(k, tau, tau, f, n), _start_grid(k, tau, tau, f.max_frequency), f"toeplitz k={k}"
    )
    M = raw / np.outer(g.scale, g.scale)
    herm = f.is_real()
    if herm:
        M = 0.5 * (M + M.conj().T)
    return ThetaFrameOperator(k, tau, M, herm)


def toeplitz_cross(f, k: int, tau0, tau1) -> np.ndarray:
    """pi_{tau1} f restricted to holomorphic sections at tau0; entry (j, l) = <f psi_l^tau0, psi_j^tau1>."""
    f = _as_trig(f)
    tau0, tau1 = check_tau(tau0), check_tau(tau1)
    g0, g1 = gram_matrix(k, tau0), gram_matrix(k, tau1)
    raw, _ = _converged(
        lambda n: _raw_elements(k, tau0, tau1, f, n),
        _start_grid(k, tau0, tau1, f.max_frequency),
        f"toeplitz_cross k={k}",
    )
    return raw / np.outer(g1.scale, g0.scale)


def cross_projection(k: int, tau0, tau1) -> np.ndarray:
    return toeplitz_cross(TrigPoly.constant(1.0), k, tau0, tau1)


def toeplitz_closed_form(f, k: int, tau0, tau1=None) -> np.ndarray:
    """Same matrix as :func:`toeplitz_cross` from the unfolded Gaussian integral (no quadrature).

    For a mode exp(2 pi i (p a + q b)) the a-integral forces ``j = l + p mod k``
    and the b-integral over the real line is Gaussian.
    """
    f = _as_trig(f)
    tau0 = complex(tau0)
    tau1 = tau0 if tau1 is None else complex(tau1)
    t1c = tau1.conjugate()
    alpha = -1j * np.pi * k * (tau0 - t1c)
    out = np.zeros((k, k), dtype=complex)
    l = np.arange(k)
    for p, q, c in f.modes:
        beta = 2j * np.pi * (q - t1c * p / 1.0)
        # shift t -> t + p/k in the conjugated factor
        base = np.sqrt(np.pi / alpha) * np.exp(beta * beta / (4 * alpha) - 1j * np.pi * t1c * p * p / k)
        vals = c * base * np.exp(-2j * np.pi * q * l / k)
        j = (l + p) % k
        np.add.at(out, (j, l), vals)
    return out / math.sqrt(gram_closed_form(k, tau0) * gram_closed_form(k, tau1))


def derivative_projection_check(mode, k: int, tau) -> float:
    """|| pi nabla_X - T_{f_X} || for X = h d/dz with h a single Fourier mode (None: constant).

    f_X = -div(X) = -dh/dz for the area form da db. Both sides are assembled
    by quadrature; the left side differentiates the theta series directly.
    """
    tau = check_tau(tau)
    h = TrigPoly.constant(1.0) if mode is None else TrigPoly.mode(*mode)
    g = gram_matrix(k, tau)
    raw, _ = _converged(
        lambda n: _raw_elements(k, tau, tau, None, n, derivative=True, weight=h),
        _start_grid(k, tau, tau, h.max_frequency),
        f"derivative k={k}",
    )
    lhs = raw / np.outer(g.scale, g.scale)
    f_x = h.dz(tau).scale(-1.0)
    rhs = toeplitz_matrix(f_x, k, tau).matrix if f_x.modes else np.zeros((k, k))
    return float(np.linalg.norm(lhs - rhs, 2))


# -- coherent states ---------------------------------------------------------


@dataclass(frozen=True)
class ProjectorSection:
    operator: ThetaFrameOperator
    point: TorusPoint

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix


def coherent_vector(x: TorusPoint, k: int, tau, lift=(0, 0)) -> np.ndarray:
    """Orthonormal-frame coefficients conj(psi_j(x)) of the evaluation functional at x."""
    tau = check_tau(tau)
    g = gram_matrix(k, tau)
    vals = section_values(k, tau, [x.a + lift[0]], [x.b + lift[1]])[:, 0, 0]
    v = np.conj(vals) / g.scale
    if np.linalg.norm(v) < 1e-12:
        raise DegeneratePointError(f"evaluation functional vanishes at {x} (k={k}, tau={tau})")
    return v


def unit_coherent_vector(x, k, tau, lift=(0, 0)) -> np.ndarray:
    v = coherent_vector(x, k, tau, lift)
    return v / np.linalg.norm(v)


def coherent_projector(x: TorusPoint, k: int, tau, lift=(0, 0)) -> ProjectorSection:
    e = unit_coherent_vector(x, k, tau, lift)
    P = np.outer(e, e.conj())
    return ProjectorSection(ThetaFrameOperator(k, complex(tau), P, True), x)


def bergman_overlap(x: TorusPoint, y: TorusPoint, k: int, tau) -> complex:
    """<e_y, e_x> for unit coherent states (canonical lifts)."""
    ex = unit_coherent_vector(x, k, tau)
    ey = unit_coherent_vector(y, k, tau)
    return complex(np.vdot(ex, ey))


def projector_sum(X: TorsionSet, k: int, tau) -> np.ndarray:
    return sum(coherent_projector(x, k, tau).matrix for x in X)


def traceless_part(M: np.ndarray) -> np.ndarray:
    d = M.shape[0]
    return M - np.trace(M) / d * np.eye(d)


def hs_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M))


def almost_fixed_section(X: TorsionSet, k: int, tau) -> ThetaFrameOperator:
    """Unit Hilbert-Schmidt normalization of the traceless part of the sum of coherent projectors."""
    if k < 2:
        raise DomainError(f"traceless endomorphisms vanish for k={k}; need k >= 2")
    E0 = traceless_part(projector_sum(X, k, tau))
    nrm = hs_norm(E0)
    if nrm < 1e-10:
        raise DegeneratePointError(f"traceless part of E_X vanishes at k={k} (norm {nrm:.2e})")
    return ThetaFrameOperator(k, complex(tau), E0 / nrm, True)


# -- the SL(2, Z) action -----------------------------------------------------


def weil_matrices(k: int):
    """(rho_S, rho_T): discrete Fourier matrix and quadratic Gauss phases."""
    if k < 1:
        raise DomainError(f"level must be >= 1, got {k}")
    j = np.arange(k)
    rho_s = np.exp(-2j * np.pi * np.outer(j, j) / k) / math.sqrt(k)
    rho_t = np.diag(np.exp(1j * np.pi * j * j / k))
    return rho_s, rho_t


def weil_word(word: str, k: int) -> np.ndarray:
    rho_s, rho_t = weil_matrices(k)
    mats = {"S": rho_s, "T": rho_t}
    return reduce(lambda m, ch: m @ mats[ch], parse_word(word), np.eye(k, dtype=complex))


def conjugate_by(R: np.ndarray, M: np.ndarray) -> np.ndarray:
    return R @ M @ R.conj().T


def invariance_defect(word: str, X: TorsionSet, k: int, tau0, rho: np.ndarray | None = None) -> float:
    """|| E - rho E rho^{-1} || (Hilbert-Schmidt) for the almost fixed section E at tau0.

    The mapping class acts on covariantly constant sections of End by
    conjugation with its Weil matrix; transport in the theta frame is the
    identity, so the constant matrix E(tau0) is the whole section.
    """
    E = almost_fixed_section(X, k, tau0).matrix
    R = weil_word(word, k) if rho is None else rho
    return hs_norm(E - conjugate_by(R, E))


def transport_defect(x: TorusPoint, k: int, tau0, tau1) -> float:
    """|| E_x(tau0) - E_x(tau1) || (Hilbert-Schmidt) with identity transport in the theta frame."""
    return hs_norm(coherent_projector(x, k, tau0).matrix - coherent_projector(x, k, tau1).matrix)


def fixed_subspace_dim_weil(k: int):
    """Commutant data of the conjugation action of (rho_S, rho_T) on End(C^k)."""
    from .su2_tqft import fixed_and_commutant

    rho_s, rho_t = weil_matrices(k)
    return fixed_and_commutant([rho_s, rho_t])


def charge_conjugation(k: int) -> np.ndarray:
    P = np.zeros((k, k))
    P[(-np.arange(k)) % k, np.arange(k)] = 1.0
    return P
