"""SU(2) TQFT data from Kauffman bracket skein theory.

Everything is evaluated at the root of unity ``A = exp(2 pi i / 4(k+2))``
with the Kauffman-Lins recoupling formulas.

Spine conventions (fixed once, used by every function here):

* genus 1: a single loop edge ``a`` with a leg of colour ``lam`` (``lam = 0``
  when there is no boundary label); vertex ``(a, a, lam)``.
* genus 2: the planar theta graph with edges ``(x, y, z)`` drawn left to
  right, two vertices ``(x, y, z)``. With a boundary label the leg sits on
  edge ``z``, splitting it into ``z`` and ``z2`` with vertex ``(z, z2, lam)``.
* genus 3: the chain ``l1 - e1 - (u, v) - e2 - l3``: loops ``l1`` and ``l3``,
  a bigon ``(u, v)`` and connecting edges ``e1``, ``e2``. A boundary leg
  splits ``e1``.

The genus-2 Humphries chain on the boundary of the theta handlebody is
``c1 = meridian(x)``, ``c2 = loop around the face between x and y``,
``c3 = meridian(y)``, ``c4 = loop around the face between y and z``,
``c5 = meridian(z)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConstructionError, DomainError, PrecisionError

GENUS2_GENERATORS = ("c1", "c2", "c3", "c4", "c5")


@dataclass(frozen=True)
class RootData:
    k: int
    A: complex
    qint: np.ndarray = field(repr=False)  # [n] for n = 0..2k+4
    mu: np.ndarray = field(repr=False)  # twist scalars, a = 0..k

    @property
    def labels(self):
        return range(self.k + 1)


@lru_cache(maxsize=None)
def root_data(k: int) -> RootData:
    if k < 1:
        raise DomainError(f"level must be >= 1, got {k}")
    A = np.exp(2j * np.pi / (4 * (k + 2)))
    n = np.arange(2 * k + 5)
    qint = ((A ** (2 * n) - A ** (-2 * n)) / (A**2 - A**-2)).real
    a = np.arange(k + 1)
    mu = (-1.0) ** a * A ** (a * a + 2 * a)
    qint.flags.writeable = False
    mu.flags.writeable = False
    return RootData(k=k, A=complex(A), qint=qint, mu=mu)


def admissible(a: int, b: int, c: int, k: int) -> bool:
    return (
        (a + b + c) % 2 == 0
        and a <= b + c
        and b <= a + c
        and c <= a + b
        and a + b + c <= 2 * k
        and min(a, b, c) >= 0
    )


# -- spines and colourings ---------------------------------------------------


@dataclass(frozen=True)
class Spine:
    """Trivalent spine: ``vertices`` hold edge indices; ``fixed`` pins colours."""

    edges: tuple
    vertices: tuple
    fixed: dict = field(default_factory=dict)


def spine(g: int, boundary_label=None) -> Spine:
    lam = 0 if boundary_label is None else int(boundary_label)
    if g == 1:
        return Spine(("a", "leg"), ((0, 0, 1),), {1: lam})
    if g == 2:
        if boundary_label is None:
            return Spine(("x", "y", "z"), ((0, 1, 2), (0, 1, 2)))
        return Spine(("x", "y", "z", "z2", "leg"), ((0, 1, 2), (0, 1, 3), (2, 3, 4)), {4: lam})
    if g == 3:
        if boundary_label is None:
            return Spine(
                ("l1", "e1", "u", "v", "e2", "l3"),
                ((0, 0, 1), (1, 2, 3), (4, 2, 3), (5, 5, 4)),
            )
        return Spine(
            ("l1", "e1", "e1b", "u", "v", "e2", "l3", "leg"),
            ((0, 0, 1), (1, 2, 7), (2, 3, 4), (5, 3, 4), (6, 6, 5)),
            {7: lam},
        )
    raise DomainError(f"unsupported genus {g} (supported: 1, 2, 3)")


@dataclass(frozen=True)
class ColoredBasis:
    g: int
    k: int
    spine: Spine
    colorings: tuple

    def __len__(self):
        return len(self.colorings)

    def index(self, coloring) -> int:
        return self._lookup[tuple(coloring)]

    @property
    def _lookup(self):
        # cheap enough to rebuild; bases are small
        return {c: i for i, c in enumerate(self.colorings)}


def _enumerate(sp: Spine, k: int):
    """Backtracking over edges; vertices are checked as soon as they are fully coloured."""
    n = len(sp.edges)
    ready = [[] for _ in range(n)]
    for v in sp.vertices:
        ready[max(v)].append(v)
    out = []
    col = [0] * n

    def rec(i):
        if i == n:
            out.append(tuple(col))
            return
        choices = [sp.fixed[i]] if i in sp.fixed else range(k + 1)
        for c in choices:
            col[i] = c
            if all(admissible(col[p], col[q], col[r], k) for p, q, r in ready[i]):
                rec(i + 1)

    rec(0)
    return out


def admissible_colorings(g: int, k: int, boundary_label=None) -> ColoredBasis:
    if k < 1:
        raise DomainError(f"level must be >= 1, got {k}")
    if boundary_label is not None and not 0 <= boundary_label <= k:
        raise DomainError(f"boundary label {boundary_label} outside 0..{k}")
    sp = spine(g, boundary_label)
    cols = _enumerate(sp, k)
    if g == 1:
        cols = [c[:1] for c in cols]
    elif boundary_label is not None:
        cols = [c[: len(sp.edges) - 1] for c in cols]
    return ColoredBasis(g, k, sp, tuple(cols))


# -- network evaluations -----------------------------------------------------


class NetValues:
    """Kauffman-Lins evaluations of loops, theta nets and tetrahedra at level ``k``."""

    def __init__(self, k: int):
        self.k = k
        self.root = root_data(k)
        q = self.root.qint
        fact = np.ones(len(q))
        for n in range(1, len(q)):
            fact[n] = fact[n - 1] * q[n]
        self._fact = fact

    def qfact(self, n: int) -> float:
        return self._fact[n]

    def delta(self, a: int) -> float:
        return (-1) ** a * self.root.qint[a + 1]

    def _check(self, a, b, c):
        if not admissible(a, b, c, self.k):
            raise DomainError(f"inadmissible triple {(a, b, c)} at level {self.k}")

    def theta(self, a: int, b: int, c: int) -> float:
        self._check(a, b, c)
        m, n, p = (a + b - c) // 2, (b + c - a) // 2, (a + c - b) // 2
        f = self.qfact
        return (-1) ** (m + n + p) * f(m + n + p + 1) * f(m) * f(n) * f(p) / (f(m + n) * f(n + p) * f(m + p))

    def tet(self, A: int, B: int, E: int, C: int, D: int, F: int) -> float:
        """Tet[A B E; C D F] with faces (A,D,E), (B,C,E), (A,B,F), (C,D,F)."""
        for t in ((A, D, E), (B, C, E), (A, B, F), (C, D, F)):
            self._check(*t)
        f = self.qfact
        a = ((A + D + E) // 2, (B + C + E) // 2, (A + B + F) // 2, (C + D + F) // 2)
        b = ((B + D + E + F) // 2, (A + C + E + F) // 2, (A + B + C + D) // 2)
        inner = 1.0
        for bj in b:
            for ai in a:
                inner *= f(bj - ai)
        ext = f(A) * f(B) * f(C) * f(D) * f(E) * f(F)
        total = 0.0
        for s in range(max(a), min(b) + 1):
            den = 1.0
            for ai in a:
                den *= f(s - ai)
            for bj in b:
                den *= f(bj - s)
            total += (-1) ** s * f(s + 1) / den
        return inner / ext * total

    def sixj(self, a, b, i, c, d, j) -> float:
        """Recoupling coefficient {a b i; c d j}: I-shape with internal i onto H-shape j."""
        return self.tet(a, b, i, c, d, j) * self.delta(i) / (self.theta(a, d, i) * self.theta(b, c, i))

    def qint(self, n: int) -> float:
        k = self.k
        return np.sin(np.pi * n / (k + 2)) / np.sin(np.pi / (k + 2))

    def hopf(self, a: int, b: int) -> float:
        return (-1) ** (a + b) * self.qint((a + 1) * (b + 1))

    def encircle(self, c: int, x: int) -> float:
        """Scalar by which a c-coloured meridian loop acts on an x-coloured edge."""
        return self.hopf(c, x) / self.delta(x)


@lru_cache(maxsize=None)
def net_values(k: int) -> NetValues:
    return NetValues(k)


# -- genus 1 -----------------------------------------------------------------


def genus1_rep(k: int):
    """Modular data (S, T) on the (k+1)-dimensional torus space."""
    rd = root_data(k)
    a = np.arange(k + 1)
    S = np.sqrt(2.0 / (k + 2)) * np.sin(np.outer(a + 1, a + 1) * np.pi / (k + 2))
    T = np.diag(rd.mu)
    return S.astype(complex), T


# -- genus 2 -----------------------------------------------------------------


def _twist_coefficients(k: int) -> np.ndarray:
    """alpha with sum_c alpha_c * encircle(c, x) = mu_x for every label x."""
    nv = net_values(k)
    M = np.array([[nv.encircle(c, x) for c in range(k + 1)] for x in range(k + 1)])
    return np.linalg.solve(M, root_data(k).mu)


def face_loop(k: int, c: int, pair: str) -> np.ndarray:
    """Loop operator of a c-coloured curve around the face bounded by two theta edges.

    ``pair`` is ``"xy"`` or ``"yz"``. The loop is fused into both edges and the
    two resulting triangles are reduced with tetrahedral coefficients.
    """
    basis = admissible_colorings(2, k)
    nv = net_values(k)
    L = np.zeros((len(basis), len(basis)))
    idx = {col: i for i, col in enumerate(basis.colorings)}
    for col in basis.colorings:
        x, y, z = col
        if pair == "xy":
            p, q, r = x, y, z
        elif pair == "yz":
            p, q, r = z, y, x
        else:
            raise DomainError(f"unknown face {pair!r}")
        for p2 in range(k + 1):
            if not admissible(p, c, p2, k):
                continue
            for q2 in range(k + 1):
                if not (admissible(q, c, q2, k) and admissible(p2, q2, r, k)):
                    continue
                fuse = nv.delta(p2) * nv.delta(q2) / (nv.theta(p, c, p2) * nv.theta(q, c, q2))
                tri = nv.tet(p, p2, r, q2, q, c) / nv.theta(p2, q2, r)
                new = (p2, q2, r) if pair == "xy" else (r, q2, p2)
                L[idx[new], idx[col]] += fuse * tri * tri
    return L


def dehn_twist_from_loops(k: int, loops) -> np.ndarray:
    """Dehn twist as the combination sum_c alpha_c L(c) of loop operators along one curve."""
    alpha = _twist_coefficients(k)
    return sum(a * L for a, L in zip(alpha, loops))


@dataclass(frozen=True)
class RepMatrix:
    generator: str
    matrix: np.ndarray = field(repr=False)


def gram_form(g: int, k: int) -> np.ndarray:
    """Hermitian form of the colouring basis: prod of vertex thetas over prod of edge loops."""
    nv = net_values(k)
    if g == 1:
        vals = [nv.theta(a, a, 0) / (nv.delta(a) * nv.delta(0)) for a in range(k + 1)]
    elif g == 2:
        basis = admissible_colorings(2, k)
        vals = [nv.theta(x, y, z) ** 2 / (nv.delta(x) * nv.delta(y) * nv.delta(z)) for x, y, z in basis.colorings]
    else:
        raise DomainError(f"gram_form supports genus 1 and 2, got {g}")
    G = np.diag(np.asarray(vals, dtype=float)).astype(complex)
    lo = np.linalg.eigvalsh(G).min()
    if lo <= 0:
        raise ConstructionError(f"Hermitian form not positive definite at level {k} (min eig {lo:g})")
    return G


def gram_unitarity_residual(U: np.ndarray, G: np.ndarray) -> float:
    return float(np.linalg.norm(U.conj().T @ G @ U - G) / np.linalg.norm(G))


def genus2_rep(k: int, tol: float = 1e-8) -> list[RepMatrix]:
    """Chain twists c1..c5 on the genus-2 theta basis."""
    if not 1 <= k <= 6:
        raise DomainError(f"genus-2 representation supported for 1 <= k <= 6, got {k}")
    basis = admissible_colorings(2, k)
    mu = root_data(k).mu
    cols = np.array(basis.colorings)
    diag = {name: np.diag(mu[cols[:, e]]) for name, e in (("c1", 0), ("c3", 1), ("c5", 2))}
    c2 = dehn_twist_from_loops(k, [face_loop(k, c, "xy") for c in range(k + 1)])
    c4 = dehn_twist_from_loops(k, [face_loop(k, c, "yz") for c in range(k + 1)])
    mats = {"c1": diag["c1"], "c2": c2, "c3": diag["c3"], "c4": c4, "c5": diag["c5"]}
    G = gram_form(2, k)
    for name, U in mats.items():
        res = gram_unitarity_residual(U, G)
        if res > tol:
            raise ConstructionError(f"twist {name} not unitary for the Hermitian form at k={k} (residual {res:.2e})")
    return [RepMatrix(name, mats[name]) for name in GENUS2_GENERATORS]


# -- relations ---------------------------------------------------------------


def phase_fit_residual(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, complex]:
    """min over |lam| = 1 of ||lhs - lam * rhs|| (Frobenius)."""
    ip = np.vdot(rhs, lhs)
    lam = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(lhs - lam * rhs)), complex(lam)


def braid_residual(a: np.ndarray, b: np.ndarray) -> float:
    return phase_fit_residual(a @ b @ a, b @ a @ b)[0]


def commutator_residual(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a))


def chain_relation_residuals(reps) -> dict:
    """Braid residuals for neighbours in the chain, commutators for the rest."""
    mats = [r.matrix for r in reps]
    out = {}
    for i, j in itertools.combinations(range(len(mats)), 2):
        key = f"{reps[i].generator},{reps[j].generator}"
        if j == i + 1:
            out["braid:" + key] = braid_residual(mats[i], mats[j])
        else:
            out["commute:" + key] = commutator_residual(mats[i], mats[j])
    return out


# -- commutant ---------------------------------------------------------------


@dataclass(frozen=True)
class CommutantResult:
    fixed_dim: int
    commutant_dim: int
    gap: float  # smallest singular value kept out of the null space, relative
    null_max: float  # largest singular value counted as null, relative
    null_basis: np.ndarray = field(repr=False)  # columns: vec(Psi), row-major


def fixed_and_commutant(mats, tol: float = 1e-10, ambiguity: float = 100.0) -> CommutantResult:
    """Commutant of a set of matrices via the stacked Sylvester null space.

    Diagonal generators are solved exactly first: they only allow entries
    ``Psi[a, b]`` with equal diagonal values, and each excluded pair contributes
    the singular value ``|D_aa - D_bb|``. The remaining generators are stacked
    into ``R Psi - Psi R = 0`` over the allowed entries and handed to an SVD.

    Singular values (relative to the largest generator norm) at or below
    ``tol`` count as null; a kept singular value below ``ambiguity * tol``
    makes the rank ambiguous and raises :class:`PrecisionError`.
    """
    mats = [np.asarray(getattr(m, "matrix", m), dtype=complex) for m in mats]
    if not mats:
        raise DomainError("empty generator list")
    d = mats[0].shape[0]
    scale = max(1.0, max(np.linalg.norm(R, 2) for R in mats))
    is_diag = [np.count_nonzero(R - np.diag(np.diag(R))) == 0 for R in mats]
    diags = [np.diag(R) for R, flag in zip(mats, is_diag) if flag]
    others = [R for R, flag in zip(mats, is_diag) if not flag]

    if diags:
        D = np.array(diags)
        spread = np.max(np.abs(D[:, :, None] - D[:, None, :]), axis=0) / scale
    else:
        spread = np.zeros((d, d))
    allowed = np.argwhere(spread <= tol)
    excluded = spread[spread > tol]
    rel_parts = [excluded]
    null_parts = [spread[spread <= tol]]

    n = len(allowed)
    if others:
        rows = []
        for R in others:
            # column for unknown Psi[a, b]: R[:, a] placed in column b minus R[b, :] placed in row a
            block = np.zeros((d, d, n), dtype=complex)
            for col, (a, b) in enumerate(allowed):
                block[:, b, col] += R[:, a]
                block[a, :, col] -= R[b, :]
            rows.append(block.reshape(d * d, n))
        _, s, vh = np.linalg.svd(np.vstack(rows), full_matrices=False)
        s = s / scale
        null = s <= tol
        nullity = int(null.sum())
        rel_parts.append(s[~null])
        null_parts.append(s[null])
        coeff = vh[null].conj().T
    else:
        nullity = n
        coeff = np.eye(n)

    kept = np.concatenate(rel_parts) if rel_parts else np.array([])
    nulls = np.concatenate(null_parts) if null_parts else np.array([])
    gap = float(kept.min()) if kept.size else float("inf")
    null_max = float(nulls.max()) if nulls.size else 0.0
    if kept.size and gap < ambiguity * tol:
        raise PrecisionError(f"rank ambiguous: singular value {gap:.3e} within {ambiguity:g}x of tolerance {tol:g}", gap=gap)
    basis = np.zeros((d * d, coeff.shape[1]), dtype=complex)
    flat = allowed[:, 0] * d + allowed[:, 1]
    basis[flat, :] = coeff
    return CommutantResult(fixed_dim=nullity - 1, commutant_dim=nullity, gap=gap, null_max=null_max, null_basis=basis)


def fixed_witnesses(result: CommutantResult, d: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of the traceless part of the commutant."""
    vecs = [result.null_basis[:, i].reshape(d, d) for i in range(result.null_basis.shape[1])]
    eye = np.eye(d) / np.sqrt(d)
    traceless = [V - np.vdot(eye, V) * eye for V in vecs]
    if not traceless:
        return []
    M = np.array([T.ravel() for T in traceless]).T
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int((s > 1e-8 * max(1.0, s.max())).sum())
    return [u[:, i].reshape(d, d) for i in range(rank)]


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def genus_matrices(g: int, k: int):
    if g == 1:
        S, T = genus1_rep(k)
        return [RepMatrix("S", S), RepMatrix("T", T)]
    if g == 2:
        return genus2_rep(k)
    raise DomainError(f"representation matrices available for genus 1 and 2, got {g}")


def summary_row(g: int, k: int) -> dict:
    """Row for the tqft CSV: dimensions, commutant, positivity and relation residuals."""
    reps = genus_matrices(g, k)
    G = gram_form(g, k)
    res = fixed_and_commutant(reps)
    if g == 2:
        rel = max(chain_relation_residuals(reps).values())
    else:
        S, T = reps[0].matrix, reps[1].matrix
        rel = max(
            phase_fit_residual(np.linalg.matrix_power(S @ T, 3), S @ S)[0],
            phase_fit_residual(np.linalg.matrix_power(S, 4), np.eye(len(S)))[0],
        )
    return {
        "g": g,
        "k": k,
        "dim": len(G),
        "commutant_dim": res.commutant_dim,
        "fixed_dim": res.fixed_dim,
        "min_gram_eig": float(np.linalg.eigvalsh(G).min()),
        "max_relation_residual": float(rel),
    }
