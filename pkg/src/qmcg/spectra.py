"""k-sweeps, log-log decay fits and fixed-subspace reports."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import su2_tqft, theta
from .errors import DomainError, QMCGError

EXPERIMENTS = (
    "invariance_defect",
    "transport_defect",
    "toeplitz_product",
    "toeplitz_two_structure",
    "toeplitz_norm",
    "coherent_overlap",
)

DEFAULT_PARAMS = {
    "invariance_defect": {"generator": "S", "m": 2, "tau": (0.0, 1.0)},
    "transport_defect": {"x": (0.0, 0.0), "tau0": (0.0, 1.0), "tau1": (1.0, 1.0)},
    "toeplitz_product": {"f1": ((1, 0, 0.5), (-1, 0, 0.5)), "f2": ((0, 1, -0.5j), (0, -1, 0.5j)), "tau": (0.0, 1.0)},
    "toeplitz_two_structure": {"f": ((1, 0, 0.5), (-1, 0, 0.5)), "tau0": (0.0, 1.0), "tau1": (1.0, 1.0)},
    "toeplitz_norm": {"f": ((1, 0, 1.0),), "tau": (0.0, 1.0)},
    "coherent_overlap": {"x": (0.0, 0.0), "y": (0.5, 0.0), "tau": (0.0, 1.0)},
}


@dataclass(frozen=True)
class DecayRecord:
    k: int
    value: float
    experiment: str
    params_hash: str


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n: int
    k_min: int = 0
    k_max: int = 0
    sup_k_times_value: float = float("nan")
    monotone_decay: bool = True
    experiment: str = ""

    def bundle(self) -> dict:
        return {
            "experiment": self.experiment,
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r_squared,
            "n": self.n,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "sup_k_times_value": self.sup_k_times_value,
        }


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(key): _jsonable(x) for key, x in v.items()}
    return v


def params_hash(experiment: str, params: dict) -> str:
    blob = json.dumps(_jsonable({"experiment": experiment, "params": params}), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _tau(pair) -> complex:
    if isinstance(pair, complex):
        return pair
    re, im = pair
    return complex(re, im)


def _point(pair) -> theta.TorusPoint:
    return theta.TorusPoint(*pair)


def _value(experiment: str, k: int, params: dict) -> float:
    if experiment == "invariance_defect":
        X = theta.torsion_set(int(params["m"]))
        return theta.invariance_defect(params["generator"], X, k, _tau(params["tau"]))
    if experiment == "transport_defect":
        return theta.transport_defect(_point(params["x"]), k, _tau(params["tau0"]), _tau(params["tau1"]))
    if experiment == "toeplitz_product":
        f1, f2 = theta.TrigPoly(tuple(params["f1"])), theta.TrigPoly(tuple(params["f2"]))
        tau = _tau(params["tau"])
        T1 = theta.toeplitz_matrix(f1, k, tau).matrix
        T2 = theta.toeplitz_matrix(f2, k, tau).matrix
        T12 = theta.toeplitz_matrix(f1 * f2, k, tau).matrix
        return float(np.linalg.norm(T1 @ T2 - T12, 2))
    if experiment == "toeplitz_two_structure":
        f = theta.TrigPoly(tuple(params["f"]))
        tau0, tau1 = _tau(params["tau0"]), _tau(params["tau1"])
        cross = theta.toeplitz_cross(f, k, tau0, tau1)
        proj = theta.cross_projection(k, tau0, tau1)
        return float(np.linalg.norm(cross - proj @ theta.toeplitz_matrix(f, k, tau0).matrix, 2))
    if experiment == "toeplitz_norm":
        return theta.toeplitz_matrix(theta.TrigPoly(tuple(params["f"])), k, _tau(params["tau"])).norm()
    if experiment == "coherent_overlap":
        return abs(theta.bergman_overlap(_point(params["x"]), _point(params["y"]), k, _tau(params["tau"])))
    raise DomainError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")


def _one(args):
    experiment, k, params = args
    try:
        return _value(experiment, k, params)
    except QMCGError as exc:
        # keep the error type, add the level
        exc.args = (f"k={k}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def sweep(experiment: str, k_values, params: dict | None = None, workers: int = 1) -> list[DecayRecord]:
    if experiment not in EXPERIMENTS:
        raise DomainError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    ks = [int(k) for k in k_values]
    if not ks:
        raise DomainError("empty k list")
    if any(k < 2 for k in ks):
        raise DomainError(f"sweep levels must be >= 2, got {ks}")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError(f"k values must be strictly increasing, got {ks}")
    full = dict(DEFAULT_PARAMS[experiment])
    full.update(params or {})
    h = params_hash(experiment, full)
    jobs = [(experiment, k, full) for k in ks]
    if workers > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_one, jobs))
    else:
        values = [_one(j) for j in jobs]
    return [DecayRecord(k, float(v), experiment, h) for k, v in zip(ks, values)]


def is_eventually_decreasing(values) -> bool:
    """True when the second half of the series is strictly decreasing."""
    v = list(values)
    tail = v[len(v) // 2 :]
    return all(b < a for a, b in zip(tail, tail[1:]))


def loglog_fit(records, min_points: int = 4) -> FitResult:
    recs = list(records)
    if len(recs) < min_points:
        raise DomainError(f"need at least {min_points} records for a fit, got {len(recs)}")
    bad = [r.k for r in recs if not r.value > 0]
    if bad:
        raise DomainError(f"non-positive values at k = {bad}; log-log fit undefined")
    x = np.log([r.k for r in recs])
    y = np.log([r.value for r in recs])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=min(1.0, max(0.0, r2)),
        n=len(recs),
        k_min=min(r.k for r in recs),
        k_max=max(r.k for r in recs),
        sup_k_times_value=max(r.k * r.value for r in recs),
        monotone_decay=is_eventually_decreasing(r.value for r in recs),
        experiment=recs[0].experiment,
    )


def records_csv(records, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "k", "value", "params_hash"])
    for r in records:
        w.writerow([r.experiment, r.k, repr(r.value), r.params_hash])
    return buf.getvalue()


def fit_json(fit: FitResult) -> str:
    return json.dumps(fit.bundle(), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class FixedSubspaceReport:
    source: str
    k: int
    dim: int
    fixed_dim: int
    commutant_dim: int
    gap: float
    witnesses: list = field(repr=False, default_factory=list)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("witnesses")
        return d


def _source_matrices(source: str, k: int):
    if source == "abelian_weil":
        if k < 2:
            raise DomainError(f"abelian_weil needs k >= 2, got {k}")
        return list(theta.weil_matrices(k))
    if source == "tqft_genus1":
        return [m.matrix for m in su2_tqft.genus_matrices(1, k)]
    if source == "tqft_genus2":
        return [m.matrix for m in su2_tqft.genus_matrices(2, k)]
    raise DomainError(f"unknown source {source!r}")


def fixed_subspace_report(source: str, k: int, matrices=None, tol: float = 1e-10) -> FixedSubspaceReport:
    """Fixed traceless endomorphisms of the conjugation action.

    ``matrices`` overrides the generator list of the source (handy for
    sanity checks such as the identity alone).
    """
    mats = _source_matrices(source, k) if matrices is None else [np.asarray(m) for m in matrices]
    d = mats[0].shape[0]
    res = su2_tqft.fixed_and_commutant(mats, tol=tol)
    wit = su2_tqft.fixed_witnesses(res, d)
    return FixedSubspaceReport(source, k, d, len(wit), res.commutant_dim, res.gap, wit)


def conjugation_residual(W: np.ndarray, mats) -> float:
    return max(float(np.linalg.norm(R @ W - W @ R)) for R in mats)


def parse_k_spec(spec: str) -> list[int]:
    """``8:128:pow2`` (powers of two), ``8:20:2`` (step), ``8,16,32`` or a single level."""
    spec = spec.strip()
    if "," in spec:
        return [int(s) for s in spec.split(",") if s.strip()]
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) not in (2, 3):
        raise DomainError(f"bad k spec {spec!r}")
    lo, hi = int(parts[0]), int(parts[1])
    step = parts[2] if len(parts) == 3 else "1"
    if lo > hi:
        raise DomainError(f"empty k range {spec!r}")
    if step == "pow2":
        out, k = [], lo
        if k < 1:
            raise DomainError(f"pow2 range must start at k >= 1, got {lo}")
        while k <= hi:
            out.append(k)
            k *= 2
        return out
    return list(range(lo, hi + 1, int(step)))


def odd_levels(ks) -> list[int]:
    return [k for k in ks if k % 2]


def summarize(fit: FitResult, band=(-1.4, -0.7), r2_min: float = 0.9) -> str:
    ok = band[0] <= fit.slope <= band[1] and fit.r_squared >= r2_min
    flag = "" if fit.monotone_decay else " [not eventually decreasing]"
    return (
        f"{fit.experiment}: slope={fit.slope:.4f} r2={fit.r_squared:.4f} n={fit.n} "
        f"sup k*value={fit.sup_k_times_value:.4g} {'in band' if ok else 'OUT OF BAND'}{flag}"
    )


def safe_fit(records):
    """loglog_fit, or None when some value is not positive (e.g. an exactly fixed vector)."""
    try:
        return loglog_fit(records)
    except DomainError:
        return None
