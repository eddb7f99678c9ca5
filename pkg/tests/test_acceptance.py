"""Acceptance gate: one pass/fail line per criterion, printed in the terminal summary."""
import itertools
import time

import numpy as np
import pytest

from conftest import record
from qmcg import spectra, su2_tqft, theta, verlinde

KS = [8, 16, 32, 64, 128]
SLOPE_BAND = (-1.4, -0.7)
R2_MIN = 0.9
I = 1j


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def _band(fit):
    return fit is not None and SLOPE_BAND[0] <= fit.slope <= SLOPE_BAND[1] and fit.r_squared >= R2_MIN


def _fit_text(fit):
    if fit is None:
        return "no fit (non-positive value)"
    return f"slope={fit.slope:.3f} r2={fit.r_squared:.3f} sup k*v={fit.sup_k_times_value:.3g}"


def _bounded_10pct(kv):
    # no increase by more than 10% between successive levels
    return all(b <= 1.1 * a for a, b in zip(kv, kv[1:]))


SWEEPS = {
    "3:S": ("invariance_defect", {"generator": "S", "m": 2, "tau": (0.0, 1.0)}),
    "3:T": ("invariance_defect", {"generator": "T", "m": 2, "tau": (0.0, 1.0)}),
    "3:TS": ("invariance_defect", {"generator": "TS", "m": 2, "tau": (0.0, 1.0)}),
    "4": ("transport_defect", {"x": (0.0, 0.0), "tau0": (0.0, 1.0), "tau1": (1.0, 1.0)}),
    "5a": ("toeplitz_product", {"tau": (0.0, 1.0)}),
    "5b": ("toeplitz_norm", {"f": ((1, 0, 1.0),), "tau": (0.0, 1.0)}),
    "5c": ("toeplitz_two_structure", {"tau0": (0.0, 1.0), "tau1": (1.0, 1.0)}),
}


def _run_sweeps():
    out, times = {}, {}
    for key, (exp, params) in SWEEPS.items():
        ks = [128] if key == "5b" else KS
        out[key], times[key] = _timed(lambda: spectra.sweep(exp, ks, params))
    return out, times


@pytest.fixture(scope="module")
def sweeps():
    return _run_sweeps()


def test_criterion_1_verlinde_integrality():
    def work():
        gaps = []
        for g, k in itertools.product((2, 3, 4), range(1, 21)):
            _, gap = verlinde.twisted_dim_checked(g, k)
            gaps.append(gap)
        spots = (verlinde.twisted_dim(2, 1), verlinde.twisted_dim(2, 2), verlinde.twisted_dim(3, 1))
        return max(gaps), spots

    (gap, spots), dt = _timed(work)
    ok = gap < 1e-6 and spots == (6, 19, 28) and dt < 1.0
    record(1, ok, f"max integrality gap {gap:.2e} (after escalation), spots {spots}, {dt:.2f}s")
    assert ok


def test_criterion_2_basis_counts():
    def work():
        bad = []
        for g, k in itertools.product((1, 2, 3), range(1, 9)):
            n = len(su2_tqft.admissible_colorings(g, k))
            if n != verlinde.untwisted_dim(g, k):
                bad.append((g, k))
        return bad

    bad, dt = _timed(work)
    ok = not bad and dt < 10
    record(2, ok, f"mismatches {bad}, 24 cells, {dt:.2f}s")
    assert ok


def test_criterion_3_almost_fixed_decay(sweeps):
    recs, times = sweeps
    parts, ok = [], True
    for gen in ("S", "T", "TS"):
        fit = spectra.safe_fit(recs[f"3:{gen}"])
        good = _band(fit)
        ok &= good
        vals = ", ".join(f"{r.value:.3g}" for r in recs[f"3:{gen}"])
        parts.append(f"{gen}: {_fit_text(fit)} [{vals}] {'ok' if good else 'out of band'}")
    dt = sum(times[f"3:{g}"] for g in ("S", "T", "TS"))
    ok &= dt < 300
    record(3, ok, "; ".join(parts) + f"; {dt:.1f}s")
    assert ok


def test_criterion_4_transport_decay(sweeps):
    recs, times = sweeps
    fit = spectra.safe_fit(recs["4"])
    vals = ", ".join(f"{r.value:.4g}" for r in recs["4"])
    ok = _band(fit) and times["4"] < 300
    record(4, ok, f"{_fit_text(fit)} [{vals}]; {times['4']:.1f}s")
    assert ok


def test_criterion_5_toeplitz_laws(sweeps):
    recs, times = sweeps
    kv_a = [r.k * r.value for r in recs["5a"]]
    ok_a = _bounded_10pct(kv_a)
    norm = recs["5b"][0].value
    ok_b = abs(norm - 1.0) <= 0.05
    kv_c = [r.k * r.value for r in recs["5c"]]
    ok_c = _bounded_10pct(kv_c)
    dt = times["5a"] + times["5b"] + times["5c"]
    ok = ok_a and ok_b and ok_c and dt < 600
    fmt = lambda xs: ", ".join(f"{x:.3f}" for x in xs)  # noqa: E731
    record(
        5,
        ok,
        f"(a) {'PASS' if ok_a else 'FAIL'} k*defect [{fmt(kv_a)}]; "
        f"(b) {'PASS' if ok_b else 'FAIL'} ||T_f|| at k=128 = {norm:.5f}; "
        f"(c) {'PASS' if ok_c else 'FAIL'} k*defect [{fmt(kv_c)}]; {dt:.1f}s",
    )
    assert ok


def test_criterion_6_derivative_identity():
    worst = 0.0
    for mode, k, tau in itertools.product((None, (1, 0)), (8, 12), (I, 0.5 + I)):
        worst = max(worst, theta.derivative_projection_check(mode, k, tau))
    ok = worst < 1e-8
    record(6, ok, f"max residual {worst:.2e} over 8 cases")
    assert ok


def test_criterion_7_offdiagonal_decay():
    pts = list(theta.torsion_set(2))
    parts, ok = [], True
    for x, y in itertools.combinations(pts, 2):
        vals = [abs(theta.bergman_overlap(x, y, k, I)) for k in (10, 20, 40)]
        ratios = [b / a if a > 0 else float("inf") for a, b in zip(vals, vals[1:])]
        good = all(r < 0.1 for r in ratios)
        ok &= good
        parts.append(f"{x.key()}-{y.key()}: {', '.join(f'{r:.2g}' for r in ratios)}{'' if good else ' (bad)'}")
    record(7, ok, "ratios k->2k for k=10,20: " + "; ".join(parts))
    assert ok


def test_criterion_8_no_invariant_vector():
    def work():
        return [su2_tqft.fixed_and_commutant(su2_tqft.genus2_rep(k), tol=1e-10) for k in (1, 3)]

    res, dt = _timed(work)
    ok = all(r.commutant_dim == 1 and r.fixed_dim == 0 and r.gap >= 1e4 * 1e-10 for r in res) and dt < 60
    record(
        8,
        ok,
        "; ".join(f"k={k}: commutant={r.commutant_dim} fixed={r.fixed_dim} gap={r.gap:.3g}" for k, r in zip((1, 3), res))
        + f"; {dt:.2f}s",
    )
    assert ok


def test_criterion_9_structural_invariants():
    min_eig, unit, comm, braid = np.inf, 0.0, 0.0, 0.0
    for k in range(1, 7):
        for g in (1, 2):
            G = su2_tqft.gram_form(g, k)
            min_eig = min(min_eig, np.linalg.eigvalsh(G).min())
            for rep in su2_tqft.genus_matrices(g, k):
                unit = max(unit, su2_tqft.gram_unitarity_residual(rep.matrix, G))
        for key, val in su2_tqft.chain_relation_residuals(su2_tqft.genus2_rep(k)).items():
            if key.startswith("braid"):
                braid = max(braid, val)
            else:
                comm = max(comm, val)
    proj = 0.0
    points = list(theta.torsion_set(2))
    for k, tau in itertools.product(KS, (I, 1 + I)):
        for x in points:
            E = theta.coherent_projector(x, k, tau).matrix
            proj = max(proj, np.abs(E @ E - E).max(), np.abs(E - E.conj().T).max(), abs(np.trace(E) - 1))
    ok = min_eig > 0 and unit < 1e-8 and comm < 1e-10 and braid < 1e-8 and proj < 1e-10
    record(
        9,
        ok,
        f"min gram eig {min_eig:.3g}, unitarity {unit:.1e}, commute {comm:.1e}, braid {braid:.1e}, projector {proj:.1e}",
    )
    assert ok


def test_criterion_10_determinism(sweeps):
    first, _ = sweeps
    theta.gram_matrix.cache_clear()
    second, _ = _run_sweeps()
    same = all(spectra.records_csv(first[key]) == spectra.records_csv(second[key]) for key in SWEEPS)
    record(10, same, f"{len(SWEEPS)} sweep CSVs from criteria 3-5 byte-identical across runs: {same}")
    assert same
