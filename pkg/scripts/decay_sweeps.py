"""Run the decay sweeps behind the almost-fixed-vector and Toeplitz experiments.

    python3 scripts/decay_sweeps.py --out results/decay --k 8:128:pow2 --workers 4
"""
import argparse
from pathlib import Path

from qmcg import spectra

RUNS = [
    ("invariance_S", "invariance_defect", {"generator": "S"}),
    ("invariance_T", "invariance_defect", {"generator": "T"}),
    ("invariance_TS", "invariance_defect", {"generator": "TS"}),
    ("transport", "transport_defect", {}),
    ("toeplitz_product", "toeplitz_product", {}),
    ("toeplitz_two_structure", "toeplitz_two_structure", {}),
    ("toeplitz_norm", "toeplitz_norm", {}),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/decay")
    ap.add_argument("--k", default="8:128:pow2")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ks = spectra.parse_k_spec(args.k)
    for name, exp, params in RUNS:
        recs = spectra.sweep(exp, ks, params, workers=args.workers)
        (out / f"{name}.csv").write_text(spectra.records_csv(recs, [f"k = {args.k}"]))
        fit = spectra.safe_fit(recs)
        if fit is None:
            print(f"{name}: no fit, values {[r.value for r in recs]}")
            continue
        (out / f"{name}_fit.json").write_text(spectra.fit_json(fit))
        print(name, spectra.summarize(fit), "| k*value:", ", ".join(f"{r.k * r.value:.4g}" for r in recs))


if __name__ == "__main__":
    main()
