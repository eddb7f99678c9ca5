"""Fixed traceless endomorphisms of the abelian Weil action, level by level.

Charge conjugation j -> -j commutes with both generators, so the fixed space
is nonzero from k = 4 on; its size is reported, not asserted.
"""
import argparse

from qmcg import spectra


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", default="2:16")
    args = ap.parse_args()
    print("k,fixed_dim,commutant_dim,gap")
    for k in spectra.parse_k_spec(args.k):
        r = spectra.fixed_subspace_report("abelian_weil", k)
        print(f"{k},{r.fixed_dim},{r.commutant_dim},{r.gap:.3g}")


if __name__ == "__main__":
    main()
