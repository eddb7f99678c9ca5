"""Dimension, commutant and relation table for the SU(2) representations at genus 1 and 2."""
import argparse

from qmcg import su2_tqft


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k-max", type=int, default=6)
    args = ap.parse_args()
    cols = ["g", "k", "dim", "commutant_dim", "fixed_dim", "min_gram_eig", "max_relation_residual"]
    print(",".join(cols))
    for g in (1, 2):
        for k in range(1, args.k_max + 1):
            row = su2_tqft.summary_row(g, k)
            prime = " (k+2 prime)" if su2_tqft.is_prime(k + 2) else ""
            print(",".join(str(row[c]) for c in cols) + prime)


if __name__ == "__main__":
    main()
