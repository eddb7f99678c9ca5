"""Why the coherent-projector transport defect does not decay in the theta frame.

For x = 0 and tau -> tau + 1 the theta frame picks up the diagonal phases
exp(pi i j^2 / k). The overlap between the coherent vector and its phased copy
stays fixed as k grows, so the Hilbert-Schmidt defect sqrt(2 (1 - |<u, v>|^2))
stays fixed too.
"""
import numpy as np

from qmcg import theta


def main():
    x = theta.TorusPoint(0, 0)
    print("k,overlap_sq,defect,sqrt(2(1-overlap_sq))")
    for k in (8, 16, 32, 64, 128, 256):
        u = theta.unit_coherent_vector(x, k, 1j)
        v = theta.unit_coherent_vector(x, k, 1 + 1j)
        ov = abs(np.vdot(u, v)) ** 2
        d = theta.transport_defect(x, k, 1j, 1 + 1j)
        print(f"{k},{ov:.12f},{d:.12f},{np.sqrt(2 * (1 - ov)):.12f}")
    print("2/sqrt(5) =", 2 / np.sqrt(5))


if __name__ == "__main__":
    main()
