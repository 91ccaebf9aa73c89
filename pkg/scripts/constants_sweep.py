"""Sweep the explicit norm constants over a q-grid and locate the largest q
(per alphabet size) at which each bound still certifies invertibility.

Usage: python scripts/constants_sweep.py [N_max]
"""
import sys

from qfock import constants


def boundary(N: int, which: str, lo: float = 0.0, hi: float = 0.5) -> float:
    for _ in range(60):
        mid = (lo + hi) / 2
        rep = constants(mid, N)
        val = rep.nu if which == "nu" else rep.rho
        if val < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def main() -> None:
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    print("N,q_max_nu,q_max_nu*N,q_max_rho,q_max_rho*sqrt(N)")
    for N in range(2, n_max + 1):
        qn = boundary(N, "nu")
        qr = boundary(N, "rho")
        print(f"{N},{qn:.6f},{qn * N:.6f},{qr:.6f},{qr * N ** 0.5:.6f}")


if __name__ == "__main__":
    main()
