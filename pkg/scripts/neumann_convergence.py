"""Convergence experiment for the alternating-series inverse of the
deformation operator: residual norms, conjugate-variable norms and the
information estimate, term by term.

Usage: python scripts/neumann_convergence.py [q] [N] [L] [terms]
"""
import sys

from qfock import make_context
from qfock.deformation import xi_inverse_neumann
from qfock.derivations import conjugate_variable


def main() -> None:
    q = float(sys.argv[1]) if len(sys.argv) > 1 else 0.05
    N = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    L = int(sys.argv[3]) if len(sys.argv) > 3 else 5
    terms = int(sys.argv[4]) if len(sys.argv) > 4 else 20

    ctx = make_context(N, q, L)
    res = xi_inverse_neumann(ctx, terms)
    series = {j: conjugate_variable(j, terms, ctx, series=True)[1] for j in range(1, N + 1)}

    header = ["n", "residual"] + [f"cv_norm_{j}" for j in range(1, N + 1)] + ["fisher"]
    print(",".join(header))
    for n in range(1, terms + 1):
        fisher = sum(series[j][n] ** 2 for j in range(1, N + 1))
        cells = [str(n), f"{res.residuals[n - 1]:.6e}"]
        cells += [f"{series[j][n]:.12f}" for j in range(1, N + 1)]
        cells.append(f"{fisher:.12f}")
        print(",".join(cells))


if __name__ == "__main__":
    main()
