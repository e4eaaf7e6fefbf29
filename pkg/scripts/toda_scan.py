"""Residual table for the lattice equations on Z~ and the bilinear equations on Psi~."""
import argparse

from smw import toda
from smw.model import Potential
from smw.quad import AuxKernels


def fmt(r):
    return "skipped" if not r.applicable else f"{r.residual:.2e}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", choices=["gaussian", "quartic"], default="gaussian")
    ap.add_argument("-a", type=float, default=0.3)
    ap.add_argument("-b", type=float, default=-0.2)
    args = ap.parse_args()
    kern = AuxKernels(Potential.gaussian() if args.potential == "gaussian" else Potential.quartic())
    print(f"{'site':>7} {'method':>18} {'1D':>10} {'2D':>10} {'jacobi':>10}")
    for N in range(1, 4):
        for M in range(0, 3):
            for m in (toda.EXACT, toda.FD):
                r1 = toda.toda_1d_residual(kern, N, M, args.a, args.b, m)
                r2 = toda.toda_2d_residual(kern, N, M, args.a, args.b, m)
                jac = r1.extra.get("wronskian_jacobi")
                print(f"{str((N, M)):>7} {m:>18} {fmt(r1):>10} {fmt(r2):>10} "
                      f"{'' if jac is None else f'{jac:.1e}':>10}")
    lam, mu = 0.45 + 0.3j, 0.1 + 0.6j
    for s in [(1, 1, 2, 2), (2, 2, 1, 1), (2, 2, 2, 2), (3, 1, 3, 1), (3, 0, 3, 0)]:
        rs = toda.psi_bilinear_residuals(kern, *s, args.a, args.b, lam, mu)
        print(s, "  ".join(f"{r.equation}={fmt(r)}" for r in rs))


if __name__ == "__main__":
    main()
