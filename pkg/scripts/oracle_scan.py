"""Determinant formulas against brute-force eigenvalue quadrature over several sizes."""
import argparse

from smw import oracle, partition
from smw.model import ChPolySpec, Potential, SourceSpec
from smw.quad import AuxKernels

CASES = [
    ((0.3,), (), (), ()),
    ((0.3, -0.2), (), (), ()),
    ((0.3,), (-0.2,), (), ()),
    ((0.3, -0.25), (0.1,), (), ()),
    ((0.3, -0.25), (0.1, -0.4), (), ()),
    ((0.35, -0.05, -0.4), (0.15,), (), ()),
    ((0.3,), (-0.2,), (0.45 + 0.3j,), (0.1 + 0.6j,)),
    ((0.3, -0.25), (0.1,), (0.45 + 0.3j,), ()),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", choices=["gaussian", "quartic"], default="gaussian")
    ap.add_argument("--order", type=int, default=80)
    args = ap.parse_args()
    pot = Potential.gaussian() if args.potential == "gaussian" else Potential.quartic()
    kern = AuxKernels(pot)
    print(f"{'sizes':>12}  {'formula':>40}  rel.diff")
    for a, b, lam, mu in CASES:
        src, ch = SourceSpec(a, b), ChPolySpec(lam, mu)
        val = partition.psi(kern, src, ch).value
        ref = oracle.eigenvalue_integral(kern, src, ch)
        sizes = f"({src.N},{src.M},{ch.p},{ch.q})"
        print(f"{sizes:>12}  {val:>40.12g}  {abs(val - ref) / abs(ref):.2e}")


if __name__ == "__main__":
    main()
