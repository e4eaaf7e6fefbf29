"""Flat U(1|1) supermatrix integral against the eigenvalue-reduced Z_{1,1} on a grid."""

from smw.grassmann import z11_direct
from smw.model import Potential, SourceSpec
from smw.partition import z_source
from smw.quad import AuxKernels


def main():
    kern = AuxKernels(Potential.gaussian())
    print(f"{'a':>6} {'b':>6} {'direct/z_source':>28} {'direct/(Q0 F0)':>24}")
    for a in (-0.4, 0.0, 0.3):
        for b in (-0.3, 0.1, 0.5):
            if a == b:
                continue
            d = z11_direct(kern, a, b)
            ratio = d / z_source(kern, SourceSpec((a,), (b,))).value
            base = d / (kern.q(0, a) * kern.q_fermionic(0, b))
            print(f"{a:6.2f} {b:6.2f} {ratio:>28.6g} {base:>24.6g}")


if __name__ == "__main__":
    main()
