"""Gaussian self-duality residuals by sector, with the calibrated constants."""
import numpy as np

from smw import duality

CASES = [
    (1, 0, 1, 0), (2, 0, 1, 0), (1, 0, 2, 0), (2, 0, 2, 0),
    (1, 1, 1, 1), (2, 1, 1, 1), (1, 1, 0, 0), (1, 0, 0, 1),
]


def main():
    rng = np.random.default_rng(0)
    for N, M, p, q in CASES:
        if N + p < M + q:
            continue
        a = tuple(0.3 - 0.35 * i + rng.uniform(-0.05, 0.05) for i in range(N))
        b = tuple(-0.2 - 0.3 * j - 0.5j for j in range(M))
        lam = tuple(-0.3 + 0.4 * i for i in range(p))
        mu = tuple(0.2 + 0.3 * j + 0.8j for j in range(q))
        try:
            r = duality.check_gaussian_self_duality(N, M, p, q, a, b, lam, mu)
        except Exception as e:  # report and continue the scan
            print((N, M, p, q), "error:", e)
            continue
        c = r.extra["constant"]
        print(f"{str((N, M, p, q)):>14}  residual {r.residual:.2e}  constant {c:.6g}")


if __name__ == "__main__":
    main()
