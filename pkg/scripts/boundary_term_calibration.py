"""Distribution over seeds of the coupled sup error for f = 0, constant sigma and no delay.

In that case the discrete error is exactly max_n |sigma tau (y_n - y_0)|.
"""
import argparse

import numpy as np

from delaynoise.experiments import coupled_sup_errors
from delaynoise.models import additive
from delaynoise.sdde import DelaySchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--h", type=float, default=1e-5)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--sigma", type=float, default=1.0)
    args = ap.parse_args()

    sched = DelaySchedule((0.0,), (1.0,), args.eps)
    errs = next(iter(coupled_sup_errors(additive([[args.sigma]]), sched, 0, args.h, args.T,
                                        range(args.seeds)).values()))
    q = np.quantile(errs, [0.5, 0.9, 0.99])
    print(f"mean {errs.mean():.4f}  median {q[0]:.4f}  q90 {q[1]:.4f}  q99 {q[2]:.4f}  max {errs.max():.4f}")
    print(f"fraction below 0.1: {np.mean(errs < 0.1):.2f}")


if __name__ == "__main__":
    main()
