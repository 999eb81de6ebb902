"""Decay of the centered lagged-product integral and of sup |eps y|^2 as eps shrinks."""
import argparse

import numpy as np

from delaynoise.experiments import eps_y_sup_moment, g_stat_experiment
from delaynoise.sdde import DelaySchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    sched = DelaySchedule((1.0,), (1.0, 1.0), 0.08)
    for idx in ((0, 0, 0), (0, 1, 0)):
        rep = g_stat_experiment(sched, idx, [0.08, 0.04, 0.02, 0.01], args.trials, args.T, args.seed)
        print(f"indices {idx}")
        for eps, est, se in rep.rows():
            print(f"  eps={eps:<7g} E[sup G^2]={est:.3e} +- {se:.1e}")
        print(f"  halving ratios {np.round(rep.halving_ratios(), 3).tolist()}")

    rep = eps_y_sup_moment(DelaySchedule((0.0,), (1.0,), 0.1), [0.1, 0.05, 0.025, 0.0125], args.T,
                           max(args.trials, 100), args.seed)
    print("sup |eps y|^2")
    for eps, est, se in rep.rows():
        print(f"  eps={eps:<7g} {est:.5f} +- {se:.5f}")
    print(f"  log-log slope {rep.loglog_slope():.3f}")


if __name__ == "__main__":
    main()
