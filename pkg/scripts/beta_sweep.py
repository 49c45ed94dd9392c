#!/usr/bin/env python3
"""Smoothing study on the nonsmooth minimax benchmark.

Re-solves the two-branch benchmark for a ladder of smoothing weights and
prints how the smoothed optimum approaches the exact nonsmooth optimum
(value 0 at the origin). The one-sided approximation bound is log(2)/beta.

Usage: python scripts/beta_sweep.py [beta ...]
"""

import math
import sys

import numpy as np

from canodual import beta_sweep, fixtures


def main() -> int:
    betas = [float(b) for b in sys.argv[1:]] or [1.0, 10.0, 1e2, 1e3, 1e4]
    rows = beta_sweep(fixtures.example3(), betas)
    print(f"{'beta':>10} {'value':>14} {'bound log2/beta':>16} {'|x|_inf':>12} {'tau':>10}")
    for row in rows:
        print(f"{row['beta']:>10.0f} {row['value']:>14.8f} "
              f"{math.log(2) / row['beta']:>16.8f} "
              f"{np.max(np.abs(row['x'])):>12.3e} {row['tau']:>10.6f}")
    values = [r["value"] for r in rows]
    ok = all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    print(f"monotone decrease toward 0: {'yes' if ok else 'no'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
