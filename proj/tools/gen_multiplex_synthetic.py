#!/usr/bin/env python3
"""Synthetic probability-vs-bins data at the published fit parameters, 1% multiplicative noise."""
import argparse

import numpy as np


def work_zone(p1, eta_sl, n, head=5, tail=5):
    bins = list(range(head + 1, n - tail + 1))
    if not bins or bins[-1] != n:
        bins.append(n)
    total, free = 0.0, 1.0
    for k in reversed(bins):
        total += p1 * free * (1.0 - eta_sl) ** (n - k + 1)
        free *= 1.0 - p1
    return total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/multiplex_synthetic.csv")
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--noise", type=float, default=0.01)
    args = ap.parse_args()

    mu, eta, eta_sl = 6e-3, 0.31, 0.067
    p1 = mu / (1.0 + mu) ** 2 * eta
    rng = np.random.default_rng(args.seed)
    with open(args.out, "w") as f:
        f.write(f"# generated by tools/gen_multiplex_synthetic.py: mu={mu} eta={eta} eta_sl={eta_sl} "
                f"noise={args.noise} seed={args.seed}\n")
        f.write("n,probability,stderr\n")
        for n in range(11, 61):
            y = work_zone(p1, eta_sl, n)
            f.write(f"{n},{y * (1.0 + args.noise * rng.standard_normal()):.6e},{args.noise * y:.6e}\n")


if __name__ == "__main__":
    main()
