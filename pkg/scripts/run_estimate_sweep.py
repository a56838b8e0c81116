#!/usr/bin/env python3
"""Truncation sweeps of the bilinear and multiplier estimate constants.

Covers the admissible exponent triples used by the local theory plus the
one-derivative-gain mode, with both the near-critical Gaussian sampler and
the near-resonant adversarial pairs.
"""

import argparse
import os

from bbmlab.estimates import estimate_constant
from bbmlab.io import write_estimate_csv

TRIPLES = ((0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (0.5, 0.5, 0.45))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="runs/estimate_sweep")
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    for sampler in ("gaussian", "adversarial"):
        for s, r, rp in TRIPLES:
            rep = estimate_constant(
                s, r, rp, args.samples, sampler=sampler, seed=args.seed
            )
            tag = f"{sampler}_s{s}_r{r}_rp{rp}".replace(".", "p")
            write_estimate_csv(os.path.join(args.outdir, f"{tag}.csv"), rep)
            sweep = {n: round(sample.ratio, 5) for n, sample in rep.sweep.items()}
            print(f"{sampler} ({s}, {r}, {rp}): {sweep} bounded={rep.bounded}")

    rep = estimate_constant(
        0.0, 1.0, 0.0, args.samples, mode="multiplier", seed=args.seed
    )
    write_estimate_csv(os.path.join(args.outdir, "multiplier_r1_s0.csv"), rep)
    print(f"multiplier (r=1, s=0): max {rep.max_ratio:.5f} bounded={rep.bounded}")


if __name__ == "__main__":
    main()
