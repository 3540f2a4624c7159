#!/usr/bin/env python3
"""Train a 2-input, 1-output, degree-3 layer on a quadratic Chebyshev target.

The target f(x1, x2) = scale * (T2(x1) + T2(x2)) is exactly realizable by
the model class for scale <= 1/8 (the activation normalization caps each
T_r coefficient at 1/(N(d+1)) = 1/8); larger scales expose the plateau at
the box-constrained optimum.
"""

import argparse
import csv

import numpy as np

import qkan


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=float, default=0.125)
    parser.add_argument("--points", type=int, default=8, help="grid points per axis")
    parser.add_argument("--eta", type=float, default=25.0)
    parser.add_argument("--iterations", type=int, default=200)
    parser.add_argument("--readout", choices=["exact", "classical"], default="exact")
    parser.add_argument("--trace", default=None, help="write the loss trace CSV here")
    args = parser.parse_args()

    def target(x):
        return np.array([args.scale * np.sum(np.cos(2 * np.arccos(x)))])

    data = qkan.Dataset.from_function(target, 2, args.points)
    spec = qkan.QkanSpec((qkan.LayerSpec(np.zeros((4, 2, 1))),))
    config = qkan.TrainConfig(
        eta=args.eta, h=1e-4, iterations=args.iterations,
        readout=args.readout, loss_goal=1e-6,
    )
    result = qkan.train(spec, data, config)

    print(f"target scale {args.scale} on a {args.points}x{args.points} grid")
    print(f"stopped after {len(result.losses) - 1} iterations ({result.stop_reason})")
    print(f"initial loss {result.losses[0]:.3e} -> final {result.final_loss:.3e}")
    print("trained weights w[r][p][0]:")
    print(np.round(result.spec.layers[0].weights[:, :, 0], 6))
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "loss"])
            writer.writerows(enumerate(result.losses))
        print(f"trace written to {args.trace}")


if __name__ == "__main__":
    main()
