#!/usr/bin/env python3
"""Post-selected state preparation under injected encoding noise.

Sweeps the input-encoding error eps_x, builds the layer from the perturbed
encoding, post-selects, and compares the measured l2 error against the
admissible threshold eps_x <= N^2 eps^2 / (144 K d^2).
"""

import argparse

import numpy as np

import qkan


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--degree", type=int, default=2)
    parser.add_argument("--eps", type=float, default=0.1, help="target state error")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    spec = qkan.LayerSpec.random(2, 2, args.degree, seed=args.seed + 1)
    x = rng.uniform(-1, 1, 2)
    oracle = qkan.classical_layer_eval(x, spec)
    norm_const = float(np.linalg.norm(oracle))
    thr_x, thr_w = qkan.stateprep_thresholds(args.eps, spec.degree, spec.n_out, norm_const)
    print(f"N = {norm_const:.4f}, thresholds: eps_x <= {thr_x:.3e}, eps_w <= {thr_w:.3e}")

    print(f"{'eps_x':>10} {'within':>7} {'p':>8} {'l2 err':>10}")
    for eps_x in (0.0, thr_x / 10, thr_x, thr_x * 100):
        be = qkan.encode_diagonal_exact(x)
        if eps_x > 0:
            be = qkan.perturb(be, eps_x, seed=args.seed + 2)
        built = qkan.build_layer(be, spec)
        prepared = qkan.prepare_state_postselect(built, target=oracle)
        admissible = qkan.check_stateprep_bound(
            args.eps, eps_x, 0.0, spec.degree, spec.n_out, norm_const
        )
        print(f"{eps_x:>10.3e} {str(admissible):>7} {prepared.success_prob:>8.4f} "
              f"{prepared.l2_error:>10.3e}")
    print(f"(admissible rows must stay below eps = {args.eps})")


if __name__ == "__main__":
    main()
