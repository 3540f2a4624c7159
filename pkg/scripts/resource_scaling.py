#!/usr/bin/env python3
"""Tabulate exact vs asymptotic query costs and verify them against ledgers.

The exact per-layer recursion is C(l+1) = d(d+1)/2 C(l) + (d+1) C_w; the
asymptotic one uses d^2/2 and d. For every buildable row the instrumented
ledger of an actual construction is reconciled against the exact model.
"""

import argparse

import numpy as np

import qkan
from qkan.resources import analytic_cost, reconcile


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degrees", type=int, nargs="+", default=[1, 2, 3, 5, 7])
    parser.add_argument("--layers", type=int, nargs="+", default=[1, 2])
    parser.add_argument("--build-cap", type=int, default=16,
                        help="skip ledger reconciliation beyond this many qubits")
    args = parser.parse_args()

    print(f"{'L':>2} {'d':>2} {'exact C_x':>12} {'asymptotic':>12} {'ratio':>7} "
          f"{'aux':>4} {'ledger':>8}")
    for n_layers in args.layers:
        for d in args.degrees:
            dims = [2] * n_layers + [1]
            layers = tuple(
                qkan.LayerSpec.random(dims[i], dims[i + 1], d, seed=i)
                for i in range(n_layers)
            )
            spec = qkan.QkanSpec(layers)
            report = analytic_cost(spec)
            exact = report.exact_cost[-1]
            asym = report.asymptotic_cost[-1]
            aux = report.aux_totals[-1]
            status = "skipped"
            if aux <= args.build_cap:
                net = qkan.build_network(
                    qkan.encode_diagonal_exact(np.full(2, 0.3), name="x"), spec
                )
                status = "ok" if reconcile(report, net.output).ok else "MISMATCH"
            print(f"{n_layers:>2} {d:>2} {exact:>12.1f} {asym:>12.1f} "
                  f"{exact / asym:>7.3f} {aux:>4} {status:>8}")


if __name__ == "__main__":
    main()
