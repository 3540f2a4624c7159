"""Analytic cost model and reconciliation against instrumented ledgers.

Two models are kept side by side: the exact model counts d(d+1)/2 input and
d+1 weight applications per layer (what the simulator's ledgers record);
the asymptotic model uses the d^2/2 and d coefficients of the layer-cost
recursion C_x^(l+1) = (d^2/2) C_x^(l) + d C_w^(l). Acceptance is on the
exact model; the asymptotic one is reported for comparison, with per-layer
input ratio exact/asymptotic = (d+1)/d.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .block_encoding import BlockEncoding, QueryLedger
from .network import QkanSpec


def selector_qubits(degree: int) -> int:
    """ceil(log2(d+1)) LCU selector qubits."""
    return degree.bit_length()


@dataclass(frozen=True)
class LayerCost:
    """Per-layer unit counts: applications of the layer's own input encoding
    and of its weight encodings (one per degree, r = 0 included)."""

    degree: int
    input_applications: int
    weight_applications: int
    aux_added: int

    @property
    def input_ratio_exact_over_asymptotic(self) -> float:
        """d(d+1)/2 over d^2/2 = (d+1)/d."""
        if self.degree == 0:
            return float("inf")
        return (self.degree + 1) / self.degree


@dataclass(frozen=True, eq=False)
class CostReport:
    dims: tuple[int, ...]
    degrees: tuple[int, ...]
    per_layer: tuple[LayerCost, ...]
    exact_cost: tuple[float, ...]       # C_x^(0..L), exact recursion
    asymptotic_cost: tuple[float, ...]  # C_x^(0..L), d^2/2 and d coefficients
    aux_totals: tuple[int, ...]         # a_x^(0..L)
    expected_ledger: dict[str, int]     # base-primitive counts of the full build
    input_primitive: str = "x"
    readout: dict[str, float] = field(default_factory=dict)

    def with_readout(self, delta: float, norm_const: float | None = None) -> "CostReport":
        """Analytic query counts for solution extraction at additive error delta:
        1/delta^2 sampling, 1/delta with amplitude estimation, and the
        sqrt(K)/N amplification rounds for post-selected state preparation."""
        final = self.exact_cost[-1]
        section: dict[str, float] = {
            "delta": delta,
            "hadamard_test_sampling": final / delta**2,
            "hadamard_test_amplitude_estimation": final / delta,
        }
        if norm_const is not None and norm_const > 0:
            k_out = self.dims[-1]
            section["state_prep_amplification"] = final * (k_out**0.5) / norm_const
        return CostReport(
            self.dims, self.degrees, self.per_layer, self.exact_cost,
            self.asymptotic_cost, self.aux_totals, self.expected_ledger,
            self.input_primitive, section,
        )


def analytic_cost(
    spec: QkanSpec,
    c_x0: float = 1.0,
    c_w: list[float] | None = None,
    a_x0: int = 1,
    a_w: list[int] | None = None,
    input_primitive: str = "x",
) -> CostReport:
    """Closed-form cost of an L-layer build from per-primitive costs.

    `c_x0` is the cost of one application of the input encoding, `c_w[l]` of
    one layer-l weight encoding; `a_x0`, `a_w[l]` are the ancilla counts.
    """
    degrees = spec.degrees
    length = len(degrees)
    c_w = list(c_w) if c_w is not None else [1.0] * length
    a_w = list(a_w) if a_w is not None else [1] * length
    if len(c_w) != length or len(a_w) != length:
        raise ValueError(f"need one weight cost and ancilla count per layer ({length})")

    per_layer = []
    exact = [float(c_x0)]
    asym = [float(c_x0)]
    aux = [int(a_x0)]
    dims_in = spec.dims[:-1]
    for l, d in enumerate(degrees):
        n_l = (dims_in[l]).bit_length() - 1
        aux_added = 1 + a_w[l] + selector_qubits(d) + n_l
        per_layer.append(
            LayerCost(
                degree=d,
                input_applications=d * (d + 1) // 2,
                weight_applications=d + 1,
                aux_added=aux_added,
            )
        )
        exact.append((d * (d + 1) / 2.0) * exact[-1] + (d + 1) * c_w[l])
        asym.append((d * d / 2.0) * asym[-1] + d * c_w[l])
        aux.append(aux[-1] + aux_added)

    # base-primitive ledger expectation: each layer-l primitive is applied once
    # per inclusion, multiplied by the input applications of every later layer
    expected: dict[str, int] = {}
    multiplier = 1
    for l in reversed(range(length)):
        for r in range(degrees[l] + 1):
            expected[f"w{l}[{r}]"] = multiplier
        multiplier *= degrees[l] * (degrees[l] + 1) // 2
    if multiplier:
        expected[input_primitive] = multiplier
    expected = {k: v for k, v in expected.items() if v}

    return CostReport(
        dims=spec.dims,
        degrees=degrees,
        per_layer=tuple(per_layer),
        exact_cost=tuple(exact),
        asymptotic_cost=tuple(asym),
        aux_totals=tuple(aux),
        expected_ledger=dict(sorted(expected.items())),
        input_primitive=input_primitive,
    )


@dataclass(frozen=True, eq=False)
class ReconcileResult:
    ok: bool
    diffs: dict[str, tuple[int, int]]  # key -> (expected, observed)

    def __bool__(self):
        return self.ok


def reconcile(report: CostReport, ledger: QueryLedger | BlockEncoding) -> ReconcileResult:
    """Exact-model counts must equal the instrumented ledger counts key by key."""
    if isinstance(ledger, BlockEncoding):
        observed = ledger.cost
    else:
        observed = ledger.snapshot()
    diffs: dict[str, tuple[int, int]] = {}
    for key in sorted(set(report.expected_ledger) | set(observed)):
        want = report.expected_ledger.get(key, 0)
        got = observed.get(key, 0)
        if want != got:
            diffs[key] = (want, got)
    return ReconcileResult(not diffs, diffs)
