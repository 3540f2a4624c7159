"""CHEB-QKAN layers: spec types, the five-step builder, recursive network
composition, and the exact classical reference evaluator.

A layer maps a diagonal encoding of x in [-1,1]^N to a diagonal encoding of
Phi(x) in [-1,1]^K with

    Phi(x)_q = (1/N) sum_p phi_pq(x_p),
    phi_pq(x) = (1/(d+1)) sum_r w_pq^(r) T_r(x),

via DILATE (append k output qubits), CHEB (degree-r transforms), MUL
(weight products), LCU (equal-weight combination over degrees), and SUM
(Hadamard conjugation absorbing the n input qubits into the ancillas).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .block_encoding import (
    BlockEncoding,
    _aux_regs,
    _derived,
    _sys_regs,
    dilate,
    lcu,
    product,
    uniform_pair,
)
from .chebyshev import chebyshev_be
from .encoders import encode_diagonal_exact
from .errors import ContractViolationError, DomainError
from .operators import Embedded, check_qubit_budget, compose, hadamard_layer

WeightEncoder = Callable[[np.ndarray, str], BlockEncoding]


def _log2_pow2(value: int, what: str) -> int:
    n = max(0, value.bit_length() - 1)
    if value != 1 << n:
        raise ContractViolationError(f"{what} must be a power of two, got {value}")
    return n


@dataclass(frozen=True, eq=False)
class LayerSpec:
    """One layer: weight tensor w[r][p][q] with r in 0..d, p in 1..N, q in 1..K."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 3:
            raise ContractViolationError(f"weights must have shape (d+1, N, K), got {w.shape}")
        object.__setattr__(self, "weights", w)
        _log2_pow2(w.shape[1], "input node count")
        _log2_pow2(w.shape[2], "output node count")
        if np.any(np.abs(w) > 1.0):
            raise DomainError(f"weights outside [-1, 1]: max |w| = {np.max(np.abs(w))}")

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[2]

    @property
    def degree(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def n_qubits_in(self) -> int:
        return _log2_pow2(self.n_in, "input node count")

    @property
    def n_qubits_out(self) -> int:
        return _log2_pow2(self.n_out, "output node count")

    def flat_weights(self, r: int) -> np.ndarray:
        """Degree-r weights as a length-NK vector, index p*K + q."""
        return self.weights[r].reshape(-1)

    def with_weights(self, weights: np.ndarray) -> "LayerSpec":
        return LayerSpec(weights)

    @classmethod
    def random(cls, n_in: int, n_out: int, degree: int, seed: int, scale: float = 1.0) -> "LayerSpec":
        rng = np.random.default_rng(seed)
        w = rng.uniform(-scale, scale, size=(degree + 1, n_in, n_out))
        return cls(w)


@dataclass(frozen=True, eq=False)
class QkanSpec:
    """Ordered layers with chained dimensions N^(0) -> N^(1) -> ... -> N^(L)."""

    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise ContractViolationError("a network needs at least one layer")
        for left, right in zip(layers, layers[1:]):
            if left.n_out != right.n_in:
                raise ContractViolationError(
                    f"dimension chain broken: layer output {left.n_out} != next input {right.n_in}"
                )

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.layers[0].n_in,) + tuple(layer.n_out for layer in self.layers)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(layer.degree for layer in self.layers)

    def with_layer_weights(self, index: int, weights: np.ndarray) -> "QkanSpec":
        layers = list(self.layers)
        layers[index] = layers[index].with_weights(weights)
        return QkanSpec(tuple(layers))


def chebyshev_basis(x: np.ndarray, degree: int) -> np.ndarray:
    """T_r(x_p) for r = 0..degree via the three-term recurrence, shape (d+1, N)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((degree + 1,) + x.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = x
    for r in range(2, degree + 1):
        out[r] = 2.0 * x * out[r - 1] - out[r - 2]
    return out


def classical_layer_eval(x: np.ndarray, spec: LayerSpec) -> np.ndarray:
    """Exact double-precision Phi(x); the ground-truth oracle for the simulator."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.n_in,):
        raise ContractViolationError(f"input shape {x.shape} does not match N = {spec.n_in}")
    if np.any(np.abs(x) > 1.0):
        raise DomainError(f"input outside [-1, 1]: max |x| = {np.max(np.abs(x))}")
    basis = chebyshev_basis(x, spec.degree)  # (d+1, N)
    return np.einsum("rp,rpq->q", basis, spec.weights) / (spec.n_in * (spec.degree + 1))


def classical_network_eval(x: np.ndarray, spec: QkanSpec) -> np.ndarray:
    value = np.asarray(x, dtype=np.float64)
    for layer in spec.layers:
        value = classical_layer_eval(value, layer)
    return value


def sum_over_inputs(be: BlockEncoding, n_inputs: int) -> BlockEncoding:
    """SUM step: conjugate by Hadamards on the leading n input qubits and absorb
    them into the ancilla block, leaving the k output qubits as the system."""
    if n_inputs > be.num_system:
        raise ContractViolationError(
            f"cannot absorb {n_inputs} qubits from a {be.num_system}-qubit system"
        )
    sys_regs = _sys_regs(be)
    absorbed: list[tuple[str, int]] = []
    running = 0
    while running < n_inputs:
        if not sys_regs:
            break
        name, size = sys_regs.pop(0)
        absorbed.append((name, size))
        running += size
    if running != n_inputs:
        raise ContractViolationError("input qubits do not align with register boundaries")
    if n_inputs == 0:
        return be
    axes = tuple(range(be.num_aux, be.num_aux + n_inputs))
    h_layer = Embedded(hadamard_layer(n_inputs), axes, be.op.n)
    return _derived(
        compose(h_layer, be.op, h_layer),
        be.alpha, be.epsilon,
        _aux_regs(be) + absorbed, sys_regs,
        be.diagonal_flag, [(be, 1)],
    )


class LayerAssembler:
    """Builds a layer for a fixed input encoding, reusing the input-dependent
    Chebyshev encodings across weight updates (they are weight-independent)."""

    def __init__(
        self,
        be_x: BlockEncoding,
        n_out: int,
        degree: int,
        layer_index: int = 0,
        weight_encoder: WeightEncoder | None = None,
    ):
        self.layer_index = layer_index
        self.degree = degree
        self.n_in = 1 << be_x.num_system
        self.n_out = n_out
        self.k = _log2_pow2(n_out, "output node count")
        self.n = be_x.num_system
        self.weight_encoder: WeightEncoder = weight_encoder or (
            lambda vec, name: encode_diagonal_exact(vec, name=name)
        )
        selector = degree.bit_length()  # ceil(log2(d+1))
        # total after SUM: selector + a_w + (a_x + 1) + n + k; probe a_w cheaply
        probe = self.weight_encoder(np.zeros(self.n_in * n_out), "probe")
        check_qubit_budget(
            selector + probe.num_aux + be_x.num_aux + 1 + self.n + self.k,
            "CHEB-QKAN layer",
        )
        self.dilated = dilate(be_x, self.k)
        self.cheb = [chebyshev_be(self.dilated, r) for r in range(degree + 1)]
        self.pair = uniform_pair(degree + 1)

    def assemble(self, weights: np.ndarray) -> BlockEncoding:
        """MUL + LCU + SUM for the given weight tensor (d+1, N, K)."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (self.degree + 1, self.n_in, self.n_out):
            raise ContractViolationError(
                f"weight shape {weights.shape} does not match "
                f"({self.degree + 1}, {self.n_in}, {self.n_out})"
            )
        terms = []
        for r in range(self.degree + 1):
            w_be = self.weight_encoder(
                weights[r].reshape(-1), f"w{self.layer_index}[{r}]"
            )
            if w_be.num_system != self.n + self.k:
                raise ContractViolationError(
                    f"weight encoding spans {w_be.num_system} qubits, expected {self.n + self.k}"
                )
            terms.append(product(self.cheb[r], w_be))
        combined = lcu(terms, self.pair)
        return sum_over_inputs(combined, self.n)


def build_layer(
    be_x: BlockEncoding,
    spec: LayerSpec,
    layer_index: int = 0,
    weight_encoder: WeightEncoder | None = None,
) -> BlockEncoding:
    """Diagonal (1, a_x + 1 + a_w + log2(d+1) + n, 4 d sqrt(eps_x) + eps_w)-
    encoding of Phi(x), charging d(d+1)/2 input and d+1 weight queries."""
    if be_x.num_system != spec.n_qubits_in:
        raise ContractViolationError(
            f"input encoding spans {be_x.num_system} qubits but the layer expects "
            f"{spec.n_qubits_in}"
        )
    assembler = LayerAssembler(be_x, spec.n_out, spec.degree, layer_index, weight_encoder)
    return assembler.assemble(spec.weights)


@dataclass(frozen=True, eq=False)
class NetworkBuild:
    """Per-layer output encodings of a recursive build; `output` is the last."""

    layer_outputs: tuple[BlockEncoding, ...]

    @property
    def output(self) -> BlockEncoding:
        return self.layer_outputs[-1]


def build_network(
    be_x0: BlockEncoding,
    spec: QkanSpec,
    weight_encoder: WeightEncoder | None = None,
) -> NetworkBuild:
    """Recursive composition: each layer's output encoding is the input
    primitive of the next, so query costs multiply layer over layer."""
    outputs: list[BlockEncoding] = []
    be = be_x0
    for index, layer in enumerate(spec.layers):
        be = build_layer(be, layer, layer_index=index, weight_encoder=weight_encoder)
        outputs.append(be)
    return NetworkBuild(tuple(outputs))
