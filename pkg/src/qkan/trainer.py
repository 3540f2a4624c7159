"""Numerical-gradient training of the weight tensors against sampled targets.

Parameter-shift rules do not apply to the nonlinear activations, so gradients
come from central finite differences or SPSA. Training evaluates the model
through the simulator readout by default; the classical evaluator is exposed
as a readout mode for cross-checks (the two agree to 1e-9 by construction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_encoding import extract_diagonal
from .encoders import encode_diagonal_exact
from .errors import ContractViolationError, DivergenceError, DomainError
from .network import (
    LayerAssembler,
    QkanSpec,
    build_layer,
    classical_network_eval,
)

DIVERGENCE_FACTOR = 10.0
DIVERGENCE_STREAK = 50


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "finite_difference"  # or "spsa"
    eta: float = 25.0
    h: float = 1e-4
    c: float = 0.1
    iterations: int = 200
    seed: int = 0
    readout: str = "exact"  # "exact" | "classical" | "shots"
    shots: int = 0
    loss_goal: float | None = None
    plateau_window: int = 25
    plateau_rtol: float = 1e-7

    def __post_init__(self):
        if self.h <= 0 or self.c <= 0:
            raise DomainError("finite-difference and SPSA steps must be positive")
        if self.iterations < 0:
            raise DomainError("iteration count must be non-negative")
        if self.optimizer not in ("finite_difference", "spsa"):
            raise DomainError(f"unknown optimizer {self.optimizer!r}")
        if self.readout not in ("exact", "classical", "shots"):
            raise DomainError(f"unknown readout mode {self.readout!r}")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Samples (x in [-1,1]^N, y in [-1,1]^K)."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=np.float64))
        ys = np.atleast_2d(np.asarray(self.ys, dtype=np.float64))
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if xs.shape[0] != ys.shape[0]:
            raise ContractViolationError("sample count mismatch between inputs and targets")
        if np.any(np.abs(xs) > 1.0) or np.any(np.abs(ys) > 1.0):
            raise DomainError("dataset entries must lie in [-1, 1]")

    def __len__(self):
        return self.xs.shape[0]

    @classmethod
    def from_function(cls, fn, n_in: int, points_per_axis: int) -> "Dataset":
        """Tensor grid over [-1, 1]^n_in with targets fn(x) per row."""
        axis = np.linspace(-1.0, 1.0, points_per_axis)
        mesh = np.meshgrid(*([axis] * n_in), indexing="ij")
        xs = np.stack([m.ravel() for m in mesh], axis=1)
        ys = np.array([np.atleast_1d(fn(x)) for x in xs], dtype=np.float64)
        return cls(xs, ys)


class SimulatedModel:
    """Network outputs on fixed sample inputs, evaluated through the simulator.

    The first layer's Chebyshev encodings depend only on the inputs, so they
    are cached per sample and reused across weight updates; deeper layers are
    rebuilt because their input encoding changes with the upstream weights.
    """

    def __init__(self, spec: QkanSpec, xs: np.ndarray):
        self.spec = spec
        self.xs = np.asarray(xs, dtype=np.float64)
        self._assemblers = [
            LayerAssembler(
                encode_diagonal_exact(x, name="x"),
                spec.layers[0].n_out,
                spec.layers[0].degree,
                layer_index=0,
            )
            for x in self.xs
        ]

    def outputs(self, spec: QkanSpec) -> np.ndarray:
        out = np.empty((self.xs.shape[0], spec.dims[-1]))
        for i, assembler in enumerate(self._assemblers):
            be = assembler.assemble(spec.layers[0].weights)
            for index, layer in enumerate(spec.layers[1:], start=1):
                be = build_layer(be, layer, layer_index=index)
            out[i] = extract_diagonal(be).real
        return out


def model_outputs(
    spec: QkanSpec,
    xs: np.ndarray,
    readout: str = "exact",
    model: SimulatedModel | None = None,
) -> np.ndarray:
    if readout == "classical":
        return np.array([classical_network_eval(x, spec) for x in np.atleast_2d(xs)])
    if readout in ("exact", "shots"):
        if model is None:
            model = SimulatedModel(spec, xs)
        return model.outputs(spec)
    raise DomainError(f"unknown readout mode {readout!r}")


def loss(
    spec: QkanSpec,
    data: Dataset,
    readout: str = "exact",
    model: SimulatedModel | None = None,
    shots: int = 0,
    seed: int | None = None,
) -> float:
    """Mean squared error between model outputs and targets."""
    preds = model_outputs(spec, data.xs, readout=readout, model=model)
    if readout == "shots":
        if shots <= 0:
            raise DomainError("shots readout needs a positive shot count")
        rng = np.random.default_rng(seed)
        p_zero = np.clip((preds + 1.0) / 2.0, 0.0, 1.0)
        preds = 2.0 * rng.binomial(shots, p_zero) / shots - 1.0
    return float(np.mean((preds - data.ys) ** 2))


def _loss_with_weights(
    spec: QkanSpec,
    data: Dataset,
    layer: int,
    weights: np.ndarray,
    readout: str,
    model: SimulatedModel | None,
) -> float:
    return loss(spec.with_layer_weights(layer, weights), data, readout=readout, model=model)


def finite_diff_grad(
    spec: QkanSpec,
    data: Dataset,
    h: float,
    readout: str = "exact",
    model: SimulatedModel | None = None,
) -> list[np.ndarray]:
    """Central differences per weight; one-sided at the [-1, 1] boundary."""
    if model is None and readout != "classical":
        model = SimulatedModel(spec, data.xs)
    base: float | None = None
    grads = []
    for layer_index, layer in enumerate(spec.layers):
        grad = np.zeros_like(layer.weights)
        flat = layer.weights.reshape(-1)
        for i in range(flat.size):
            w = flat[i]
            up = min(w + h, 1.0)
            down = max(w - h, -1.0)
            if up > w and down < w:
                plus = flat.copy()
                plus[i] = up
                minus = flat.copy()
                minus[i] = down
                val = (
                    _loss_with_weights(spec, data, layer_index, plus.reshape(layer.weights.shape), readout, model)
                    - _loss_with_weights(spec, data, layer_index, minus.reshape(layer.weights.shape), readout, model)
                ) / (up - down)
            else:
                if base is None:
                    base = loss(spec, data, readout=readout, model=model)
                other = flat.copy()
                other[i] = down if up == w else up
                side = _loss_with_weights(
                    spec, data, layer_index, other.reshape(layer.weights.shape), readout, model
                )
                val = (base - side) / (w - other[i])
            grad.reshape(-1)[i] = val
        grads.append(grad)
    return grads


def spsa_step(
    spec: QkanSpec,
    data: Dataset,
    iteration: int,
    seed: int,
    eta: float = 0.1,
    c: float = 0.1,
    readout: str = "exact",
    model: SimulatedModel | None = None,
) -> QkanSpec:
    """One Rademacher-perturbation SPSA update with the standard gain schedules
    a_k = eta/(k+1)^0.602 and c_k = c/(k+1)^0.101; weights clamp to [-1, 1]."""
    if model is None and readout != "classical":
        model = SimulatedModel(spec, data.xs)
    rng = np.random.default_rng([seed, iteration])
    a_k = eta / (iteration + 1) ** 0.602
    c_k = c / (iteration + 1) ** 0.101
    deltas = [rng.integers(0, 2, size=layer.weights.shape) * 2.0 - 1.0 for layer in spec.layers]
    plus = spec
    minus = spec
    for index, delta in enumerate(deltas):
        plus = plus.with_layer_weights(index, np.clip(spec.layers[index].weights + c_k * delta, -1, 1))
        minus = minus.with_layer_weights(index, np.clip(spec.layers[index].weights - c_k * delta, -1, 1))
    diff = (loss(plus, data, readout=readout, model=model)
            - loss(minus, data, readout=readout, model=model)) / (2.0 * c_k)
    out = spec
    for index, delta in enumerate(deltas):
        updated = np.clip(spec.layers[index].weights - a_k * diff * delta, -1.0, 1.0)
        out = out.with_layer_weights(index, updated)
    return out


@dataclass(frozen=True, eq=False)
class TrainResult:
    spec: QkanSpec
    losses: tuple[float, ...]
    stop_reason: str  # "iterations" | "loss_goal" | "plateau"

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def train(spec: QkanSpec, data: Dataset, config: TrainConfig) -> TrainResult:
    """Iterate the chosen optimizer; deterministic given the config seed.

    Raises :class:`DivergenceError` when the loss exceeds 10x the initial
    value for 50 consecutive iterations.
    """
    model = None if config.readout == "classical" else SimulatedModel(spec, data.xs)
    current = spec
    losses = [loss(current, data, readout=config.readout, model=model)]
    initial = losses[0]
    streak = 0
    stop_reason = "iterations"
    for iteration in range(config.iterations):
        if config.loss_goal is not None and losses[-1] < config.loss_goal:
            stop_reason = "loss_goal"
            break
        window = config.plateau_window
        if window and len(losses) > window:
            recent = losses[-window - 1:]
            scale = max(abs(recent[-1]), 1e-30)
            if max(recent) - min(recent) <= config.plateau_rtol * scale:
                stop_reason = "plateau"
                break
        if config.optimizer == "finite_difference":
            grads = finite_diff_grad(current, data, config.h, readout=config.readout, model=model)
            for index, grad in enumerate(grads):
                updated = np.clip(
                    current.layers[index].weights - config.eta * grad, -1.0, 1.0
                )
                current = current.with_layer_weights(index, updated)
        else:
            current = spsa_step(
                current, data, iteration, config.seed,
                eta=config.eta, c=config.c, readout=config.readout, model=model,
            )
        losses.append(loss(current, data, readout=config.readout, model=model))
        if losses[-1] > DIVERGENCE_FACTOR * max(initial, 1e-30):
            streak += 1
            if streak >= DIVERGENCE_STREAK:
                raise DivergenceError(
                    f"loss {losses[-1]:.3e} stayed above 10x the initial value for "
                    f"{DIVERGENCE_STREAK} iterations"
                )
        else:
            streak = 0
    else:
        stop_reason = "iterations"
    if config.loss_goal is not None and losses[-1] < config.loss_goal:
        stop_reason = "loss_goal"
    return TrainResult(current, tuple(losses), stop_reason)
