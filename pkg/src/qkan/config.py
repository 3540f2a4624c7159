"""JSON run configuration: one canonical schema shared by every CLI command.

Schema (all sections optional unless a command needs them):

    {
      "input": [x_1, ..., x_N],
      "layers": [{"in": N, "out": K, "degree": d,
                  "weights": [[[...]]] | "weight_seed": int}, ...],
      "encoder": "exact" | "stateprep" | "real_weights",
      "perturb": {"eps_x": float, "eps_w": float, "seed": int},
      "readout": {"mode": "exact" | "shots", "shots": int, "seed": int,
                  "node": int, "delta": float},
      "train": {"optimizer": ..., "eta": ..., "h": ..., "c": ...,
                "iterations": ..., "seed": ..., "loss_goal": ...,
                "readout": "exact" | "classical",
                "data": {"xs": [[...]], "ys": [[...]]}
                      | {"grid_points_per_axis": int,
                         "target": {"kind": "cheb2_mean", "scale": float}}},
      "seed": int,
      "max_qubits": int
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import QkanError
from .network import LayerSpec, QkanSpec
from .trainer import Dataset, TrainConfig


class ConfigError(QkanError, ValueError):
    """Malformed or inconsistent run configuration (CLI usage error)."""


@dataclass(frozen=True)
class PerturbConfig:
    eps_x: float = 0.0
    eps_w: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class ReadoutConfig:
    mode: str = "exact"
    shots: int = 0
    seed: int = 0
    node: int | None = None
    delta: float | None = None


@dataclass(frozen=True, eq=False)
class RunConfig:
    input: np.ndarray
    spec: QkanSpec
    encoder: str = "exact"
    perturb: PerturbConfig = field(default_factory=PerturbConfig)
    readout: ReadoutConfig = field(default_factory=ReadoutConfig)
    train: TrainConfig | None = None
    dataset: Dataset | None = None
    seed: int = 0
    max_qubits: int | None = None
    raw: dict = field(default_factory=dict)

    def resolved_dict(self) -> dict:
        """Fully resolved config (seeded weights expanded) for report provenance."""
        return {
            "input": self.input.tolist(),
            "layers": [
                {
                    "in": layer.n_in,
                    "out": layer.n_out,
                    "degree": layer.degree,
                    "weights": layer.weights.tolist(),
                }
                for layer in self.spec.layers
            ],
            "encoder": self.encoder,
            "perturb": {
                "eps_x": self.perturb.eps_x,
                "eps_w": self.perturb.eps_w,
                "seed": self.perturb.seed,
            },
            "readout": {
                "mode": self.readout.mode,
                "shots": self.readout.shots,
                "seed": self.readout.seed,
                "node": self.readout.node,
                "delta": self.readout.delta,
            },
            "train": self.raw.get("train"),
            "seed": self.seed,
            "max_qubits": self.max_qubits,
        }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _layer_from_dict(entry: dict, seed: int, index: int) -> LayerSpec:
    _require(isinstance(entry, dict), f"layer {index} must be an object")
    for key in ("in", "out", "degree"):
        _require(key in entry, f"layer {index} is missing {key!r}")
    n_in, n_out, degree = int(entry["in"]), int(entry["out"]), int(entry["degree"])
    _require(degree >= 0, f"layer {index} has negative degree")
    if "weights" in entry:
        weights = np.asarray(entry["weights"], dtype=np.float64)
        _require(
            weights.shape == (degree + 1, n_in, n_out),
            f"layer {index} weights shape {weights.shape} != ({degree + 1}, {n_in}, {n_out})",
        )
        return LayerSpec(weights)
    weight_seed = int(entry.get("weight_seed", seed + index))
    return LayerSpec.random(n_in, n_out, degree, seed=weight_seed)


def _train_from_dict(section: dict, default_seed: int) -> tuple[TrainConfig, Dataset]:
    data_section = section.get("data")
    _require(isinstance(data_section, dict), "train.data section is required")
    if "xs" in data_section:
        dataset = Dataset(np.asarray(data_section["xs"]), np.asarray(data_section["ys"]))
    else:
        target = data_section.get("target", {})
        kind = target.get("kind", "cheb2_mean")
        _require(kind == "cheb2_mean", f"unknown training target {kind!r}")
        scale = float(target.get("scale", 0.25))
        points = int(data_section.get("grid_points_per_axis", 8))
        n_in = int(data_section.get("n_in", 2))

        def fn(x):
            return np.array([scale * np.mean(np.cos(2 * np.arccos(x)))])

        dataset = Dataset.from_function(fn, n_in, points)
    config = TrainConfig(
        optimizer=section.get("optimizer", "finite_difference"),
        eta=float(section.get("eta", 25.0)),
        h=float(section.get("h", 1e-4)),
        c=float(section.get("c", 0.1)),
        iterations=int(section.get("iterations", 200)),
        seed=int(section.get("seed", default_seed)),
        readout=section.get("readout", "exact"),
        shots=int(section.get("shots", 0)),
        loss_goal=section.get("loss_goal"),
    )
    return config, dataset


def parse_config(raw: dict, seed_override: int | None = None) -> RunConfig:
    _require(isinstance(raw, dict), "config root must be a JSON object")
    seed = int(seed_override if seed_override is not None else raw.get("seed", 0))
    _require("input" in raw, "config is missing the input vector")
    x = np.asarray(raw["input"], dtype=np.float64)
    _require(x.ndim == 1 and x.size >= 1, "input must be a non-empty vector")
    _require("layers" in raw and raw["layers"], "config needs at least one layer")
    layers = tuple(
        _layer_from_dict(entry, seed, i) for i, entry in enumerate(raw["layers"])
    )
    try:
        spec = QkanSpec(layers)
    except QkanError as exc:
        raise ConfigError(str(exc)) from exc
    _require(
        spec.dims[0] == x.size,
        f"input length {x.size} does not match first layer in = {spec.dims[0]}",
    )
    encoder = raw.get("encoder", "exact")
    _require(
        encoder in ("exact", "stateprep", "real_weights"),
        f"unknown encoder {encoder!r}",
    )
    perturb_raw = raw.get("perturb", {})
    perturb = PerturbConfig(
        eps_x=float(perturb_raw.get("eps_x", 0.0)),
        eps_w=float(perturb_raw.get("eps_w", 0.0)),
        seed=int(perturb_raw.get("seed", seed)),
    )
    readout_raw = raw.get("readout", {})
    readout = ReadoutConfig(
        mode=readout_raw.get("mode", "exact"),
        shots=int(readout_raw.get("shots", 0)),
        seed=int(readout_raw.get("seed", seed)),
        node=readout_raw.get("node"),
        delta=readout_raw.get("delta"),
    )
    _require(readout.mode in ("exact", "shots"), f"unknown readout mode {readout.mode!r}")
    train_config = None
    dataset = None
    if "train" in raw:
        try:
            train_config, dataset = _train_from_dict(raw["train"], seed)
        except QkanError as exc:
            raise ConfigError(str(exc)) from exc
    max_qubits = raw.get("max_qubits")
    return RunConfig(
        input=x,
        spec=spec,
        encoder=encoder,
        perturb=perturb,
        readout=readout,
        train=train_config,
        dataset=dataset,
        seed=seed,
        max_qubits=None if max_qubits is None else int(max_qubits),
        raw=raw,
    )


def load_config(path: str | Path, seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    try:
        return parse_config(raw, seed_override)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
