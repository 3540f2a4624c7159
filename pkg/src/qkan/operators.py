"""Lazily composed linear operators on qubit spaces.

Operators are immutable trees of structured factors applied matrix-free to
statevectors; dense materialization is reserved for testing at small
dimensions. ``apply`` accepts a vector of shape ``(dim,)`` or a batch of
columns ``(dim, b)`` and acts on axis 0. Qubit positions are counted from
the most significant end, matching :class:`~qkan.registers.RegisterLayout`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolationError, ResourceLimitError

DEFAULT_MAX_QUBITS = 22
DENSE_CAP_QUBITS = 10

_max_qubits = DEFAULT_MAX_QUBITS


def max_qubits() -> int:
    return _max_qubits


def set_max_qubits(n: int) -> None:
    """Set the global construction budget (total qubits of any single operator)."""
    global _max_qubits
    if n < 1:
        raise ContractViolationError("qubit budget must be positive")
    _max_qubits = n


def check_qubit_budget(n: int, what: str = "operator") -> None:
    if n > _max_qubits:
        raise ResourceLimitError(
            f"{what} needs {n} qubits, exceeding the budget of {_max_qubits}",
            required_qubits=n,
        )


def _as_columns(vec: np.ndarray, dim: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.shape == (dim,):
        return arr[:, None], True
    if arr.ndim == 2 and arr.shape[0] == dim:
        return arr, False
    raise ContractViolationError(f"vector shape {arr.shape} incompatible with dim {dim}")


class LinearOperator:
    """Base class; subclasses implement `_apply` on a (dim, batch) array."""

    n: int  # qubit count

    @property
    def dim(self) -> int:
        return 1 << self.n

    def _apply(self, cols: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, vec: np.ndarray) -> np.ndarray:
        cols, squeeze = _as_columns(vec, self.dim)
        out = self._apply(cols)
        return out[:, 0] if squeeze else out

    def adjoint(self) -> "LinearOperator":
        raise NotImplementedError

    def dense(self, cap_qubits: int = DENSE_CAP_QUBITS) -> np.ndarray:
        if self.n > cap_qubits:
            raise ResourceLimitError(
                f"dense materialization of {self.n} qubits exceeds cap {cap_qubits}",
                required_qubits=self.n,
            )
        return self._apply(np.eye(self.dim, dtype=np.complex128))

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        return compose(self, other)


@dataclass(frozen=True, eq=False)
class Identity(LinearOperator):
    n: int

    def _apply(self, cols):
        return cols

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class Dense(LinearOperator):
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ContractViolationError(f"dense operator must be square, got {mat.shape}")
        n = int(mat.shape[0]).bit_length() - 1
        if 1 << n != mat.shape[0]:
            raise ContractViolationError(f"dense dimension {mat.shape[0]} is not a power of two")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n", n)

    def _apply(self, cols):
        return self.matrix @ cols

    def adjoint(self):
        return Dense(self.matrix.conj().T)


@dataclass(frozen=True, eq=False)
class Diagonal(LinearOperator):
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        n = int(vals.shape[0]).bit_length() - 1
        if vals.ndim != 1 or 1 << n != vals.shape[0]:
            raise ContractViolationError(f"diagonal length {vals.shape} is not a power of two")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", n)

    def _apply(self, cols):
        return self.values[:, None] * cols

    def adjoint(self):
        return Diagonal(self.values.conj())


@dataclass(frozen=True, eq=False)
class Permutation(LinearOperator):
    """Basis permutation: maps |i> to |perm[i]>."""

    perm: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        n = int(perm.shape[0]).bit_length() - 1
        if perm.ndim != 1 or 1 << n != perm.shape[0]:
            raise ContractViolationError("permutation length must be a power of two")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "n", n)

    def _apply(self, cols):
        out = np.empty_like(cols)
        out[self.perm] = cols
        return out

    def adjoint(self):
        inverse = np.empty_like(self.perm)
        inverse[self.perm] = np.arange(self.perm.shape[0])
        return Permutation(inverse)


@dataclass(frozen=True, eq=False)
class Composed(LinearOperator):
    """Matrix product: factors[0] @ factors[1] @ ... (rightmost applied first)."""

    factors: tuple[LinearOperator, ...]

    def __post_init__(self):
        if not self.factors:
            raise ContractViolationError("composition needs at least one factor")
        n = self.factors[0].n
        for op in self.factors:
            if op.n != n:
                raise ContractViolationError(
                    f"composition dimension mismatch: {op.n} qubits vs {n}"
                )
        object.__setattr__(self, "n", n)

    def _apply(self, cols):
        for op in reversed(self.factors):
            cols = op._apply(cols)
        return cols

    def adjoint(self):
        return Composed(tuple(op.adjoint() for op in reversed(self.factors)))


@dataclass(frozen=True, eq=False)
class Embedded(LinearOperator):
    """Apply `inner` on the listed qubit axes of an `n`-qubit space.

    The order of `axes` fixes which axis plays which role for `inner`
    (axes[0] is inner's most significant qubit); axes need not be contiguous.
    """

    inner: LinearOperator
    axes: tuple[int, ...]
    n: int

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if len(set(axes)) != len(axes):
            raise ContractViolationError(f"repeated axes {axes}")
        if self.inner.n != len(axes):
            raise ContractViolationError(
                f"inner acts on {self.inner.n} qubits but {len(axes)} axes were given"
            )
        if any(a < 0 or a >= self.n for a in axes):
            raise ContractViolationError(f"axes {axes} out of range for {self.n} qubits")
        check_qubit_budget(self.n)

    def _apply(self, cols):
        if not self.axes:
            return cols
        k = len(self.axes)
        batch = cols.shape[1]
        tensor = cols.reshape((2,) * self.n + (batch,))
        tensor = np.moveaxis(tensor, self.axes, range(k))
        trailing = tensor.shape[k:]
        tensor = self.inner._apply(tensor.reshape(1 << k, -1)).reshape((2,) * k + trailing)
        tensor = np.moveaxis(tensor, range(k), self.axes)
        return tensor.reshape(1 << self.n, batch)

    def adjoint(self):
        return Embedded(self.inner.adjoint(), self.axes, self.n)


@dataclass(frozen=True, eq=False)
class Multiplexed(LinearOperator):
    """Select operator: applies branches[v] on the non-selector qubits when the
    selector register reads v, identity on selector values without a branch."""

    branches: Mapping[int, LinearOperator]
    selector_axes: tuple[int, ...]
    n: int

    def __post_init__(self):
        axes = tuple(self.selector_axes)
        object.__setattr__(self, "selector_axes", axes)
        object.__setattr__(self, "branches", dict(self.branches))
        rest = self.n - len(axes)
        for value, op in self.branches.items():
            if not 0 <= value < (1 << len(axes)):
                raise ContractViolationError(f"selector value {value} out of range")
            if op.n != rest:
                raise ContractViolationError(
                    f"branch for value {value} acts on {op.n} qubits, expected {rest}"
                )
        check_qubit_budget(self.n)

    def _apply(self, cols):
        b = len(self.selector_axes)
        if b == 0:
            op = self.branches.get(0)
            return op._apply(cols) if op is not None else cols
        batch = cols.shape[1]
        tensor = cols.reshape((2,) * self.n + (batch,))
        tensor = np.moveaxis(tensor, self.selector_axes, range(b))
        tensor = tensor.reshape(1 << b, -1).copy()
        rest_dim = tensor.shape[1] // batch
        for value, op in self.branches.items():
            slab = tensor[value].reshape(rest_dim, batch)
            tensor[value] = op._apply(slab).reshape(-1)
        tensor = tensor.reshape((2,) * self.n + (batch,))
        tensor = np.moveaxis(tensor, range(b), self.selector_axes)
        return tensor.reshape(1 << self.n, batch)

    def adjoint(self):
        return Multiplexed(
            {v: op.adjoint() for v, op in self.branches.items()}, self.selector_axes, self.n
        )


def kron(*ops: LinearOperator) -> LinearOperator:
    """Tensor product, first factor most significant."""
    total = sum(op.n for op in ops)
    check_qubit_budget(total, "tensor product")
    factors = []
    offset = 0
    for op in ops:
        if op.n > 0 and not isinstance(op, Identity):
            factors.append(Embedded(op, tuple(range(offset, offset + op.n)), total))
        offset += op.n
    if not factors:
        return Identity(total)
    if len(factors) == 1:
        return factors[0]
    return Composed(tuple(factors))


def compose(*ops: LinearOperator) -> LinearOperator:
    """Matrix product of equal-dimension operators (rightmost applied first)."""
    if not ops:
        raise ContractViolationError("composition needs at least one factor")
    n = ops[0].n
    for op in ops:
        if op.n != n:
            raise ContractViolationError(f"composition dimension mismatch: {op.n} qubits vs {n}")
    flat: list[LinearOperator] = []
    for op in ops:
        if isinstance(op, Composed):
            flat.extend(op.factors)
        elif not isinstance(op, Identity):
            flat.append(op)
    if not flat:
        return Identity(n)
    if len(flat) == 1:
        return flat[0]
    return Composed(tuple(flat))


def controlled(op: LinearOperator, ctrl_qubits: int = 1, value: int = 1) -> LinearOperator:
    """Prepend a control register (most significant); acts as `op` when the
    control reads `value`, identity elsewhere."""
    if not 0 <= value < (1 << ctrl_qubits):
        raise ContractViolationError(f"control value {value} needs more than {ctrl_qubits} qubits")
    n = op.n + ctrl_qubits
    check_qubit_budget(n, "controlled operator")
    return Multiplexed({value: op}, tuple(range(ctrl_qubits)), n)


def reflection_about_zero(n: int) -> LinearOperator:
    """2|0><0| - I on an n-qubit register."""
    values = -np.ones(1 << n)
    values[0] = 1.0
    return Diagonal(values)


def phase_on_zero(phi: float, n: int) -> LinearOperator:
    """exp(i phi (2|0><0| - I)): phase e^{i phi} on |0..0>, e^{-i phi} elsewhere."""
    values = np.full(1 << n, np.exp(-1j * phi), dtype=np.complex128)
    values[0] = np.exp(1j * phi)
    return Diagonal(values)


def permutation_from_map(n: int, fn) -> Permutation:
    """Permutation |i> -> |fn(i)> from an index map over n qubits."""
    src = np.arange(1 << n)
    perm = np.array([fn(int(i)) for i in src], dtype=np.int64)
    if sorted(perm.tolist()) != src.tolist():
        raise ContractViolationError("index map is not a bijection")
    return Permutation(perm)


def unitarity_defect(op: LinearOperator, cap_qubits: int = DENSE_CAP_QUBITS) -> float:
    """Max-norm deviation of A^dag A from the identity (dense check)."""
    mat = op.dense(cap_qubits)
    gram = mat.conj().T @ mat
    return float(np.max(np.abs(gram - np.eye(op.dim))))


def hadamard_layer(n: int) -> LinearOperator:
    """H^{(x)n}; identity for n = 0."""
    if n == 0:
        return Identity(0)
    h = Dense(np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2))
    return kron(*([h] * n))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Ginibre matrix."""
    dim = 1 << n
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def state_prep_unitary(target: Sequence[complex]) -> Dense:
    """Unitary whose first column is the given unit vector."""
    vec = np.asarray(target, dtype=np.complex128)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ContractViolationError(f"state-prep target has norm {norm}, expected 1")
    dim = vec.shape[0]
    if dim & (dim - 1):
        raise ContractViolationError(f"state-prep dimension {dim} is not a power of two")
    basis = np.eye(dim, dtype=np.complex128)
    # complete vec with identity columns, dropping the one most parallel to vec
    drop = int(np.argmax(np.abs(vec)))
    cols = [vec] + [basis[:, j] for j in range(dim) if j != drop]
    q, r = np.linalg.qr(np.stack(cols, axis=1))
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Dense(q)
