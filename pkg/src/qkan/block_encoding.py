"""Block-encodings and their combinators.

A block-encoding is a unitary whose top-left block (all ancillas projected
onto |0>) equals a target matrix divided by the subnormalization alpha, up
to spectral error epsilon. Ancilla registers always occupy the most
significant qubits, so the encoded block is literally the top-left corner
of the dense matrix.

Query accounting: every encoding carries a :class:`QueryLedger` holding the
number of applications of each named primitive encoding that one application
of this encoding entails. Combinators charge the ledger of the result while
they assemble it; an application of an encoding, its adjoint, or any
controlled version all count as one query to that encoding.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, ResourceLimitError
from .operators import (
    DENSE_CAP_QUBITS,
    Dense,
    Embedded,
    Identity,
    LinearOperator,
    Multiplexed,
    check_qubit_budget,
    compose,
    hadamard_layer,
    kron,
    permutation_from_map,
    random_unitary,
    state_prep_unitary,
)
from .registers import RegisterLayout


class QueryLedger:
    """Thread-safe monotone counters keyed by primitive-encoding name."""

    def __init__(self, initial: dict[str, int] | None = None):
        self._lock = threading.Lock()
        self._counts: dict[str, int] = dict(initial or {})

    def charge(self, key: str, times: int = 1) -> None:
        if times < 0:
            raise ContractViolationError("ledger counters are monotone")
        with self._lock:
            self._counts[key] = self._counts.get(key, 0) + times

    def charge_map(self, counts: dict[str, int], times: int = 1) -> None:
        for key, value in counts.items():
            self.charge(key, value * times)

    def count(self, key: str) -> int:
        with self._lock:
            return self._counts.get(key, 0)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(sorted(self._counts.items()))

    def total(self, prefix: str = "") -> int:
        with self._lock:
            return sum(v for k, v in self._counts.items() if k.startswith(prefix))

    def __repr__(self):
        return f"QueryLedger({self.snapshot()})"


@dataclass(frozen=True, eq=False)
class BlockEncoding:
    """(alpha, num_aux, epsilon) block-encoding with an explicit register layout.

    The layout lists ancilla registers first; `num_system` trailing qubits form
    the system. `diagonal_flag` marks encodings whose block is promised diagonal
    (within epsilon).
    """

    op: LinearOperator
    alpha: float
    num_aux: int
    epsilon: float
    layout: RegisterLayout
    num_system: int
    diagonal_flag: bool = False
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def __post_init__(self):
        if self.alpha < 0 or self.epsilon < 0:
            raise ContractViolationError("alpha and epsilon must be non-negative")
        if self.op.n != self.layout.n_qubits:
            raise ContractViolationError(
                f"operator acts on {self.op.n} qubits, layout has {self.layout.n_qubits}"
            )
        if self.num_aux + self.num_system != self.op.n:
            raise ContractViolationError(
                f"num_aux {self.num_aux} + num_system {self.num_system} != {self.op.n} qubits"
            )
        # ancilla/system boundary must fall on a register boundary
        running = 0
        boundary_ok = self.num_aux == 0
        for _, size in self.layout.registers:
            running += size
            if running == self.num_aux:
                boundary_ok = True
        if not boundary_ok and self.num_aux != 0:
            raise ContractViolationError("ancilla block does not align with register boundaries")

    @property
    def system_dim(self) -> int:
        return 1 << self.num_system

    @property
    def aux_axes(self) -> tuple[int, ...]:
        return tuple(range(self.num_aux))

    @property
    def system_axes(self) -> tuple[int, ...]:
        return tuple(range(self.num_aux, self.op.n))

    @property
    def cost(self) -> dict[str, int]:
        """Primitive queries consumed by one application of this encoding."""
        return self.ledger.snapshot()


def _unique_regs(groups: list[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    taken: set[str] = set()
    out = []
    for name, size in groups:
        candidate = name
        k = 1
        while candidate in taken:
            k += 1
            candidate = f"{name}.{k}"
        taken.add(candidate)
        out.append((candidate, size))
    return tuple(out)


def _derived(
    op: LinearOperator,
    alpha: float,
    epsilon: float,
    aux_regs: list[tuple[str, int]],
    sys_regs: list[tuple[str, int]],
    diagonal: bool,
    includes: list[tuple[BlockEncoding, int]],
) -> BlockEncoding:
    layout = RegisterLayout(_unique_regs(list(aux_regs) + list(sys_regs)))
    ledger = QueryLedger()
    for be, times in includes:
        ledger.charge_map(be.ledger.snapshot(), times)
    num_aux = sum(size for _, size in aux_regs)
    return BlockEncoding(
        op=op,
        alpha=alpha,
        num_aux=num_aux,
        epsilon=epsilon,
        layout=layout,
        num_system=layout.n_qubits - num_aux,
        diagonal_flag=diagonal,
        ledger=ledger,
    )


def primitive_encoding(
    op: LinearOperator,
    num_aux: int,
    layout: RegisterLayout,
    name: str,
    epsilon: float = 0.0,
    diagonal: bool = False,
    queries_per_application: int = 1,
) -> BlockEncoding:
    """Wrap a unitary as a named primitive (1, num_aux, epsilon)-encoding."""
    return BlockEncoding(
        op=op,
        alpha=1.0,
        num_aux=num_aux,
        epsilon=epsilon,
        layout=layout,
        num_system=layout.n_qubits - num_aux,
        diagonal_flag=diagonal,
        ledger=QueryLedger({name: queries_per_application} if queries_per_application else {}),
    )


def identity_encoding(num_system: int, num_aux: int = 0) -> BlockEncoding:
    """Exact zero-cost encoding of the identity, with optional idle ancillas."""
    aux_regs = [("idle", num_aux)] if num_aux else []
    return _derived(
        Identity(num_aux + num_system), 1.0, 0.0,
        aux_regs, [("sys", num_system)], diagonal=True, includes=[],
    )


def extract_block(be: BlockEncoding, cap_qubits: int = DENSE_CAP_QUBITS) -> np.ndarray:
    """alpha * (<0|_aux (x) I) U (|0>_aux (x) I), as a dense system-dim matrix."""
    if be.num_system > cap_qubits:
        raise ResourceLimitError(
            f"dense block extraction over {be.num_system} system qubits exceeds cap {cap_qubits}",
            required_qubits=be.num_system,
        )
    s_dim = be.system_dim
    cols = np.zeros((be.op.dim, s_dim), dtype=np.complex128)
    cols[np.arange(s_dim), np.arange(s_dim)] = 1.0  # |0>_aux|j> has index j
    out = be.op.apply(cols)
    return be.alpha * out[:s_dim, :s_dim]


def extract_diagonal(be: BlockEncoding) -> np.ndarray:
    """Entries <0|_aux <j| U |0>_aux |j>, one operator application per entry."""
    if not be.diagonal_flag:
        raise ContractViolationError("extract_diagonal requires a diagonal-flagged encoding")
    s_dim = be.system_dim
    chunk = max(1, (1 << 26) // be.op.dim)
    values = np.empty(s_dim, dtype=np.complex128)
    for start in range(0, s_dim, chunk):
        idx = np.arange(start, min(start + chunk, s_dim))
        cols = np.zeros((be.op.dim, idx.size), dtype=np.complex128)
        cols[idx, np.arange(idx.size)] = 1.0
        out = be.op.apply(cols)
        values[idx] = out[idx, np.arange(idx.size)]
    return be.alpha * values


def verify(be: BlockEncoding, target: np.ndarray, cap_qubits: int = DENSE_CAP_QUBITS) -> float:
    """Distance between the encoded block and `target`: spectral norm in general,
    max-abs entry difference for diagonal-flagged encodings (equal for diagonals)."""
    block = extract_block(be, cap_qubits)
    diff = block - np.asarray(target, dtype=np.complex128)
    if be.diagonal_flag:
        return float(np.max(np.abs(diff)))
    return float(np.linalg.norm(diff, 2))


def pad_aux(be: BlockEncoding, extra: int) -> BlockEncoding:
    """Prepend idle ancilla qubits; the encoded block is unchanged."""
    if extra == 0:
        return be
    n = be.op.n + extra
    check_qubit_budget(n, "padded encoding")
    op = Embedded(be.op, tuple(range(extra, n)), n)
    return _derived(
        op, be.alpha, be.epsilon,
        [("pad", extra)] + list(be.layout.registers[: _aux_reg_count(be)]),
        list(be.layout.registers[_aux_reg_count(be):]),
        be.diagonal_flag, [(be, 1)],
    )


def _aux_reg_count(be: BlockEncoding) -> int:
    running = 0
    for i, (_, size) in enumerate(be.layout.registers):
        if running == be.num_aux:
            return i
        running += size
    if running == be.num_aux:
        return len(be.layout.registers)
    raise ContractViolationError("ancilla block does not align with register boundaries")


def _aux_regs(be: BlockEncoding) -> list[tuple[str, int]]:
    return list(be.layout.registers[: _aux_reg_count(be)])


def _sys_regs(be: BlockEncoding) -> list[tuple[str, int]]:
    return list(be.layout.registers[_aux_reg_count(be):])


def adjoint_encoding(be: BlockEncoding) -> BlockEncoding:
    """Encoding of the adjoint target; one query per application."""
    return _derived(
        be.op.adjoint(), be.alpha, be.epsilon,
        _aux_regs(be), _sys_regs(be), be.diagonal_flag, [(be, 1)],
    )


def product(be_a: BlockEncoding, be_b: BlockEncoding) -> BlockEncoding:
    """Encoding of the matrix product A @ B.

    Built as (I_b (x) U_A)(I_a (x) U_B) with B's ancillas outermost; each
    factor acts as identity on the other's ancillas, so the result is an
    (alpha_a*alpha_b, a+b, alpha_a*eps_b + alpha_b*eps_a)-encoding.
    """
    if be_a.num_system != be_b.num_system:
        raise ContractViolationError(
            f"system size mismatch: {be_a.num_system} vs {be_b.num_system} qubits"
        )
    a, b, s = be_a.num_aux, be_b.num_aux, be_a.num_system
    n = a + b + s
    check_qubit_budget(n, "product encoding")
    emb_a = Embedded(be_a.op, tuple(range(b, n)), n)
    emb_b = Embedded(be_b.op, tuple(range(b)) + tuple(range(b + a, n)), n)
    return _derived(
        compose(emb_a, emb_b),
        be_a.alpha * be_b.alpha,
        be_a.alpha * be_b.epsilon + be_b.alpha * be_a.epsilon,
        _aux_regs(be_b) + _aux_regs(be_a),
        _sys_regs(be_a),
        be_a.diagonal_flag and be_b.diagonal_flag,
        [(be_a, 1), (be_b, 1)],
    )


@dataclass(frozen=True, eq=False)
class StatePrepPair:
    """(beta, b, eps_sp)-state-preparation pair for LCU coefficients.

    The first columns c, d of P_L, P_R realize the coefficients as
    beta * conj(c_j) * d_j, with conj(c_j) * d_j = 0 beyond the term count.
    """

    p_left: LinearOperator
    p_right: LinearOperator
    beta: float
    b: int
    eps_sp: float

    def __post_init__(self):
        if self.p_left.n != self.b or self.p_right.n != self.b:
            raise ContractViolationError("state-prep unitaries must act on b qubits")

    def realized_weights(self) -> np.ndarray:
        e0 = np.zeros(1 << self.b, dtype=np.complex128)
        e0[0] = 1.0
        c = self.p_left.apply(e0)
        d = self.p_right.apply(e0)
        return self.beta * c.conj() * d

    def check(self, y: np.ndarray) -> float:
        """Sum_j |y_j - beta conj(c_j) d_j| over the coefficient slots."""
        y = np.asarray(y, dtype=np.complex128)
        w = self.realized_weights()
        err = float(np.sum(np.abs(w[: y.size] - y)))
        tail = float(np.max(np.abs(w[y.size:]), initial=0.0))
        if tail > 1e-12:
            raise ContractViolationError(f"state-prep pair leaks weight {tail} beyond slot {y.size}")
        return err


def uniform_pair(m: int) -> StatePrepPair:
    """Equal-weight pair for m terms: Hadamards when m is a power of two,
    otherwise a completed unitary preparing the uniform superposition over the
    first m selector values (zero weight on padding slots)."""
    if m < 1:
        raise ContractViolationError("need at least one LCU term")
    b = max(0, (m - 1).bit_length())
    if m == 1 << b or m == 1:
        prep = hadamard_layer(b)
    else:
        vec = np.zeros(1 << b)
        vec[:m] = 1.0 / np.sqrt(m)
        prep = state_prep_unitary(vec)
    pair = StatePrepPair(prep, prep, 1.0, b, 0.0)
    assert pair.check(np.full(m, 1.0 / m)) < 1e-12  # construction is exact
    return pair


def pair_for_weights(y: np.ndarray) -> StatePrepPair:
    """Exact pair for arbitrary real or complex coefficients y (beta = l1 norm);
    magnitudes go into P_L, phases into P_R."""
    y = np.asarray(y, dtype=np.complex128)
    beta = float(np.sum(np.abs(y)))
    if beta == 0.0:
        raise ContractViolationError("all-zero LCU coefficients")
    b = max(0, (y.size - 1).bit_length())
    mags = np.zeros(1 << b)
    mags[: y.size] = np.sqrt(np.abs(y) / beta)
    phases = np.ones(1 << b, dtype=np.complex128)
    nz = np.abs(y) > 0
    phases[: y.size][nz] = y[nz] / np.abs(y[nz])
    p_left = state_prep_unitary(mags)
    p_right = state_prep_unitary(mags * phases)
    pair = StatePrepPair(p_left, p_right, beta, b, 0.0)
    assert pair.check(y) < 1e-12  # construction is exact
    return pair


def lcu(bes: list[BlockEncoding], pair: StatePrepPair) -> BlockEncoding:
    """Encoding of sum_j y_j A_j via select-and-prepare.

    The select operator applies the j-th encoding controlled on selector value
    j and acts as identity on unused selector values.
    """
    if not bes:
        raise ContractViolationError("lcu needs at least one encoding")
    s = bes[0].num_system
    alpha = bes[0].alpha
    for be in bes:
        if be.num_system != s:
            raise ContractViolationError("lcu terms must share the system register")
        if abs(be.alpha - alpha) > 1e-12:
            raise ContractViolationError("lcu terms must share the subnormalization alpha")
    if len(bes) > 1 << pair.b:
        raise ContractViolationError(
            f"{len(bes)} terms exceed the {1 << pair.b} selector values of the pair"
        )
    a = max(be.num_aux for be in bes)
    padded = [pad_aux(be, a - be.num_aux) for be in bes]
    n = pair.b + a + s
    check_qubit_budget(n, "lcu encoding")
    sel_axes = tuple(range(pair.b))
    select = Multiplexed({j: be.op for j, be in enumerate(padded)}, sel_axes, n)
    op = compose(
        Embedded(pair.p_left.adjoint(), sel_axes, n) if pair.b else Identity(n),
        select,
        Embedded(pair.p_right, sel_axes, n) if pair.b else Identity(n),
    )
    eps_terms = max(be.epsilon for be in bes)
    return _derived(
        op,
        alpha * pair.beta,
        alpha * pair.eps_sp + pair.beta * eps_terms,
        [("sel", pair.b)] + _aux_regs(padded[0]),
        _sys_regs(padded[0]),
        all(be.diagonal_flag for be in bes),
        [(be, 1) for be in bes],
    )


def hadamard_product(be_a: BlockEncoding, be_b: BlockEncoding) -> BlockEncoding:
    """Encoding of the entrywise product A o B.

    Conjugates U_A (x) U_B by a CNOT ladder between the two system copies; the
    second copy joins the ancillas, giving (alpha_a*alpha_b, a+b+n, ...).
    """
    if be_a.num_system != be_b.num_system:
        raise ContractViolationError(
            f"system size mismatch: {be_a.num_system} vs {be_b.num_system} qubits"
        )
    a, b, s = be_a.num_aux, be_b.num_aux, be_a.num_system
    n = a + b + 2 * s
    check_qubit_budget(n, "hadamard-product encoding")
    aux_a = tuple(range(a))
    aux_b = tuple(range(a, a + b))
    sys_b = tuple(range(a + b, a + b + s))  # becomes ancilla
    sys_a = tuple(range(a + b + s, n))
    emb_a = Embedded(be_a.op, aux_a + sys_a, n)
    emb_b = Embedded(be_b.op, aux_b + sys_b, n)
    s_dim = 1 << s
    ladder = permutation_from_map(2 * s, lambda i: ((i >> s) ^ (i & (s_dim - 1))) << s | (i & (s_dim - 1)))
    emb_p = Embedded(ladder, sys_b + sys_a, n)
    return _derived(
        compose(emb_p, emb_a, emb_b, emb_p),
        be_a.alpha * be_b.alpha,
        be_a.alpha * be_b.epsilon + be_b.alpha * be_a.epsilon,
        _aux_regs(be_a) + _aux_regs(be_b) + [("syscopy", s)],
        _sys_regs(be_a),
        be_a.diagonal_flag or be_b.diagonal_flag,
        [(be_a, 1), (be_b, 1)],
    )


def dilate(be: BlockEncoding, k: int) -> BlockEncoding:
    """Encoding of diag(x) (x) I_k: each entry repeated 2^k times; parameters unchanged."""
    if not be.diagonal_flag:
        raise ContractViolationError("dilate requires a diagonal-flagged encoding")
    if k < 0:
        raise ContractViolationError("dilation qubit count must be non-negative")
    if k == 0:
        return be
    op = kron(be.op, Identity(k))
    return _derived(
        op, be.alpha, be.epsilon,
        _aux_regs(be), _sys_regs(be) + [("dil", k)],
        True, [(be, 1)],
    )


def remove_offdiagonal(be: BlockEncoding) -> BlockEncoding:
    """Encoding of diag(A_11, ..., A_NN): the entrywise product with I, which
    zeroes every off-diagonal entry and sets the diagonal flag."""
    return hadamard_product(be, identity_encoding(be.num_system))


def make_controlled(be: BlockEncoding, name: str = "ctrl") -> BlockEncoding:
    """Controlled lifting: block-diag(I, A) with the control as the leading
    system qubit. One application still counts as one query per primitive."""
    n = be.op.n + 1
    check_qubit_budget(n, "controlled encoding")
    op = Multiplexed({1: be.op}, (be.num_aux,), n)
    return _derived(
        op, be.alpha, be.epsilon,
        _aux_regs(be), [(name, 1)] + _sys_regs(be),
        be.diagonal_flag, [(be, 1)],
    )


def perturb(be: BlockEncoding, eps: float, seed: int) -> BlockEncoding:
    """Seeded unitary perturbation at spectral distance ~eps (within 10%, never
    above eps); the epsilon field grows by eps. Drives error-bound tests."""
    if eps < 0:
        raise ContractViolationError("perturbation size must be non-negative")
    if eps == 0.0:
        return be
    base = be.op.dense(cap_qubits=DENSE_CAP_QUBITS)
    rng = np.random.default_rng(seed)
    direction = random_unitary(be.op.n, rng)

    def candidate(t: float) -> tuple[np.ndarray, float]:
        u, _, vh = np.linalg.svd(base + t * direction)
        mat = u @ vh  # polar projection back onto the unitary group
        return mat, float(np.linalg.norm(mat - base, 2))

    t = eps
    mat, dist = candidate(t)
    for _ in range(40):
        if 0.90 * eps <= dist <= 0.999 * eps:
            break
        t *= 0.96 * eps / dist
        mat, dist = candidate(t)
    else:
        raise ContractViolationError(f"perturbation rescaling did not converge (dist={dist})")
    return _derived(
        Dense(mat), be.alpha, be.epsilon + eps,
        _aux_regs(be), _sys_regs(be), be.diagonal_flag, [(be, 1)],
    )
