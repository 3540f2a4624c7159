"""Solution extraction: Hadamard-test estimation of diagonal entries and
post-selected multivariate state preparation.

Amplitude estimation and amplitude amplification are emulated: success
probabilities come from the exact statevector, and the speedup claims are
recorded analytically by the resource model rather than simulated. Shot
noise uses seeded generators throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_encoding import BlockEncoding
from .errors import DegenerateOutputError, DomainError
from .operators import Dense, Embedded, Multiplexed
from .registers import RegisterLayout, StateVector

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@dataclass(frozen=True)
class ReadoutResult:
    """Estimate of one output entry; shots = 0 marks an exact readout."""

    value: float
    stderr: float
    shots: int
    delta_target: float = 0.0


@dataclass(frozen=True, eq=False)
class PreparedState:
    """Post-selected output state with success probability and oracle distance."""

    amplitudes: StateVector
    success_prob: float
    l2_error: float | None
    norm_const: float | None


def _hadamard_test_state(be: BlockEncoding, q: int) -> np.ndarray:
    """(H (x) I) CU (H (x) I) |0>|0>_aux|q>, control as the top qubit."""
    n = be.op.n + 1
    cu = Multiplexed({1: be.op}, (0,), n)
    h_top = Embedded(Dense(_HADAMARD), (0,), n)
    state = np.zeros(1 << n, dtype=np.complex128)
    state[q] = 1.0  # |0>_ctrl |0>_aux |q>
    return h_top.apply(cu.apply(h_top.apply(state)))


def hadamard_test(
    be: BlockEncoding,
    q: int,
    shots: int = 0,
    seed: int | None = None,
    delta_target: float = 0.0,
) -> ReadoutResult:
    """Estimate Re <0|_aux <q| U |0>_aux |q>.

    Exact mode reads the amplitude (alpha_q + 1)/2 of the all-zero-ancilla
    outcome; shots mode draws Bernoulli samples of the top-qubit Z value,
    whose expectation is the same real part.
    """
    if not 0 <= q < be.system_dim:
        raise DomainError(f"node index {q} out of range for {be.system_dim} outputs")
    psi = _hadamard_test_state(be, q)
    if shots == 0:
        amp = psi[q]  # <0|<0|_aux<q| component
        return ReadoutResult(float(2.0 * amp.real - 1.0), 0.0, 0, delta_target)
    if shots < 0:
        raise DomainError("shot count must be non-negative")
    half = psi.size // 2
    p_zero = float(np.clip(np.sum(np.abs(psi[:half]) ** 2), 0.0, 1.0))
    rng = np.random.default_rng(seed)
    hits = rng.binomial(shots, p_zero)
    p_hat = hits / shots
    value = 2.0 * p_hat - 1.0
    stderr = 2.0 * np.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / shots)
    return ReadoutResult(float(value), float(stderr), shots, delta_target)


def estimate_all_outputs(
    be: BlockEncoding,
    shots: int = 0,
    seed: int | None = None,
    delta_target: float = 0.0,
) -> list[ReadoutResult]:
    """Elementwise Hadamard test over all output nodes, independent streams."""
    results = []
    for q in range(be.system_dim):
        node_seed = None if seed is None else [seed, q]
        results.append(hadamard_test(be, q, shots=shots, seed=node_seed, delta_target=delta_target))
    return results


def prepare_state_postselect(
    be: BlockEncoding,
    target: np.ndarray | None = None,
) -> PreparedState:
    """Apply the encoding to |0>_aux |+>_k, project the ancillas onto |0>, and
    renormalize. `target` is the oracle output vector Phi(x); when given, the
    report includes its l2 norm and the distance to the oracle state."""
    k_dim = be.system_dim
    state = np.zeros(be.op.dim, dtype=np.complex128)
    state[:k_dim] = 1.0 / np.sqrt(k_dim)  # |0>_aux |+>_k
    out = be.op.apply(state)
    projected = out[:k_dim]
    prob = float(np.sum(np.abs(projected) ** 2))
    if prob < 1e-12:
        raise DegenerateOutputError(f"post-selection probability {prob} is numerically zero")
    normalized = projected / np.sqrt(prob)
    l2_error = None
    norm_const = None
    if target is not None:
        target = np.asarray(target, dtype=np.complex128)
        norm_const = float(np.linalg.norm(target))
        if norm_const < 1e-12:
            raise DegenerateOutputError("oracle output vector is numerically zero")
        l2_error = float(np.linalg.norm(normalized - target / norm_const))
    # report amplitudes with the largest-magnitude entry rotated to positive real
    anchor = normalized[int(np.argmax(np.abs(normalized)))]
    fixed = normalized * (anchor.conj() / abs(anchor))
    layout = RegisterLayout((("out", be.num_system),))
    return PreparedState(
        amplitudes=StateVector(fixed, layout),
        success_prob=prob,
        l2_error=l2_error,
        norm_const=norm_const,
    )


def check_stateprep_bound(
    eps: float,
    eps_x: float,
    eps_w: float,
    degree: int,
    k_out: int,
    norm_const: float,
) -> bool:
    """Whether the state-preparation hypotheses hold:
    eps_x <= N^2 eps^2 / (144 K d^2) and eps_w <= N eps / (3 sqrt(K))."""
    if not 0.0 < eps < 0.5:
        raise DomainError("target error must lie in (0, 1/2)")
    thr_x = np.inf if degree == 0 else norm_const**2 * eps**2 / (144.0 * k_out * degree**2)
    thr_w = norm_const * eps / (3.0 * np.sqrt(k_out))
    return eps_x <= thr_x and eps_w <= thr_w


def stateprep_thresholds(eps: float, degree: int, k_out: int, norm_const: float) -> tuple[float, float]:
    """The (eps_x, eps_w) admissibility thresholds of the hypotheses above."""
    if not 0.0 < eps < 0.5:
        raise DomainError("target error must lie in (0, 1/2)")
    thr_x = np.inf if degree == 0 else norm_const**2 * eps**2 / (144.0 * k_out * degree**2)
    return float(thr_x), float(norm_const * eps / (3.0 * np.sqrt(k_out)))
