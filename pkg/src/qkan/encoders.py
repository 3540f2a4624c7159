"""Constructors of exact diagonal block-encodings for inputs and weights."""

from __future__ import annotations

import numpy as np

from .block_encoding import (
    BlockEncoding,
    adjoint_encoding,
    lcu,
    primitive_encoding,
    uniform_pair,
)
from .errors import ContractViolationError, DomainError
from .operators import (
    Dense,
    Embedded,
    LinearOperator,
    Permutation,
    compose,
    state_prep_unitary,
)
from .registers import RegisterLayout


def _log2_exact(length: int, what: str) -> int:
    n = max(0, length.bit_length() - 1)
    if length != 1 << n:
        raise DomainError(f"{what} length {length} is not a power of two")
    return n


def encode_diagonal_exact(x: np.ndarray, name: str = "x") -> BlockEncoding:
    """Exact (1, 1, 0)-encoding of diag(x) for x in [-1, 1]^N.

    Per basis label p the single ancilla carries the reflection block
    [[x_p, s_p], [s_p, -x_p]] with s_p = sqrt(1 - x_p^2); the full operator
    is Hermitian and unitary, which the Chebyshev step relies on.
    """
    x = np.asarray(x, dtype=np.float64)
    n = _log2_exact(x.size, "input vector")
    if np.any(np.abs(x) > 1.0):
        raise DomainError(f"entries outside [-1, 1]: max |x| = {np.max(np.abs(x))}")
    s = np.sqrt(1.0 - x * x)
    mat = np.block([[np.diag(x), np.diag(s)], [np.diag(s), -np.diag(x)]]).astype(np.complex128)
    layout = RegisterLayout((("enc", 1), ("sys", n)))
    return primitive_encoding(Dense(mat), 1, layout, name, diagonal=True)


def _copy_compare_permutation(n: int) -> Permutation:
    """Permutation on [flag | amp | sys] that routes the amp==sys branch to the
    all-zero ancilla state: flag ^= (amp == sys); amp ^= sys if flag; flag ^= 1."""
    big = 1 << n
    idx = np.arange(1 << (2 * n + 1))
    f = idx >> (2 * n)
    a = (idx >> n) & (big - 1)
    s = idx & (big - 1)
    f2 = f ^ (a == s)
    a2 = a ^ (s * f2)
    f3 = f2 ^ 1
    return Permutation((f3 << (2 * n)) | (a2 << n) | s)


def encode_from_stateprep(u_prep: LinearOperator, name: str = "psi") -> BlockEncoding:
    """(1, n+3, 0)-encoding of diag(psi) for psi = U_prep |0>.

    One application of U_prep writes psi into an ancilla register; a comparator
    flags the branch matching the system label and returns its ancillas to
    |0>, so the surviving amplitude on |0>_aux |j> is exactly psi_j. Two idle
    ancillas keep the n+3 budget of the general amplitude-encoding route.
    """
    n = u_prep.n
    total = 2 * n + 3
    amp_axes = tuple(range(3, 3 + n))
    sys_axes = tuple(range(3 + n, total))
    gadget = Embedded(_copy_compare_permutation(n), (0,) + amp_axes + sys_axes, total)
    prep = Embedded(u_prep, amp_axes, total)
    layout = RegisterLayout((("flag", 1), ("pad", 2), ("amp", n), ("sys", n)))
    return primitive_encoding(compose(gadget, prep), n + 3, layout, name, diagonal=True)


def encode_real_weights(u_prep: LinearOperator, name: str = "w") -> BlockEncoding:
    """(1, n+4, 0)-encoding of diag(Re psi) from a state-preparation unitary.

    Combines the amplitude encoding with its adjoint at equal weights, so the
    encoded vector satisfies sum_j (Re psi_j)^2 <= 1.
    """
    be_psi = encode_from_stateprep(u_prep, name=name)
    return lcu([be_psi, adjoint_encoding(be_psi)], uniform_pair(2))


def stateprep_for_real_vector(w: np.ndarray) -> Dense:
    """State-preparation unitary whose amplitudes have real part w (needs
    sum w^2 <= 1); the slack goes into a uniform imaginary component."""
    w = np.asarray(w, dtype=np.float64)
    _log2_exact(w.size, "weight vector")
    slack = 1.0 - float(np.sum(w * w))
    if slack < -1e-12:
        raise ContractViolationError(f"sum of squares {np.sum(w * w)} exceeds 1")
    imag = np.sqrt(max(slack, 0.0) / w.size)
    psi = w + 1j * imag
    psi = psi / np.linalg.norm(psi)  # rounding-level correction only
    return state_prep_unitary(psi)
