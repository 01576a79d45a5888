"""Exact dynamics of the one-excitation block.

Propagation uses spectral synthesis,

    p_kj(t) = <k| exp(-i H_1 t) |j> = sum_m V_km V_jm exp(-i lambda_m t),

so a single decomposition serves any number of time points. Two oracles that
never touch the eigendecomposition are provided for cross-checking: a
fixed-step RK4 integrator and a brute-force evolution in the full 2**N
Hilbert space followed by a partial trace.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Sequence

import numpy as np

from ._format import fmt
from ._ql import tql_implicit
from .chain import ChainSpec, TridiagonalMatrix, one_excitation_hamiltonian
from .errors import InvalidParameterError, NumericalFailure, OracleScaleExceeded

if TYPE_CHECKING:
    from .statemap import SenderState

QL_TOL = 1e-14
ZERO_AMPLITUDE = 1e-14
MAX_ORACLE_N = 10
_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of H_1."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


@dataclass(frozen=True)
class TransitionAmplitude:
    """Polar form of ``p_kj(t) = r * exp(2 pi i chi)`` with ``chi`` in [0, 1).

    ``phase_defined`` is False when ``r`` is below 1e-14, in which case
    ``chi`` is set to 0.
    """

    k: int
    j: int
    value: complex
    r: float
    chi: float
    phase_defined: bool

    @classmethod
    def from_value(cls, k: int, j: int, value: complex) -> "TransitionAmplitude":
        value = complex(value)
        r = abs(value)
        chi = phase_fraction(value)
        defined = r > ZERO_AMPLITUDE
        return cls(k, j, value, r, chi if defined else 0.0, defined)


def phase_fraction(value) -> float:
    """``arg(value) / 2 pi`` reduced to [0, 1)."""
    chi = math.atan2(value.imag, value.real) / (2.0 * math.pi) % 1.0
    # -tiny % 1.0 rounds up to exactly 1.0
    return 0.0 if chi >= 1.0 else chi


def decompose(h: TridiagonalMatrix) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric tridiagonal matrix by implicit QL.

    Eigenvalues come out ascending. Each eigenvector is signed so that its
    first component above 1e-12 in magnitude is positive, which makes the
    output reproducible.

    Raises ``NumericalFailure`` if the iteration cap (50 N sweeps) is hit.
    """
    n = h.dim
    d = np.array(h.diagonal, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = h.off_diagonal
    z = np.eye(n)
    used = tql_implicit(d, e, z, QL_TOL, 50 * n)
    if used < 0:
        raise NumericalFailure(
            f"implicit QL did not converge within {50 * n} iterations", matrix=h.to_dense()
        )
    order = np.argsort(d, kind="stable")
    d = d[order]
    z = z[:, order]
    for m in range(n):
        col = z[:, m]
        lead = np.flatnonzero(np.abs(col) > 1e-12)
        if lead.size and col[lead[0]] < 0:
            z[:, m] = -col
    d.setflags(write=False)
    z.setflags(write=False)
    return SpectralDecomposition(d, z)


def decompose_chain(spec: ChainSpec) -> SpectralDecomposition:
    return decompose(one_excitation_hamiltonian(spec))


def _check_node(sd_n: int, j: int):
    if not 1 <= j <= sd_n:
        raise IndexError(f"node index {j} outside 1..{sd_n}")


def propagator_column(sd: SpectralDecomposition, j: int, t: float) -> np.ndarray:
    """Complex vector ``p_kj(t)`` for k = 1..N (0-based array index k-1)."""
    _check_node(sd.n, j)
    v = sd.eigenvectors
    phases = np.exp(-1j * sd.eigenvalues * t)
    return v @ (phases * v[j - 1])


def transition_amplitudes(sd: SpectralDecomposition, j: int, t: float) -> List[TransitionAmplitude]:
    """All amplitudes out of node ``j`` at time ``t``, ordered k = 1..N."""
    if t < 0:
        raise InvalidParameterError("time must be non-negative")
    col = propagator_column(sd, j, t)
    return [TransitionAmplitude.from_value(k + 1, j, col[k]) for k in range(sd.n)]


def amplitude(sd: SpectralDecomposition, k: int, j: int, t: float) -> complex:
    _check_node(sd.n, k)
    _check_node(sd.n, j)
    v = sd.eigenvectors
    return complex(np.sum(v[k - 1] * v[j - 1] * np.exp(-1j * sd.eigenvalues * t)))


def amplitude_series(sd: SpectralDecomposition, k: int, j: int, times: Iterable[float]) -> np.ndarray:
    """``p_kj`` evaluated at every entry of ``times``."""
    _check_node(sd.n, k)
    _check_node(sd.n, j)
    times = np.asarray(times, dtype=float)
    weights = sd.eigenvectors[k - 1] * sd.eigenvectors[j - 1]
    out = np.empty(times.shape, dtype=complex)
    flat_t = times.ravel()
    flat_out = out.reshape(-1)
    for start in range(0, flat_t.size, _CHUNK):
        block = flat_t[start : start + _CHUNK]
        flat_out[start : start + _CHUNK] = np.exp(-1j * np.outer(block, sd.eigenvalues)) @ weights
    return out


def uniform_series(
    sd: SpectralDecomposition, k: int, j: int, t_start: float, step: float, count: int
) -> np.ndarray:
    """``p_kj`` on the grid ``t_start + i * step``, i = 0..count-1.

    Splits ``t = t_start + (b * B + i) * step`` so only one B x N block of
    exponentials and one phase vector per block are needed; the synthesis
    is a single matrix product.
    """
    _check_node(sd.n, k)
    _check_node(sd.n, j)
    if count <= 0:
        return np.empty(0, dtype=complex)
    lam = sd.eigenvalues
    weights = sd.eigenvectors[k - 1] * sd.eigenvectors[j - 1]
    block = min(count, _CHUNK)
    nblocks = -(-count // block)
    inner = np.exp(-1j * np.outer(np.arange(block) * step, lam))
    starts = t_start + np.arange(nblocks) * block * step
    outer = np.exp(-1j * np.outer(lam, starts)) * weights[:, None]
    return (inner @ outer).T.reshape(-1)[:count]


def ode_oracle_amplitudes(
    h: TridiagonalMatrix, j: int, t: float, step: float = 1e-3
) -> List[TransitionAmplitude]:
    """Integrate ``i dpsi/dt = H psi`` from ``|j>`` with classical RK4.

    For a linear autonomous system one RK4 step is exactly multiplication by
    ``1 + A + A^2/2 + A^3/6 + A^4/24`` with ``A = -i H h``; that operator is
    formed once and applied ``ceil(t / step)`` times with the step shortened
    to land on ``t``.
    """
    if step <= 0:
        raise InvalidParameterError("step must be positive")
    if t < 0:
        raise InvalidParameterError("time must be non-negative")
    _check_node(h.dim, j)
    psi = np.zeros(h.dim, dtype=complex)
    psi[j - 1] = 1.0
    nsteps = int(math.ceil(t / step - 1e-12)) if t > 0 else 0
    if nsteps:
        dt = t / nsteps
        a = -1j * dt * h.to_dense()
        a2 = a @ a
        stepper = np.eye(h.dim) + a + a2 / 2 + (a2 @ a) / 6 + (a2 @ a2) / 24
        for _ in range(nsteps):
            psi = stepper @ psi
    return [TransitionAmplitude.from_value(k + 1, j, psi[k]) for k in range(h.dim)]


def full_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """XY Hamiltonian on all 2**N states; node 1 is the most significant qubit.

    ``D_i/2 (I_i^+ I_{i+1}^- + h.c.)`` swaps the pair (i, i+1) whenever their
    bits differ.
    """
    n = spec.n
    dim = 1 << n
    h = np.zeros((dim, dim))
    for state in range(dim):
        for i, coupling in enumerate(spec.couplings):
            hi = n - 1 - i
            lo = hi - 1
            if ((state >> hi) & 1) != ((state >> lo) & 1):
                h[state ^ ((1 << hi) | (1 << lo)), state] += coupling / 2.0
    return h


def full_hilbert_oracle(spec: ChainSpec, sender_state: "SenderState", t: float) -> np.ndarray:
    """Receiver density matrix from full-space evolution and a partial trace.

    The sender state ``a0|00> + a1|10> + a2|01>`` on nodes 1-2 is padded with
    the ground state on the rest, evolved with ``expm(-i H t)`` of the full
    XY Hamiltonian, and nodes 1..N-1 are traced out.
    """
    from scipy.linalg import expm

    n = spec.n
    if n > MAX_ORACLE_N:
        raise OracleScaleExceeded(f"full-space oracle is limited to N <= {MAX_ORACLE_N}, got {n}")
    dim = 1 << n
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0] = sender_state.a0
    psi0[1 << (n - 1)] = sender_state.a1
    psi0[1 << (n - 2)] += sender_state.a2
    psi = expm(-1j * t * full_hamiltonian(spec)) @ psi0
    # rows: nodes 1..N-1, columns: receiver bit
    psi = psi.reshape(dim // 2, 2)
    return psi.T @ psi.conj()


def write_amplitudes_csv(
    sd: SpectralDecomposition, j: int, times: Sequence[float], stream=None, nodes: Sequence[int] = None
) -> str:
    """CSV dump ``k,t,re,im,r,chi`` for source node ``j``; returns the text."""
    nodes = list(nodes) if nodes is not None else list(range(1, sd.n + 1))
    buf = io.StringIO()
    buf.write("k,t,re,im,r,chi\n")
    for t in times:
        col = propagator_column(sd, j, t)
        for k in nodes:
            amp = TransitionAmplitude.from_value(k, j, col[k - 1])
            buf.write(
                ",".join([str(k), fmt(t), fmt(amp.value.real), fmt(amp.value.imag), fmt(amp.r), fmt(amp.chi)])
                + "\n"
            )
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
