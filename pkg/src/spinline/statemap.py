"""Map from the two-qubit sender's control parameters to the receiver's state.

With a0 real and positive the receiver density matrix depends only on

    f0 = a0,    fN(t) = a1 p_N1(t) + a2 p_N2(t),

and its eigen-parametrisation (lambda, beta1, beta2) follows in closed form
from ``R0 = |f0|`` and ``R_N = |fN|``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateParametrizationError,
    InconsistentAmplitudesError,
    InvalidParameterError,
    PhaseUndefinedWarning,
    UnitarityViolationError,
)
from .spectral import ZERO_AMPLITUDE, SpectralDecomposition, phase_fraction, propagator_column

DEGENERACY = 1e-12
NORM_SLACK = 1e-12
R_SLACK = 1e-10


@dataclass(frozen=True)
class ControlParams:
    """Sender controls, each a fraction in [0, 1].

    The alphas are in units of pi/2, the phis are fractions of a full turn.
    """

    alpha1: float
    alpha2: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "phi1", "phi2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name}={value} outside [0, 1]")


@dataclass(frozen=True)
class SenderState:
    """Amplitudes of ``a0|00> + a1|10> + a2|01>`` with real ``a0 >= 0``."""

    a0: float
    a1: complex
    a2: complex

    def __post_init__(self):
        a0 = complex(self.a0)
        if abs(a0.imag) > NORM_SLACK or a0.real < -NORM_SLACK:
            raise InvalidParameterError("a0 must be real and non-negative")
        object.__setattr__(self, "a0", max(a0.real, 0.0))
        object.__setattr__(self, "a1", complex(self.a1))
        object.__setattr__(self, "a2", complex(self.a2))
        norm = self.a0**2 + abs(self.a1) ** 2 + abs(self.a2) ** 2
        if abs(norm - 1.0) > NORM_SLACK:
            raise InvalidParameterError(f"sender state not normalised (|a|^2 = {norm})")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2], dtype=complex)


@dataclass(frozen=True)
class AmplitudeTriple:
    """``(R0, R, Phi)`` with ``R_N = sqrt(1 - R0^2) R``."""

    R0: float
    R: float
    Phi: float

    @property
    def RN(self) -> float:
        return math.sqrt(max(1.0 - self.R0**2, 0.0)) * self.R


@dataclass(frozen=True, eq=False)
class ReceiverState:
    """Creatable parameters of the receiver and its density matrix.

    ``beta1`` / ``beta2`` are NaN when the corresponding flag is False: at the
    maximally mixed point the eigenvectors are arbitrary, and with a zero
    off-diagonal the phase carries no information.
    """

    lam: float
    beta1: float
    beta2: float
    beta1_defined: bool
    beta2_defined: bool
    density: np.ndarray

    @property
    def eigenvector_matrix(self) -> np.ndarray:
        return eigenvector_matrix(
            self.beta1 if self.beta1_defined else 0.0, self.beta2 if self.beta2_defined else 0.0
        )


def control_to_sender(c: ControlParams) -> SenderState:
    half = math.pi / 2
    a0 = math.sin(c.alpha1 * half)
    rest = math.cos(c.alpha1 * half)
    a1 = rest * math.cos(c.alpha2 * half) * cmath.exp(2j * math.pi * c.phi1)
    a2 = rest * math.sin(c.alpha2 * half) * cmath.exp(2j * math.pi * c.phi2)
    return SenderState(a0, a1, a2)


def sender_unitary(s: SenderState) -> np.ndarray:
    """The SU(3) element taking ``|00>`` to the sender state (first column)."""
    a0, a1, a2 = s.a0, s.a1, s.a2
    rest2 = 1.0 - abs(a2) ** 2
    if rest2 <= 1e-14:
        raise DegenerateParametrizationError("|a2| = 1: the unitary is undefined")
    w = math.sqrt(rest2)
    return np.array(
        [
            [a0, -a1.conjugate() / w, -a0 * a2.conjugate() / w],
            [a1, a0 / w, -a1 * a2.conjugate() / w],
            [a2, 0.0, w],
        ],
        dtype=complex,
    )


def receiver_amplitudes(sd: SpectralDecomposition, s: SenderState, t: float):
    """``(f0, fN)`` at time ``t``."""
    if sd.n < 2:
        raise InvalidParameterError("chain needs at least two nodes")
    last = sd.n - 1
    p1 = propagator_column(sd, 1, t)[last]
    p2 = propagator_column(sd, 2, t)[last]
    return complex(s.a0), complex(s.a1 * p1 + s.a2 * p2)


def _check_amplitudes(f0, fN):
    total = abs(f0) ** 2 + abs(fN) ** 2
    if total > 1.0 + NORM_SLACK:
        raise InconsistentAmplitudesError(f"|f0|^2 + |fN|^2 = {total!r} exceeds 1")


def receiver_density(f0: complex, fN: complex) -> np.ndarray:
    _check_amplitudes(f0, fN)
    pN = abs(fN) ** 2
    return np.array(
        [[1.0 - pN, np.conj(fN) * f0], [fN * np.conj(f0), pN]],
        dtype=complex,
    )


def lambda_beta1(R0, RN):
    """Vectorised ``(lambda, beta1, beta1_defined)`` from the moduli.

    Undefined beta1 entries are NaN.
    """
    R0 = np.asarray(R0, dtype=float)
    RN = np.asarray(RN, dtype=float)
    a = 1.0 - 2.0 * RN**2
    root = np.sqrt(a**2 + 4.0 * RN**2 * R0**2)
    lam = 0.5 * (1.0 + root)
    defined = root > DEGENERACY
    # atan2 keeps beta1 well conditioned near 0 and 1 where arccos is not
    beta1 = np.where(defined, np.arctan2(2.0 * RN * R0, a) / np.pi, np.nan)
    return lam, beta1, defined


def receiver_params(f0: complex, fN: complex) -> ReceiverState:
    """Eigenvalue ``lambda >= 1/2`` and eigenvector parameters of the receiver."""
    rho = receiver_density(f0, fN)
    R0, RN = abs(f0), abs(fN)
    lam, beta1, defined = lambda_beta1(R0, RN)
    if RN * R0 > DEGENERACY:
        beta2 = (phase_fraction(complex(fN)) - phase_fraction(complex(f0))) % 1.0
        beta2 = 0.0 if beta2 >= 1.0 else beta2
        beta2_defined = True
    else:
        beta2, beta2_defined = math.nan, False
    return ReceiverState(float(lam), float(beta1), beta2, bool(defined), beta2_defined, rho)


def eigenvector_matrix(beta1: float, beta2: float) -> np.ndarray:
    """``U^B`` whose first column is the eigenvector of the larger eigenvalue."""
    c = math.cos(beta1 * math.pi / 2)
    s = math.sin(beta1 * math.pi / 2)
    ph = cmath.exp(2j * math.pi * beta2)
    return np.array([[c, -s / ph], [ph * s, c]], dtype=complex)


def amplitude_triple(f0: complex, fN: complex) -> AmplitudeTriple:
    _check_amplitudes(f0, fN)
    R0 = abs(f0)
    rest = math.sqrt(max(1.0 - R0**2, 0.0))
    R = min(abs(fN) / rest, 1.0) if rest > DEGENERACY else 0.0
    Phi = (phase_fraction(complex(fN)) - phase_fraction(complex(f0))) % 1.0
    return AmplitudeTriple(R0, R, 0.0 if Phi >= 1.0 else Phi)


class PhaseMatch(NamedTuple):
    phi2: float
    # True when r_N1 or r_N2 vanishes, so the returned phase is not unique
    boundary: bool


def phase_match(sd: SpectralDecomposition, phi1: float, t: float) -> PhaseMatch:
    """Choose ``phi2`` so both terms of ``fN`` share one phase at ``t``."""
    if sd.n < 3:
        raise InvalidParameterError("phase matching needs a chain of at least three nodes")
    last = sd.n - 1
    p1 = complex(propagator_column(sd, 1, t)[last])
    p2 = complex(propagator_column(sd, 2, t)[last])
    r1, r2 = abs(p1), abs(p2)
    if r1 <= ZERO_AMPLITUDE and r2 <= ZERO_AMPLITUDE:
        warnings.warn(f"r_N1 and r_N2 both vanish at t={t}; phase is undefined", PhaseUndefinedWarning)
        return PhaseMatch(phi1 % 1.0, True)
    chi1 = phase_fraction(p1) if r1 > ZERO_AMPLITUDE else 0.0
    chi2 = phase_fraction(p2) if r2 > ZERO_AMPLITUDE else 0.0
    phi2 = (phi1 + chi1 - chi2) % 1.0
    return PhaseMatch(0.0 if phi2 >= 1.0 else phi2, r1 <= ZERO_AMPLITUDE or r2 <= ZERO_AMPLITUDE)


def effective_R(sd: SpectralDecomposition, alpha2: float, t: float) -> float:
    """Phase-matched ``R = cos(alpha2 pi/2) r_N1 + sin(alpha2 pi/2) r_N2``."""
    if not 0.0 <= alpha2 <= 1.0:
        raise InvalidParameterError(f"alpha2={alpha2} outside [0, 1]")
    last = sd.n - 1
    r1 = abs(propagator_column(sd, 1, t)[last])
    r2 = abs(propagator_column(sd, 2, t)[last])
    return clamp_R(math.cos(alpha2 * math.pi / 2) * r1 + math.sin(alpha2 * math.pi / 2) * r2)


def clamp_R(R):
    """Clip to [0, 1]; anything beyond 1 + 1e-10 is an upstream fault."""
    R = np.asarray(R, dtype=float)
    if np.any(R > 1.0 + R_SLACK):
        raise UnitarityViolationError(f"R = {float(np.max(R))!r} exceeds 1")
    R = np.clip(R, 0.0, 1.0)
    return float(R) if R.ndim == 0 else R


def lambda_floor(R0: float) -> float:
    """Smallest lambda over ``R`` in [0, 1] at fixed ``R0`` (reached at R = 1/sqrt 2)."""
    if not 0.0 <= R0 <= 1.0:
        raise InvalidParameterError(f"R0={R0} outside [0, 1]")
    return 0.5 * (1.0 + R0 * math.sqrt(2.0 - R0**2))
