"""Coupling profiles of nearest-neighbour XY chains and the one-excitation block.

Couplings are always stored explicitly, so named profiles and custom chains
share the same downstream code. Energies are dimensionless (reference
coupling D = 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidLengthError, InvalidParameterError

PROFILES = ("homogeneous", "alternating", "ekert", "custom")


def _profile_couplings(kind: str, n: int, d: Optional[float]) -> tuple:
    if kind == "homogeneous":
        return tuple(1.0 for _ in range(1, n))
    if kind == "alternating":
        return tuple(1.0 if i % 2 == 1 else float(d) for i in range(1, n))
    if kind == "ekert":
        return tuple(math.sqrt(i * (n - i)) for i in range(1, n))
    raise InvalidParameterError(f"no closed-form couplings for profile {kind!r}")


@dataclass(frozen=True)
class ChainSpec:
    """Chain length, coupling list ``D_1..D_{N-1}`` and the profile tag.

    ``d`` is the alternation parameter and is set only for the alternating
    profile.
    """

    n: int
    couplings: tuple
    profile: str = "custom"
    d: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidLengthError(f"chain length must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        if self.n < 2:
            raise InvalidLengthError(f"chain length must be >= 2, got {self.n}")
        if len(self.couplings) != self.n - 1:
            raise InvalidLengthError(
                f"expected {self.n - 1} couplings for N={self.n}, got {len(self.couplings)}"
            )
        if not all(math.isfinite(c) and c > 0 for c in self.couplings):
            raise InvalidParameterError("every coupling must be finite and positive")
        if self.profile not in PROFILES:
            raise InvalidParameterError(f"unknown profile {self.profile!r}")
        if self.profile == "alternating":
            if self.d is None or not self.d > 0:
                raise InvalidParameterError("alternating profile needs d > 0")
            object.__setattr__(self, "d", float(self.d))
        elif self.d is not None:
            raise InvalidParameterError("d is only meaningful for the alternating profile")
        if self.profile != "custom":
            expected = _profile_couplings(self.profile, self.n, self.d)
            if not np.allclose(self.couplings, expected, rtol=1e-12, atol=0.0):
                raise InvalidParameterError(
                    f"couplings do not match the {self.profile} profile"
                )

    @property
    def is_symmetric(self) -> bool:
        """Mirror symmetry ``D_i == D_{N-i}``."""
        c = np.asarray(self.couplings)
        return bool(np.allclose(c, c[::-1], rtol=1e-12, atol=0.0))

    def to_dict(self) -> dict:
        return {"n": self.n, "profile": self.profile, "d": self.d, "couplings": list(self.couplings)}

    @classmethod
    def from_dict(cls, data: dict) -> "ChainSpec":
        try:
            n = data["n"]
            couplings = data.get("couplings")
            profile = data.get("profile", "custom")
            d = data.get("d")
        except (TypeError, AttributeError) as exc:
            raise InvalidParameterError(f"malformed chain object: {data!r}") from exc
        if couplings is None:
            return build_profile(profile, n, d)
        return cls(n=n, couplings=tuple(couplings), profile=profile, d=d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ChainSpec":
        return cls.from_dict(json.loads(text))


def build_profile(kind: str, n: int, d: Optional[float] = None) -> ChainSpec:
    """Build a named coupling profile.

    ``kind`` is one of ``homogeneous``, ``alternating`` (needs ``d``) or
    ``ekert`` (``D_i = sqrt(i (N - i))``).

    >>> build_profile("ekert", 4).couplings == (math.sqrt(3), 2.0, math.sqrt(3))
    True
    """
    if kind not in PROFILES or kind == "custom":
        raise InvalidParameterError(f"unknown named profile {kind!r}")
    if isinstance(n, bool) or int(n) != n:
        raise InvalidLengthError(f"chain length must be an integer, got {n!r}")
    if n < 2:
        raise InvalidLengthError(f"chain length must be >= 2, got {n}")
    if kind == "alternating":
        if d is None or not d > 0:
            raise InvalidParameterError("alternating profile needs d > 0")
    else:
        d = None
    return ChainSpec(n=int(n), couplings=_profile_couplings(kind, int(n), d), profile=kind, d=d)


def custom_chain(couplings: Sequence[float]) -> ChainSpec:
    return ChainSpec(n=len(couplings) + 1, couplings=tuple(couplings), profile="custom")


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Real symmetric tridiagonal matrix stored as two read-only vectors."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diagonal, dtype=float)
        off = np.array(self.off_diagonal, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or off.size != max(diag.size - 1, 0):
            raise InvalidLengthError("off-diagonal must have exactly one fewer entry than diagonal")
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "off_diagonal", off)

    @property
    def dim(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


def one_excitation_hamiltonian(spec: ChainSpec) -> TridiagonalMatrix:
    """H_1 in the basis of single flipped spins: zero diagonal, ``D_i / 2`` off it."""
    return TridiagonalMatrix(np.zeros(spec.n), np.asarray(spec.couplings) / 2.0)
