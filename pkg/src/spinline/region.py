"""Exploration of the creatable region.

Covers the highest-probability transfer time ``t0``, maps of the
``(alpha1, alpha2) -> (lambda, beta1)`` image, the minimal creatable
eigenvalue, critical chain lengths, and bounds of ``R`` used to carve out
non-overlapping subregions.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ._format import fmt
from .chain import ChainSpec, build_profile
from .errors import InvalidParameterError
from .spectral import (
    SpectralDecomposition,
    TransitionAmplitude,
    amplitude,
    amplitude_series,
    decompose_chain,
    uniform_series,
)
from .statemap import clamp_R, lambda_beta1

T_STEP = 0.02
T0_TOL = 1e-9
NONDEGENERACY = 1e-6
R_CRITICAL = 1.0 / math.sqrt(2.0)
CRITICAL_SLACK = 1e-9
DISJOINT_MARGIN = 1e-3
DEFAULT_D_VALUES = tuple(float(d) for d in np.round(np.arange(0.1, 2.0 + 1e-9, 0.02), 10))

WINDOW_POLICIES = ("standard", "alt-w1", "alt-w2", "alt-odd", "alt-w1-unscaled", "alt-w2-unscaled")
PHASE_MODES = ("matched", "fixed")

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, a: float, b: float, tol: float = T0_TOL) -> float:
    """Maximiser of a unimodal ``f`` on ``[a, b]`` by golden-section search."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _resolve(spec: ChainSpec, sd: Optional[SpectralDecomposition]) -> SpectralDecomposition:
    return sd if sd is not None else decompose_chain(spec)


def _check_window(window) -> Tuple[float, float]:
    try:
        lo, hi = (float(w) for w in window)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"window must be a pair (t_lo, t_hi), got {window!r}") from exc
    if not (0.0 <= lo < hi and math.isfinite(hi)):
        raise InvalidParameterError(f"empty or invalid time window [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class TimeSearchResult:
    t0: float
    r_max: float
    nondegenerate: bool

    def to_dict(self) -> dict:
        return {"t0": self.t0, "r_max": self.r_max, "nondegenerate": self.nondegenerate}


def find_t0(
    spec: ChainSpec,
    window,
    dt: float = T_STEP,
    sd: Optional[SpectralDecomposition] = None,
) -> TimeSearchResult:
    """Global maximum of ``r_N1`` over ``window``.

    Samples on the multiples of ``dt`` inside the window (plus both ends),
    then refines the best sample by golden-section search over the two
    neighbouring intervals.
    """
    lo, hi = _check_window(window)
    sd = _resolve(spec, sd)
    n = sd.n
    k0 = math.ceil(lo / dt)
    k1 = math.floor(hi / dt)
    grid = uniform_series(sd, n, 1, k0 * dt, dt, max(k1 - k0 + 1, 0))
    times = np.concatenate([[lo], k0 * dt + dt * np.arange(grid.size), [hi]])
    values = np.abs(np.concatenate([amplitude_series(sd, n, 1, [lo]), grid, amplitude_series(sd, n, 1, [hi])]))
    best = int(np.argmax(values))
    a = max(lo, times[best] - dt)
    b = min(hi, times[best] + dt)

    def r_n1(t):
        return abs(amplitude(sd, n, 1, t))

    t0 = golden_max(r_n1, a, b)
    r0 = r_n1(t0)
    if r0 < values[best]:
        t0, r0 = float(times[best]), float(values[best])

    chi_n1 = TransitionAmplitude.from_value(n, 1, amplitude(sd, n, 1, t0)).chi
    chi_prev = TransitionAmplitude.from_value(n - 1, 1, amplitude(sd, n - 1, 1, t0)).chi
    nondegenerate = abs(math.sin(2 * math.pi * (chi_prev - chi_n1))) > NONDEGENERACY
    return TimeSearchResult(float(t0), float(r0), bool(nondegenerate))


def _receiver_moduli(sd: SpectralDecomposition, t: float) -> Tuple[complex, complex]:
    n = sd.n
    return amplitude(sd, n, 1, t), amplitude(sd, n, 2, t)


def R_profile(p1: complex, p2: complex, alpha2, phases: str = "matched"):
    """``R`` as a function of ``alpha2`` at fixed transition amplitudes.

    ``matched`` assumes the phase-matching choice of ``phi2`` (``R`` adds the
    moduli); ``fixed`` keeps ``phi1 = phi2 = 0`` so that only the alphas vary.
    """
    theta = np.asarray(alpha2, dtype=float) * (math.pi / 2)
    if phases == "matched":
        R = np.cos(theta) * abs(p1) + np.sin(theta) * abs(p2)
    elif phases == "fixed":
        R = np.abs(np.cos(theta) * p1 + np.sin(theta) * p2)
    else:
        raise InvalidParameterError(f"phases must be one of {PHASE_MODES}, got {phases!r}")
    return clamp_R(R)


@dataclass(frozen=True, eq=False)
class RegionMap:
    """Samples of ``(lambda, beta1)`` on a uniform ``(alpha1, alpha2)`` grid.

    Array axis 0 runs over ``alpha1``, axis 1 over ``alpha2``; so row ``i``
    is the curve ``alpha1 = alpha1[i]`` and column ``j`` the curve
    ``alpha2 = alpha2[j]``.
    """

    alpha1: np.ndarray
    alpha2: np.ndarray
    lam: np.ndarray
    beta1: np.ndarray
    beta1_defined: np.ndarray
    t: float
    spec: ChainSpec
    phases: str = "matched"

    def gridlines(self, every: int = 1) -> Dict[str, list]:
        """Curves of constant ``alpha1`` and constant ``alpha2`` for plotting."""
        rows = range(0, self.alpha1.size, every)
        cols = range(0, self.alpha2.size, every)
        return {
            "alpha1": [(float(self.alpha1[i]), self.lam[i, :], self.beta1[i, :]) for i in rows],
            "alpha2": [(float(self.alpha2[j]), self.lam[:, j], self.beta1[:, j]) for j in cols],
        }

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        buf.write("alpha1,alpha2,lambda,beta1,beta1_defined\n")
        for i, a1 in enumerate(self.alpha1):
            for j, a2 in enumerate(self.alpha2):
                buf.write(
                    f"{fmt(a1)},{fmt(a2)},{fmt(self.lam[i, j])},{fmt(self.beta1[i, j])},"
                    f"{int(self.beta1_defined[i, j])}\n"
                )
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def creatable_map(
    spec: ChainSpec,
    t: float,
    grid_n: int,
    phases: str = "matched",
    sd: Optional[SpectralDecomposition] = None,
) -> RegionMap:
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be at least 2")
    if t < 0:
        raise InvalidParameterError("time must be non-negative")
    sd = _resolve(spec, sd)
    alpha = np.linspace(0.0, 1.0, grid_n)
    p1, p2 = _receiver_moduli(sd, t)
    R = R_profile(p1, p2, alpha, phases)
    R0 = np.sin(alpha * math.pi / 2)
    RN = np.sqrt(np.clip(1.0 - R0**2, 0.0, None))[:, None] * R[None, :]
    lam, beta1, defined = lambda_beta1(R0[:, None], RN)
    for arr in (lam, beta1, defined):
        arr.setflags(write=False)
    return RegionMap(alpha, alpha.copy(), lam, beta1, defined, float(t), spec, phases)


def rasterize(lam, beta1, bins: int = 200) -> np.ndarray:
    """Boolean occupancy of ``bins x bins`` cells over ``[1/2, 1] x [0, 1]``."""
    lam = np.asarray(lam).ravel()
    beta1 = np.asarray(beta1).ravel()
    keep = np.isfinite(beta1)
    i = np.clip(((lam[keep] - 0.5) / 0.5 * bins).astype(int), 0, bins - 1)
    j = np.clip((beta1[keep] * bins).astype(int), 0, bins - 1)
    cells = np.zeros((bins, bins), dtype=bool)
    cells[i, j] = True
    return cells


def lambda_min_from_rmax(r_max: float) -> float:
    return max(0.5, 1.0 - r_max**2)


def lambda_min_cr(spec: ChainSpec, window, sd: Optional[SpectralDecomposition] = None) -> float:
    """Minimal creatable eigenvalue, ``max(1/2, 1 - r_max^2)``.

    The closed form relies on lambda growing with ``R0`` at fixed ``R`` and
    on ``R = r_N1`` at ``t0``. Both hold for a mirror-symmetric chain whose
    ``t0`` is an interior maximum (``r_N2(t0) = 0``). If ``t0`` sits on the
    window edge, or ``hypot(r_N1, r_N2)`` peaks away from ``t0`` (slow
    alternating chains), the brute-force minimum of
    :func:`lambda_min_direct` can be lower and this value is an upper bound.
    """
    return lambda_min_from_rmax(find_t0(spec, window, sd=sd).r_max)


def _lambda_from_density(f0, fN):
    # largest eigenvalue of [[1-|fN|^2, fN* f0], [fN f0*, |fN|^2]] via its determinant
    pN = np.abs(fN) ** 2
    det = (1.0 - pN) * pN - pN * np.abs(f0) ** 2
    return 0.5 + np.sqrt(np.clip(0.25 - det, 0.0, None))


def lambda_min_direct(
    spec: ChainSpec,
    times,
    grid_n: int = 101,
    phase_n: int = 24,
    polish: bool = True,
    sd: Optional[SpectralDecomposition] = None,
) -> float:
    """Brute-force minimum of lambda over controls and the given times.

    Scans ``alpha1 x alpha2 x (phi2 - phi1)`` with the amplitudes computed
    from scratch, takes the receiver eigenvalue from the determinant of its
    density matrix, and (optionally) polishes the best grid point with a
    bounded Nelder-Mead search.
    """
    from scipy.optimize import minimize

    sd = _resolve(spec, sd)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    a1 = np.linspace(0.0, 1.0, grid_n)[:, None, None]
    a2 = np.linspace(0.0, 1.0, grid_n)[None, :, None]
    dphi = (np.arange(phase_n) / phase_n)[None, None, :]
    best_val, best_x = math.inf, None
    for t in times:
        p1, p2 = _receiver_moduli(sd, t)

        def lam_at(x1, x2, ph, p1=p1, p2=p2):
            rest = np.cos(x1 * math.pi / 2)
            fN = rest * (np.cos(x2 * math.pi / 2) * p1 + np.sin(x2 * math.pi / 2) * p2 * np.exp(2j * math.pi * ph))
            return _lambda_from_density(np.sin(x1 * math.pi / 2), fN)

        grid = lam_at(a1, a2, dphi)
        idx = np.unravel_index(int(np.argmin(grid)), grid.shape)
        val = float(grid[idx])
        x = (float(a1.ravel()[idx[0]]), float(a2.ravel()[idx[1]]), float(dphi.ravel()[idx[2]]))
        if polish:
            res = minimize(
                lambda v: float(lam_at(*v)),
                x,
                method="Nelder-Mead",
                bounds=[(0.0, 1.0), (0.0, 1.0), (-1.0, 2.0)],
                options={"xatol": 1e-11, "fatol": 1e-13, "maxiter": 4000},
            )
            if res.fun < val:
                val, x = float(res.fun), tuple(res.x)
        if val < best_val:
            best_val, best_x = val, x
    return best_val


@dataclass(frozen=True)
class CriticalRecord:
    n: int
    d: Optional[float]
    r_max: float
    t0: float
    lambda_min_cr: float
    qualifies: bool
    window: Tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "r_max": self.r_max,
            "t0": self.t0,
            "lambda_min_cr": self.lambda_min_cr,
            "qualifies": self.qualifies,
        }


@dataclass(frozen=True)
class CriticalLengthReport:
    """Per-length maxima of ``r_N1`` and the resulting critical length.

    ``n_c`` is the largest qualifying length (maximum over ``d`` for the
    alternating family); ``n_c_by_d`` keeps the per-``d`` values.
    """

    family: str
    window: str
    records: Tuple[CriticalRecord, ...]
    n_c: Optional[int]
    n_c_by_d: Tuple[Tuple[Optional[float], Optional[int]], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "window": self.window,
            "records": [r.to_dict() for r in self.records],
            "n_c": self.n_c,
            "n_c_by_d": [{"d": d, "n_c": nc} for d, nc in self.n_c_by_d],
        }


def policy_window(policy: str, family: str, n: int, d: Optional[float] = None) -> Tuple[float, float]:
    """Search window for one chain under a named policy.

    ``standard`` is ``[0, 1.5 N]``. The alternating policies use
    ``m = min(d, 1/d)`` and ``M = max(d, 1/d)``: ``alt-w1`` is ``[0, 1.3 N m]``,
    ``alt-w2`` is ``(1.3 N m, 1.5 N M]``, ``alt-odd`` is ``[0, 3 N m]``. The
    ``-unscaled`` variants drop the factor N from the ``1.3 m`` boundary.
    """
    if policy == "standard":
        return 0.0, 1.5 * n
    if family != "alternating" or d is None:
        raise InvalidParameterError(f"window policy {policy!r} needs the alternating family with d")
    m, M = min(d, 1.0 / d), max(d, 1.0 / d)
    if policy == "alt-w1":
        return 0.0, 1.3 * n * m
    if policy == "alt-w2":
        return 1.3 * n * m, 1.5 * n * M
    if policy == "alt-odd":
        return 0.0, 3.0 * n * m
    if policy == "alt-w1-unscaled":
        return 0.0, 1.3 * m
    if policy == "alt-w2-unscaled":
        return 1.3 * m, 1.5 * n * M
    raise InvalidParameterError(f"unknown window policy {policy!r}; expected one of {WINDOW_POLICIES}")


def default_threads() -> int:
    env = os.environ.get("SPINLINE_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidParameterError(f"SPINLINE_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise InvalidParameterError("SPINLINE_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


def _critical_record(family, policy, n, d, dt) -> CriticalRecord:
    spec = build_profile(family, n, d)
    window = policy_window(policy, family, n, d)
    res = find_t0(spec, window, dt=dt)
    return CriticalRecord(
        n=n,
        d=d,
        r_max=res.r_max,
        t0=res.t0,
        lambda_min_cr=lambda_min_from_rmax(res.r_max),
        qualifies=res.r_max >= R_CRITICAL - CRITICAL_SLACK,
        window=window,
    )


def critical_length(
    family: str,
    window_policy: str,
    n_range: Sequence[int],
    d_values: Optional[Sequence[float]] = None,
    dt: float = T_STEP,
    threads: Optional[int] = None,
) -> CriticalLengthReport:
    """Largest chain length whose ``r_max`` reaches ``1/sqrt 2``.

    Work is spread over a thread pool; results are gathered in input order,
    so the report does not depend on the worker count.
    """
    if window_policy not in WINDOW_POLICIES:
        raise InvalidParameterError(f"unknown window policy {window_policy!r}")
    if family not in ("homogeneous", "ekert", "alternating"):
        raise InvalidParameterError(f"unknown family {family!r}")
    n_range = [int(n) for n in n_range]
    if not n_range:
        raise InvalidParameterError("n_range is empty")
    if family == "alternating":
        d_values = list(DEFAULT_D_VALUES if d_values is None else d_values)
        if not d_values:
            raise InvalidParameterError("alternating family needs at least one d value")
    else:
        d_values = [None]
    if window_policy != "standard" and family != "alternating":
        raise InvalidParameterError(f"window policy {window_policy!r} applies to alternating chains only")

    tasks = [(n, d) for d in d_values for n in n_range]
    workers = threads or default_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda nd: _critical_record(family, window_policy, nd[0], nd[1], dt), tasks))
    else:
        records = [_critical_record(family, window_policy, n, d, dt) for n, d in tasks]

    by_d = []
    for d in d_values:
        ok = [r.n for r in records if r.d == d and r.qualifies]
        by_d.append((d, max(ok) if ok else None))
    found = [nc for _, nc in by_d if nc is not None]
    return CriticalLengthReport(
        family=family,
        window=window_policy,
        records=tuple(records),
        n_c=max(found) if found else None,
        n_c_by_d=tuple(by_d),
    )


def q_bounds(p1: complex, p2: complex, phases: str = "fixed") -> Tuple[float, float]:
    """Range ``[q_min, q_max]`` of ``R`` over ``alpha2`` in [0, 1]."""
    r1, r2 = abs(p1), abs(p2)
    if phases == "matched":
        # cos(theta) r1 + sin(theta) r2 peaks at theta = atan2(r2, r1), inside [0, pi/2]
        return float(min(r1, r2)), float(math.hypot(r1, r2))
    if phases != "fixed":
        raise InvalidParameterError(f"phases must be one of {PHASE_MODES}, got {phases!r}")
    # R^2(u) = A + B cos u + C sin u with u = alpha2 * pi running over [0, pi]
    A = 0.5 * (r1**2 + r2**2)
    B = 0.5 * (r1**2 - r2**2)
    C = (p1 * np.conj(p2)).real
    rho = math.hypot(B, C)
    u_max = math.atan2(C, B)
    u_min = u_max - math.pi if u_max > 0 else u_max + math.pi
    ends = (r1**2, r2**2)
    hi = A + rho if 0.0 <= u_max <= math.pi else max(ends)
    lo = A - rho if 0.0 <= u_min <= math.pi else min(ends)
    return float(math.sqrt(max(lo, 0.0))), float(math.sqrt(max(hi, 0.0)))


def selective_bounds(
    spec: ChainSpec, t: float, phases: str = "fixed", sd: Optional[SpectralDecomposition] = None
) -> Tuple[float, float]:
    """``(q_min, q_max)`` of ``R`` at registration time ``t``.

    The default keeps the sender phases fixed, matching braids gridded by
    the alphas alone; ``phases="matched"`` gives the phase-matched range.
    """
    if t < 0:
        raise InvalidParameterError("time must be non-negative")
    sd = _resolve(spec, sd)
    return q_bounds(*_receiver_moduli(sd, t), phases=phases)


@dataclass(frozen=True)
class SelectiveReport:
    entries: Tuple[Tuple[ChainSpec, float], ...]
    bounds: Tuple[Tuple[float, float], ...]
    disjoint: Tuple[Tuple[bool, ...], ...]
    phases: str

    @property
    def all_disjoint(self) -> bool:
        k = len(self.bounds)
        return all(self.disjoint[i][j] for i in range(k) for j in range(k) if i != j)

    def to_dict(self) -> dict:
        return {
            "phases": self.phases,
            "entries": [
                {"chain": spec.to_dict(), "t": t, "q_min": b[0], "q_max": b[1]}
                for (spec, t), b in zip(self.entries, self.bounds)
            ],
            "disjoint": [list(row) for row in self.disjoint],
            "all_disjoint": self.all_disjoint,
        }


def intervals_disjoint(a: Tuple[float, float], b: Tuple[float, float], margin: float = DISJOINT_MARGIN) -> bool:
    return a[0] > b[1] + margin or b[0] > a[1] + margin


def selective_suite(entries: Sequence[Tuple[ChainSpec, float]], phases: str = "fixed") -> SelectiveReport:
    """Pairwise disjointness of the ``R`` ranges of several (chain, time) pairs.

    Every braid contains the point ``(lambda, beta1) = (1, 0)`` (reached at
    ``alpha1 = 1``); that shared point is ignored by comparing ``R`` ranges.
    """
    entries = [(spec, float(t)) for spec, t in entries]
    if len(entries) < 2:
        raise InvalidParameterError("need at least two entries to compare")
    cache: Dict[ChainSpec, SpectralDecomposition] = {}
    bounds = []
    for spec, t in entries:
        if spec not in cache:
            cache[spec] = decompose_chain(spec)
        bounds.append(selective_bounds(spec, t, phases=phases, sd=cache[spec]))
    k = len(bounds)
    disjoint = tuple(
        tuple(False if i == j else intervals_disjoint(bounds[i], bounds[j]) for j in range(k)) for i in range(k)
    )
    return SelectiveReport(tuple(entries), tuple(bounds), disjoint, phases)
