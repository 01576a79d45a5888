"""``spinline`` command-line front end.

Every subcommand reads the chain from flags or from a JSON config file
(flags win), runs one analysis and writes CSV or JSON either to stdout or
into ``--out DIR``. Exit status: 0 on success, 1 on invalid input or
unwritable output, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import region, spectral, statemap
from .chain import PROFILES, ChainSpec, build_profile, custom_chain
from .errors import InvalidParameterError, NumericalFailure, SpinlineError

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

# analysis keys accepted by each subcommand, with their defaults
COMMANDS: Dict[str, Dict[str, Any]] = {
    "spectrum": {},
    "amplitudes": {"source": 1, "times": "0:10:0.5", "nodes": None},
    "map": {"t": None, "grid": 101, "phases": "matched"},
    "t0": {"window": None, "dt": region.T_STEP},
    "lambda-min": {"window": None, "dt": region.T_STEP, "check": False, "check_grid": 101},
    "critical-length": {
        "family": "homogeneous",
        "window_policy": "standard",
        "n_range": "2:40",
        "d_values": None,
        "dt": region.T_STEP,
    },
    "select": {"entries": None, "phases": "fixed"},
    "oracle-check": {
        "t": 1.0,
        "alpha1": 0.3,
        "alpha2": 0.4,
        "phi1": 0.1,
        "phi2": 0.6,
        "ode_step": 1e-3,
    },
}
NEEDS_CHAIN = {"spectrum", "amplitudes", "map", "t0", "lambda-min", "oracle-check"}
OUTPUT_NAMES = {
    "spectrum": "spectrum.json",
    "amplitudes": "amplitudes.csv",
    "map": "map.csv",
    "t0": "t0.json",
    "lambda-min": "lambda_min.json",
    "critical-length": "critical_length.json",
    "select": "select.json",
    "oracle-check": "oracle_check.json",
}


class UsageError(SpinlineError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    chain: Optional[ChainSpec]
    analysis: Dict[str, Any]
    out_dir: Optional[Path] = None
    emit_plot_script: bool = False
    threads: Optional[int] = None


def parse_range(text: str, integer: bool = False) -> List[float]:
    """``a:b`` or ``a:b:step`` (inclusive) or a comma list."""
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    elif ":" in str(text):
        parts = [float(p) for p in str(text).split(":")]
        if len(parts) == 2:
            parts.append(1.0)
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise UsageError(f"bad range {text!r}; expected a:b[:step] with a <= b, step > 0")
        count = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1
        values = [round(parts[0] + i * parts[2], 12) for i in range(count)]
    else:
        values = [float(p) for p in str(text).split(",") if p.strip()]
    if integer:
        if any(v != int(v) for v in values):
            raise UsageError(f"expected integers in {text!r}")
        return [int(v) for v in values]
    return values


def parse_window(text) -> Optional[tuple]:
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    else:
        values = [float(v) for v in str(text).split(":")]
    if len(values) != 2:
        raise UsageError(f"window must be lo:hi, got {text!r}")
    return tuple(values)


def _add_chain_args(p):
    p.add_argument("--profile", choices=PROFILES)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--couplings", help="comma-separated D_1..D_{N-1} (custom profile)")


def _add_common(p):
    p.add_argument("--config", type=Path, help="JSON file with chain/analysis/output sections")
    p.add_argument("--out", type=Path, help="directory for output files (default: stdout)")
    p.add_argument("--threads", type=int, help="worker cap (fallback: SPINLINE_THREADS)")
    p.add_argument("--emit-plot-script", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinline", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="eigenvalues/eigenvectors of H_1")
    _add_chain_args(p)

    p = sub.add_parser("amplitudes", help="CSV dump of p_kj(t)")
    _add_chain_args(p)
    p.add_argument("--source", type=int, help="source node j")
    p.add_argument("--times", help="a:b:step or comma list")
    p.add_argument("--nodes", help="comma list of target nodes k")

    p = sub.add_parser("map", help="creatable (lambda, beta1) map on an alpha grid")
    _add_chain_args(p)
    p.add_argument("--t", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--phases", choices=region.PHASE_MODES)

    p = sub.add_parser("t0", help="highest-probability transfer time")
    _add_chain_args(p)
    p.add_argument("--window", help="lo:hi (default 0:1.5N)")
    p.add_argument("--dt", type=float)

    p = sub.add_parser("lambda-min", help="minimal creatable eigenvalue")
    _add_chain_args(p)
    p.add_argument("--window")
    p.add_argument("--dt", type=float)
    p.add_argument("--check", action="store_true", default=None, help="also run the brute-force grid")
    p.add_argument("--check-grid", type=int)

    p = sub.add_parser("critical-length", help="critical chain length over N (and d)")
    p.add_argument("--family", choices=("homogeneous", "ekert", "alternating"))
    p.add_argument("--window-policy", choices=region.WINDOW_POLICIES)
    p.add_argument("--n-range", help="a:b[:step] or comma list")
    p.add_argument("--d-values", help="a:b:step or comma list (alternating)")
    p.add_argument("--dt", type=float)

    p = sub.add_parser("select", help="R ranges and disjointness of (chain, t) entries")
    p.add_argument(
        "--entry",
        action="append",
        dest="entries",
        help="profile:N:t or alternating:N:d:t; repeat for each entry",
    )
    p.add_argument("--phases", choices=region.PHASE_MODES)

    p = sub.add_parser("oracle-check", help="compare against the full-space and RK4 oracles")
    _add_chain_args(p)
    for name in ("t", "alpha1", "alpha2", "phi1", "phi2", "ode_step"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)

    for p in sub.choices.values():
        _add_common(p)
    return parser


def _load_config(path: Optional[Path]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict) or set(data) - {"command", "chain", "analysis", "output"}:
        raise UsageError("config must be an object with chain/analysis/output sections")
    return data


def _chain_from(flags: dict, section: dict) -> ChainSpec:
    merged = dict(section)
    for key in ("profile", "n", "d", "couplings"):
        if flags.get(key) is not None:
            merged[key] = flags[key]
    couplings = merged.get("couplings")
    if isinstance(couplings, str):
        couplings = [float(c) for c in couplings.split(",") if c.strip()]
    profile = merged.get("profile") or ("custom" if couplings else None)
    if profile is None:
        raise UsageError("a chain is required: give --profile and --n, or --couplings")
    if profile == "custom":
        if not couplings:
            raise UsageError("custom profile needs --couplings")
        return custom_chain(couplings)
    if merged.get("n") is None:
        raise UsageError("--n is required for named profiles")
    spec = build_profile(profile, merged["n"], merged.get("d"))
    if couplings is not None and not np.allclose(couplings, spec.couplings, rtol=1e-12, atol=0):
        raise UsageError("explicit couplings contradict the named profile")
    return spec


def resolve_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("missing subcommand; one of " + ", ".join(COMMANDS))
    flags = vars(args)
    cfg = _load_config(flags.get("config"))
    if cfg.get("command") not in (None, args.command):
        raise UsageError(f"config is for {cfg['command']!r}, not {args.command!r}")

    allowed = COMMANDS[args.command]
    analysis = dict(allowed)
    section = cfg.get("analysis", {})
    unknown = set(section) - set(allowed)
    if unknown:
        raise UsageError(f"unknown analysis keys for {args.command}: {sorted(unknown)}")
    analysis.update(section)
    for key in allowed:
        if flags.get(key) is not None:
            analysis[key] = flags[key]

    output = cfg.get("output", {})
    out_dir = flags.get("out") or (Path(output["dir"]) if output.get("dir") else None)
    emit = bool(flags.get("emit_plot_script") or output.get("emit_plot_script", False))
    threads = flags.get("threads")
    if threads is not None and threads < 1:
        raise UsageError("--threads must be >= 1")

    chain = _chain_from(flags, cfg.get("chain", {})) if args.command in NEEDS_CHAIN else None
    return RunConfig(args.command, chain, analysis, out_dir, emit, threads)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def _default_window(spec: ChainSpec, window):
    return parse_window(window) if window is not None else (0.0, 1.5 * spec.n)


def _parse_entry(text) -> tuple:
    if isinstance(text, dict):
        return ChainSpec.from_dict(text["chain"]), float(text["t"])
    parts = str(text).split(":")
    try:
        if parts[0] == "alternating" and len(parts) == 4:
            return build_profile("alternating", int(parts[1]), float(parts[2])), float(parts[3])
        if len(parts) == 3:
            return build_profile(parts[0], int(parts[1])), float(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad entry {text!r}: {exc}") from exc
    raise UsageError(f"bad entry {text!r}; expected profile:N:t or alternating:N:d:t")


def execute(cfg: RunConfig) -> tuple:
    """Run the analysis; returns ``(payload_text, plot_template_or_None)``."""
    a = cfg.analysis
    spec = cfg.chain
    if cfg.command == "spectrum":
        sd = spectral.decompose_chain(spec)
        payload = {
            "chain": spec.to_dict(),
            "eigenvalues": sd.eigenvalues.tolist(),
            "eigenvectors": sd.eigenvectors.tolist(),
        }
        return dumps(payload), None

    if cfg.command == "amplitudes":
        sd = spectral.decompose_chain(spec)
        times = parse_range(a["times"])
        if any(t < 0 for t in times):
            raise InvalidParameterError("times must be non-negative")
        nodes = parse_range(a["nodes"], integer=True) if a["nodes"] is not None else None
        for k in nodes or []:
            if not 1 <= k <= spec.n:
                raise InvalidParameterError(f"node {k} outside 1..{spec.n}")
        return spectral.write_amplitudes_csv(sd, int(a["source"]), times, nodes=nodes), PLOT_AMPLITUDES

    if cfg.command == "map":
        if a["t"] is None:
            raise UsageError("map needs --t")
        rmap = region.creatable_map(spec, float(a["t"]), int(a["grid"]), phases=a["phases"])
        return rmap.to_csv(), PLOT_MAP

    if cfg.command == "t0":
        res = region.find_t0(spec, _default_window(spec, a["window"]), dt=float(a["dt"]))
        return dumps(res.to_dict()), None

    if cfg.command == "lambda-min":
        window = _default_window(spec, a["window"])
        res = region.find_t0(spec, window, dt=float(a["dt"]))
        payload = {
            "chain": spec.to_dict(),
            "window": list(window),
            "t0": res.t0,
            "r_max": res.r_max,
            "lambda_min_cr": region.lambda_min_from_rmax(res.r_max),
        }
        if a["check"]:
            payload["lambda_min_direct"] = region.lambda_min_direct(spec, res.t0, grid_n=int(a["check_grid"]))
        return dumps(payload), None

    if cfg.command == "critical-length":
        d_values = parse_range(a["d_values"]) if a["d_values"] is not None else None
        rep = region.critical_length(
            a["family"],
            a["window_policy"],
            parse_range(a["n_range"], integer=True),
            d_values=d_values,
            dt=float(a["dt"]),
            threads=cfg.threads,
        )
        return dumps(rep.to_dict()), PLOT_CRITICAL

    if cfg.command == "select":
        if not a["entries"]:
            raise UsageError("select needs at least two --entry values")
        rep = region.selective_suite([_parse_entry(e) for e in a["entries"]], phases=a["phases"])
        return dumps(rep.to_dict()), None

    if cfg.command == "oracle-check":
        return dumps(oracle_check(spec, a)), None
    raise UsageError(f"unknown command {cfg.command!r}")


def oracle_check(spec: ChainSpec, a: dict) -> dict:
    t = float(a["t"])
    control = statemap.ControlParams(a["alpha1"], a["alpha2"], a["phi1"], a["phi2"])
    sender = statemap.control_to_sender(control)
    sd = spectral.decompose_chain(spec)
    f0, fN = statemap.receiver_amplitudes(sd, sender, t)
    single = statemap.receiver_density(f0, fN)
    full = spectral.full_hilbert_oracle(spec, sender, t)
    h = spectral.one_excitation_hamiltonian(spec)
    ode_diff = 0.0
    for j in (1, 2):
        ode = spectral.ode_oracle_amplitudes(h, j, t, step=float(a["ode_step"]))
        exact = spectral.propagator_column(sd, j, t)
        ode_diff = max(ode_diff, max(abs(o.value - e) for o, e in zip(ode, exact)))
    density_diff = float(np.abs(full - single).max())
    return {
        "chain": spec.to_dict(),
        "t": t,
        "density_max_abs_diff": density_diff,
        "ode_max_abs_diff": float(ode_diff),
        "passed": bool(density_diff < 1e-9 and ode_diff < 1e-8),
    }


PLOT_MAP = '''"""Plot the creatable-region map written by spinline."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("{data}")))
grid = sorted({{float(r["alpha1"]) for r in rows}})
fig, ax = plt.subplots()
for key, style in (("alpha1", "--"), ("alpha2", "-")):
    for level in grid[:: max(len(grid) // 10, 1)]:
        pts = [r for r in rows if float(r[key]) == level and r["beta1_defined"] == "1"]
        ax.plot([float(r["lambda"]) for r in pts], [float(r["beta1"]) for r in pts], style, lw=0.7)
ax.set_xlabel("lambda")
ax.set_ylabel("beta1")
fig.savefig("map.png", dpi=150)
'''

PLOT_AMPLITUDES = '''"""Plot |p_kj(t)| written by spinline."""
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

series = defaultdict(list)
for r in csv.DictReader(open("{data}")):
    series[int(r["k"])].append((float(r["t"]), float(r["r"])))
fig, ax = plt.subplots()
for k, pts in sorted(series.items()):
    ax.plot(*zip(*pts), label=f"k={{k}}")
ax.set_xlabel("t")
ax.set_ylabel("r_kj")
ax.legend()
fig.savefig("amplitudes.png", dpi=150)
'''

PLOT_CRITICAL = '''"""Plot lambda_min^cr against N from a spinline critical-length report."""
import json
import matplotlib.pyplot as plt

report = json.load(open("{data}"))
fig, ax = plt.subplots()
ds = sorted({{r["d"] for r in report["records"]}}, key=lambda d: (d is None, d))
for d in ds:
    recs = [r for r in report["records"] if r["d"] == d]
    ax.plot([r["n"] for r in recs], [r["lambda_min_cr"] for r in recs], ".", ms=3)
ax.set_xlabel("N")
ax.set_ylabel("lambda_min^cr")
fig.savefig("critical_length.png", dpi=150)
'''


def run(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = resolve_config(argv)
        if cfg.threads is None and os.environ.get("SPINLINE_THREADS"):
            cfg.threads = region.default_threads()
        text, plot = execute(cfg)
        if cfg.out_dir is None:
            if cfg.emit_plot_script:
                raise UsageError("--emit-plot-script needs --out DIR")
            sys.stdout.write(text)
            return EXIT_OK
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        name = OUTPUT_NAMES[cfg.command]
        (cfg.out_dir / name).write_text(text)
        if cfg.emit_plot_script:
            if plot is None:
                raise UsageError(f"no plot script for {cfg.command}")
            (cfg.out_dir / f"plot_{Path(name).stem}.py").write_text(plot.format(data=name))
        return EXIT_OK
    except NumericalFailure as exc:
        print(f"spinline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SpinlineError, ValueError, OSError) as exc:
        print(f"spinline: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
