"""``qcorr`` command line: time sweeps of correlation measures written as CSV."""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import measures as qm
from .errors import ConfigError, NumericalError, PhysicalityError, UnknownPreset
from .evolution import BACKENDS, evolve_series, steady_state
from .hamiltonian import ModelParams, eigensystem
from .states import BellDiagonalSpec, WernerSpec, bell_diagonal, elements_from_density, werner

MEASURES = qm.MEASURES
ORACLE_TOL = {"concurrence": 1e-10, "lqu": 1e-4, "tdd": 2e-3, "uin": 1e-4}

_BELL_FIG = ("bell-diagonal", (0.9, -0.4, 0.4))

PRESETS = {
    "fig1a": dict(state=_BELL_FIG, mu=1.6, field_b=0.25, gamma=0.1),
    "fig1b": dict(state=_BELL_FIG, mu=1.6, field_b=0.55, gamma=0.1),
    "fig2a": dict(state=_BELL_FIG, mu=1.1, field_b=0.3, gamma=0.01),
    "fig2b": dict(state=_BELL_FIG, mu=2.0, field_b=0.3, gamma=0.01),
    "fig3a": dict(state=_BELL_FIG, mu=1.6, field_b=0.6, gamma=0.1),
    "fig3b": dict(state=_BELL_FIG, mu=1.6, field_b=0.6, gamma=0.25),
    "fig4a": dict(state=("werner", (0.9,)), mu=2.0, field_b=0.6, gamma=0.01),
    "fig4b": dict(state=("werner", (0.9,)), mu=2.0, field_b=0.6, gamma=0.1),
    "fig5a": dict(state=("werner", (0.9,)), mu=1.0, field_b=2.0, gamma=0.01),
    "fig5b": dict(state=("werner", (0.5,)), mu=1.0, field_b=2.0, gamma=0.01),
    "fig6a": dict(state=("werner", (0.9,)), mu=2.0, field_b=1.5, gamma=0.01),
    "fig6b": dict(state=("werner", (0.5,)), mu=2.0, field_b=1.5, gamma=0.01),
}


@dataclass(frozen=True)
class SweepConfig:
    state: str
    state_params: tuple[float, ...]
    mu: float
    field_b: float
    gamma: float
    zeta: float = 0.0
    gamma_xy: float = 0.0
    t_max: float = 30.0
    t_steps: int = 600
    measures: tuple[str, ...] = MEASURES
    scale_factors: dict = field(default_factory=dict)
    oracle_check: bool = False
    backend: str = "spectral"
    n_grid: int = 2048
    dt: float = 1e-3
    jobs: int = 1

    def __post_init__(self):
        if self.state not in ("bell-diagonal", "werner"):
            raise ConfigError(f"state must be 'bell-diagonal' or 'werner', got {self.state!r}")
        want = 3 if self.state == "bell-diagonal" else 1
        if len(self.state_params) != want:
            raise ConfigError(f"{self.state} state takes {want} parameter(s)")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError(f"t_max must be > 0, got {self.t_max!r}")
        if self.t_steps < 2:
            raise ConfigError(f"t_steps must be >= 2, got {self.t_steps}")
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown or not self.measures:
            raise ConfigError(f"measures must be a non-empty subset of {', '.join(MEASURES)}")
        bad_scale = [k for k in self.scale_factors if k not in MEASURES]
        if bad_scale:
            raise ConfigError(f"scale factor given for unknown measure(s): {', '.join(bad_scale)}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {', '.join(BACKENDS)}, got {self.backend!r}")
        if self.n_grid < 64:
            raise ConfigError(f"n_grid must be >= 64, got {self.n_grid}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        self.model_params()
        self.initial_state()

    def model_params(self) -> ModelParams:
        return ModelParams(self.mu, self.field_b, self.zeta, self.gamma_xy)

    def initial_state(self) -> np.ndarray:
        if self.state == "werner":
            return werner(WernerSpec(*self.state_params))
        return bell_diagonal(BellDiagonalSpec(*self.state_params))

    def times(self) -> list[float]:
        n = self.t_steps - 1
        return [k * self.t_max / n for k in range(self.t_steps)]

    def ordered_measures(self) -> list[str]:
        return [m for m in MEASURES if m in self.measures]


@dataclass
class CorrelationRecord:
    t: float
    values: dict[str, float]
    oracle: dict[str, float] = field(default_factory=dict)

    def deltas(self) -> dict[str, float]:
        return {m: abs(self.values[m] - self.oracle[m]) for m in self.oracle}


def figure_preset(name: str) -> SweepConfig:
    """Sweep configuration for one of the twelve named presets (``fig1a`` .. ``fig6b``)."""
    try:
        p = PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; valid: {', '.join(PRESETS)}") from None
    kind, params = p["state"]
    return SweepConfig(kind, params, p["mu"], p["field_b"], p["gamma"])


def evaluate(
    rho: np.ndarray, names: list[str], oracle: bool = False, n_grid: int = 2048
) -> tuple[dict[str, float], dict[str, float]]:
    """Closed-form values (and optionally brute-force values) of the named measures."""
    x = elements_from_density(rho) if {"concurrence", "tdd"} & set(names) else None
    closed = {}
    checks = {}
    for m in names:
        if m == "concurrence":
            closed[m] = qm.concurrence_x(x).value
            if oracle:
                checks[m] = qm.concurrence(rho).value
        elif m == "lqu":
            closed[m] = qm.lqu(rho).value
            if oracle:
                checks[m] = qm.lqu_bruteforce(rho, n_grid).value
        elif m == "tdd":
            closed[m] = qm.tdd_x(x).value
            if oracle:
                checks[m] = qm.tdd_bruteforce(rho, n_grid).value
        elif m == "uin":
            closed[m] = qm.uin(rho).value
            if oracle:
                checks[m] = qm.uin_bruteforce(rho, n_grid).value
    return closed, checks


def _evaluate_chunk(args):
    rhos, names, oracle, n_grid = args
    return [evaluate(rho, names, oracle, n_grid) for rho in rhos]


def run_sweep(cfg: SweepConfig) -> list[CorrelationRecord]:
    times = cfg.times()
    rhos = evolve_series(cfg.model_params(), cfg.initial_state(), cfg.gamma, times, cfg.backend, cfg.dt)
    names = cfg.ordered_measures()
    if cfg.jobs == 1:
        results = _evaluate_chunk((rhos, names, cfg.oracle_check, cfg.n_grid))
    else:
        chunks = np.array_split(np.arange(len(times)), cfg.jobs)
        tasks = [(rhos[idx], names, cfg.oracle_check, cfg.n_grid) for idx in chunks if len(idx)]
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = [r for part in pool.map(_evaluate_chunk, tasks) for r in part]
    return [CorrelationRecord(t, closed, checks) for t, (closed, checks) in zip(times, results)]


def steady_state_report(cfg: SweepConfig) -> CorrelationRecord:
    """Measures of the ``t -> infinity`` state (recorded with ``t = inf``)."""
    if not cfg.gamma > 0:
        raise ConfigError("the steady state needs gamma > 0")
    rho = steady_state(eigensystem(cfg.model_params()), cfg.initial_state())
    closed, checks = evaluate(rho, cfg.ordered_measures(), cfg.oracle_check, cfg.n_grid)
    return CorrelationRecord(math.inf, closed, checks)


def oracle_summary(records: list[CorrelationRecord]) -> dict[str, float]:
    worst: dict[str, float] = {}
    for rec in records:
        for m, d in rec.deltas().items():
            worst[m] = max(worst.get(m, 0.0), d)
    return worst


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def write_csv(records: list[CorrelationRecord], cfg: SweepConfig, out) -> None:
    names = cfg.ordered_measures()
    cols = ["t", *names]
    if cfg.oracle_check:
        cols += [f"{m}_bf" for m in names]
    out.write(",".join(cols) + "\n")
    for rec in records:
        row = [_fmt(rec.t)]
        row += [_fmt(rec.values[m] * cfg.scale_factors.get(m, 1.0)) for m in names]
        if cfg.oracle_check:
            row += [_fmt(rec.oracle[m] * cfg.scale_factors.get(m, 1.0)) for m in names]
        out.write(",".join(row) + "\n")


# -- argument handling --------------------------------------------------------

# flag name -> (SweepConfig field, converter)
_FIELDS = {
    "mu": ("mu", float),
    "B": ("field_b", float),
    "gamma": ("gamma", float),
    "zeta": ("zeta", float),
    "Gamma-xy": ("gamma_xy", float),
    "t-max": ("t_max", float),
    "t-steps": ("t_steps", int),
    "backend": ("backend", str),
    "n-grid": ("n_grid", int),
    "dt": ("dt", float),
    "jobs": ("jobs", int),
}
_STATE_KEYS = ("state", "c1", "c2", "c3", "r")
_BOOL_KEYS = ("oracle-check", "steady-state")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_scale(text: str) -> dict[str, float]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"scale entries look like name=factor, got {item!r}")
        out[name.strip()] = float(val)
    return out


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key=value`` file; keys are the long flag names without dashes prefix."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("_", "-")] = val.strip()
    return values


def build_config(opts: dict[str, str]) -> tuple[SweepConfig, bool]:
    """Turn merged string options into a :class:`SweepConfig` plus the steady-state flag."""
    opts = dict(opts)
    try:
        cfg = figure_preset(opts.pop("preset")) if "preset" in opts else None
        base = {}
        state = opts.get("state")
        if state is not None or any(k in opts for k in ("c1", "c2", "c3", "r")):
            kind = state or (cfg.state if cfg else None)
            if kind == "werner":
                r = opts.get("r", cfg.state_params[0] if cfg and cfg.state == "werner" else None)
                if r is None:
                    raise ConfigError("werner state needs --r")
                base.update(state="werner", state_params=(float(r),))
            elif kind == "bell-diagonal":
                prev = cfg.state_params if cfg and cfg.state == "bell-diagonal" else (None,) * 3
                cs = tuple(opts.get(k, p) for k, p in zip(("c1", "c2", "c3"), prev))
                if any(c is None for c in cs):
                    raise ConfigError("bell-diagonal state needs --c1, --c2 and --c3")
                base.update(state="bell-diagonal", state_params=tuple(float(c) for c in cs))
            else:
                raise ConfigError(f"--state must be bell-diagonal or werner, got {kind!r}")
        for key, (name, conv) in _FIELDS.items():
            if key in opts:
                base[name] = conv(opts[key])
        if "measures" in opts:
            base["measures"] = tuple(m.strip() for m in opts["measures"].split(",") if m.strip())
        if "scale" in opts:
            base["scale_factors"] = _parse_scale(opts["scale"])
        if "oracle-check" in opts:
            base["oracle_check"] = _parse_bool(opts["oracle-check"])
        steady = _parse_bool(opts.get("steady-state", "false"))
        if cfg is not None:
            return replace(cfg, **base), steady
        missing = [k for k in ("state", "mu", "field_b", "gamma") if k not in base]
        if missing:
            raise ConfigError(f"missing required option(s): {', '.join(missing)} (or use --preset)")
        return SweepConfig(**base), steady
    except ValueError as exc:
        if isinstance(exc, (ConfigError, PhysicalityError)):
            raise
        raise ConfigError(str(exc)) from None


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="evolve a state and write measures versus time as CSV")
    sw.add_argument("--config", help="key=value file; command-line flags take precedence")
    sw.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")
    sw.add_argument("--state", choices=["bell-diagonal", "werner"])
    for name in ("c1", "c2", "c3", "r"):
        sw.add_argument(f"--{name}")
    for flag in _FIELDS:
        sw.add_argument(f"--{flag}", dest=flag)
    sw.add_argument("--measures", help="comma-separated subset of " + ",".join(MEASURES))
    sw.add_argument("--scale", help="output multipliers, e.g. tdd=2,lqu=0.5")
    sw.add_argument("--oracle-check", action="store_const", const="true", dest="oracle-check")
    sw.add_argument("--steady-state", action="store_const", const="true", dest="steady-state")
    sw.add_argument("-o", "--output", help="CSV path (default: stdout)")

    sub.add_parser("presets", help="list the named presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "presets":
        for name in PRESETS:
            cfg = figure_preset(name)
            params = ",".join(format(p, "g") for p in cfg.state_params)
            print(f"{name}: {cfg.state}({params}) mu={cfg.mu:g} B={cfg.field_b:g} gamma={cfg.gamma:g}")
        return 0

    try:
        opts = read_config_file(args.config) if args.config else {}
        for key, val in vars(args).items():
            if key in ("command", "config", "output") or val is None:
                continue
            opts[key] = str(val)
        cfg, steady = build_config(opts)
        records = run_sweep(cfg)
        if steady:
            records.append(steady_state_report(cfg))
    except OSError as exc:
        print(f"qcorr: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"qcorr: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except PhysicalityError as exc:
        print(f"qcorr: unphysical input: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"qcorr: numerical failure: {exc}", file=sys.stderr)
        return 4

    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            write_csv(records, cfg, fh)
    else:
        write_csv(records, cfg, sys.stdout)

    if cfg.oracle_check:
        worst = oracle_summary(records)
        parts = ", ".join(f"{m}={worst[m]:.3e}" for m in cfg.ordered_measures())
        print(f"oracle max |closed - brute force|: {parts}", file=sys.stderr)
        breached = [m for m, d in worst.items() if d > ORACLE_TOL[m]]
        if breached:
            print(f"qcorr: oracle tolerance exceeded for {', '.join(breached)}", file=sys.stderr)
            return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
