"""Command-line harness: parameter scans, oracle checks, and the circuit mapper.

One JSON config document drives the scan subcommands; every field can also be
overridden from flags.  Output is plot-ready CSV or JSON with a stable column
order and 17-significant-digit floats so regenerated files diff cleanly.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, replace

import numpy as np

from .dynamics import (
    OscillatorParams,
    UnstableParamsError,
    critical_coupling,
    normal_mode_frequencies,
    rwa_block,
    time_evolution,
)
from .fockoracle import FockOracle, TruncationError
from .metrics import delta_n, fidelity_eff
from .perturbation import PerturbativeRegime, c2_coefficient, convergence_order, ladder_regimes, vacuum_perturbative_fidelity
from .states import InitialState, NonPhysicalStateError

__all__ = [
    "ConfigError",
    "ScanConfig",
    "ScanSummary",
    "run_scan",
    "CircuitParams",
    "FrameReport",
    "circuit_map",
    "collective_coupling",
    "main",
]

CORE_OUTPUTS = ("fidelity", "bures", "delta_n", "r_plus", "r_minus")
KNOWN_OUTPUTS = CORE_OUTPUTS + ("c2_prediction",)
ORACLE_OUTPUTS = ("fidelity_oracle", "delta_n_oracle")


class ConfigError(ValueError):
    """Invalid scan configuration, with field-level diagnostics."""


@dataclass(frozen=True)
class ScanConfig:
    """Everything one fidelity scan needs; serializes to a flat JSON document."""

    params: OscillatorParams
    initial_state: InitialState = InitialState("vacuum")
    tau_start: float = 0.0
    tau_end: float = 10.0
    steps: int = 101
    outputs: tuple[str, ...] = CORE_OUTPUTS
    oracle_enabled: bool = False
    cutoff: int = 40
    output_path: str = "scan.csv"
    fmt: str = "csv"

    def __post_init__(self):
        problems = []
        if self.tau_end <= self.tau_start:
            problems.append("tau_grid: end must exceed start")
        if self.steps < 2:
            problems.append("tau_grid: steps must be at least 2")
        for name in self.outputs:
            if name not in KNOWN_OUTPUTS:
                problems.append(f"outputs: unrecognized quantity {name!r}")
        if self.initial_state.kind not in ("vacuum", "squeezed"):
            problems.append("initial_state: scans accept vacuum or squeezed only")
        if self.fmt not in ("csv", "json"):
            problems.append("format: must be csv or json")
        if not (1 <= self.cutoff <= 96):
            problems.append("oracle: cutoff must be in [1, 96]")
        if "c2_prediction" in self.outputs:
            p = self.params
            if not (p.equal_couplings and p.resonant and 0.0 < p.g_bs / p.omega_a < 0.5):
                problems.append("outputs: c2_prediction needs resonant equal couplings with 0 < g/omega < 0.5")
        if problems:
            raise ConfigError("; ".join(problems))

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        state: dict = {"kind": self.initial_state.kind}
        if self.initial_state.kind == "squeezed":
            state["s"] = self.initial_state.s
        return {
            "params": {
                "omega_a": self.params.omega_a,
                "omega_b": self.params.omega_b,
                "g_bs": self.params.g_bs,
                "g_sq": self.params.g_sq,
            },
            "initial_state": state,
            "tau_grid": {"start": self.tau_start, "end": self.tau_end, "steps": self.steps},
            "outputs": list(self.outputs),
            "oracle": {"enabled": self.oracle_enabled, "cutoff": self.cutoff},
            "output_path": self.output_path,
            "format": self.fmt,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ScanConfig":
        try:
            pdoc = doc.get("params", {})
            params = OscillatorParams(
                omega_a=float(pdoc["omega_a"]),
                omega_b=float(pdoc["omega_b"]),
                g_bs=float(pdoc.get("g_bs", 0.0)),
                g_sq=float(pdoc.get("g_sq", 0.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"params: missing field {exc}") from exc
        sdoc = doc.get("initial_state", {"kind": "vacuum"})
        if isinstance(sdoc, str):
            sdoc = {"kind": sdoc}
        initial = InitialState(kind=sdoc.get("kind", "vacuum"), s=float(sdoc.get("s", 0.0)))
        grid = doc.get("tau_grid", {})
        oracle = doc.get("oracle", {})
        return ScanConfig(
            params=params,
            initial_state=initial,
            tau_start=float(grid.get("start", 0.0)),
            tau_end=float(grid.get("end", 10.0)),
            steps=int(grid.get("steps", 101)),
            outputs=tuple(doc.get("outputs", CORE_OUTPUTS)),
            oracle_enabled=bool(oracle.get("enabled", False)),
            cutoff=int(oracle.get("cutoff", 40)),
            output_path=str(doc.get("output_path", "scan.csv")),
            fmt=str(doc.get("format", "csv")),
        )

    @staticmethod
    def from_json(text: str) -> "ScanConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return ScanConfig.from_dict(doc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class ScanSummary:
    min_fidelity: float
    max_abs_delta_n: float
    regime_flags: tuple[str, ...]

    def line(self) -> str:
        flags = ",".join(self.regime_flags) if self.regime_flags else "none"
        return (
            f"min_fidelity={self.min_fidelity:.12g} "
            f"max_abs_delta_n={self.max_abs_delta_n:.12g} regime_flags={flags}"
        )


def _columns(cfg: ScanConfig) -> list[str]:
    cols = ["tau"] + [name for name in KNOWN_OUTPUTS if name in cfg.outputs]
    if cfg.oracle_enabled:
        cols += list(ORACLE_OUTPUTS)
    return cols


def _regime_flags(cfg: ScanConfig) -> tuple[str, ...]:
    p = cfg.params
    g_tilde = p.g_bs / p.omega_a
    if not (p.equal_couplings and p.resonant and 0.0 < g_tilde < 0.5):
        return ("outside-perturbative-family",)
    regime = PerturbativeRegime(g_tilde=g_tilde, tau=cfg.tau_end, s=cfg.initial_state.s)
    return regime.flags


def run_scan(cfg: ScanConfig) -> tuple[list[dict], ScanSummary]:
    """Evaluate the grid, write the output file, and return rows plus summary."""
    p = cfg.params
    factor = cfg.initial_state.factor()
    taus = np.linspace(cfg.tau_start, cfg.tau_end, cfg.steps)
    oracle = FockOracle(p, cfg.cutoff) if cfg.oracle_enabled else None
    g_tilde = p.g_bs / p.omega_a

    rows = []
    for tau in taus:
        t = tau / p.omega_a
        report = fidelity_eff(factor, p, t)
        row = {
            "tau": float(tau),
            "fidelity": report.fidelity,
            "bures": report.bures,
            "delta_n": delta_n(factor, p, t),
            "r_plus": report.r_plus,
            "r_minus": report.r_minus,
        }
        if "c2_prediction" in cfg.outputs:
            regime = PerturbativeRegime(g_tilde=g_tilde, tau=float(tau), s=cfg.initial_state.s)
            row["c2_prediction"] = float(1.0 / np.sqrt(1.0 + c2_coefficient(regime) * g_tilde**2))
        if oracle is not None:
            point = oracle.compare(cfg.initial_state, t)
            row["fidelity_oracle"] = point.fidelity
            row["delta_n_oracle"] = point.delta_n
        rows.append({k: row[k] for k in _columns(cfg)})

    summary = ScanSummary(
        min_fidelity=min(r["fidelity"] for r in rows) if "fidelity" in cfg.outputs else float("nan"),
        max_abs_delta_n=max(abs(r["delta_n"]) for r in rows) if "delta_n" in cfg.outputs else float("nan"),
        regime_flags=_regime_flags(cfg),
    )
    _write_output(cfg, rows, summary)
    return rows, summary


def _write_output(cfg: ScanConfig, rows: list[dict], summary: ScanSummary):
    cols = _columns(cfg)
    if cfg.fmt == "csv":
        with open(cfg.output_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for row in rows:
                writer.writerow([f"{row[c]:.17g}" for c in cols])
    else:
        doc = {"config": cfg.to_dict(), "rows": rows, "summary": asdict(summary)}
        with open(cfg.output_path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def collective_coupling(n_systems: int, g_single: float) -> float:
    """Effective coupling of n identical emitters to a common mode: sqrt(n) * g."""
    if int(n_systems) != n_systems or n_systems < 1:
        raise ValueError("the number of coupled systems must be a positive integer")
    return float(np.sqrt(n_systems) * g_single)


# -- superconducting-circuit frame mapper ---------------------------------


@dataclass(frozen=True)
class CircuitParams:
    """Lab-frame circuit with two pumps on a (a + a+)(b + b+) interaction."""

    epsilon_a: float
    epsilon_b: float
    pump_sq_amp: float = 0.0
    pump_sq_freq: float = 0.0
    pump_bs_amp: float = 0.0
    pump_bs_freq: float = 0.0

    def __post_init__(self):
        if self.epsilon_a <= 0 or self.epsilon_b <= 0:
            raise ValueError("lab-frame oscillator frequencies must be positive")
        if self.pump_sq_freq < 0 or self.pump_bs_freq < 0:
            raise ValueError("pump frequencies must be nonnegative")


@dataclass(frozen=True)
class FrameReport:
    """Outcome of the doubly-rotating-frame reduction."""

    params: OscillatorParams
    frame_shift_a: float
    frame_shift_b: float
    dropped_terms: tuple[tuple[str, float], ...]
    min_dropped_frequency: float
    regime: str = "weak"
    warnings: tuple[str, ...] = ()


def circuit_map(c: CircuitParams) -> FrameReport:
    """Map the pumped lab-frame circuit onto the static two-oscillator model.

    The frame rotates mode a at epsilon_a - omega_a and mode b at
    epsilon_b - omega_b.  Matching the pump frequencies to the frame
    (bs pump at the difference, sq pump at the sum of the rotation rates)
    fixes the frame shifts, the static couplings are half the pump
    amplitudes, and every non-matching combination is reported as a dropped
    oscillatory term with its frequency.
    """
    shift_a = 0.5 * (c.pump_sq_freq + c.pump_bs_freq)
    shift_b = 0.5 * (c.pump_sq_freq - c.pump_bs_freq)
    omega_a = c.epsilon_a - shift_a
    omega_b = c.epsilon_b - shift_b
    if omega_a <= 0 or omega_b <= 0:
        raise UnstableParamsError(
            f"frame detunings must be positive, got omega_a={omega_a:.6g}, omega_b={omega_b:.6g}"
        )
    params = OscillatorParams(omega_a, omega_b, g_bs=c.pump_bs_amp / 2.0, g_sq=c.pump_sq_amp / 2.0)

    op_phase = {"ab+": -(shift_a - shift_b), "a+b": shift_a - shift_b, "ab": -(shift_a + shift_b), "a+b+": shift_a + shift_b}
    kept = {("bs", "ab+", +1), ("bs", "a+b", -1), ("sq", "ab", +1), ("sq", "a+b+", -1)}
    dropped = []
    warnings = []
    for pump, freq, amp in (("bs", c.pump_bs_freq, c.pump_bs_amp), ("sq", c.pump_sq_freq, c.pump_sq_amp)):
        if amp == 0.0:
            continue
        for op, phase in op_phase.items():
            for sign in (+1, -1):
                if (pump, op, sign) in kept:
                    continue
                nu = phase + sign * freq
                dropped.append((f"{pump}-pump {op}", float(nu)))
                if abs(nu) < 1e-9 * max(c.epsilon_a, c.epsilon_b):
                    warnings.append(f"dropped term {pump}-pump {op} is static; the frame reduction is invalid")
    min_freq = min((abs(nu) for _, nu in dropped), default=float("inf"))
    # detunings can sit at the same scale as the pump couplings: that is the
    # arbitrary-coupling regime this frame construction is built to reach
    ratio = max(abs(params.g_bs), abs(params.g_sq)) / np.sqrt(omega_a * omega_b)
    return FrameReport(
        params=params,
        frame_shift_a=shift_a,
        frame_shift_b=shift_b,
        dropped_terms=tuple(dropped),
        min_dropped_frequency=float(min_freq),
        regime="arbitrary-coupling" if ratio >= 0.1 else "weak-coupling",
        warnings=tuple(warnings),
    )


# -- argument parsing -------------------------------------------------------


def _add_common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--output", help="output file path")
    sub.add_argument("--format", choices=["csv", "json"], dest="fmt")
    sub.add_argument("--omega-a", type=float)
    sub.add_argument("--omega-b", type=float)
    sub.add_argument("--g", type=float, help="sets both couplings equal")
    sub.add_argument("--g-bs", type=float)
    sub.add_argument("--g-sq", type=float)
    sub.add_argument("--squeezing", type=float, help="initial squeezed-pair parameter; omit for vacuum")
    sub.add_argument("--tau-start", type=float)
    sub.add_argument("--tau-end", type=float)
    sub.add_argument("--steps", type=int)
    sub.add_argument("--cutoff", type=int)
    sub.add_argument("--oracle", action="store_true", help="add oracle columns to the scan")


def _config_from_args(args) -> ScanConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = ScanConfig.from_json(fh.read())
    else:
        cfg = ScanConfig(params=OscillatorParams(1.0, 1.0, 0.05, 0.05))

    pdoc = {
        "omega_a": cfg.params.omega_a,
        "omega_b": cfg.params.omega_b,
        "g_bs": cfg.params.g_bs,
        "g_sq": cfg.params.g_sq,
    }
    if args.omega_a is not None:
        pdoc["omega_a"] = args.omega_a
    if args.omega_b is not None:
        pdoc["omega_b"] = args.omega_b
    if args.g is not None:
        pdoc["g_bs"] = pdoc["g_sq"] = args.g
    if args.g_bs is not None:
        pdoc["g_bs"] = args.g_bs
    if args.g_sq is not None:
        pdoc["g_sq"] = args.g_sq
    params = OscillatorParams(**pdoc)

    updates: dict = {"params": params}
    if args.squeezing is not None:
        updates["initial_state"] = (
            InitialState("squeezed", s=args.squeezing) if args.squeezing != 0.0 else InitialState("vacuum")
        )
    if args.tau_start is not None:
        updates["tau_start"] = args.tau_start
    if args.tau_end is not None:
        updates["tau_end"] = args.tau_end
    if args.steps is not None:
        updates["steps"] = args.steps
    if args.cutoff is not None:
        updates["cutoff"] = args.cutoff
    if args.oracle:
        updates["oracle_enabled"] = True
    if args.output is not None:
        updates["output_path"] = args.output
    if args.fmt is not None:
        updates["fmt"] = args.fmt
    return replace(cfg, **updates)


def _fmt_block(m: np.ndarray) -> str:
    lines = []
    for row in m:
        lines.append("  [" + ", ".join(f"{z.real:+.12g}{z.imag:+.12g}j" for z in row) + "]")
    return "\n".join(lines)


def _cmd_validity(args) -> int:
    cfg = _config_from_args(args)  # raises on instability
    p = cfg.params
    kp, km = normal_mode_frequencies(p)
    print(f"params: omega_a={p.omega_a} omega_b={p.omega_b} g_bs={p.g_bs} g_sq={p.g_sq}")
    print(f"normal modes: kappa_plus={kp:.12g} kappa_minus={km:.12g}")
    print(f"critical coupling along this ray: {critical_coupling(p):.12g}")
    print("stability: ok")
    return 0


def _cmd_evolve(args) -> int:
    cfg = _config_from_args(args)
    p = cfg.params
    tau = cfg.tau_start
    t = tau / p.omega_a
    s = time_evolution(p, t)
    u = rwa_block(p, t)
    print(f"tau={tau:.12g} (t={t:.12g})")
    print("full evolution block A(t):")
    print(_fmt_block(s.alpha))
    print("full evolution block B(t):")
    print(_fmt_block(s.beta))
    print("rwa evolution block:")
    print(_fmt_block(u))
    return 0


def _cmd_fidelity_scan(args) -> int:
    cfg = _config_from_args(args)
    _, summary = run_scan(cfg)
    print(f"wrote {cfg.output_path} ({cfg.fmt}, {cfg.steps} rows)")
    print(summary.line())
    return 0


def _cmd_perturbative_compare(args) -> int:
    cfg = _config_from_args(args)
    p = cfg.params
    if not (p.equal_couplings and p.resonant):
        raise ConfigError("perturbative-compare needs resonant equal couplings")
    g = p.g_bs / p.omega_a
    s = cfg.initial_state.s
    ladder = [g, g / 2.0, g / 4.0]
    slope = convergence_order(ladder_regimes(ladder, g_tau=g * cfg.tau_end, s=s))
    print(f"coupling ladder: {ladder}")
    print(f"fitted order of 1 - F in g: {slope:.3f} (expected 2)")
    if s == 0.0:
        worst = 0.0
        for tau in np.linspace(cfg.tau_start, cfg.tau_end, cfg.steps):
            regime = PerturbativeRegime(g_tilde=g, tau=float(tau))
            exact = fidelity_eff(cfg.initial_state.factor(), p, tau / p.omega_a).fidelity
            worst = max(worst, abs(exact - vacuum_perturbative_fidelity(regime)))
        print(f"max |F_exact - F_perturbative| on the grid: {worst:.3e}")
    return 0


def _cmd_oracle_check(args) -> int:
    cfg = _config_from_args(args)
    cfg = replace(cfg, oracle_enabled=True)
    rows, summary = run_scan(cfg)
    worst_f = max(abs(r["fidelity"] - r["fidelity_oracle"]) for r in rows)
    worst_n = max(abs(r["delta_n"] - r["delta_n_oracle"]) for r in rows)
    print(f"wrote {cfg.output_path} ({cfg.steps} rows, cutoff {cfg.cutoff})")
    print(f"max |fidelity - oracle| = {worst_f:.3e}")
    print(f"max |delta_n - oracle| = {worst_n:.3e}")
    print(summary.line())
    return 0


def _cmd_circuit_map(args) -> int:
    circuit = CircuitParams(
        epsilon_a=args.epsilon_a,
        epsilon_b=args.epsilon_b,
        pump_sq_amp=args.pump_sq_amp,
        pump_sq_freq=args.pump_sq_freq,
        pump_bs_amp=args.pump_bs_amp,
        pump_bs_freq=args.pump_bs_freq,
    )
    report = circuit_map(circuit)
    p = report.params
    print(f"frame shifts: mode a {report.frame_shift_a:.12g}, mode b {report.frame_shift_b:.12g}")
    print(f"effective params: omega_a={p.omega_a:.12g} omega_b={p.omega_b:.12g} g_bs={p.g_bs:.12g} g_sq={p.g_sq:.12g}")
    print(f"critical coupling along this ray: {critical_coupling(p):.12g}")
    print(f"regime: {report.regime}")
    if report.dropped_terms:
        print("dropped oscillatory terms (frequency):")
        for label, nu in report.dropped_terms:
            print(f"  {label}: {nu:+.12g}")
        print(f"slowest dropped frequency: {report.min_dropped_frequency:.12g}")
    else:
        print("dropped oscillatory terms: none (pumps off)")
    for w in report.warnings:
        print(f"warning: {w}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwafidelity",
        description="Quantify the accuracy of the rotating wave approximation for two coupled oscillators.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("validity", _cmd_validity, "check parameter stability and print normal modes"),
        ("evolve", _cmd_evolve, "print the evolution blocks at one time"),
        ("fidelity-scan", _cmd_fidelity_scan, "scan fidelity and related quantities over a tau grid"),
        ("perturbative-compare", _cmd_perturbative_compare, "fit the small-coupling convergence order"),
        ("oracle-check", _cmd_oracle_check, "compare against the truncated Fock-space oracle"),
    ):
        sub = subs.add_parser(name, help=helptext)
        _add_common_flags(sub)
        sub.set_defaults(fn=fn)
    sub = subs.add_parser("circuit-map", help="map a pumped circuit to effective oscillator parameters")
    sub.add_argument("--epsilon-a", type=float, required=True)
    sub.add_argument("--epsilon-b", type=float, required=True)
    sub.add_argument("--pump-sq-amp", type=float, default=0.0)
    sub.add_argument("--pump-sq-freq", type=float, default=0.0)
    sub.add_argument("--pump-bs-amp", type=float, default=0.0)
    sub.add_argument("--pump-bs-freq", type=float, default=0.0)
    sub.set_defaults(fn=_cmd_circuit_map)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, UnstableParamsError, NonPhysicalStateError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (TruncationError, ArithmeticError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
