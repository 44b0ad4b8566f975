"""Command-line front end: run the pipelines, emit reports, spectra, plots.

Subcommands
    enhance-trace   enhancement-vs-time table (CSV, optional SVG)
    effpure         effective-pure-state preparation (JSON report + CSV spectra)
    grover          one or all search cases (JSON report + CSV spectra per case)
    probe           probing experiment on a thermal or enhanced state

Configuration is a flat snake_case JSON file; command-line flags override
file values. Outputs are pure functions of (config, flags, seed): repeat
runs are byte-identical except for the single timestamp field in each
JSON report.

Exit codes: 0 ok, 2 weight-solver failure, 3 decoded answer mismatch,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .experiments import (
    DecodeError,
    DetectionSettings,
    GroverCase,
    effective_pure_report,
    grover_report,
    run_effective_pure_pipeline,
    run_grover_pipeline,
    run_id,
)
from .labeling import SingularLabelingSystem
from .readout import calibrate, integrate_peaks, probe, reconstruct_diagonal, spectrum_to_csv
from .spinoe import ScheduleMode, SpinoeParams, enhancement_at
from .spins import SpinSystemConfig, enhanced_state, thermal_state
from .svg import line_chart

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_DECODE = 3
EXIT_USAGE = 64


@dataclass(frozen=True)
class RunConfig:
    """Flat bag of every tunable, mirroring the JSON config file keys."""

    gamma_ratio: float = 4.0
    j_hz: float = 215.0
    t2_s: float = 0.5
    polarization_unit: float = 1.0
    eps0_h: float = -11.0
    eps0_c: float = 18.0
    t1_xe_s: float = 900.0
    recovery_s: float = 120.0
    r1_s: float = 25.0
    jitter: float = 0.0
    seed: int = 0
    n_points: int = 4096
    dwell_s: float = 0.001
    tip_deg: float = 15.0
    noise_amp: float = 0.0
    mode: str = "single"
    sample_age_s: float = 600.0

    def spin_system(self) -> SpinSystemConfig:
        return SpinSystemConfig(
            gamma_ratio=self.gamma_ratio,
            j_coupling=self.j_hz,
            t2=self.t2_s,
            polarization_unit=self.polarization_unit,
        )

    def spinoe(self) -> SpinoeParams:
        return SpinoeParams(
            eps0_h=self.eps0_h,
            eps0_c=self.eps0_c,
            t1_xe=self.t1_xe_s,
            t1_ch=self.recovery_s / 5.0,
            reproducibility_jitter=self.jitter,
            seed=self.seed,
        )

    def detection(self) -> DetectionSettings:
        return DetectionSettings(
            n_points=self.n_points,
            dwell=self.dwell_s,
            probe_tip_deg=self.tip_deg,
            noise_amp=self.noise_amp,
        )

    def schedule_mode(self) -> ScheduleMode:
        return ScheduleMode.SINGLE_SAMPLE if self.mode == "single" else ScheduleMode.MULTI_SAMPLE

    def echo(self) -> dict:
        return dataclasses.asdict(self)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 64 instead of argparse's default 2
        raise UsageError(message)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    values: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**values)
        cfg.spin_system()
        cfg.spinoe()
        cfg.detection()
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad configuration: {exc}") from exc
    if cfg.mode not in ("single", "multi"):
        raise UsageError("mode must be 'single' or 'multi'")
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def cmd_enhance_trace(cfg: RunConfig, args) -> int:
    out = _out_dir(args)
    if args.duration < 0 or args.step <= 0:
        raise UsageError("duration must be >= 0 and step > 0")
    p = cfg.spinoe()
    times = [i * args.step for i in range(int(args.duration / args.step) + 1)]
    rows = [(t, *enhancement_at(p, t)) for t in times]
    csv_path = out / "enhancement_trace.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_s", "eps_h", "eps_c"])
        for t, eh, ec in rows:
            writer.writerow([repr(float(t)), repr(float(eh)), repr(float(ec))])
    if args.svg:
        line_chart(
            out / "enhancement_trace.svg",
            [r[0] for r in rows],
            {"eps_H": [r[1] for r in rows], "eps_C": [r[2] for r in rows]},
            title="polarization enhancement vs time",
            x_label="time (s)",
            y_label="enhancement",
        )
    print(f"wrote {csv_path}")
    return EXIT_OK


def _dump_spectra(out: Path, stem: str, spec_h, spec_c, svg: bool) -> None:
    spectrum_to_csv(spec_h, out / f"{stem}_h.csv")
    spectrum_to_csv(spec_c, out / f"{stem}_c.csv")
    if svg:
        for spec, ch in ((spec_h, "h"), (spec_c, "c")):
            line_chart(
                out / f"{stem}_{ch}.svg",
                spec.freqs,
                {"real": list(spec.values.real)},
                title=f"{stem} {ch.upper()} channel",
                x_label="frequency (Hz)",
                y_label="signal",
            )


def cmd_effpure(cfg: RunConfig, args) -> int:
    out = _out_dir(args)
    run = run_effective_pure_pipeline(
        cfg.spinoe(),
        cfg.spin_system(),
        cfg.schedule_mode(),
        r1=cfg.r1_s,
        recovery=cfg.recovery_s,
        detection=cfg.detection(),
    )
    report = effective_pure_report(run, cfg.echo())
    _write_report(out / "effpure_report.json", report)
    for i, rec in enumerate(run.records, start=1):
        _dump_spectra(out, f"effpure_exp{i}", rec.readout_h, rec.readout_c, args.svg)
    _dump_spectra(out, "effpure_weighted_sum", run.sum_readout_h, run.sum_readout_c, args.svg)
    print(
        f"effective pure state: ground |{run.result.ground:02b}>, "
        f"q2 = {run.result.q2:.4f}, enhancement = {run.enhancement:.4f}"
    )
    return EXIT_OK


def cmd_grover(cfg: RunConfig, args) -> int:
    if args.all:
        targets = ["00", "01", "10", "11"]
    else:
        if args.target is None:
            raise UsageError("grover needs --target or --all")
        if args.target not in ("00", "01", "10", "11"):
            raise UsageError(f"invalid target {args.target!r} (choose 00, 01, 10 or 11)")
        targets = [args.target]
    out = _out_dir(args)
    mismatch = False
    for target in targets:
        run = run_grover_pipeline(
            cfg.spinoe(),
            cfg.spin_system(),
            GroverCase(target),
            cfg.schedule_mode(),
            r1=cfg.r1_s,
            recovery=cfg.recovery_s,
            sample_age=cfg.sample_age_s,
            detection=cfg.detection(),
        )
        report = grover_report(run, cfg.echo())
        _write_report(out / f"grover_{target}_report.json", report)
        for i, rec in enumerate(run.records, start=1):
            _dump_spectra(out, f"grover_{target}_exp{i}", rec.readout_h, rec.readout_c, args.svg)
        _dump_spectra(out, f"grover_{target}_sum", run.sum_readout_h, run.sum_readout_c, args.svg)
        ok = run.decoded == target
        mismatch |= not ok
        print(
            f"target {target}: decoded {run.decoded} "
            f"({'ok' if ok else 'MISMATCH'}), enhancement = {run.enhancement:.3f}"
        )
    return EXIT_DECODE if mismatch else EXIT_OK


def cmd_probe(cfg: RunConfig, args) -> int:
    out = _out_dir(args)
    system = cfg.spin_system()
    if args.state == "thermal":
        rho = thermal_state(system)
    else:
        rho = enhanced_state(system, cfg.eps0_h, cfg.eps0_c)
    spec_h, spec_c = probe(
        rho, system, cfg.tip_deg, cfg.n_points, cfg.dwell_s, cfg.noise_amp,
        np.random.default_rng(cfg.seed),
    )
    k = calibrate(system, cfg.tip_deg, cfg.n_points, cfg.dwell_s)
    diag = reconstruct_diagonal(
        integrate_peaks(spec_h, system), integrate_peaks(spec_c, system), cfg.tip_deg, k
    )
    _dump_spectra(out, f"probe_{args.state}", spec_h, spec_c, args.svg)
    report = {
        "run_id": run_id(cfg.echo(), args.state),
        "config": cfg.echo(),
        "state": args.state,
        "calibration": k,
        "reconstructed_deviation_diagonal": [float(x) for x in diag],
    }
    _write_report(out / f"probe_{args.state}_report.json", report)
    print(f"reconstructed deviation diagonal: {[round(float(x), 6) for x in diag]}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="spinoeqc", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--svg", action="store_true", help="also write SVG plots")
    sub = parser.add_subparsers(dest="command", required=True)

    trace = sub.add_parser("enhance-trace", help="enhancement vs time table")
    trace.add_argument("--duration", type=float, default=3600.0, help="seconds to cover")
    trace.add_argument("--step", type=float, default=10.0, help="row spacing in seconds")

    eff = sub.add_parser("effpure", help="effective pure state preparation")
    eff.add_argument("--mode", choices=("multi", "single"), help="scheduling mode")

    gro = sub.add_parser("grover", help="two-qubit search experiment")
    gro.add_argument("--target", help="marked element: 00, 01, 10 or 11")
    gro.add_argument("--all", action="store_true", help="run all four cases")

    prb = sub.add_parser("probe", help="probing experiment")
    prb.add_argument("--state", choices=("thermal", "enhanced"), default="thermal")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        overrides = {"seed": args.seed}
        if getattr(args, "mode", None) is not None:
            overrides["mode"] = args.mode
        cfg = load_config(args.config, overrides)
        handler = {
            "enhance-trace": cmd_enhance_trace,
            "effpure": cmd_effpure,
            "grover": cmd_grover,
            "probe": cmd_probe,
        }[args.command]
        return handler(cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingularLabelingSystem as exc:
        print(f"weight solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DecodeError as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return EXIT_DECODE


if __name__ == "__main__":
    sys.exit(main())
