"""Command-line driver: evolve a curve, run a convergence study, or record
energy and mesh-quality histories.

Settings come from an optional JSON file (``--config``) whose keys mirror
:class:`RunConfig`; command-line flags override file values.
"""

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .adaptive import TangentialConfig, evolve_adaptive
from .bdf import SolverConfig, evolve
from .curves import UnknownCurveError, curve_catalog
from .energy import initial_corrector
from .monitor import MonitorModel, MonitorParams
from .verification import convergence_study

logger = logging.getLogger("willmore")

MODES = ("evolve", "converge", "energy", "quality")
METHODS = ("bdfk", "awar", "abdfk")
MONITORS = ("auto",) + tuple(m.value for m in MonitorModel)

SNAPSHOT_HEADER = ["t", "i", "x", "y", "v", "kappa"]
ENERGY_HEADER = ["n", "t", "W", "R", "ratio", "k_c"]
QUALITY_HEADER = ["n", "t", "R1", "R2", "C0", "C1", "Q", "model", "picard_iters"]
CONVERGENCE_HEADER = ["level", "M", "h", "dt", "error", "order"]


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "evolve"
    method: str = "bdfk"
    k: int = 1
    M: int = 100
    dt: float = 0.01
    T: float = 1.0
    tol: float = 1e-8
    max_picard: int = 100
    curve: str | None = None
    monitor: str = "auto"
    alpha0: float = 1.0
    gamma0: float = 0.1
    beta: float = 0.3
    C0_low: float = 2.0
    C0_high: float = 10.0
    C1_low: float = 5.0
    C1_high: float = 50.0
    Q_thresh: float = 2.0
    amp_factor: float = 1.5
    P: float = 1.0
    J: float = 0.5
    freeze_monitor: bool = False
    ec: bool = False
    C: float = 1.0
    r: float = 5.0
    startup_substeps: int | str = 0
    levels: int = 4
    out_dir: str | None = None
    snapshot_every: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}")
        if self.method not in METHODS:
            raise UsageError(f"method must be one of {METHODS}")
        if self.monitor not in MONITORS:
            raise UsageError(f"monitor must be one of {MONITORS}")
        if self.M < 4 or self.levels < 3 or self.snapshot_every < 0 or self.max_picard < 1:
            raise UsageError("M >= 4, levels >= 3, max_picard >= 1 and snapshot_every >= 0 required")
        if isinstance(self.startup_substeps, str) and self.startup_substeps != "auto":
            self.startup_substeps = int(self.startup_substeps)
        try:
            self.solver_config()
            TangentialConfig(P=self.P, J=self.J)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if self.C < 1 or self.r <= 0:
            raise UsageError("energy correction needs C >= 1 and r > 0")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def monitor_params(self) -> MonitorParams:
        return MonitorParams(alpha0=self.alpha0, gamma0=self.gamma0, beta=self.beta,
                             C0_low=self.C0_low, C0_high=self.C0_high, C1_low=self.C1_low,
                             C1_high=self.C1_high, Q_thresh=self.Q_thresh,
                             amp_factor=self.amp_factor)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(k=self.k, dt=self.dt, T=self.T, tol=self.tol,
                            max_picard=self.max_picard,
                            redistribute="awar" if self.method == "awar" else "off",
                            monitor=self.monitor, monitor_params=self.monitor_params(),
                            startup_substeps=self.startup_substeps,
                            snapshot_every=self.snapshot_every)


def _fmt(v) -> str:
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    logger.info("wrote %s", path)


def snapshot_rows(states):
    for s in states:
        for i in range(s.M):
            yield (float(s.t), i, float(s.X[i, 0]), float(s.X[i, 1]), float(s.V[i]), float(s.kappa[i]))


def write_outputs(record, out_dir, which=("snapshots", "energy", "quality")) -> list:
    """Write the CSV files of a run record; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if "snapshots" in which:
        states = list(record.snapshots)
        if record.final is not None and (not states or states[-1].t != record.final.t):
            states.append(record.final)
        p = out / "snapshots.csv"
        _write_csv(p, SNAPSHOT_HEADER, snapshot_rows(states))
        paths.append(p)
    if "energy" in which:
        p = out / "energy.csv"
        _write_csv(p, ENERGY_HEADER, ((s.n, float(s.t), s.W, s.R, s.ratio, s.k_c)
                                      for s in record.steps))
        paths.append(p)
    if "quality" in which:
        p = out / "quality.csv"
        _write_csv(p, QUALITY_HEADER, ((s.n, float(s.t), s.R1, s.R2, s.C0, s.C1, s.Q,
                                        s.model or "none", s.picard_iters)
                                       for s in record.steps))
        paths.append(p)
    return paths


def write_convergence(table, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = out / "convergence.csv"
    _write_csv(p, CONVERGENCE_HEADER, ((r.level, r.M, r.h, r.dt, r.error, r.order)
                                       for r in table.rows))
    return p


def simulate(rc: RunConfig):
    """Run the configured method on the configured curve; returns the record."""
    initial = curve_catalog(rc.curve, rc.M)
    ec = initial_corrector(initial, rc.C, rc.r) if (rc.ec or rc.mode == "energy") else None
    cfg = rc.solver_config()
    if rc.method == "abdfk":
        tc = TangentialConfig(P=rc.P, J=rc.J, freeze_monitor=rc.freeze_monitor)
        return evolve_adaptive(initial, cfg, tc, ec)
    return evolve(initial, cfg, ec)


def run(rc: RunConfig) -> int:
    out_dir = rc.out_dir or os.environ.get("WILLMORE_OUT_DIR") or "."
    if rc.mode == "converge":
        table = convergence_study(rc.k, rc.method, rc.levels, T=rc.T,
                                  startup_substeps=rc.startup_substeps)
        write_convergence(table, out_dir)
        if table.status != "ok":
            print(f"willmore: convergence study failed: {table.error}", file=sys.stderr)
            return 1
        return 0
    if rc.curve is None:
        if rc.mode == "evolve":
            raise UsageError("--curve is required in evolve mode")
        rc.curve = "circle"
    record = simulate(rc)
    which = {"evolve": ("snapshots", "energy", "quality"), "energy": ("energy",),
             "quality": ("quality",)}[rc.mode]
    if not record.ok:
        which = tuple(which) + ("snapshots",) if "snapshots" not in which else which
    write_outputs(record, out_dir, which)
    if not record.ok:
        print(f"willmore: run aborted: {record.error}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="willmore", description=__doc__.split("\n\n")[0],
                                argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file with RunConfig keys")
    p.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration as JSON and exit")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--curve", help="preset name or path to an x,y point file")
    p.add_argument("--monitor", choices=MONITORS)
    for name, typ in (("k", int), ("M", int), ("dt", float), ("T", float), ("tol", float),
                      ("max-picard", int), ("alpha0", float), ("gamma0", float),
                      ("beta", float), ("C0-low", float), ("C0-high", float),
                      ("C1-low", float), ("C1-high", float), ("Q-thresh", float),
                      ("amp-factor", float), ("P", float), ("J", float), ("C", float),
                      ("r", float), ("levels", int), ("snapshot-every", int)):
        p.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))
    p.add_argument("--startup-substeps", dest="startup_substeps",
                   help="substeps for the start-up steps: an integer or 'auto'")
    p.add_argument("--ec", action=argparse.BooleanOptionalAction, help="energy correction")
    p.add_argument("--freeze-monitor", dest="freeze_monitor",
                   action=argparse.BooleanOptionalAction)
    p.add_argument("--out-dir", dest="out_dir")
    return p


def parse_config(argv=None) -> tuple[RunConfig, argparse.Namespace]:
    parser = build_parser()
    ns = parser.parse_args(argv)
    opts = vars(ns).copy()
    data = {}
    path = opts.pop("config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {path}: {exc}")
        if not isinstance(data, dict):
            parser.error("config file must hold a JSON object")
    for key in ("dump_config", "verbose"):
        opts.pop(key, None)
    data.update(opts)
    try:
        rc = RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))
    return rc, ns


def main(argv=None) -> int:
    try:
        rc, ns = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(ns.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(ns, "dump_config", False):
        print(rc.to_json())
        return 0
    try:
        return run(rc)
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"willmore: error: {exc}", file=sys.stderr)
        return 2
    except UnknownCurveError as exc:
        print(f"willmore: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"willmore: I/O error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"willmore: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
