"""Command-line benchmark harness.

Modes
  solve    one row per instance per direction at the instance's own budgets
  sweep    rate over a (P, C) budget grid, both directions
  duality  per-instance |uplink rate - downlink rate|, checked against tol
  certify  perturbation search around each solved design, both directions
  oracle   solver vs exhaustive grid on the instance's subchannel gains

Exit status: 0 all checks passed, 1 a duality/certification/feasibility
check failed, 2 usage, I/O, or parse errors.  Output is CSV (default) or
JSON; rows are ordered by instance, direction, then budget indices, so
reruns with one seed are byte-identical except for the wall_ms column.

Instance files are JSON: a single object or a list of objects shaped like

    {"n_r": 2, "n_u": 2, "H": [[[re, im], ...] per row], "P": 2.0,
     "C": 2.0, "sigma2": 1.0, "id": "optional-name"}

with each complex entry a two-element [re, im] array.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .allocation import DIRECTIONS, DOWNLINK, UPLINK, SolverOptions
from .errors import InstanceFormatError, InvalidInputError, UnsupportedSizeError
from .kernels import random_channel, svd
from .oracle import grid_oracle_scalar, perturbation_search
from .problem import ChannelInstance
from .solver import solve_instance

CSV_COLUMNS = (
    "instance_id",
    "direction",
    "P",
    "C",
    "rate_bits",
    "fronthaul_bits",
    "power_used",
    "iterations",
    "margin_bits",
    "wall_ms",
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


@dataclass
class ExperimentConfig:
    """One CLI run: what to solve, on which instances, where to write."""

    mode: str
    instances_path: str | None = None
    random_spec: tuple[int, int, int] | None = None  # (n_r, n_u, count)
    seed: int = 0
    p_grid: tuple[float, ...] = ()
    c_grid: tuple[float, ...] = ()
    trials: int = 1000
    tol: float = 1e-5
    out_path: str | None = None
    out_format: str = "csv"

    def __post_init__(self):
        modes = ("solve", "sweep", "duality", "certify", "oracle")
        if self.mode not in modes:
            raise InvalidInputError(f"mode must be one of {modes}, got {self.mode!r}")
        if (self.instances_path is None) == (self.random_spec is None):
            raise InvalidInputError(
                "exactly one instance source: --instances PATH or --random n_r,n_u,count"
            )
        if self.random_spec is not None:
            n_r, n_u, count = self.random_spec
            if n_r < 1 or n_u < 1 or count < 1:
                raise InvalidInputError("--random needs n_r, n_u, count all >= 1")
        if self.mode == "sweep" and not (self.p_grid and self.c_grid):
            raise InvalidInputError("sweep mode needs nonempty --P-grid and --C-grid")
        if self.trials < 0:
            raise InvalidInputError(f"--trials must be >= 0, got {self.trials}")
        if self.tol <= 0:
            raise InvalidInputError(f"--tol must be > 0, got {self.tol}")
        if self.out_format not in ("csv", "json"):
            raise InvalidInputError(f"format must be csv or json, got {self.out_format!r}")


@dataclass
class ResultRow:
    """One output row; margin_bits carries the mode's check quantity:
    |uplink - downlink| rate (duality), certification margin (certify),
    solver minus oracle rate (oracle), empty otherwise.  Duality rows use
    direction "duality" and report the uplink functionals; solve mode has
    the per-direction detail."""

    instance_id: str
    direction: str
    P: float
    C: float
    rate_bits: float
    fronthaul_bits: float
    power_used: float
    iterations: int
    margin_bits: float | None
    wall_ms: float
    passed: bool = field(default=True, compare=False)

    def as_record(self) -> dict:
        rec = {}
        for k in CSV_COLUMNS:
            v = getattr(self, k)
            if isinstance(v, float):
                v = f"{v:.12g}"
            rec[k] = "" if v is None else v
        return rec


def _complex_entry(v, where: str) -> complex:
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        raise InstanceFormatError(
            f"{where} must be a two-element [re, im] array, got {v!r}"
        )
    return complex(float(v[0]), float(v[1]))


def instance_from_record(rec, default_id: str = "instance") -> tuple[ChannelInstance, str]:
    """Build a ChannelInstance from one decoded JSON object.

    Raises InstanceFormatError naming the offending field or matrix entry.
    """
    if not isinstance(rec, dict):
        raise InstanceFormatError(f"instance must be a JSON object, got {type(rec).__name__}")
    required = ("n_r", "n_u", "H", "P", "C", "sigma2")
    for name in required:
        if name not in rec:
            raise InstanceFormatError(f"missing field {name!r}")
    unknown = set(rec) - set(required) - {"id"}
    if unknown:
        raise InstanceFormatError(f"unknown fields {sorted(unknown)!r}")
    for name in ("n_r", "n_u"):
        if not isinstance(rec[name], int) or isinstance(rec[name], bool) or rec[name] < 1:
            raise InstanceFormatError(f"{name} must be a positive integer")
    for name in ("P", "C", "sigma2"):
        if not isinstance(rec[name], (int, float)) or isinstance(rec[name], bool):
            raise InstanceFormatError(f"{name} must be a number")
    n_r, n_u = rec["n_r"], rec["n_u"]
    rows = rec["H"]
    if not isinstance(rows, list) or len(rows) != n_r:
        raise InstanceFormatError(f"H must be a list of {n_r} rows")
    H = np.zeros((n_r, n_u), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n_u:
            raise InstanceFormatError(f"H[{i}] must be a list of {n_u} entries")
        for j, v in enumerate(row):
            H[i, j] = _complex_entry(v, f"H[{i}][{j}]")
    label = rec.get("id", default_id)
    if not isinstance(label, str) or not label:
        raise InstanceFormatError("id must be a nonempty string")
    # domain validation (sigma2 > 0, budgets >= 0) raises InvalidInputError
    inst = ChannelInstance(H=H, P=rec["P"], C=rec["C"], sigma2=rec["sigma2"])
    return inst, label


def parse_instance(path: str) -> ChannelInstance:
    """Parse a single-instance JSON file (see the module docstring)."""
    insts = load_instances(path)
    if len(insts) != 1:
        raise InstanceFormatError(f"{path} holds {len(insts)} instances, expected 1")
    return insts[0][0]


def load_instances(path: str) -> list[tuple[ChannelInstance, str]]:
    """Parse an instance file holding one object or a list of objects."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path} is not valid JSON: {exc}") from exc
    records = data if isinstance(data, list) else [data]
    if not records:
        raise InstanceFormatError(f"{path} holds no instances")
    out = []
    for k, rec in enumerate(records):
        width = max(3, len(str(len(records) - 1)))
        inst, label = instance_from_record(rec, default_id=f"inst-{k:0{width}d}")
        out.append((inst, label))
    labels = [lb for _, lb in out]
    if len(set(labels)) != len(labels):
        raise InstanceFormatError("duplicate instance ids")
    return out


def serialize_instance(inst: ChannelInstance, label: str = "instance") -> dict:
    """JSON-ready record; numeric values round-trip bit-identically."""
    H = [
        [[float(v.real), float(v.imag)] for v in row]
        for row in np.asarray(inst.H, dtype=complex)
    ]
    return {
        "id": label,
        "n_r": inst.n_r,
        "n_u": inst.n_u,
        "H": H,
        "P": inst.P,
        "C": inst.C,
        "sigma2": inst.sigma2,
    }


def _generate_instances(config: ExperimentConfig) -> list[tuple[ChannelInstance, str]]:
    n_r, n_u, count = config.random_spec
    width = max(3, len(str(count - 1)))
    out = []
    for k in range(count):
        H = random_channel(n_r, n_u, seed=config.seed + k)
        # budgets chosen mid-range; sweep/solve rows override P and C per row
        P = config.p_grid[0] if config.p_grid else 1.0
        C = config.c_grid[0] if config.c_grid else 2.0
        out.append((ChannelInstance(H=H, P=P, C=C, sigma2=1.0), f"rand-{k:0{width}d}"))
    return out


def _instances(config: ExperimentConfig) -> list[tuple[ChannelInstance, str]]:
    if config.instances_path is not None:
        return load_instances(config.instances_path)
    return _generate_instances(config)


def _solver_opts(config: ExperimentConfig, direction: str) -> SolverOptions:
    # distinct per-direction seeds so the duality check is not self-fulfilling
    offset = 1 if direction == UPLINK else 2
    return SolverOptions(seed=config.seed * 4 + offset)


def _row(label, direction, P, C, report, margin, t0, passed=True) -> ResultRow:
    return ResultRow(
        instance_id=label,
        direction=direction,
        P=P,
        C=C,
        rate_bits=report.rate,
        fronthaul_bits=report.fronthaul_used,
        power_used=report.power_used,
        iterations=int(report.diagnostics.get("iterations", 0)),
        margin_bits=margin,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        passed=passed,
    )


def _run_solve(config, instances) -> list[ResultRow]:
    rows = []
    for inst, label in instances:
        for direction in DIRECTIONS:
            t0 = time.perf_counter()
            _, report, _ = solve_instance(inst, direction, _solver_opts(config, direction))
            rows.append(
                _row(label, direction, inst.P, inst.C, report, None, t0, report.feasible)
            )
    return rows


def _run_sweep(config, instances) -> list[ResultRow]:
    rows = []
    for inst, label in instances:
        for direction in DIRECTIONS:
            opts = _solver_opts(config, direction)
            for P in config.p_grid:
                for C in config.c_grid:
                    t0 = time.perf_counter()
                    point = ChannelInstance(H=inst.H, P=P, C=C, sigma2=inst.sigma2)
                    _, report, _ = solve_instance(point, direction, opts)
                    rows.append(
                        _row(label, direction, P, C, report, None, t0, report.feasible)
                    )
    return rows


def _run_duality(config, instances) -> list[ResultRow]:
    # one row per instance: the row certifies the pair, not one direction
    rows = []
    for inst, label in instances:
        t0 = time.perf_counter()
        _, rep_ul, _ = solve_instance(inst, UPLINK, _solver_opts(config, UPLINK))
        _, rep_dl, _ = solve_instance(inst, DOWNLINK, _solver_opts(config, DOWNLINK))
        gap = abs(rep_ul.rate - rep_dl.rate)
        ok = gap <= config.tol and rep_ul.feasible and rep_dl.feasible
        rows.append(_row(label, "duality", inst.P, inst.C, rep_ul, gap, t0, ok))
    return rows


def _run_certify(config, instances) -> list[ResultRow]:
    rows = []
    for inst, label in instances:
        for direction in DIRECTIONS:
            t0 = time.perf_counter()
            design, report, _ = solve_instance(
                inst, direction, _solver_opts(config, direction)
            )
            cert = perturbation_search(
                inst,
                direction,
                design,
                trials=config.trials,
                seed=config.seed * 4 + 3,
                instance_id=label,
            )
            ok = cert.verdict and report.feasible
            rows.append(
                _row(label, direction, inst.P, inst.C, report, cert.margin, t0, ok)
            )
    return rows


def _run_oracle(config, instances) -> list[ResultRow]:
    rows = []
    for inst, label in instances:
        gains = svd(inst.H).singular_values
        for direction in DIRECTIONS:
            t0 = time.perf_counter()
            opts = _solver_opts(config, direction)
            _, report, _ = solve_instance(inst, direction, opts)
            reference = grid_oracle_scalar(
                gains, inst.P, inst.C, inst.sigma2, direction, opts.grid_resolution
            )
            margin = report.diagnostics["rate"] - reference.diagnostics["rate"]
            ok = margin >= -config.tol and report.feasible
            rows.append(
                _row(label, direction, inst.P, inst.C, report, margin, t0, ok)
            )
    return rows


_MODE_RUNNERS = {
    "solve": _run_solve,
    "sweep": _run_sweep,
    "duality": _run_duality,
    "certify": _run_certify,
    "oracle": _run_oracle,
}


def run(config: ExperimentConfig) -> tuple[list[ResultRow], int]:
    """Execute one experiment; returns (rows, exit_status)."""
    instances = _instances(config)
    rows = _MODE_RUNNERS[config.mode](config, instances)
    status = EXIT_OK if all(r.passed for r in rows) else EXIT_CHECK_FAILED
    return rows, status


def render_rows(rows: list[ResultRow], out_format: str) -> str:
    if out_format == "json":
        return json.dumps([r.as_record() for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.as_record())
    return buf.getvalue()


def _parse_grid(text: str) -> tuple[float, ...]:
    """Budget grids: 'a:b:steps' inclusive linspace, or comma-separated values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidInputError(f"grid must be a:b:steps, got {text!r}")
        try:
            a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InvalidInputError(f"bad grid {text!r}: {exc}") from exc
        if steps < 1:
            raise InvalidInputError(f"grid needs at least 1 step, got {steps}")
        return tuple(float(x) for x in np.linspace(a, b, steps))
    try:
        values = tuple(float(x) for x in text.split(",") if x != "")
    except ValueError as exc:
        raise InvalidInputError(f"bad grid {text!r}: {exc}") from exc
    if not values:
        raise InvalidInputError("grid is empty")
    return values


def _parse_random(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidInputError(f"--random must be n_r,n_u,count, got {text!r}")
    try:
        n_r, n_u, count = (int(x) for x in parts)
    except ValueError as exc:
        raise InvalidInputError(f"bad --random {text!r}: {exc}") from exc
    return n_r, n_u, count


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cranopt",
        description="Optimal fronthaul-compressed rate designs: solve, sweep, "
        "and certify single-RRH uplink/downlink instances.",
    )
    parser.add_argument(
        "--mode",
        required=True,
        choices=("solve", "sweep", "duality", "certify", "oracle"),
        help="experiment type",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--instances", metavar="PATH", help="JSON instance file")
    source.add_argument(
        "--random",
        metavar="NR,NU,COUNT",
        help="generate COUNT random NRxNU instances instead of reading a file",
    )
    parser.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    parser.add_argument(
        "--P-grid", dest="p_grid", metavar="A:B:STEPS", help="power budgets for sweep"
    )
    parser.add_argument(
        "--C-grid", dest="c_grid", metavar="A:B:STEPS", help="fronthaul budgets for sweep"
    )
    parser.add_argument(
        "--trials", type=int, default=1000, help="perturbation trials in certify mode"
    )
    parser.add_argument(
        "--tol", type=float, default=1e-5, help="pass/fail tolerance in bits"
    )
    parser.add_argument("--out", metavar="PATH", help="write results here (default stdout)")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; normalize other codes too
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = ExperimentConfig(
            mode=args.mode,
            instances_path=args.instances,
            random_spec=_parse_random(args.random) if args.random else None,
            seed=args.seed,
            p_grid=_parse_grid(args.p_grid) if args.p_grid else (),
            c_grid=_parse_grid(args.c_grid) if args.c_grid else (),
            trials=args.trials,
            tol=args.tol,
            out_path=args.out,
            out_format=args.format,
        )
        rows, status = run(config)
        text = render_rows(rows, config.out_format)
        if config.out_path:
            with open(config.out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return status
    except (InstanceFormatError, InvalidInputError, UnsupportedSizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
