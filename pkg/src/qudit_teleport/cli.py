"""Command-line sweep runner.

Runs the teleportation protocol over a grid of dimensions and crosstalk
probabilities and emits one CSV or JSON row per (d, p, input instance).
Output is deterministic for a fixed configuration: rows are ordered by
(d, p, seed) and the runtime column stays at 0 unless --timing is given, so
identical invocations produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .channels import INDEPENDENT, CORRELATED, VARIANTS, crosstalk_channel
from .protocol import DERIVED_EXACT, PAPER_WEYL, ProtocolConfig, run_protocol
from .states import load_state, random_pure_state, uniform_state

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepResult",
    "parse_p_grid",
    "parse_cli",
    "run_sweep",
    "emit",
    "main",
]

CSV_HEADER = (
    "d,p,noise_variant,noise_mode,correction_scheme,input_spec,seed,"
    "avg_fidelity,min_outcome_fidelity,runtime_ms,expected_trigger_probability"
)

DEFAULT_DIMS = (2, 3, 4, 5, 8)
DEFAULT_P_GRID = "0:1:0.1"
RUNTIME_WARN_DIM = 8


@dataclass(frozen=True)
class InputSpec:
    """Parsed --input value: uniform, random:N:SEED or file:PATH."""

    kind: str
    count: int = 1
    base_seed: int = 0
    path: str | None = None

    @property
    def label(self) -> str:
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "random":
            return f"random:{self.count}:{self.base_seed}"
        return f"file:{self.path}"


@dataclass
class SweepConfig:
    dims: tuple[int, ...] = DEFAULT_DIMS
    p_grid: tuple[float, ...] = ()
    input_spec: InputSpec = field(default_factory=lambda: InputSpec(kind="uniform"))
    noise_variant: str = "weyl"
    noise_mode: str = INDEPENDENT
    noise_targets: tuple[str, ...] = ("a1", "a2")
    correction_scheme: str = DERIVED_EXACT
    eta: float | None = None
    out_path: str | None = None
    fmt: str = "csv"
    measure_runtime: bool = False


@dataclass
class SweepRow:
    d: int
    p: float
    noise_variant: str
    noise_mode: str
    correction_scheme: str
    input_spec: str
    seed: int
    avg_fidelity: float
    min_outcome_fidelity: float
    runtime_ms: float
    expected_trigger_probability: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)


def parse_p_grid(text: str) -> tuple[float, ...]:
    """Inclusive start:end:step grid; the step must divide the range."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"p-grid must be start:end:step, got {text!r}")
    try:
        start, end, step = (float(x) for x in parts)
    except ValueError:
        raise ValueError(f"p-grid values must be numeric, got {text!r}") from None
    if step < 0 or end < start:
        raise ValueError(f"p-grid needs end >= start and step >= 0, got {text!r}")
    if end == start:
        values = (start,)
    else:
        if step == 0:
            raise ValueError("p-grid step must be positive for a nonempty range")
        n = round((end - start) / step)
        if abs(start + n * step - end) > 1e-9:
            raise ValueError(f"p-grid step {step} does not divide the range [{start}, {end}]")
        values = tuple(start + k * step for k in range(n + 1))
    for v in values:
        if not -1e-12 <= v <= 1 + 1e-12:
            raise ValueError(f"p-grid value {v} outside [0, 1]")
    return tuple(min(max(v, 0.0), 1.0) for v in values)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"dims must be comma-separated integers, got {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise ValueError("every dimension must be an integer >= 2")
    return dims


def _parse_input(text: str) -> InputSpec:
    if text == "uniform":
        return InputSpec(kind="uniform")
    if text.startswith("random:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"random input spec must be random:N:SEED, got {text!r}")
        try:
            count, seed = int(parts[1]), int(parts[2])
        except ValueError:
            raise ValueError(f"random input spec must be random:N:SEED, got {text!r}") from None
        if count < 1:
            raise ValueError("random input count must be >= 1")
        return InputSpec(kind="random", count=count, base_seed=seed)
    if text.startswith("file:"):
        path = text[len("file:") :]
        if not path:
            raise ValueError("file input spec needs a path: file:PATH")
        return InputSpec(kind="file", path=path)
    raise ValueError(f"unknown input spec {text!r}")


def _parse_targets(text: str) -> tuple[str, ...]:
    targets = tuple(t.strip() for t in text.split(",") if t.strip())
    if not targets or any(t not in ("a1", "a2") for t in targets):
        raise ValueError(f"noise targets must be a subset of a1,a2, got {text!r}")
    return tuple(dict.fromkeys(targets))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-teleport",
        description="Sweep teleportation fidelity over dimensions and crosstalk strength.",
    )
    parser.add_argument("--config", metavar="PATH", help="JSON file with sweep settings; flags override")
    parser.add_argument("--dims", metavar="LIST", help=f"comma-separated dimensions (default {','.join(map(str, DEFAULT_DIMS))})")
    parser.add_argument("--p-grid", metavar="S:E:STEP", help=f"inclusive probability grid (default {DEFAULT_P_GRID})")
    parser.add_argument("--input", metavar="SPEC", help="uniform | random:N:SEED | file:PATH (default uniform)")
    parser.add_argument("--noise", choices=list(VARIANTS), default=None, help="crosstalk variant (default weyl)")
    parser.add_argument("--noise-mode", choices=[INDEPENDENT, CORRELATED], default=None, help="two-qudit composition (default independent)")
    parser.add_argument("--noise-targets", metavar="LIST", help="a1,a2 or a2 (default a1,a2)")
    parser.add_argument("--correction", choices=[PAPER_WEYL, DERIVED_EXACT], default=None, help="correction scheme (default derived-exact)")
    parser.add_argument("--eta", type=float, default=None, help="upconversion efficiency, reporting only")
    parser.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default=None, help="output format (default csv)")
    parser.add_argument("--timing", action="store_true", default=None, help="record wall-clock runtime_ms (breaks byte determinism)")
    return parser


def parse_cli(argv: list[str] | None = None) -> SweepConfig:
    """Parse flags (and optional --config file) into a SweepConfig.

    Malformed values exit with status 2 and a message on stderr, matching
    argparse behavior for unknown flags.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)

    file_cfg: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            parser.error(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            parser.error(f"config file is not valid JSON: {exc}")
        if not isinstance(file_cfg, dict):
            parser.error("config file must hold a JSON object")
        known = {"dims", "p_grid", "input", "noise", "noise_mode", "noise_targets",
                 "correction", "eta", "out", "format", "timing"}
        unknown = set(file_cfg) - known
        if unknown:
            parser.error(f"unknown config file keys: {sorted(unknown)}")

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        if key in file_cfg and file_cfg[key] is not None:
            return file_cfg[key]
        return default

    try:
        dims_raw = pick(args.dims, "dims", ",".join(map(str, DEFAULT_DIMS)))
        dims = _parse_dims(dims_raw) if isinstance(dims_raw, str) else tuple(int(x) for x in dims_raw)
        if any(d < 2 for d in dims):
            raise ValueError("every dimension must be an integer >= 2")
        grid_raw = pick(args.p_grid, "p_grid", DEFAULT_P_GRID)
        if isinstance(grid_raw, str):
            p_grid = parse_p_grid(grid_raw)
        else:
            p_grid = tuple(float(x) for x in grid_raw)
            if any(not 0 <= x <= 1 for x in p_grid):
                raise ValueError("p_grid values must lie in [0, 1]")
        input_spec = _parse_input(pick(args.input, "input", "uniform"))
        targets = _parse_targets(pick(args.noise_targets, "noise_targets", "a1,a2"))
        variant = pick(args.noise, "noise", "weyl")
        if variant not in VARIANTS:
            raise ValueError(f"unknown noise variant {variant!r}")
        mode = pick(args.noise_mode, "noise_mode", INDEPENDENT)
        if mode not in (INDEPENDENT, CORRELATED):
            raise ValueError(f"unknown noise mode {mode!r}")
        correction = pick(args.correction, "correction", DERIVED_EXACT)
        if correction not in (PAPER_WEYL, DERIVED_EXACT):
            raise ValueError(f"unknown correction scheme {correction!r}")
        eta = pick(args.eta, "eta", None)
        if eta is not None:
            eta = float(eta)
            if not 0 <= eta <= 1:
                raise ValueError("eta must lie in [0, 1]")
        fmt = pick(args.format, "format", "csv")
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        out_path = pick(args.out, "out", None)
        timing = bool(pick(args.timing, "timing", False))
    except ValueError as exc:
        parser.error(str(exc))

    return SweepConfig(
        dims=tuple(dims),
        p_grid=tuple(p_grid),
        input_spec=input_spec,
        noise_variant=variant,
        noise_mode=mode,
        noise_targets=targets,
        correction_scheme=correction,
        eta=eta,
        out_path=out_path,
        fmt=fmt,
        measure_runtime=timing,
    )


def _input_instances(spec: InputSpec, d: int) -> list[tuple[int, np.ndarray]]:
    if spec.kind == "uniform":
        return [(0, uniform_state(d))]
    if spec.kind == "random":
        return [(spec.base_seed + j, random_pure_state(d, spec.base_seed + j)) for j in range(spec.count)]
    state = load_state(spec.path)
    if state.size != d:
        raise ValueError(
            f"input file holds a dimension-{state.size} state but the sweep asks for d={d}"
        )
    return [(0, state)]


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate the protocol at every grid point, one row per input instance.

    Rows are ordered by (d ascending, p ascending, seed ascending). The
    expected trigger probability column carries eta verbatim (1 when unset);
    it never scales fidelities.
    """
    etp = config.eta if config.eta is not None else 1.0
    result = SweepResult()
    for d in sorted(config.dims):
        instances = _input_instances(config.input_spec, d)
        for p in sorted(config.p_grid):
            ch_a1 = crosstalk_channel(d, p, config.noise_variant) if "a1" in config.noise_targets else None
            ch_a2 = crosstalk_channel(d, p, config.noise_variant) if "a2" in config.noise_targets else None
            for seed, state in instances:
                start = time.perf_counter()
                proto = run_protocol(
                    ProtocolConfig(
                        d=d,
                        input_state=state,
                        convention="general",
                        noise_a1=ch_a1,
                        noise_a2=ch_a2,
                        noise_mode=config.noise_mode,
                        correction=config.correction_scheme,
                    )
                )
                elapsed_ms = (time.perf_counter() - start) * 1000.0
                result.rows.append(
                    SweepRow(
                        d=d,
                        p=p,
                        noise_variant=config.noise_variant,
                        noise_mode=config.noise_mode,
                        correction_scheme=config.correction_scheme,
                        input_spec=config.input_spec.label,
                        seed=seed,
                        avg_fidelity=proto.average_fidelity,
                        min_outcome_fidelity=proto.min_outcome_fidelity,
                        runtime_ms=elapsed_ms if config.measure_runtime else 0.0,
                        expected_trigger_probability=etp,
                    )
                )
    return result


def emit(result: SweepResult, fmt: str = "csv") -> bytes:
    """Serialize rows; CSV floats use 12 significant digits."""
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in result.rows:
            lines.append(
                f"{r.d},{r.p:.12g},{r.noise_variant},{r.noise_mode},{r.correction_scheme},"
                f"{r.input_spec},{r.seed},{r.avg_fidelity:.12g},{r.min_outcome_fidelity:.12g},"
                f"{r.runtime_ms:.12g},{r.expected_trigger_probability:.12g}"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "json":
        rows = [{f.name: getattr(r, f.name) for f in fields(SweepRow)} for r in result.rows]
        return (json.dumps(rows, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def main(argv: list[str] | None = None) -> int:
    config = parse_cli(argv)
    big = [d for d in config.dims if d > RUNTIME_WARN_DIM]
    if big:
        print(
            f"warning: exact enumeration scales steeply; dims {big} may take a long time",
            file=sys.stderr,
        )
    try:
        result = run_sweep(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    data = emit(result, config.fmt)
    if config.out_path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return 0
    try:
        with open(config.out_path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
