"""Command-line driver: simulate / herald / tomo / optimize / sweep.

Every command reads a JSON config (``--config``), optionally overridden by
the ``--seed`` / ``--shots`` / ``--format`` / ``--out`` flags, and writes one
deterministic output document to stdout or ``--out``.  Identical config and
seed always produce byte-identical output.  The only environment override is
``WCHIP_OUT_DIR``, which prefixes relative output paths.

Exit codes: 0 success; 1 internal failure; 2 config validation;
3 counting diagonals not uniform; 4 sweep grid too large.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .circuit import (
    canonical_w_circuit,
    load_circuit,
    propagate,
)
from .elements import SourceSpec
from .errors import (
    ConfigError,
    DiagonalsNotUniform,
    GridTooLarge,
    ParamOutOfRange,
    ValidationError,
    WchipError,
)
from .fock import PureState, basis_from_pattern
from .herald import Branch, coincidence_distribution, herald, rho_biseparable, rho_incoherent, w_fidelity, w_state
from .optimize import GRID_BOUNDS, GRID_STEP, SweepSpec, maximize, sweep
from .tomography import DEFAULT_DIAG_THRESHOLD, discriminate, run_tomography

SCHEMA_VERSION = 1

_COMMON_KEYS = {"circuit_file", "canonical", "beta", "max_order", "format", "out", "seed"}
_ALLOWED_KEYS = {
    "simulate": _COMMON_KEYS,
    "herald": _COMMON_KEYS,
    "tomo": _COMMON_KEYS | {"shots", "state", "diag_threshold", "w_threshold"},
    "optimize": {"tol", "grid_step", "grid_bounds", "format", "out", "seed"},
    "sweep": {"sweep", "format", "out", "seed"},
}
_CANONICAL_KEYS = {"r1", "r2", "r3", "phi1", "phi2", "phi3", "ad2_extinction"}
_TOMO_STATES = ("circuit", "w", "rho_s", "rho_b", "product_bbr")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration for one command."""

    command: str
    circuit_file: str | None
    canonical: dict | None
    beta: complex | None
    max_order: int
    shots: int | None
    seed: int
    fmt: str
    out: str | None
    extras: dict


def _parse_beta(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"field 'beta': expected a number or [re, im], got {value!r}")


def _build_config(command: str, doc: dict, args: argparse.Namespace) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    allowed = _ALLOWED_KEYS[command]
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"field {key!r}: not recognized for command {command!r}")

    circuit_file = doc.get("circuit_file")
    canonical = doc.get("canonical")
    if canonical is not None:
        if not isinstance(canonical, dict):
            raise ConfigError("field 'canonical': must be an object")
        for key in canonical:
            if key not in _CANONICAL_KEYS:
                raise ConfigError(f"field 'canonical.{key}': not recognized")
        for key in ("r1", "r2", "r3"):
            if key not in canonical:
                raise ConfigError(f"field 'canonical.{key}': missing")

    state = str(doc.get("state", "circuit"))
    needs_circuit = command in ("simulate", "herald") or (
        command == "tomo" and state == "circuit"
    )
    if needs_circuit and bool(circuit_file) == bool(canonical is not None):
        raise ConfigError(
            "exactly one of 'circuit_file' or 'canonical' must be present"
        )

    beta = doc.get("beta")
    if beta is not None:
        beta = _parse_beta(beta)

    shots = args.shots if args.shots is not None else doc.get("shots")
    if shots is not None:
        try:
            shots = int(shots)
        except (TypeError, ValueError):
            raise ConfigError(f"field 'shots': expected an integer, got {shots!r}") from None
        if shots < 1:
            raise ConfigError(f"field 'shots': must be >= 1, got {shots}")

    seed = args.seed if args.seed is not None else doc.get("seed", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"field 'seed': expected an integer, got {seed!r}") from None

    fmt = args.format or doc.get("format") or ("csv" if command == "sweep" else "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"field 'format': expected 'json' or 'csv', got {fmt!r}")

    out = args.out if args.out is not None else doc.get("out")

    extras: dict = {}
    if command == "tomo":
        if state not in _TOMO_STATES:
            raise ConfigError(
                f"field 'state': expected one of {_TOMO_STATES}, got {state!r}"
            )
        extras["state"] = state
        extras["diag_threshold"] = float(doc.get("diag_threshold", DEFAULT_DIAG_THRESHOLD))
        extras["w_threshold"] = float(doc.get("w_threshold", 0.9))
        if shots is None:
            raise ConfigError("field 'shots': required for tomo")
    if command == "optimize":
        extras["tol"] = float(doc.get("tol", 1e-4))
        extras["grid_step"] = float(doc.get("grid_step", GRID_STEP))
        bounds = doc.get("grid_bounds", list(GRID_BOUNDS))
        if not (isinstance(bounds, (list, tuple)) and len(bounds) == 2):
            raise ConfigError("field 'grid_bounds': expected [lo, hi]")
        extras["grid_bounds"] = (float(bounds[0]), float(bounds[1]))
    if command == "sweep":
        extras["sweep"] = _parse_sweep_block(doc.get("sweep"))

    try:
        max_order = int(doc.get("max_order", 2))
    except (TypeError, ValueError):
        raise ConfigError("field 'max_order': expected an integer") from None

    return RunConfig(
        command=command,
        circuit_file=circuit_file,
        canonical=canonical,
        beta=beta,
        max_order=max_order,
        shots=shots,
        seed=seed,
        fmt=fmt,
        out=out,
        extras=extras,
    )


def _parse_sweep_block(block) -> SweepSpec:
    if not isinstance(block, dict):
        raise ConfigError("field 'sweep': missing or not an object")

    def axis(name: str, default=None):
        value = block.get(name, default)
        if value is None:
            raise ConfigError(f"field 'sweep.{name}': missing")
        if isinstance(value, dict):
            try:
                start, stop, num = (
                    float(value["start"]),
                    float(value["stop"]),
                    int(value["num"]),
                )
            except (KeyError, TypeError, ValueError):
                raise ConfigError(
                    f"field 'sweep.{name}': range object needs start/stop/num"
                ) from None
            if num < 1:
                raise ConfigError(f"field 'sweep.{name}': num must be >= 1")
            if num == 1:
                return (start,)
            step = (stop - start) / (num - 1)
            return tuple(start + k * step for k in range(num))
        if isinstance(value, (list, tuple)):
            try:
                return tuple(float(v) for v in value)
            except (TypeError, ValueError):
                raise ConfigError(f"field 'sweep.{name}': non-numeric entry") from None
        if isinstance(value, (int, float)):
            return (float(value),)
        raise ConfigError(f"field 'sweep.{name}': expected list, number or range object")

    kwargs = {
        "r1": axis("r1"),
        "r2": axis("r2"),
        "r3": axis("r3"),
        "ad2_extinction": axis("ad2_extinction", (0.0,)),
        "metric": str(block.get("metric", "herald_probability")),
    }
    if "cell_cap" in block:
        kwargs["cell_cap"] = int(block["cell_cap"])
    unknown = set(block) - {"r1", "r2", "r3", "ad2_extinction", "metric", "cell_cap"}
    if unknown:
        raise ConfigError(f"field 'sweep.{sorted(unknown)[0]}': not recognized")
    try:
        return SweepSpec(**kwargs)
    except (ValidationError, ParamOutOfRange) as exc:
        raise ConfigError(f"field 'sweep': {exc}") from None


def _resolve_circuit(cfg: RunConfig):
    """Circuit spec plus source from either config style."""
    if cfg.circuit_file:
        try:
            spec, source = load_circuit(cfg.circuit_file)
        except FileNotFoundError:
            raise ConfigError(f"field 'circuit_file': no such file {cfg.circuit_file!r}") from None
        except ValidationError as exc:
            raise ConfigError(f"field 'circuit_file': {exc}") from None
        if cfg.beta is not None:
            channel = source.channel if source is not None else 0
            source = _make_source(channel, cfg.beta, cfg.max_order)
        if source is None:
            raise ConfigError("field 'beta': missing (circuit file carries no source)")
        return spec, source
    block = dict(cfg.canonical)
    if cfg.beta is None:
        raise ConfigError("field 'beta': missing")
    try:
        spec = canonical_w_circuit(
            float(block["r1"]),
            float(block["r2"]),
            float(block["r3"]),
            phi1=float(block.get("phi1", 0.0)),
            phi2=float(block.get("phi2", 0.0)),
            phi3=float(block.get("phi3", 0.0)),
            ad2_extinction=float(block.get("ad2_extinction", 0.0)),
        )
    except (ParamOutOfRange, ValueError) as exc:
        raise ConfigError(f"field 'canonical': {exc}") from None
    return spec, _make_source(0, cfg.beta, cfg.max_order)


def _make_source(channel: int, beta: complex, max_order: int) -> SourceSpec:
    try:
        return SourceSpec(channel=channel, beta=beta, max_order=max_order)
    except (ParamOutOfRange, WchipError) as exc:
        raise ConfigError(f"field 'beta': {exc}") from None


def _complex_json(z: complex):
    return {"re": float(z.real), "im": float(z.imag)}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _herald_summary(state) -> tuple[dict, dict[str, float | None], dict | None]:
    branches: dict = {}
    fidelities: dict[str, float | None] = {}
    dist = None
    for branch in (Branch.T1, Branch.T2):
        result = herald(state, branch)
        branches[branch.value] = {
            "probability": float(result.probability),
            "residual_weight": float(result.residual_weight),
        }
        if result.heralded_state is None:
            fidelities[branch.value] = None
        else:
            fidelities[branch.value] = float(
                w_fidelity(result.heralded_state, branch)
            )
            if branch is Branch.T1:
                dist = {
                    k: float(v)
                    for k, v in coincidence_distribution(result.heralded_state).items()
                }
    return branches, fidelities, dist


def cmd_simulate(cfg: RunConfig) -> str:
    spec, source = _resolve_circuit(cfg)
    state = propagate(source, spec)
    branches, fidelities, dist = _herald_summary(state)
    if cfg.fmt == "csv":
        lines = ["pattern,probability"]
        for pattern in sorted(dist) if dist else ():
            lines.append(f"{pattern},{dist[pattern]!r}")
        return "\n".join(lines) + "\n"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "beta": _complex_json(source.beta),
        "herald": branches,
        "fidelity_W_T1": fidelities["T1"],
        "fidelity_W_T2": fidelities["T2"],
        "coincidence_distribution": dist,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_herald(cfg: RunConfig) -> str:
    spec, source = _resolve_circuit(cfg)
    state = propagate(source, spec)
    branches, fidelities, _ = _herald_summary(state)
    if cfg.fmt == "csv":
        lines = ["branch,probability,fidelity_W,residual_weight"]
        for name in ("T1", "T2"):
            fid = fidelities[name]
            lines.append(
                ",".join(
                    [
                        name,
                        repr(branches[name]["probability"]),
                        "" if fid is None else repr(fid),
                        repr(branches[name]["residual_weight"]),
                    ]
                )
            )
        return "\n".join(lines) + "\n"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "herald",
        "branches": {
            name: {**branches[name], "fidelity_W": fidelities[name]}
            for name in ("T1", "T2")
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _tomo_source(cfg: RunConfig):
    state = cfg.extras["state"]
    if state == "circuit":
        spec, source = _resolve_circuit(cfg)
        result = herald(propagate(source, spec), Branch.T1)
        if result.heralded_state is None:
            raise WchipError("herald probability is zero; nothing to tomograph")
        return result.heralded_state
    if state == "w":
        return w_state(Branch.T1)
    if state == "rho_s":
        return rho_incoherent()
    if state == "rho_b":
        return rho_biseparable()
    return PureState.basis(basis_from_pattern("BBR", (2, 3, 4)))


def cmd_tomo(cfg: RunConfig) -> str:
    source = _tomo_source(cfg)
    result = run_tomography(
        source,
        shots=cfg.shots,
        seed=cfg.seed,
        diag_threshold=cfg.extras["diag_threshold"],
    )
    report = discriminate(result.rho, threshold=cfg.extras["w_threshold"])
    if cfg.fmt == "csv":
        return result.rho.to_csv()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "tomo",
        "state": cfg.extras["state"],
        "shots": result.shots,
        "seed": cfg.seed,
        "diagonals": {k: float(v) for k, v in result.diagonal_frequencies.items()},
        "coefficients": {
            name: est.as_json_dict() for name, est in result.coefficients.items()
        },
        "rho": result.rho.as_json_dict(),
        "records": [record.as_json_dict() for record in result.records],
        "report": report.as_json_dict(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_optimize(cfg: RunConfig) -> str:
    result = maximize(
        cfg.extras["tol"],
        grid_step=cfg.extras["grid_step"],
        grid_bounds=cfg.extras["grid_bounds"],
    )
    if cfg.fmt == "csv":
        return (
            "r1,r2,r3,value\n"
            + ",".join(repr(float(v)) for v in result)
            + "\n"
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "optimize",
        "r1": result.r1,
        "r2": result.r2,
        "r3": result.r3,
        "value": result.value,
        "tol": cfg.extras["tol"],
        "grid_step": cfg.extras["grid_step"],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_sweep(cfg: RunConfig) -> str:
    table = sweep(cfg.extras["sweep"])
    if cfg.fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "sweep",
            "columns": list(table.columns),
            "rows": [list(row) for row in table.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return table.to_csv()


_COMMANDS = {
    "simulate": cmd_simulate,
    "herald": cmd_herald,
    "tomo": cmd_tomo,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wchip",
        description="Simulate heralded W-state generation in a color-routed photonic circuit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("simulate", True),
        ("herald", True),
        ("tomo", True),
        ("optimize", False),
        ("sweep", True),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="JSON config file")
        p.add_argument("--out", default=None, help="output file (defaults to stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--shots", type=int, default=None)
    return parser


def _load_config_doc(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return doc


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    base = os.environ.get("WCHIP_OUT_DIR")
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_config_doc(args.config)
        cfg = _build_config(args.command, doc, args)
        text = _COMMANDS[args.command](cfg)
        _write_output(text, cfg.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DiagonalsNotUniform as exc:
        print(f"tomography aborted: {exc}", file=sys.stderr)
        return 3
    except GridTooLarge as exc:
        print(f"sweep rejected: {exc}", file=sys.stderr)
        return 4
    except WchipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure, still a clean exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
