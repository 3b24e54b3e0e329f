"""Configuration-driven front end for parameter sweeps.

A JSON config selects a model, a list of sizes, a sweep grid and a list of
analyses; results land in ``results.csv`` with one row per (size, grid point,
analysis, key).  Grid points are independent jobs: each one is checkpointed
to its own fragment file so long sweeps can be resumed, and a failing point
is recorded without aborting the sweep.

Config schema (JSON object)::

    {
      "model": "lmg" | "z2_lmg" | "two_mode_dicke" | "custom",
      "params": {"gamma": 1.0, "kappa": 1.0, "omega": 1.0},
      "N": [10, 20],
      "k_max": 7,                       # or "auto" with "epsilon"
      "epsilon": 1e-4,                  # used when k_max == "auto"
      "k_limit": 12,
      "sweep": {"parameter": "g", "grid": [0.2, 0.5, 0.8]},
      "analyses": ["steady_state", "gap"],
      "observables": ["Sz"],            # names or {"name": ..., "file": ...}
      "output_dir": "out",
      "solver": {"shift": 0.0, "count": 6, "tol": 1e-10},
      "seed": 0,
      "workers": 1,
      "export_matrices": false,
      "custom": {                       # only for model == "custom"
        "hamiltonian_file": "h.txt",
        "baths": [{"coupling_file": "l.txt",
                   "terms": [{"amplitude": [0.1, 0.0],
                              "frequency": 0.5, "kappa": 1.0}]}]
      }
    }

For ``lmg`` and ``z2_lmg`` the parameter ``g`` is translated to ``V = g *
gamma``.  Matrix files use the triplet text format (``rows cols nnz`` header,
then ``row col re im`` per line, zero-based).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .builder import assemble, export_matrix
from .convergence import auto_cutoff, auto_truncate
from .embedding import dimension_report
from .errors import ConfigError
from .linalg import read_triplets
from .models import ModelInstance, BathSpec, BathTerm, custom, lmg, two_mode_dicke, z2_lmg
from .operators import SpinSpace, spin_operators
from .spectra import check_properties, spectrum, steady_state
from .symmetry import decompose, sector_leading_eigs
from .dpt import REALNESS_GATE, fidelity, reconstruct_mixture, ssb_pair

log = logging.getLogger("heomspectra")

VALID_ANALYSES = (
    "steady_state",
    "gap",
    "sectors",
    "decompose",
    "ssb",
    "converge",
    "compare_markovian",
    "properties",
)
VALID_MODELS = ("lmg", "z2_lmg", "two_mode_dicke", "custom")
SPIN_OBSERVABLES = ("Sz", "Sx", "Sy", "Sp", "Sm")

CSV_COLUMNS = (
    "run_id,model,N,k_max,sweep_param,sweep_value,analysis,key,re_value,im_value"
)


@dataclass
class ObservableSpec:
    name: str
    file: Optional[str] = None


@dataclass
class RunConfig:
    model: str
    params: Dict[str, float]
    sizes: List[int]
    k_max: Optional[int]
    epsilon: float
    k_limit: int
    sweep_parameter: str
    sweep_grid: List[float]
    analyses: List[str]
    observables: List[ObservableSpec]
    output_dir: str
    shift: float
    eig_count: int
    tol: float
    seed: int
    workers: int
    export_matrices: bool
    custom_spec: Optional[dict] = None
    config_hash: str = field(default="")


def _require(raw: dict, key: str, kind, path: str):
    if key not in raw:
        raise ConfigError(f"{path}{key}", "missing required field")
    value = raw[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{path}{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def parse_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(str(path), "top-level config must be an object")

    model = _require(raw, "model", str, "")
    if model not in VALID_MODELS:
        raise ConfigError("model", f"unknown model {model!r}; valid: {VALID_MODELS}")

    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params", "must be an object of numbers")
    for key, value in params.items():
        if not isinstance(value, (int, float)):
            raise ConfigError(f"params.{key}", "must be a number")

    sizes = _require(raw, "N", list, "")
    if not sizes or not all(isinstance(n, int) and n >= 1 for n in sizes):
        raise ConfigError("N", "must be a non-empty list of positive integers")

    k_raw = raw.get("k_max", "auto")
    epsilon = float(raw.get("epsilon", 1e-4))
    if epsilon <= 0:
        raise ConfigError("epsilon", "must be > 0")
    if k_raw == "auto":
        k_max = None
    elif isinstance(k_raw, int):
        if k_raw < 0:
            raise ConfigError("k_max", "must be >= 0")
        k_max = k_raw
    else:
        raise ConfigError("k_max", "must be a non-negative integer or 'auto'")
    k_limit = raw.get("k_limit", 12)
    if not isinstance(k_limit, int) or k_limit < 1:
        raise ConfigError("k_limit", "must be a positive integer")

    sweep = _require(raw, "sweep", dict, "")
    parameter = _require(sweep, "parameter", str, "sweep.")
    grid = _require(sweep, "grid", list, "sweep.")
    if not grid or not all(isinstance(v, (int, float)) for v in grid):
        raise ConfigError("sweep.grid", "must be a non-empty list of numbers")

    analyses = _require(raw, "analyses", list, "")
    if not analyses:
        raise ConfigError("analyses", "must be a non-empty list")
    for i, token in enumerate(analyses):
        if token not in VALID_ANALYSES:
            raise ConfigError(
                f"analyses[{i}]",
                f"unknown analysis {token!r}; valid tokens: {', '.join(VALID_ANALYSES)}",
            )

    observables: List[ObservableSpec] = []
    for i, entry in enumerate(raw.get("observables", ["Sz"])):
        if isinstance(entry, str):
            observables.append(ObservableSpec(entry))
        elif isinstance(entry, dict) and "name" in entry:
            observables.append(ObservableSpec(str(entry["name"]), entry.get("file")))
        else:
            raise ConfigError(f"observables[{i}]", "must be a name or {name, file}")

    solver = raw.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("solver", "must be an object")
    shift = float(solver.get("shift", 0.0))
    eig_count = int(solver.get("count", 6))
    tol = float(solver.get("tol", 1e-10))
    if eig_count < 1:
        raise ConfigError("solver.count", "must be >= 1")
    if tol <= 0:
        raise ConfigError("solver.tol", "must be > 0")

    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers", "must be a positive integer")

    custom_spec = raw.get("custom")
    if model == "custom":
        if not isinstance(custom_spec, dict):
            raise ConfigError("custom", "required for model == 'custom'")
        if len(grid) != 1:
            raise ConfigError(
                "sweep.grid", "custom models support a single grid point only"
            )

    config = RunConfig(
        model=model,
        params={k: float(v) for k, v in params.items()},
        sizes=list(sizes),
        k_max=k_max,
        epsilon=epsilon,
        k_limit=k_limit,
        sweep_parameter=parameter,
        sweep_grid=[float(v) for v in grid],
        analyses=list(analyses),
        observables=observables,
        output_dir=str(raw.get("output_dir", "out")),
        shift=shift,
        eig_count=eig_count,
        tol=tol,
        seed=int(raw.get("seed", 0)),
        workers=workers,
        export_matrices=bool(raw.get("export_matrices", False)),
        custom_spec=custom_spec,
    )
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    config.config_hash = hashlib.sha256(canonical.encode()).hexdigest()[:16]
    # Observables must resolve for every configured size.
    for size in config.sizes:
        model_probe = build_model(config, size, config.sweep_grid[0])
        resolve_observables(config, model_probe)
    return config


def build_model(config: RunConfig, size: int, sweep_value: float) -> ModelInstance:
    """Instantiate the configured model at one grid point."""
    params = dict(config.params)
    params[config.sweep_parameter] = sweep_value

    def need(*names):
        missing = [n for n in names if n not in params]
        if missing:
            raise ConfigError("params", f"missing parameters {missing} for {config.model}")
        return [params[n] for n in names]

    if config.model == "lmg":
        gamma, kappa, omega = need("gamma", "kappa", "omega")
        v = params["g"] * gamma if "g" in params else need("V")[0]
        return lmg(size, v, gamma, kappa, omega)
    if config.model == "z2_lmg":
        gamma, kappa, omega, h = need("gamma", "kappa", "omega", "h")
        v = params["g"] * gamma if "g" in params else need("V")[0]
        return z2_lmg(size, v, gamma, kappa, omega, h)
    if config.model == "two_mode_dicke":
        g, omega0, omega, kappa = need("g", "omega0", "omega", "kappa")
        return two_mode_dicke(size, g, omega0, omega, kappa)
    # custom
    spec = config.custom_spec
    h_matrix = read_triplets(spec["hamiltonian_file"]).toarray()
    baths = []
    for entry in spec.get("baths", []):
        coupling = read_triplets(entry["coupling_file"]).toarray()
        terms = tuple(
            BathTerm(
                complex(t["amplitude"][0], t["amplitude"][1]),
                float(t["frequency"]),
                float(t["kappa"]),
            )
            for t in entry["terms"]
        )
        baths.append(BathSpec(coupling, terms))
    return custom(h_matrix, baths, params=params, size=size)


def resolve_observables(
    config: RunConfig, model: ModelInstance
) -> List[Tuple[str, np.ndarray]]:
    """Map observable specs to matrices, enforcing Hermiticity."""
    resolved = []
    spin_ops = None
    for i, spec in enumerate(config.observables):
        if spec.file is not None:
            matrix = read_triplets(spec.file).toarray()
            if np.abs(matrix - matrix.conj().T).max() > 1e-10:
                raise ConfigError(
                    f"observables[{i}]", f"custom observable {spec.name!r} is not Hermitian"
                )
            if matrix.shape != (model.dim, model.dim):
                raise ConfigError(
                    f"observables[{i}]",
                    f"observable {spec.name!r} has shape {matrix.shape}, "
                    f"model dimension is {model.dim}",
                )
        elif spec.name in SPIN_OBSERVABLES:
            if model.dim != model.size + 1:
                raise ConfigError(
                    f"observables[{i}]",
                    f"named spin observable {spec.name!r} needs a collective-spin model",
                )
            if spin_ops is None:
                spin_ops = spin_operators(SpinSpace(model.size))
            matrix = spin_ops[spec.name]
        else:
            raise ConfigError(
                f"observables[{i}]",
                f"unknown observable {spec.name!r}; use one of {SPIN_OBSERVABLES} or give a file",
            )
        resolved.append((spec.name, matrix))
    return resolved


def _resolve_k_max(config: RunConfig, model: ModelInstance, observables) -> int:
    if config.k_max is not None:
        return config.k_max
    trace = auto_truncate(
        model, observables[0][1], epsilon=config.epsilon, k_start=1, k_limit=config.k_limit
    )
    if trace.selected is None:
        raise RuntimeError(
            f"auto truncation did not converge below {config.epsilon} by k_max={config.k_limit}"
        )
    return trace.selected


def _rows_steady(model, liouv, observables, solver):
    state, _ = steady_state(liouv, count=solver["count"], tol=solver["tol"], seed=solver["seed"])
    rows = []
    for name, matrix in observables:
        value = complex(np.trace(matrix @ state.matrix))
        rows.append(("steady_state", name, value.real, value.imag))
    rows.append(("steady_state", "min_eigenvalue", state.min_eigenvalue, 0.0))
    rows.append(("steady_state", "hermiticity_defect", state.hermiticity_defect, 0.0))
    return rows


def _rows_gap(model, liouv, observables, solver):
    result = spectrum(liouv, count=solver["count"], tol=solver["tol"], seed=solver["seed"])
    rows = [("gap", "lambda_0", result.eigenvalues[0].real, result.eigenvalues[0].imag)]
    lead = result.eigenvalues[0]
    for value in result.eigenvalues[1:]:
        if abs(value - lead) > 1e-9:
            rows.append(("gap", "lambda_1", value.real, value.imag))
            break
    return rows


def _rows_properties(model, liouv, observables, solver):
    mode = "full" if liouv.dim <= 2000 else "sampled"
    report = check_properties(liouv, mode=mode, count=max(solver["count"], 12),
                              tol=solver["tol"], seed=solver["seed"])
    return [
        ("properties", f"{key}[{report.checked[key]}]", value, 0.0)
        for key, value in sorted(report.residuals.items())
    ]


def _rows_decompose(model, liouv, observables, solver):
    decomp = decompose(liouv)
    rows = [
        ("decompose", "n_sectors", float(len(decomp.sectors)), 0.0),
        ("decompose", "off_sector_residual", decomp.off_sector_residual, 0.0),
    ]
    for charge in decomp.charges_present():
        rows.append(("decompose", f"dim[k={charge}]", float(decomp.dimension(charge)), 0.0))
    return rows


def _rows_sectors(model, liouv, observables, solver):
    decomp = decompose(liouv)
    rows = []
    for charge in decomp.charges_present():
        dim = decomp.dimension(charge)
        count = min(solver["count"], dim)
        res = sector_leading_eigs(decomp, charge, count=count, tol=solver["tol"], seed=solver["seed"])
        rows.append(("sectors", f"dim[k={charge}]", float(dim), 0.0))
        for i, value in enumerate(res.eigenvalues):
            rows.append(("sectors", f"lambda_{i}[k={charge}]", value.real, value.imag))
    return rows


def _rows_ssb(model, liouv, observables, solver):
    decomp = decompose(liouv)
    scale = model.params.get("omega", 1.0)
    rows = []
    res = sector_leading_eigs(decomp, 1, count=min(solver["count"], decomp.dimension(1)),
                              tol=solver["tol"], seed=solver["seed"])
    value = complex(res.eigenvalues[0])
    rows.append(("ssb", "lambda_0[k=1]", value.real, value.imag))
    rows.append(("ssb", "gate_ratio", abs(value.imag) / scale, 0.0))
    if abs(value.imag) / scale < REALNESS_GATE:
        pair = ssb_pair(decomp, scale, count=solver["count"], tol=solver["tol"], seed=solver["seed"])
        state, _ = steady_state(decomp, charge=0, count=solver["count"],
                                tol=solver["tol"], seed=solver["seed"])
        rows.append(("ssb", "fidelity", fidelity(reconstruct_mixture(pair), state), 0.0))
        for name, matrix in observables:
            plus = complex(np.trace(matrix @ pair.rho_plus.matrix))
            minus = complex(np.trace(matrix @ pair.rho_minus.matrix))
            rows.append(("ssb", f"{name}[plus]", plus.real, plus.imag))
            rows.append(("ssb", f"{name}[minus]", minus.real, minus.imag))
    return rows


def _make_converge(config: RunConfig):
    def _rows_converge(model, liouv, observables, solver):
        trace = auto_truncate(model, observables[0][1], epsilon=config.epsilon,
                              k_start=1, k_limit=config.k_limit)
        rows = [
            ("converge", f"C[k={k}]", measure, 0.0)
            for k, measure in zip(trace.truncations, trace.measures)
        ]
        selected = float(trace.selected) if trace.selected is not None else -1.0
        rows.append(("converge", "selected_k_max", selected, 0.0))
        return rows

    return _rows_converge


def _make_compare(config: RunConfig):
    def _rows_compare(model, liouv, observables, solver):
        name, matrix = observables[0]
        heom_trace = auto_truncate(model, matrix, epsilon=config.epsilon,
                                   k_start=1, k_limit=config.k_limit)
        lm_trace = auto_cutoff(model, matrix, epsilon=config.epsilon,
                               n_start=1, n_limit=max(config.k_limit, 16))
        if heom_trace.selected is None or lm_trace.selected is None:
            raise RuntimeError("matched-tolerance truncation search was exhausted")
        from .convergence import embedding_expectation, steady_expectation

        k_sel, n_sel = heom_trace.selected, lm_trace.selected
        delta = abs(
            steady_expectation(model, matrix, k_sel)
            - embedding_expectation(model, matrix, n_sel)
        )
        report = dimension_report(model, k_sel, cutoff_rule=n_sel)
        return [
            ("compare_markovian", "selected_k_max", float(k_sel), 0.0),
            ("compare_markovian", "selected_n_c", float(n_sel), 0.0),
            ("compare_markovian", f"delta[{name}]", delta, 0.0),
            ("compare_markovian", "dim_heom", report["dim_heom"], 0.0),
            ("compare_markovian", "dim_lm", report["dim_lm"], 0.0),
            ("compare_markovian", "dim_ratio", report["ratio"], 0.0),
        ]

    return _rows_compare


def execute_point(config: RunConfig, index: int, size: int, sweep_value: float):
    """Run every configured analysis at one grid point; returns (index, rows)."""
    model = build_model(config, size, sweep_value)
    observables = resolve_observables(config, model)
    k_max = _resolve_k_max(config, model, observables)
    liouv = assemble(model, k_max)
    solver = {"count": config.eig_count, "tol": config.tol, "seed": config.seed}
    handlers = {
        "steady_state": _rows_steady,
        "gap": _rows_gap,
        "properties": _rows_properties,
        "decompose": _rows_decompose,
        "sectors": _rows_sectors,
        "ssb": _rows_ssb,
        "converge": _make_converge(config),
        "compare_markovian": _make_compare(config),
    }
    run_id = f"{config.config_hash[:8]}-{index:04d}"
    rows = []
    for analysis in config.analyses:
        for analysis_name, key, re_value, im_value in handlers[analysis](
            model, liouv, observables, solver
        ):
            rows.append(
                {
                    "run_id": run_id,
                    "model": config.model,
                    "N": size,
                    "k_max": k_max,
                    "sweep_param": config.sweep_parameter,
                    "sweep_value": sweep_value,
                    "analysis": analysis_name,
                    "key": key,
                    "re_value": re_value,
                    "im_value": im_value,
                }
            )
    if config.export_matrices:
        out = Path(config.output_dir) / f"matrix_point{index:04d}.txt"
        export_matrix(liouv, out)
    return index, rows


def _point_worker(args):
    config, index, size, value = args
    try:
        return execute_point(config, index, size, value), None
    except Exception as exc:  # crash isolation: record and continue
        return (index, []), f"point {index} (N={size}, {config.sweep_parameter}={value}): {exc}"


def _format_row(row: dict) -> str:
    return ",".join(
        [
            row["run_id"],
            row["model"],
            str(row["N"]),
            str(row["k_max"]),
            row["sweep_param"],
            f"{row['sweep_value']:.17g}",
            row["analysis"],
            row["key"],
            f"{row['re_value']:.17g}",
            f"{row['im_value']:.17g}",
        ]
    )


def run(config: RunConfig, workers: Optional[int] = None) -> int:
    """Execute a sweep; returns the process exit status (0 ok, 1 partial)."""
    workers = config.workers if workers is None else workers
    out_dir = Path(config.output_dir)
    points_dir = out_dir / "points"
    points_dir.mkdir(parents=True, exist_ok=True)

    points = [
        (index, size, value)
        for index, (size, value) in enumerate(
            (size, value) for size in config.sizes for value in config.sweep_grid
        )
    ]
    results: Dict[int, List[dict]] = {}
    failures: List[str] = []

    pending = []
    for index, size, value in points:
        fragment = points_dir / f"point_{index:04d}.json"
        if fragment.exists():
            payload = json.loads(fragment.read_text())
            if payload.get("config_hash") == config.config_hash:
                if payload.get("error"):
                    failures.append(payload["error"])
                results[index] = payload["rows"]
                log.info("point %d restored from checkpoint", index)
                continue
        pending.append((config, index, size, value))

    def _record(outcome, error):
        (index, rows), fragment = outcome, points_dir / f"point_{outcome[0]:04d}.json"
        if error:
            failures.append(error)
            log.warning("%s", error)
        results[index] = rows
        fragment.write_text(
            json.dumps(
                {"config_hash": config.config_hash, "rows": rows, "error": error},
                sort_keys=True,
            )
        )

    if workers > 1 and len(pending) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for outcome, error in pool.map(_point_worker, pending):
                _record(outcome, error)
    else:
        for job in pending:
            _record(*_point_worker(job))

    lines = [
        "# heomspectra results",
        f"# version={__version__}",
        f"# config_hash={config.config_hash}",
        f"# epsilon={config.epsilon:.17g} eig_count={config.eig_count} "
        f"tol={config.tol:.17g} shift={config.shift:.17g} seed={config.seed}",
        f"# generated={time.strftime('%Y-%m-%dT%H:%M:%S')}",
        CSV_COLUMNS,
    ]
    for index in sorted(results):
        lines.extend(_format_row(row) for row in results[index])
    (out_dir / "results.csv").write_text("\n".join(lines) + "\n")

    if failures:
        print(f"{len(failures)} of {len(points)} points failed:", file=sys.stderr)
        for failure in failures:
            print(f"  {failure}", file=sys.stderr)
        return 1
    log.info("wrote %s", out_dir / "results.csv")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="heomspectra",
        description="Sweep a model over a parameter grid and persist spectral analyses.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--workers", type=int, help="worker pool size (overrides the config)")
    parser.add_argument("--verbose", action="store_true", help="enable progress logging")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        config.output_dir = args.out
    return run(config, workers=args.workers)


if __name__ == "__main__":
    sys.exit(main())
