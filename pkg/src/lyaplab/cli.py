"""Command-line interface: configuration, experiment orchestration and
reproducible result serialization.

A run is fully described by a JSON config document (schema
``lyapunov-lab-config/1``); every output embeds the config echo and master
seed, so any result can be re-derived bit-identically with any worker count.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    GaussianDiagonalCGF,
    TelegraphCGF,
    analytic_gle_gaussian,
    analytic_lyapunov_gaussian,
    gle_shift_vector,
    legendre_transform,
)
from .estimators import (
    EstimateRejectedError,
    GLEEstimate,
    LEEstimate,
    estimate_gle,
    estimate_le,
)
from .evolution import SCHEMES, BatchEvolver
from .processes import (
    RNG_VERSION,
    CorrelationShape,
    IsotropicKernel,
    ProcessSpec,
    open_stream,
    sample_path,
)

CONFIG_SCHEMA = "lyapunov-lab-config/1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REJECTED = 3
EXIT_VERIFY = 4


class ConfigError(ValueError):
    """Config schema violation; message carries the offending field path."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment."""

    process: ProcessSpec
    scheme: str = "midpoint"
    dt: float = 0.01
    T: float | None = None
    T_list: tuple[float, ...] | None = None
    n_realizations: int = 100
    eta_grid: tuple[tuple[float, ...], ...] | None = None
    eta_cap: float = 2.0
    bootstrap: int = 400
    workers: int | None = None
    transient: float | None = None
    output_dir: str = "out"
    formats: tuple[str, ...] = ("json", "csv")


def _need(obj: dict, key: str, types, path: str):
    if key not in obj or obj[key] is None:
        raise ConfigError(f"{path}.{key}: required field missing")
    val = obj[key]
    if not isinstance(val, types):
        raise ConfigError(f"{path}.{key}: expected {types}, got {type(val).__name__}")
    return val


def _opt(obj: dict, key: str, types, path: str, default=None):
    val = obj.get(key, default)
    if val is None:
        return default
    if not isinstance(val, types):
        raise ConfigError(f"{path}.{key}: expected {types}, got {type(val).__name__}")
    return val


def parse_process(doc: dict, path: str = "process") -> ProcessSpec:
    kind = _need(doc, "kind", str, path)
    dim = int(_opt(doc, "dim", int, path, 1))
    kernel = None
    if doc.get("kernel") is not None:
        kd = _need(doc, "kernel", dict, path)
        kernel = IsotropicKernel(
            a=float(_need(kd, "a", (int, float), f"{path}.kernel")),
            b=float(_need(kd, "b", (int, float), f"{path}.kernel")),
            c=float(_need(kd, "c", (int, float), f"{path}.kernel")),
            traceless=bool(_opt(kd, "traceless", bool, f"{path}.kernel", False)),
        )
    shape = None
    if doc.get("epsilon") is not None:
        shape = CorrelationShape(
            epsilon=float(_need(doc, "epsilon", (int, float), path)),
            kind=_opt(doc, "shape_kind", str, path, "exponential"),
        )
    diag = doc.get("diag")
    try:
        return ProcessSpec(
            kind=kind,
            dim=dim,
            kernel=kernel,
            shape=shape,
            sigma=_opt(doc, "sigma", (int, float), path),
            nu=_opt(doc, "nu", (int, float), path),
            mod_amplitude=_opt(doc, "mod_amplitude", (int, float), path),
            mod_epsilon=_opt(doc, "mod_epsilon", (int, float), path),
            diag=tuple(float(x) for x in diag) if diag is not None else None,
            master_seed=int(_opt(doc, "master_seed", int, path, 0)),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def resolve_eta_grid(doc, dim: int, path: str = "eta_grid") -> tuple[tuple[float, ...], ...]:
    """Expand an eta-grid spec: explicit points, per-axis cross product, or a
    central-difference stencil (origin plus +-h along every axis)."""
    if doc is None:
        raise ConfigError(f"{path}: required for gle runs")
    if isinstance(doc, (list, tuple)):
        doc = {"points": list(doc)}
    if "points" in doc:
        pts = [tuple(float(x) for x in row) for row in doc["points"]]
    elif "axes" in doc:
        axes = [list(map(float, ax)) for ax in doc["axes"]]
        if len(axes) != dim:
            raise ConfigError(f"{path}.axes: need {dim} axes, got {len(axes)}")
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = [tuple(float(v) for v in row) for row in np.stack(mesh, axis=-1).reshape(-1, dim)]
    elif "stencil_h" in doc:
        h = float(doc["stencil_h"])
        pts = [tuple([0.0] * dim)]
        for k in range(dim):
            for sgn in (1.0, -1.0):
                row = [0.0] * dim
                row[k] = sgn * h
                pts.append(tuple(row))
    else:
        raise ConfigError(f"{path}: expected points, axes or stencil_h")
    for row in pts:
        if len(row) != dim:
            raise ConfigError(f"{path}: point {row} has wrong dimension (need {dim})")
    return tuple(pts)


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError(": config must be a JSON object")
    schema = doc.get("schema", CONFIG_SCHEMA)
    if schema != CONFIG_SCHEMA:
        raise ConfigError(f"schema: expected {CONFIG_SCHEMA!r}, got {schema!r}")
    process = parse_process(_need(doc, "process", dict, ""))
    scheme = _opt(doc, "scheme", str, "", "midpoint")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: unknown scheme {scheme!r}; expected one of {SCHEMES}")
    T_list = doc.get("T_list")
    eta = doc.get("eta_grid")
    workers = doc.get("workers")
    if workers == "auto":
        workers = os.cpu_count()
    elif workers is not None and not isinstance(workers, int):
        raise ConfigError("workers: expected integer or 'auto'")
    outputs = _opt(doc, "outputs", dict, "", {}) or {}
    formats = tuple(outputs.get("formats", ("json", "csv")))
    for f in formats:
        if f not in ("json", "csv"):
            raise ConfigError(f"outputs.formats: unknown format {f!r}")
    try:
        return ExperimentConfig(
            process=process,
            scheme=scheme,
            dt=float(_need(doc, "dt", (int, float), "")),
            T=float(doc["T"]) if doc.get("T") is not None else None,
            T_list=tuple(float(t) for t in T_list) if T_list is not None else None,
            n_realizations=int(_need(doc, "n_realizations", int, "")),
            eta_grid=resolve_eta_grid(eta, process.dim) if eta is not None else None,
            eta_cap=float(_opt(doc, "eta_cap", (int, float), "", 2.0)),
            bootstrap=int(_opt(doc, "bootstrap", int, "", 400)),
            workers=workers,
            transient=float(doc["transient"]) if doc.get("transient") is not None else None,
            output_dir=str(outputs.get("dir", "out")),
            formats=formats,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f": {exc}") from exc


def serialize_config(cfg: ExperimentConfig) -> dict:
    p = cfg.process
    doc = {
        "schema": CONFIG_SCHEMA,
        "process": {
            "kind": p.kind,
            "dim": p.dim,
            "kernel": (
                {"a": p.kernel.a, "b": p.kernel.b, "c": p.kernel.c, "traceless": p.kernel.traceless}
                if p.kernel is not None else None
            ),
            "epsilon": p.shape.epsilon if p.shape is not None else None,
            "shape_kind": p.shape.kind if p.shape is not None else None,
            "sigma": p.sigma,
            "nu": p.nu,
            "mod_amplitude": p.mod_amplitude,
            "mod_epsilon": p.mod_epsilon,
            "diag": list(p.diag) if p.diag is not None else None,
            "master_seed": p.master_seed,
        },
        "scheme": cfg.scheme,
        "dt": cfg.dt,
        "T": cfg.T,
        "T_list": list(cfg.T_list) if cfg.T_list is not None else None,
        "n_realizations": cfg.n_realizations,
        "eta_grid": {"points": [list(r) for r in cfg.eta_grid]} if cfg.eta_grid is not None else None,
        "eta_cap": cfg.eta_cap,
        "bootstrap": cfg.bootstrap,
        "workers": cfg.workers,
        "transient": cfg.transient,
        "outputs": {"dir": cfg.output_dir, "formats": list(cfg.formats)},
    }
    return doc


def load_preset(name: str) -> dict:
    ref = resources.files("lyaplab").joinpath(f"presets/{name}.json")
    if not ref.is_file():
        available = sorted(
            p.name[:-5] for p in resources.files("lyaplab").joinpath("presets").iterdir()
            if p.name.endswith(".json"))
        raise ConfigError(f"preset: unknown preset {name!r}; available: {available}")
    return json.loads(ref.read_text())


# ----------------------------------------------------------------------
# outputs and manifest
# ----------------------------------------------------------------------


@dataclass
class RunManifest:
    """Audit record of one run; digests cover the emitted output files."""

    config: dict
    tool_version: str
    rng_version: str
    wall_clock_seconds: float
    excluded_realizations: int
    outputs: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "lyapunov-lab-manifest/1",
            "config": self.config,
            "tool_version": self.tool_version,
            "rng_version": self.rng_version,
            "wall_clock_seconds": self.wall_clock_seconds,
            "excluded_realizations": self.excluded_realizations,
            "outputs": self.outputs,
        }


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow(row)


def _write_columns_note(path: Path, columns: dict[str, str]) -> None:
    lines = [f"{name}: {desc}" for name, desc in columns.items()]
    path.write_text("\n".join(lines) + "\n")


def _le_documents(est: LEEstimate, cfg: ExperimentConfig):
    doc = {
        "schema": "lyapunov-lab-le/1",
        "lambda": est.lambda_.tolist(),
        "stderr": est.stderr.tolist(),
        "T": est.T,
        "n_realizations": est.n_realizations,
        "batch_count": est.batch_count,
        "excluded": est.excluded,
        "meta": est.meta,
        "config": serialize_config(cfg),
        "tool_version": __version__,
        "rng": RNG_VERSION,
    }
    rows = [(k + 1, repr(float(l)), repr(float(s)))
            for k, (l, s) in enumerate(zip(est.lambda_, est.stderr))]
    return doc, rows


def _gle_documents(est: GLEEstimate, cfg: ExperimentConfig):
    doc = {
        "schema": "lyapunov-lab-gle/1",
        "eta_grid": est.eta_grid.tolist(),
        "w": est.w.tolist(),
        "ci_low": est.ci_low.tolist(),
        "ci_high": est.ci_high.tolist(),
        "ess": est.ess.tolist(),
        "T_list": list(est.T_list),
        "w_by_T": est.w_by_T.tolist(),
        "fit_residual": est.fit_residual.tolist(),
        "unreliable": est.unreliable.tolist(),
        "n_realizations": est.n_realizations,
        "meta": est.meta,
        "config": serialize_config(cfg),
        "tool_version": __version__,
        "rng": RNG_VERSION,
    }
    d = est.eta_grid.shape[1]
    rows = []
    for i in range(est.eta_grid.shape[0]):
        rows.append(tuple(repr(float(x)) for x in est.eta_grid[i])
                    + (repr(float(est.w[i])), repr(float(est.ci_low[i])),
                       repr(float(est.ci_high[i])), repr(float(est.ess[i])),
                       repr(float(est.fit_residual[i]))))
    header = [f"eta_{k + 1}" for k in range(d)] + [
        "w", "ci_low", "ci_high", "ess", "T_extrapolation_residual"]
    return doc, header, rows


def run_le(cfg: ExperimentConfig, output_dir: str | None = None):
    """Drive a Lyapunov-spectrum estimate and serialize it with a manifest."""
    if cfg.T is None:
        raise ConfigError("T: required for le runs")
    t0 = time.monotonic()
    est = estimate_le(
        cfg.process, cfg.scheme, cfg.dt, cfg.T, cfg.n_realizations,
        workers=cfg.workers, transient=cfg.transient,
    )
    wall = time.monotonic() - t0
    outdir = Path(output_dir if output_dir is not None else cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    doc, rows = _le_documents(est, cfg)
    written = []
    if "json" in cfg.formats:
        _write_json(outdir / "le.json", doc)
        written.append(outdir / "le.json")
    if "csv" in cfg.formats:
        _write_csv(outdir / "le.csv", ["k", "lambda", "stderr"], rows)
        _write_columns_note(outdir / "le.columns.txt", {
            "k": "index of the exponent (1 = largest)",
            "lambda": "estimated Lyapunov exponent, inverse time units",
            "stderr": "between-realization standard error",
        })
        written += [outdir / "le.csv", outdir / "le.columns.txt"]
    manifest = RunManifest(
        config=serialize_config(cfg), tool_version=__version__, rng_version=RNG_VERSION,
        wall_clock_seconds=wall, excluded_realizations=est.excluded,
        outputs=[{"path": p.name, "sha256": _sha256(p)} for p in written],
    )
    _write_json(outdir / "manifest.json", manifest.to_dict())
    return est, manifest


def run_gle(cfg: ExperimentConfig, output_dir: str | None = None):
    """Drive a moment-growth-rate estimate and serialize it with a manifest."""
    if cfg.T_list is None or cfg.eta_grid is None:
        raise ConfigError("T_list and eta_grid: required for gle runs")
    t0 = time.monotonic()
    est = estimate_gle(
        cfg.process, cfg.scheme, cfg.dt, cfg.T_list, cfg.n_realizations,
        eta_grid=cfg.eta_grid, workers=cfg.workers, eta_cap=cfg.eta_cap,
        n_boot=cfg.bootstrap,
    )
    wall = time.monotonic() - t0
    outdir = Path(output_dir if output_dir is not None else cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    doc, header, rows = _gle_documents(est, cfg)
    written = []
    if "json" in cfg.formats:
        _write_json(outdir / "gle.json", doc)
        written.append(outdir / "gle.json")
    if "csv" in cfg.formats:
        _write_csv(outdir / "gle.csv", header, rows)
        _write_columns_note(outdir / "gle.columns.txt", {
            "eta_k": "tilt vector components",
            "w": "moment growth rate, 1/T-extrapolated",
            "ci_low/ci_high": "bootstrap 95% interval",
            "ess": "effective sample size at the largest horizon",
            "T_extrapolation_residual": "max deviation of the linear 1/T fit",
        })
        written += [outdir / "gle.csv", outdir / "gle.columns.txt"]
    manifest = RunManifest(
        config=serialize_config(cfg), tool_version=__version__, rng_version=RNG_VERSION,
        wall_clock_seconds=wall, excluded_realizations=int(est.meta.get("excluded", 0)),
        outputs=[{"path": p.name, "sha256": _sha256(p)} for p in written],
    )
    _write_json(outdir / "manifest.json", manifest.to_dict())
    return est, manifest


def run_predict(cfg: ExperimentConfig, output_dir: str | None = None) -> dict:
    """Emit closed-form predictions for the configured process."""
    p = cfg.process
    doc: dict = {"schema": "lyapunov-lab-predict/1", "kind": p.kind,
                 "shift_vector": gle_shift_vector(p.dim).values.tolist()}
    if p.kind in ("gaussian-isotropic-matrix",) and p.kernel is not None:
        doc["lambda"] = analytic_lyapunov_gaussian(p.kernel, p.dim).tolist()
        if cfg.eta_grid is not None:
            doc["w"] = [analytic_gle_gaussian(p.kernel, p.dim, e) for e in cfg.eta_grid]
            doc["eta_grid"] = [list(e) for e in cfg.eta_grid]
    elif p.kind == "scalar-telegraph":
        grid = cfg.eta_grid or tuple((x,) for x in np.linspace(-2, 2, 11))
        doc["eta_grid"] = [list(e) for e in grid]
        doc["w"] = [TelegraphCGF(p.sigma, p.nu)(np.asarray(e)) for e in grid]
        doc["lambda"] = [0.0]
    elif p.kind == "scalar-ou":
        grid = cfg.eta_grid or tuple((x,) for x in np.linspace(-2, 2, 11))
        doc["eta_grid"] = [list(e) for e in grid]
        doc["w"] = [0.5 * float(np.asarray(e)[0]) ** 2 for e in grid]
        doc["lambda"] = [0.0]
    elif p.kind == "constant-diag":
        doc["lambda"] = list(p.diag)
    else:
        doc["note"] = "no closed form for this kind; estimate empirically"
    if output_dir is not None:
        outdir = Path(output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(outdir / "predict.json", doc)
    return doc


def dump_path_csv(cfg: ExperimentConfig, n_steps: int, realization: int,
                  out_path: Path, trajectory: bool = False, stride: int = 1) -> None:
    """Write one realization as CSV: the raw noise path, or the evolved
    trajectory (t, logD_1..logD_d, orthogonality_residual, det_residual)."""
    spec = cfg.process
    d = spec.dim
    if not trajectory:
        path = sample_path(spec, cfg.dt, n_steps, realization)
        if spec.is_matrix:
            header = ["t"] + [f"A_{i + 1}{j + 1}" for i in range(d) for j in range(d)]
            rows = [[repr(float(t))] + [repr(float(v)) for v in mat.ravel()]
                    for t, mat in zip(path.times(), path.values)]
        else:
            header = ["t", "x"]
            rows = [[repr(float(t)), repr(float(v))] for t, v in zip(path.times(), path.values)]
        _write_csv(out_path, header, rows)
        return
    stream = open_stream(spec, cfg.dt / 2.0, [realization], 2 * n_steps)
    ev = BatchEvolver(d, 1, cfg.scheme, cfg.dt)
    header = ["t"] + [f"logD_{k + 1}" for k in range(d)] + [
        "orthogonality_residual", "det_residual"]
    rows = []
    eye = np.eye(d)
    for k in range(n_steps):
        pts = stream.advance(2)
        ev.step_block(pts[0:1])
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            orth = float(np.max(np.abs(ev.R[0] @ ev.R[0].T - eye)))
            resid = float(ev.logD[0].sum() - ev.trace_integral[0])
            rows.append([repr(ev.t)] + [repr(float(x)) for x in ev.logD[0]]
                        + [repr(orth), repr(resid)])
    _write_csv(out_path, header, rows)


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", type=str, help="path to a JSON config document")
    sub.add_argument("--preset", type=str, help="name of a shipped preset config")
    sub.add_argument("--seed", type=int, help="override process.master_seed")
    sub.add_argument("--workers", type=str, help="worker count or 'auto'")
    sub.add_argument("--output-dir", type=str, help="override outputs.dir")
    sub.add_argument("--format", type=str, help="comma list of csv,json")


def _load_config(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError(": give either --config or --preset, not both")
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    elif args.preset:
        doc = load_preset(args.preset)
    else:
        raise ConfigError(": one of --config or --preset is required")
    cfg = parse_config(doc)
    if args.seed is not None:
        cfg = replace(cfg, process=replace(cfg.process, master_seed=int(args.seed)))
    if args.workers is not None:
        workers = os.cpu_count() if args.workers == "auto" else int(args.workers)
        cfg = replace(cfg, workers=workers)
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    if args.format is not None:
        formats = tuple(args.format.split(","))
        for f in formats:
            if f not in ("json", "csv"):
                raise ConfigError(f"--format: unknown format {f!r}")
        cfg = replace(cfg, formats=formats)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lyaplab",
        description="Monte Carlo laboratory for Lyapunov and moment growth exponents",
    )
    ap.add_argument("--version", action="version", version=f"lyaplab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, hlp in (("le", "estimate the Lyapunov spectrum"),
                      ("gle", "estimate moment growth rates w(eta)"),
                      ("predict", "emit closed-form predictions"),
                      ("dump-path", "dump one realization as CSV")):
        s = sub.add_parser(name, help=hlp)
        _add_common(s)
        if name == "dump-path":
            s.add_argument("--n-steps", type=int, required=True)
            s.add_argument("--realization", type=int, default=0)
            s.add_argument("--trajectory", action="store_true",
                           help="dump the evolved trajectory instead of the noise")
            s.add_argument("--stride", type=int, default=1)
            s.add_argument("--output", type=str, required=True)

    s = sub.add_parser("legendre", help="convex conjugate of a tabulated function")
    s.add_argument("--input", type=str, required=True, help="CSV with columns x,f")
    s.add_argument("--output", type=str, required=True)
    s.add_argument("--query-min", type=float, default=-3.0)
    s.add_argument("--query-max", type=float, default=3.0)
    s.add_argument("--query-points", type=int, default=241)

    s = sub.add_parser("verify", help="run a named acceptance suite")
    s.add_argument("suite", type=str, help="suite name or 'all' (see --list)")
    s.add_argument("--list", action="store_true", help="list suite names and exit")
    s.add_argument("--output-dir", type=str, default=None)
    s.add_argument("--workers", type=str, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "le":
            cfg = _load_config(args)
            est, _ = run_le(cfg)
            for k, (l, s) in enumerate(zip(est.lambda_, est.stderr)):
                print(f"lambda_{k + 1} = {l:+.6f} +- {s:.6f}")
            return EXIT_OK
        if args.command == "gle":
            cfg = _load_config(args)
            est, _ = run_gle(cfg)
            for i, eta in enumerate(est.eta_grid):
                flag = " UNRELIABLE" if est.unreliable[i] else ""
                print(f"w({', '.join(f'{x:g}' for x in eta)}) = {est.w[i]:+.6f} "
                      f"[{est.ci_low[i]:+.6f}, {est.ci_high[i]:+.6f}] ess={est.ess[i]:.1f}{flag}")
            return EXIT_OK
        if args.command == "predict":
            cfg = _load_config(args)
            doc = run_predict(cfg, args.output_dir or cfg.output_dir)
            print(json.dumps(doc, indent=2, sort_keys=True))
            return EXIT_OK
        if args.command == "dump-path":
            cfg = _load_config(args)
            dump_path_csv(cfg, args.n_steps, args.realization, Path(args.output),
                          trajectory=args.trajectory, stride=args.stride)
            print(f"wrote {args.output}")
            return EXIT_OK
        if args.command == "legendre":
            rows = list(csv.reader(Path(args.input).read_text().splitlines()))
            body = rows[1:] if rows and not _is_number(rows[0][0]) else rows
            grid = np.array([float(r[0]) for r in body])
            vals = np.array([float(r[1]) for r in body])
            query = np.linspace(args.query_min, args.query_max, args.query_points)
            table = legendre_transform((grid, vals), query)
            _write_csv(Path(args.output), ["eta", "g", "extrapolated"],
                       [(repr(float(x)), repr(float(g)), int(e))
                        for x, g, e in zip(table.grid, table.values, table.extrapolated)])
            print(f"wrote {args.output}")
            return EXIT_OK
        if args.command == "verify":
            from . import suites

            if args.list or args.suite == "list":
                for name in suites.SUITE_NAMES:
                    print(name)
                return EXIT_OK
            workers = None
            if args.workers:
                workers = os.cpu_count() if args.workers == "auto" else int(args.workers)
            results = suites.run_suites(args.suite, workers=workers)
            all_ok = True
            for res in results:
                all_ok &= res.passed
                print(res.summary_line())
            if args.output_dir:
                outdir = Path(args.output_dir)
                outdir.mkdir(parents=True, exist_ok=True)
                _write_json(outdir / "verify.json", {
                    "schema": "lyapunov-lab-verify/1",
                    "tool_version": __version__,
                    "results": [res.to_dict() for res in results],
                })
            return EXIT_OK if all_ok else EXIT_VERIFY
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EstimateRejectedError as exc:
        print(f"estimate rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


if __name__ == "__main__":
    raise SystemExit(main())
