"""Command-line front end writing sweep tables as CSV or JSON.

    qspp dispersion   --config sweep.cfg --out dispersion.csv
    qspp coupling-map --geometry kr --jobs 8 --out kr_map.csv
    qspp optimize     --geometry otto
    qspp propagate    --geometry kr
    qspp stats        --n 3 --chain 0.9,0.5,0.65 --oracle

Exit status: 0 success, 1 nothing computable, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import ConfigError, read_config
from .coupling import coupling_grid, matching_angles, optimize_thickness
from .dispersion import bound_wavevector
from .errors import DomainError, InfeasibleError, NumericalSingularityError, UnmatchableError
from .materials import (
    C_LIGHT, DEFAULT_PRISM_EPS, Geometry, LayerStack, PermittivityModel, eval_lossless,
    get_material, materials_from_sections,
)
from .propagation import loss_parameters
from .statistics import LossChain, stats_report

log = logging.getLogger("qspp")

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2
PRISM_LINE_ANGLE = 85.0  # degrees


@dataclass(frozen=True)
class SweepConfig:
    material: str = "silver"
    geometry: str = "otto"
    eps1: float = DEFAULT_PRISM_EPS
    omega_min: float = 1e15
    omega_max: float = 5.4e15
    omega_count: int = 45
    d_min: float = 1e-8
    d_max: float = 2e-5
    d_count: int = 61
    x_min: float = 0.0
    x_max: float = 2e-4
    x_count: int = 21
    mu: float = 0.65

    def validate(self):
        Geometry.parse(self.geometry)
        for name in ("omega", "d"):
            lo, hi, n = getattr(self, f"{name}_min"), getattr(self, f"{name}_max"), getattr(self, f"{name}_count")
            if not 0 < lo < hi:
                raise ConfigError(f"{name} range must be positive and ordered, got [{lo}, {hi}]")
            if n < 2:
                raise ConfigError(f"{name}_count must be at least 2")
        if not 0 <= self.x_min < self.x_max or self.x_count < 2:
            raise ConfigError("x range must satisfy 0 <= x_min < x_max with x_count >= 2")
        if not self.eps1 > 1:
            raise ConfigError("eps1 must exceed 1")
        if not 0 <= self.mu <= 1:
            raise ConfigError("mu must lie in [0, 1]")

    def omegas(self):
        return np.linspace(self.omega_min, self.omega_max, self.omega_count)

    def thicknesses(self):
        return np.logspace(math.log10(self.d_min), math.log10(self.d_max), self.d_count)

    def distances(self):
        return np.linspace(self.x_min, self.x_max, self.x_count)


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    command: str
    digest: str
    timestamp: str
    params: dict

    @classmethod
    def build(cls, command: str, params: dict) -> "RunManifest":
        blob = json.dumps({"command": command, "params": params}, sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(blob.encode()).hexdigest()
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        return cls(__version__, command, digest, stamp, params)

    def header_lines(self):
        return [
            f"# qspp {self.tool_version} {self.command}",
            f"# digest sha256:{self.digest}",
            "# params " + json.dumps(self.params, sort_keys=True, separators=(",", ":")),
        ]


_SWEEP_FIELDS = {f.name: f.type for f in dataclasses.fields(SweepConfig)}


def load_sweep(path, overrides: dict) -> tuple[SweepConfig, dict[str, PermittivityModel]]:
    values = {}
    materials = {}
    if path:
        sections = read_config(path)
        materials = materials_from_sections(sections)
        for sec in sections:
            if sec.kind == "material":
                continue
            if sec.kind != "sweep":
                raise ConfigError(f"unknown section [{sec.kind}]", sec.line)
            for key in sec.values:
                kind = _SWEEP_FIELDS.get(key)
                if kind is None:
                    raise ConfigError(f"unknown sweep key {key!r}", sec.lines[key])
                if kind == "str":
                    values[key] = sec.get_str(key)
                elif kind == "int":
                    values[key] = sec.get_int(key)
                else:
                    values[key] = sec.get_float(key)
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = SweepConfig(**values)
    cfg.validate()
    return cfg, materials


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return "" if not math.isfinite(v) else f"{v:.16e}"


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


def write_table(out, fmt: str, manifest: RunManifest, columns, rows):
    if fmt == "json":
        doc = {
            "manifest": {"tool_version": manifest.tool_version, "command": manifest.command,
                         "digest": manifest.digest, "params": manifest.params},
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    else:
        lines = manifest.header_lines() + [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    _emit(out, text, manifest)


def _emit(out, text, manifest):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(f"{out}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(dataclasses.asdict(manifest), fh, sort_keys=True, indent=1)
        fh.write("\n")


def _run_tasks(func, tasks, jobs: int):
    """Evaluate tasks (one per frequency) and return results in task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, tasks))


def _params(cfg: SweepConfig, metal: PermittivityModel, command: str) -> dict:
    p = dataclasses.asdict(cfg)
    p["geometry"] = Geometry.parse(cfg.geometry).value
    p["metal"] = dataclasses.asdict(metal)
    return p


# -- per-frequency workers (top level so they pickle) -------------------------

def _coupling_row(task):
    geometry, eps1, metal, omega, ds = task
    res = coupling_grid(geometry, eps1, metal, omega, ds)
    rows = []
    for d, g, p in zip(ds, res["g_tilde"], res["penetration"]):
        feasible = int(math.isfinite(g) and p <= 1)
        rows.append((omega, d, g if math.isfinite(g) else None, p if math.isfinite(p) else None, feasible))
    return rows


def _optimize_row(task):
    geometry, eps1, metal, omega, d_range = task
    stack = LayerStack(geometry, eps1, d_range[0], metal)
    try:
        res = optimize_thickness(stack, omega, d_range)
    except (UnmatchableError, InfeasibleError, DomainError, NumericalSingularityError) as exc:
        return (omega, None, None, None, 0, str(exc))
    c = res.coefficients
    return (omega, res.d, c.g_tilde, c.penetration, 1, None)


def _propagate_rows(task):
    geometry, eps1, metal, omega, d_range, xs, mu = task
    omega, d_opt, g_tilde, _, feasible, _ = _optimize_row((geometry, eps1, metal, omega, d_range))
    if not feasible:
        return [(omega, x, None) for x in xs], False
    stack = LayerStack(geometry, eps1, d_opt, metal)
    beta2 = math.sin(math.pi / 2 * g_tilde) ** 2
    kappa0, _ = loss_parameters(stack.metal, omega)
    return [(omega, x, mu * beta2 * math.exp(-2 * kappa0 * x)) for x in xs], True


# -- commands ------------------------------------------------------------------

def cmd_dispersion(cfg, metal, args):
    rows = []
    ws = cfg.omegas()
    eps = eval_lossless(metal, ws)
    bound = eps < -1
    if not np.all(bound):
        log.warning("skipping %d frequencies without a bound SPP", int((~bound).sum()))
    ws, eps = ws[bound], eps[bound]
    k, _, _ = bound_wavevector(eps, ws)
    arg = eps / (cfg.eps1 * (1 + eps))
    theta = np.degrees(matching_angles(metal, cfg.eps1, ws))
    line = math.sqrt(cfg.eps1) * ws / C_LIGHT * math.sin(math.radians(PRISM_LINE_ANGLE))
    for i, w in enumerate(ws):
        rows.append((w, k[i], w / C_LIGHT, theta[i] if arg[i] <= 1 else None, line[i]))
    cols = ("omega", "k_spp", "k_light", "theta_match_deg", "k_prism_85deg")
    return cols, rows, EXIT_OK


def cmd_coupling_map(cfg, metal, args):
    ds = cfg.thicknesses()
    geo = Geometry.parse(cfg.geometry)
    tasks = [(geo, cfg.eps1, metal, float(w), ds) for w in cfg.omegas()]
    rows = [r for chunk in _run_tasks(_coupling_row, tasks, args.jobs) for r in chunk]
    return ("omega", "d", "g_tilde", "penetration", "feasible"), rows, EXIT_OK


def cmd_optimize(cfg, metal, args):
    geo = Geometry.parse(cfg.geometry)
    tasks = [(geo, cfg.eps1, metal, float(w), (cfg.d_min, cfg.d_max)) for w in cfg.omegas()]
    results = _run_tasks(_optimize_row, tasks, args.jobs)
    for r in results:
        if r[5]:
            log.info("omega=%.6g: %s", r[0], r[5])
    rows = [r[:5] for r in results]
    status = EXIT_OK if any(r[4] for r in rows) else EXIT_INFEASIBLE
    return ("omega", "d_opt", "g_tilde_opt", "penetration", "feasible"), rows, status


def cmd_propagate(cfg, metal, args):
    geo = Geometry.parse(cfg.geometry)
    xs = cfg.distances()
    tasks = [(geo, cfg.eps1, metal, float(w), (cfg.d_min, cfg.d_max), xs, cfg.mu) for w in cfg.omegas()]
    results = _run_tasks(_propagate_rows, tasks, args.jobs)
    rows = [r for chunk, _ in results for r in chunk]
    status = EXIT_OK if any(ok for _, ok in results) else EXIT_INFEASIBLE
    return ("omega", "x", "me_over_n"), rows, status


def cmd_stats(args):
    if args.n < 1:
        raise DomainError("n must be at least 1")
    chain = LossChain.parse(args.chain)
    report = stats_report(args.n, chain, oracle=args.oracle)
    params = {"n": args.n, "etas": list(chain.etas), "oracle": bool(args.oracle)}
    manifest = RunManifest.build("stats", params)
    if args.format == "csv":
        cols = ("n", "eta_total", "mean", "factorial_second", "g2", "classification")
        lines = manifest.header_lines() + [",".join(cols)]
        lines.append(",".join([str(args.n)] + [_fmt(report[c]) for c in cols[1:5]] + [report["classification"]]))
        _emit(args.out, "\n".join(lines) + "\n", manifest)
    else:
        report = {"manifest": {"digest": manifest.digest, "tool_version": manifest.tool_version}, **report}
        _emit(args.out, json.dumps(report, sort_keys=True, indent=1) + "\n", manifest)
    if args.oracle and not report["oracle_agrees"]:
        log.error("combinatorial oracle disagrees with the closed form")
        return EXIT_INFEASIBLE
    return EXIT_OK


GRID_COMMANDS = {
    "dispersion": cmd_dispersion,
    "coupling-map": cmd_coupling_map,
    "optimize": cmd_optimize,
    "propagate": cmd_propagate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file with [material] and [sweep] sections")
    common.add_argument("--material", help="material name (default: silver)")
    common.add_argument("--geometry", choices=["otto", "kr"])
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"],
                        help="default: csv for grids, json for stats")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    sweep = argparse.ArgumentParser(add_help=False)
    for name, kind in (("eps1", float), ("omega-min", float), ("omega-max", float), ("omega-count", int),
                       ("d-min", float), ("d-max", float), ("d-count", int),
                       ("x-min", float), ("x-max", float), ("x-count", int), ("mu", float)):
        sweep.add_argument(f"--{name}", type=kind)

    parser = argparse.ArgumentParser(prog="qspp", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"qspp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in GRID_COMMANDS:
        sub.add_parser(name, parents=[common, sweep])
    st = sub.add_parser("stats", parents=[common])
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--chain", default="", help="comma-separated stage efficiencies")
    st.add_argument("--oracle", action="store_true", help="cross-check with the exact Fock-space oracle")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.format is None:
        args.format = "json" if args.command == "stats" else "csv"
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        if args.command == "stats":
            return cmd_stats(args)
        overrides = {
            "material": args.material, "geometry": args.geometry, "eps1": args.eps1,
            "omega_min": args.omega_min, "omega_max": args.omega_max, "omega_count": args.omega_count,
            "d_min": args.d_min, "d_max": args.d_max, "d_count": args.d_count,
            "x_min": args.x_min, "x_max": args.x_max, "x_count": args.x_count, "mu": args.mu,
        }
        cfg, extra = load_sweep(args.config, overrides)
        metal = get_material(cfg.material, extra)
        cols, rows, status = GRID_COMMANDS[args.command](cfg, metal, args)
        manifest = RunManifest.build(args.command, _params(cfg, metal, args.command))
        write_table(args.out, args.format, manifest, cols, rows)
        return status
    except (ConfigError, DomainError, OSError) as exc:
        print(f"qspp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
