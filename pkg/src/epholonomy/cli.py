"""Command-line front end: config-driven analyses with table and plot output.

Four subcommands share one TOML config describing a matrix family, a
parameter curve, spectral labels, and output options:

* ``analyze``   — monodromy permutation, per-label periods, group order,
                  degeneracy-proximity diagnostics.
* ``phase``     — per-label geometric/dynamical phase table (branches are
                  lifted over their covering loop automatically).
* ``curvature`` — curvature two-form on a 2D parameter grid, one or both
                  methods, with degenerate cells masked.
* ``sweep``     — adiabatic-convergence table |gamma_extracted -
                  gamma_discrete| and branch fidelity versus duration T.

Config layout (complex values are written as [re, im] pairs; the two
top-level keys must come before the first table header)::

    labels = "all"                # or e.g. [0, 1]
    samples = 2048

    [family]
    builtin = "nonsym_b"          # or: param_dim/entries for inline
    alpha = [1.0, 0.0]            #     polynomial matrix entries
    beta = [2.0, 0.0]

    [curve]
    kind = "circle"               # circle | ellipse | polyline |
    center = [0.0, 0.0]           #   parametric-polynomial
    radius = 1.0
    orientation = "positive"
    lift = 1                      # optional explicit covering multiplicity

    [sweep]
    T = [100.0, 1000.0, 10000.0]
    rel_tol = 1e-10

    [grid]                        # curvature only
    x = [-2.0, 2.0, 21]           # start, stop, count
    y = [-2.0, 2.0, 21]
    methods = "both"              # or one method name

    [output]
    dir = "."
    format = "csv"                # csv | json
    plot = false

Exit codes: 0 success, 2 config error, 3 degeneracy-proximity abort,
4 precision loss (the message suggests a larger sample count). The
environment variable EPHOLONOMY_LOG sets log verbosity (DEBUG/INFO/...).

Numbers in reports carry 17 significant digits, so CSV output is
byte-stable and JSON reports re-parse to identical rows.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

try:  # stdlib on 3.11+, the compatible backport below
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import curves as curves_mod
from .curves import MIN_SAMPLES, CurveSpec, lift
from .errors import (
    AmbiguousMatching,
    ConfigError,
    HolonomyError,
    InvalidParams,
    NearEP,
    PrecisionLoss,
)
from .evolve import sweep as run_sweep
from .families import BUILTIN_FAMILIES, MatrixFamily, example_family, polynomial_family
from .phase import curvature, geometric_phase
from .tracking import Monodromy, SpectralPath, track

__all__ = ["JobConfig", "ReportRow", "entry", "main"]

_LOG = logging.getLogger("epholonomy")

_COMMANDS = ("analyze", "phase", "curvature", "sweep")
_CURVE_KINDS = ("circle", "ellipse", "polyline", "parametric-polynomial")


def _fmt(x: float) -> str:
    """17-significant-digit decimal text; round-trips float64 exactly."""
    return "%.17g" % float(x)


def cycle_notation(sigma) -> str:
    """1-based cycle string of a permutation; identity prints as 'id'."""
    mono = Monodromy.from_sigma(sigma)
    if mono.is_identity:
        return "id"
    return "".join(
        "(" + " ".join(str(j + 1) for j in cyc) + ")"
        for cyc in mono.cycle_structure)


@dataclass(frozen=True)
class ReportRow:
    """One spectral label's phase summary over its covering loop."""

    command: str
    label: int
    monodromy: str
    traversals: int
    delta_re: float
    delta_im: float
    gamma_raw_re: float
    gamma_raw_im: float
    gamma_mod_2pi: float
    gamma_im: float
    abs_holonomy: float
    refinement_depth: int
    min_gap: float

    def __post_init__(self):
        for f in fields(self):
            if f.type == "float" and not np.isfinite(getattr(self, f.name)):
                raise PrecisionLoss(
                    f"report field {f.name} for label {self.label} is not "
                    "finite; increase the sample count")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRow":
        kw = {}
        for f in fields(cls):
            v = d[f.name]
            kw[f.name] = (int(v) if f.type == "int"
                          else float(v) if f.type == "float" else str(v))
        return cls(**kw)


REPORT_COLUMNS = tuple(f.name for f in fields(ReportRow))
SWEEP_COLUMNS = ("label", "T", "error", "fidelity", "status")


@dataclass(frozen=True)
class JobConfig:
    """Validated job description: family, curve, labels, outputs."""

    family: MatrixFamily
    curve: CurveSpec
    labels: tuple
    samples: int
    sweep_T: tuple
    sweep_rel_tol: float
    grid: dict | None
    out_dir: str
    out_format: str
    plot: bool
    allowed_commands: tuple


# --------------------------------------------------------------------------
# config interpretation
# --------------------------------------------------------------------------

def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _table(doc: dict, key: str) -> dict:
    val = doc.get(key, {})
    if not isinstance(val, dict):
        raise ConfigError(f"[{key}] must be a table")
    return val


def _build_family(doc: dict) -> MatrixFamily:
    tab = _table(doc, "family")
    if "builtin" in tab:
        name = tab["builtin"]
        if name not in BUILTIN_FAMILIES:
            known = ", ".join(sorted(BUILTIN_FAMILIES))
            raise ConfigError(f"unknown builtin family {name!r}; known: {known}")
        params = {}
        for key, val in tab.items():
            if key == "builtin":
                continue
            params[key] = (_as_complex(val, f"family.{key}")
                           if isinstance(val, (list, tuple)) else val)
        try:
            return example_family(name, **params)
        except (InvalidParams, TypeError) as exc:
            raise ConfigError(f"family parameters rejected: {exc}") from exc
    if "entries" in tab:
        param_dim = tab.get("param_dim")
        if not isinstance(param_dim, int) or param_dim < 1:
            raise ConfigError("inline family needs integer param_dim >= 1")
        entries = tab["entries"]
        try:
            table = [[[(complex(term[0], term[1]),
                        tuple(int(e) for e in term[2:]))
                       for term in cell] for cell in row] for row in entries]
            for row in table:
                for cell in row:
                    for _, expo in cell:
                        if len(expo) != param_dim:
                            raise ConfigError(
                                "each term needs [re, im] plus one exponent "
                                f"per coordinate ({param_dim} expected)")
            return polynomial_family(table, param_dim,
                                     name=tab.get("name", "inline"))
        except ConfigError:
            raise
        except (InvalidParams, TypeError, IndexError, ValueError) as exc:
            raise ConfigError(f"inline family entries rejected: {exc}") from exc
    raise ConfigError("[family] needs either 'builtin' or inline 'entries'")


_CURVE_KEYS = {
    "circle": {"kind", "center", "radius", "phase", "orientation", "lift"},
    "ellipse": {"kind", "center", "semi_axes", "phase", "orientation", "lift"},
    "polyline": {"kind", "vertices", "closed", "lift"},
    "parametric-polynomial": {"kind", "coeffs", "closed", "lift"},
}


def _build_curve(doc: dict) -> CurveSpec:
    tab = _table(doc, "curve")
    kind = tab.get("kind")
    if kind not in _CURVE_KINDS:
        raise ConfigError(
            f"curve.kind must be one of {', '.join(_CURVE_KINDS)}, got {kind!r}")
    stray = set(tab) - _CURVE_KEYS[kind]
    if stray:
        raise ConfigError(
            f"unknown keys {sorted(stray)} in [curve] for kind {kind!r} "
            "(top-level keys like samples/labels must come before the "
            "first table header)")
    orientation = tab.get("orientation", "positive")
    if orientation not in ("positive", "negative"):
        raise ConfigError(f"curve.orientation must be positive|negative, "
                          f"got {orientation!r}")
    try:
        if kind == "circle":
            curve = curves_mod.circle(tab["center"], float(tab["radius"]),
                                      phase=float(tab.get("phase", 0.0)),
                                      orientation=orientation)
        elif kind == "ellipse":
            curve = curves_mod.ellipse(tab["center"], tab["semi_axes"],
                                       phase=float(tab.get("phase", 0.0)),
                                       orientation=orientation)
        elif kind == "polyline":
            curve = curves_mod.polyline(tab["vertices"],
                                        closed=bool(tab.get("closed", True)))
        else:
            curve = curves_mod.parametric_polynomial(
                tab["coeffs"], closed=bool(tab.get("closed", False)))
        multiplicity = tab.get("lift", 1)
        if not isinstance(multiplicity, int) or multiplicity < 1:
            raise ConfigError("curve.lift must be a positive integer")
        if multiplicity > 1:
            curve = lift(curve, multiplicity)
        return curve
    except KeyError as exc:
        raise ConfigError(f"curve.{exc.args[0]} is required for kind "
                          f"{kind!r}") from exc
    except InvalidParams as exc:
        raise ConfigError(f"curve rejected: {exc}") from exc


def _resolve_labels(doc: dict, dim: int) -> tuple:
    spec = doc.get("labels", "all")
    if spec == "all":
        return tuple(range(dim))
    if (isinstance(spec, list)
            and all(isinstance(v, int) and not isinstance(v, bool) for v in spec)):
        bad = [v for v in spec if not 0 <= v < dim]
        if bad:
            raise ConfigError(f"labels {bad} out of range for dimension {dim}")
        return tuple(spec)
    raise ConfigError(f"labels must be \"all\" or a list of integers, got {spec!r}")


def _grid_spec(doc: dict, family: MatrixFamily) -> dict | None:
    if "grid" not in doc:
        return None
    tab = _table(doc, "grid")

    def axis(key):
        val = tab.get(key)
        if (not isinstance(val, list) or len(val) != 3
                or not all(isinstance(v, (int, float)) for v in val)
                or int(val[2]) < 2):
            raise ConfigError(f"grid.{key} must be [start, stop, count>=2]")
        return float(val[0]), float(val[1]), int(val[2])

    plane = tab.get("plane", [0, 1])
    if (not isinstance(plane, list) or len(plane) != 2
            or not all(isinstance(v, int) for v in plane)
            or not all(0 <= v < family.param_dim for v in plane)
            or plane[0] == plane[1]):
        raise ConfigError("grid.plane must name two distinct parameter axes")
    fixed = tab.get("fixed", [0.0] * family.param_dim)
    if (not isinstance(fixed, list) or len(fixed) != family.param_dim
            or not all(isinstance(v, (int, float)) for v in fixed)):
        raise ConfigError(
            f"grid.fixed must list {family.param_dim} base coordinates")
    methods = tab.get("methods", "SumOverStates")
    if methods == "both":
        methods = ["SumOverStates", "ExteriorDerivative"]
    elif isinstance(methods, str):
        methods = [methods]
    if (not isinstance(methods, list)
            or not all(m in ("SumOverStates", "ExteriorDerivative")
                       for m in methods)):
        raise ConfigError("grid.methods must be SumOverStates, "
                          "ExteriorDerivative, or \"both\"")
    step = tab.get("step")
    if step is not None and (not isinstance(step, (int, float)) or step <= 0):
        raise ConfigError("grid.step must be a positive number")
    return {"x": axis("x"), "y": axis("y"), "plane": tuple(plane),
            "fixed": [float(v) for v in fixed], "methods": tuple(methods),
            "step": None if step is None else float(step)}


def load_job(path: str, *, samples=None, out_dir=None, out_format=None,
             plot=None) -> JobConfig:
    """Parse + validate a TOML job file, applying command-line overrides."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc

    family = _build_family(doc)
    curve = _build_curve(doc)
    if curve.dim != family.param_dim:
        raise ConfigError(
            f"curve lives in dimension {curve.dim} but the family takes "
            f"{family.param_dim} parameters")
    labels = _resolve_labels(doc, family.dim)

    n = samples if samples is not None else doc.get("samples", 2048)
    if not isinstance(n, int) or isinstance(n, bool) or n < MIN_SAMPLES:
        raise ConfigError(f"samples must be an integer >= {MIN_SAMPLES}, got {n!r}")

    sweep_tab = _table(doc, "sweep")
    T_list = sweep_tab.get("T", [])
    if (not isinstance(T_list, list)
            or not all(isinstance(v, (int, float)) and v > 0 for v in T_list)):
        raise ConfigError("sweep.T must be a list of positive durations")
    rel_tol = sweep_tab.get("rel_tol", 1e-10)
    if not isinstance(rel_tol, (int, float)) or not 1e-14 < rel_tol < 1e-2:
        raise ConfigError(f"sweep.rel_tol must lie in (1e-14, 1e-2), got {rel_tol!r}")

    out_tab = _table(doc, "output")
    directory = out_dir if out_dir is not None else out_tab.get("dir", ".")
    fmt = out_format if out_format is not None else out_tab.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    want_plot = plot if plot is not None else bool(out_tab.get("plot", False))

    allowed = doc.get("commands", list(_COMMANDS))
    if (not isinstance(allowed, list)
            or not all(c in _COMMANDS for c in allowed)):
        raise ConfigError(f"commands must be a subset of {_COMMANDS}")

    return JobConfig(family=family, curve=curve, labels=labels, samples=n,
                     sweep_T=tuple(float(v) for v in T_list),
                     sweep_rel_tol=float(rel_tol),
                     grid=_grid_spec(doc, family), out_dir=str(directory),
                     out_format=fmt, plot=want_plot,
                     allowed_commands=tuple(allowed))


# --------------------------------------------------------------------------
# report writing
# --------------------------------------------------------------------------

def _write_csv(path: str, columns, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else _fmt(cell)
                         if isinstance(cell, float) else str(cell)
                         for cell in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    _LOG.info("wrote %s", path)


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _LOG.info("wrote %s", path)


def _emit_report(cfg: JobConfig, name: str, columns, dict_rows) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.out_format == "csv":
        path = os.path.join(cfg.out_dir, f"{name}.csv")
        _write_csv(path, columns, [[d[c] for c in columns] for d in dict_rows])
    else:
        path = os.path.join(cfg.out_dir, f"{name}.json")
        _write_json(path, {"columns": list(columns), "rows": dict_rows})


def parse_report_json(path: str) -> list:
    """Re-parse a JSON phase report into ReportRow objects (lossless)."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return [ReportRow.from_dict(d) for d in payload["rows"]]


# --------------------------------------------------------------------------
# plotting (static SVG from already-computed data)
# --------------------------------------------------------------------------

def _plot_backend():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _plot_eigencurves(cfg: JobConfig, path: SpectralPath) -> None:
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for label in range(cfg.family.dim):
        values = path.eigenvalues(label)
        ax.plot(values.real, values.imag, label=f"branch {label}")
        ax.plot(values.real[0], values.imag[0], "o", color="black", ms=3)
    ax.set_xlabel("Re E")
    ax.set_ylabel("Im E")
    ax.set_title(f"eigenvalue trajectories: {cfg.family.name}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    out = os.path.join(cfg.out_dir, "eigencurves.svg")
    fig.savefig(out)
    plt.close(fig)
    _LOG.info("wrote %s", out)


def _running_phase(path: SpectralPath, label: int) -> np.ndarray:
    """First-order running geometric phase for plotting.

    Cumulative -i log of successive matched overlaps; each step factor is
    near 1, so principal logs accumulate without wrapping. The report value
    comes from the gauge-invariant product, not from this curve.
    """
    seq = path.branch_labels(label)
    out = np.zeros(len(path.ts), dtype=complex)
    acc = 0.0j
    for k in range(len(path.ts) - 1):
        a, b = seq[k], seq[k + 1]
        step = complex(np.vdot(path.frames[k].left[:, a],
                               path.frames[k + 1].right[:, b]))
        acc += -1j * np.log(step)
        out[k + 1] = acc
    return out


def _plot_running_phase(cfg: JobConfig, lifted_paths: dict) -> None:
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for label in cfg.labels:
        path = lifted_paths[label]
        gamma = _running_phase(path, label)
        ax.plot(path.ts, gamma.real, label=f"Re, branch {label}")
        ax.plot(path.ts, gamma.imag, "--", label=f"Im, branch {label}")
    ax.set_xlabel("loop parameter t")
    ax.set_ylabel("running geometric phase")
    ax.set_title(f"running phase: {cfg.family.name}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    out = os.path.join(cfg.out_dir, "phase_running.svg")
    fig.savefig(out)
    plt.close(fig)
    _LOG.info("wrote %s", out)


def _plot_curvature(cfg: JobConfig, xs, ys, value_grid) -> None:
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    masked = np.ma.masked_invalid(value_grid)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("lightgray")
    im = ax.pcolormesh(xs, ys, masked, cmap=cmap, shading="nearest")
    fig.colorbar(im, ax=ax, label="Re F[plane]")
    ax.set_xlabel(f"axis {cfg.grid['plane'][0]}")
    ax.set_ylabel(f"axis {cfg.grid['plane'][1]}")
    ax.set_title(f"curvature: {cfg.family.name}, label {cfg.labels[0]}")
    fig.tight_layout()
    out = os.path.join(cfg.out_dir, "curvature.svg")
    fig.savefig(out)
    plt.close(fig)
    _LOG.info("wrote %s", out)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _pool():
    return concurrent.futures.ThreadPoolExecutor(
        max_workers=min(8, os.cpu_count() or 1))


def _lifted_path(cfg: JobConfig, label: int, base: SpectralPath):
    """Track the covering loop on which the label closes (k = its period)."""
    period = Monodromy.from_sigma(base.sigma).periods[label]
    if period == 1:
        return base
    _LOG.info("label %d closes after %d traversals; tracking the lift",
              label, period)
    return track(cfg.family, lift(cfg.curve, period), cfg.samples * period)


def cmd_analyze(cfg: JobConfig) -> int:
    """Monodromy permutation, periods, group order, proximity diagnostics."""
    path = track(cfg.family, cfg.curve, cfg.samples)
    mono = Monodromy.from_sigma(path.sigma)
    notation = cycle_notation(path.sigma)
    print(f"family {cfg.family.name}: dim {cfg.family.dim}, "
          f"curve {cfg.curve.meta.get('kind', '?')}, samples {cfg.samples}")
    print(f"sigma = {notation}, |H| = {mono.order}")
    for label in cfg.labels:
        print(f"label {label}: period {mono.periods[label]}")
    print(f"min gap along curve = {path.min_gap:.6g}")
    print(f"refinement depth = {path.refinement_depth}")
    scale = float(np.linalg.norm(cfg.family(cfg.curve.point(0.0)), 2))
    if path.min_gap < 1e-3 * max(scale, 1e-300):
        print(f"WARNING: smallest spectral gap {path.min_gap:.3e} is below "
              f"1e-3 * |H(0)|; results near that sample may lose accuracy")
    rows = [{"command": "analyze", "label": int(label),
             "monodromy": notation, "period": int(mono.periods[label]),
             "group_order": int(mono.order),
             "refinement_depth": int(path.refinement_depth),
             "min_gap": float(path.min_gap)} for label in cfg.labels]
    columns = ("command", "label", "monodromy", "period", "group_order",
               "refinement_depth", "min_gap")
    _emit_report(cfg, "report", columns, rows)
    return 0


def cmd_phase(cfg: JobConfig) -> int:
    """Geometric-phase table, one row per label over its covering loop."""
    base = track(cfg.family, cfg.curve, cfg.samples)
    notation = cycle_notation(base.sigma)
    lifted = {}
    with _pool() as pool:
        paths = list(pool.map(lambda lb: _lifted_path(cfg, lb, base),
                              cfg.labels))
    for label, path in zip(cfg.labels, paths):
        lifted[label] = path

    rows = []
    for label in cfg.labels:
        path = lifted[label]
        res = geometric_phase(path, label)
        rows.append(ReportRow(
            command="phase", label=int(label), monodromy=notation,
            traversals=int(res.traversals),
            delta_re=float(res.dynamical.real),
            delta_im=float(res.dynamical.imag),
            gamma_raw_re=float(res.geometric.real),
            gamma_raw_im=float(res.geometric.imag),
            gamma_mod_2pi=float(res.geometric_mod_2pi),
            gamma_im=float(res.geometric.imag),
            abs_holonomy=float(abs(res.holonomy_factor)),
            refinement_depth=int(path.refinement_depth),
            min_gap=float(path.min_gap)))

    print(f"monodromy {notation}")
    for row in rows:
        print(f"label {row.label}: traversals {row.traversals}, "
              f"gamma mod 2pi = {row.gamma_mod_2pi:.12g}, "
              f"Im gamma = {row.gamma_im:.12g}, "
              f"|holonomy| = {row.abs_holonomy:.12g}")
    _emit_report(cfg, "report", REPORT_COLUMNS, [r.as_dict() for r in rows])
    if cfg.plot:
        os.makedirs(cfg.out_dir, exist_ok=True)
        _plot_eigencurves(cfg, base)
        _plot_running_phase(cfg, lifted)
    return 0


def cmd_curvature(cfg: JobConfig) -> int:
    """Curvature two-form over a 2D grid; degenerate cells are masked."""
    if cfg.grid is None:
        raise ConfigError("curvature needs a [grid] table in the config")
    grid = cfg.grid
    xs = np.linspace(*grid["x"])
    ys = np.linspace(*grid["y"])
    iu, iv = grid["plane"]
    methods = grid["methods"]

    tasks = []
    for label in cfg.labels:
        for y in ys:
            for x in xs:
                point = list(grid["fixed"])
                point[iu], point[iv] = float(x), float(y)
                tasks.append((label, float(x), float(y), point))

    def cell(task):
        label, x, y, point = task
        values = []
        for method in methods:
            try:
                sample = curvature(cfg.family, point, label, h=grid["step"],
                                   method=method)
                values.append(complex(sample.components[iu, iv]))
            except (NearEP, PrecisionLoss):
                return (label, x, y, None)
        return (label, x, y, values)

    with _pool() as pool:
        results = list(pool.map(cell, tasks))

    columns = ["label", "x", "y", "masked"]
    for method in methods:
        columns += [f"{method}_re", f"{method}_im"]
    if len(methods) == 2:
        columns.append("disagreement")

    masked_count = 0
    rows = []
    plot_grid = np.full((len(ys), len(xs)), np.nan)
    for label, x, y, values in results:
        row = [int(label), float(x), float(y)]
        if values is None:
            masked_count += 1
            row += [1] + ["" for _ in range(2 * len(methods))]
            if len(methods) == 2:
                row.append("")
        else:
            row += [0]
            for v in values:
                row += [float(v.real), float(v.imag)]
            if len(methods) == 2:
                row.append(float(abs(values[0] - values[1])))
            if label == cfg.labels[0]:
                plot_grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = \
                    values[0].real
        rows.append(row)

    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.out_dir, "curvature.csv"), columns, rows)
    if cfg.out_format == "json":
        _write_json(os.path.join(cfg.out_dir, "curvature.json"),
                    {"columns": columns,
                     "rows": [dict(zip(columns, r)) for r in rows]})
    total = len(rows)
    print(f"curvature grid: {total} cells, {masked_count} masked "
          f"(degeneracy guard), methods: {', '.join(methods)}")
    if cfg.plot:
        _plot_curvature(cfg, xs, ys, plot_grid)
    if masked_count == total:
        print("error: every grid cell sits at a degeneracy", file=sys.stderr)
        return 3
    return 0


def cmd_sweep(cfg: JobConfig) -> int:
    """Adiabatic-convergence table per label; row failures do not abort."""
    if not cfg.labels:
        print("warning: empty label list — nothing to sweep", file=sys.stderr)
        _emit_report(cfg, "report", SWEEP_COLUMNS, [])
        return 0
    if not cfg.sweep_T:
        raise ConfigError("sweep needs a nonempty [sweep] T list")
    base = track(cfg.family, cfg.curve, cfg.samples)

    def one(label):
        period = Monodromy.from_sigma(base.sigma).periods[label]
        curve = cfg.curve if period == 1 else lift(cfg.curve, period)
        return run_sweep(cfg.family, curve, label, cfg.sweep_T,
                         cfg.sweep_rel_tol, n_samples=cfg.samples * period)

    with _pool() as pool:
        tables = list(pool.map(one, cfg.labels))

    dict_rows = []
    for label, table in zip(cfg.labels, tables):
        for row in table:
            print(f"label {label} T={row.T:g}: error={row.error:.6g} "
                  f"fidelity={row.fidelity:.6g} status={row.status}")
            dict_rows.append({"label": int(label), "T": float(row.T),
                              "error": float(row.error),
                              "fidelity": float(row.fidelity),
                              "status": row.status})
    _emit_report(cfg, "report", SWEEP_COLUMNS, dict_rows)
    return 0


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="epholonomy",
        description="Geometric phases, monodromy, curvature, and adiabatic "
                    "sweeps for matrix families on parameter loops.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (("analyze", cmd_analyze), ("phase", cmd_phase),
                          ("curvature", cmd_curvature), ("sweep", cmd_sweep)):
        p = sub.add_parser(name, help=handler.__doc__)
        p.add_argument("--config", required=True, help="TOML job file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--samples", type=int, default=None,
                       help="override the sample count")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="report format")
        p.add_argument("--plot", action="store_true", default=None,
                       help="emit SVG plots next to the reports")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    level = os.environ.get("EPHOLONOMY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _parse_args(argv)
    handlers = {"analyze": cmd_analyze, "phase": cmd_phase,
                "curvature": cmd_curvature, "sweep": cmd_sweep}
    try:
        cfg = load_job(args.config, samples=args.samples, out_dir=args.out,
                       out_format=args.format, plot=args.plot)
        if args.command not in cfg.allowed_commands:
            raise ConfigError(
                f"config allows commands {cfg.allowed_commands}, "
                f"not {args.command!r}")
        return handlers[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvalidParams as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NearEP as exc:
        print(f"degeneracy-proximity abort: {exc}", file=sys.stderr)
        return 3
    except (PrecisionLoss, AmbiguousMatching) as exc:
        suggestion = 2 * (args.samples if args.samples else 2048)
        print(f"precision loss: {exc}\n"
              f"suggestion: rerun with --samples {suggestion}",
              file=sys.stderr)
        return 4
    except HolonomyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
