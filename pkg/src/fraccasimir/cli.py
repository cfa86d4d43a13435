"""Command-line front end: point evaluations and parameter sweeps as CSV.

Every subcommand evaluates one physics operation on a grid spanned by up to
two axes (``--axis1``/``--axis2``, syntax ``name:min:max:count[:log]``);
without axes it evaluates a single point. ``sweep --target NAME ...`` is an
alias for running subcommand ``NAME``.

Exit codes: 0 success, 2 usage error, 3 domain or convergence error.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import io
import json
import math
import sys

import numpy as np

from . import __version__, piston, thermo, topomass
from ._accel import backend_name
from .errors import ConvergenceError, DomainError, PoleError, UsageError
from .model import BoundarySpec, Coupling, FieldSpec, PistonGeometry, TorusTopology
from .series import SeriesControl
from .units import from_natural, label, to_natural

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3


@dataclass(frozen=True)
class Param:
    name: str
    kind: str = "dimensionless"
    default: object = None
    help: str = ""
    vector: bool = False  # comma-separated list of floats
    integer: bool = False


@dataclass(frozen=True)
class Target:
    name: str
    help: str
    params: tuple
    columns: tuple  # (name, kind) of the outputs
    compute: object = field(compare=False)

    def columns_for(self, values):
        if self.name == "region-scan":
            p = int(values.get("p") or 2)
            return tuple((f"L{i + 1}", "dimensionless") for i in range(p)) + self.columns
        return self.columns


# -- evaluators: natural-unit dict in, tuple of outputs out -------------------

def _geometry(v):
    lengths = tuple(v["L"])
    if v.get("D") is not None and int(v["D"]) != len(lengths) + 1:
        raise UsageError(f"--D {int(v['D'])} needs {int(v['D']) - 1} transverse lengths, "
                         f"got {len(lengths)}")
    return PistonGeometry(v["a"], lengths)


def _fe_d0(v, ctl):
    f = FieldSpec.type_iii(v["alpha"], v["gamma"], v["mass"])
    return (thermo.free_energy_d0(f, v["beta"], ctl),)


def _fe_ht(v, ctl):
    f = FieldSpec.type_i(v["gamma"], v["mass"])
    return (thermo.free_energy_highT_d3(f, v["T"]),)


def _piston_massless(v, ctl):
    g = _geometry(v)
    return (piston.massless_piston_force_rect(v["gamma"], v["mu"], g, v["T"], ctl).value,)


def _piston_energy(v, ctl):
    f = FieldSpec.type_iii(v["alpha"], v["gamma"], v["mass"])
    g, b = _geometry(v), BoundarySpec(v["mu"])
    if v["leading"]:
        return (piston.high_T_leading(f, b, g, v["T"], ctl).value,)
    if v["T"] == 0.0:
        return (piston.massive_piston_energy_zeroT(f, b, g, ctl).value,)
    return (piston.massive_piston_energy(f, b, g, v["T"], ctl).value,)


def _piston_force(v, ctl):
    f = FieldSpec.type_iii(v["alpha"], v["gamma"], v["mass"])
    g, b = _geometry(v), BoundarySpec(v["mu"])
    if v["T"] == 0.0:
        return (piston.massive_piston_force_zeroT(f, b, g, ctl).value,)
    return (piston.massive_piston_force(f, b, g, v["T"], ctl).value,)


def _topomass(v, ctl):
    f = FieldSpec.type_i(v["gamma"])
    topo = TorusTopology(tuple(v["L"]), int(v["q"]))
    lam = Coupling(v["lam"])
    if v["mass"] > 0:
        r = topomass.massive_renormalized_mass(v["mass"], f, lam, topo, ctl)
    else:
        r = topomass.massless_topological_mass(f, lam, topo, ctl)
    return r.m_ren_2gamma, r.branch, int(r.symmetry_broken)


def _region_point(v, ctl):
    p = int(v["p"])
    if p == 2:
        ratios = (v["k"], 1.0)
    elif p == 3 and v["k2"] is None and v["k3"] is None:
        ratios = (v["k"], 1.0, 1.0)
    elif p == 3:
        ratios = (1.0, v["k2"] or 1.0, v["k3"] or 1.0)
    else:
        raise UsageError("region-scan supports p = 2 and p = 3")
    s = v["s"]
    if min(abs(s), abs(s - 0.5 * p)) < topomass.SCAN_POLE_GAP:
        raise PoleError(f"s = {s} sits on a pole of Gamma(s) Z_{p}(s)")
    pts, _ = topomass.symmetry_region_scan(p, [ratios], [s], v["lam"], ctl)
    pt = pts[0]
    return tuple(pt.lengths) + (pt.value, pt.sign)


_FIELD = (
    Param("alpha", default=1.0, help="fractional power of the Laplacian, (0, 1]"),
    Param("gamma", default=1.0, help="outer fractional exponent, > 0"),
    Param("mass", "mass", 0.0, "field mass"),
)
_PISTON = (
    Param("mu", default=0.0, help="fractional Neumann order on the piston, [0, 1]"),
    Param("a", "length", None, "piston-to-wall distance"),
    Param("L", "length", None, "transverse lengths L_2,...,L_D", vector=True),
    Param("D", default=None, help="spatial dimension (checked against --L)", integer=True),
    Param("T", "temperature", 0.0, "temperature (0 selects the zero-temperature formulas)"),
)

TARGETS = {
    t.name: t
    for t in (
        Target("free-energy-d0", "renormalized free energy of a type III field in D = 0",
               _FIELD + (Param("beta", "inv_energy", None, "inverse temperature"),),
               (("F", "energy"),), _fe_d0),
        Target("free-energy-ht", "high-temperature free energy density, type I, D = 3",
               (Param("gamma", default=1.0, help="fractional exponent"),
                Param("mass", "mass", 0.0, "field mass"),
                Param("T", "temperature", None, "temperature")),
               (("F", "energy_density"),), _fe_ht),
        Target("piston-massless", "massless type I piston force (rectangular cross section)",
               (Param("gamma", default=1.0, help="fractional exponent"),) + _PISTON,
               (("F", "force"),), _piston_massless),
        Target("piston-energy", "type III piston energy",
               _FIELD + _PISTON + (Param("leading", default=0, integer=True,
                                         help="1: keep only the l = 0 (high-T leading) block"),),
               (("E", "energy"),), _piston_energy),
        Target("piston-force", "type III piston force",
               _FIELD + _PISTON, (("F", "force"),), _piston_force),
        Target("topomass", "renormalized (mass > 0) or topological (mass = 0) mass, type I",
               (Param("gamma", default=1.0, help="fractional exponent"),
                Param("mass", "mass", 0.0, "bare mass (0 selects the massless theory)"),
                Param("lam", default=1.0, help="quartic coupling"),
                Param("q", default=None, help="number of non-compact dimensions", integer=True),
                Param("L", "length", None, "compactification lengths L_1,...,L_p", vector=True)),
               (("m_ren_2gamma", "mass_power"), ("branch", None), ("symmetry_broken", None)),
               _topomass),
        Target("region-scan", "sign map of m_ren^(2gamma) at unit torus volume",
               (Param("p", default=2, help="compact dimensions (2 or 3)", integer=True),
                Param("s", default=None, help="s = d/2 - gamma, value or min:max:count[:log]"),
                Param("k", default=1.0, help="ratio k in L_1:L_2(:L_3) = k:1(:1)"),
                Param("k2", default=None, help="k_2 in L_1:L_2:L_3 = 1:k_2:k_3 (p = 3)"),
                Param("k3", default=None, help="k_3 in L_1:L_2:L_3 = 1:k_2:k_3 (p = 3)"),
                Param("lam", default=1.0, help="quartic coupling (positive)")),
               (("value", "dimensionless"), ("sign", None)), _region_point),
    )
}

# region-scan accepts its axes directly as --s/--k/--k2/--k3 ranges
_INLINE_AXES = {"region-scan": ("s", "k", "k2", "k3")}


# -- argument handling -------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple
    spacing: str


def parse_axis(text, name=None):
    """Parse ``[name:]min:max:count[:log]`` into an :class:`Axis`."""
    parts = text.split(":")
    if name is None:
        if len(parts) < 4:
            raise UsageError(f"axis '{text}' must read name:min:max:count[:log]")
        name, parts = parts[0], parts[1:]
    spacing = "linear"
    if len(parts) == 4:
        spacing = parts.pop()
    if len(parts) != 3 or spacing not in ("linear", "lin", "log"):
        raise UsageError(f"axis '{text}' must read min:max:count[:log]")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"axis '{text}' has non-numeric bounds or count") from None
    if count < 2 or not lo < hi:
        raise UsageError(f"axis '{text}' needs count >= 2 and min < max")
    if spacing == "log":
        if lo <= 0:
            raise UsageError(f"log axis '{text}' needs min > 0")
        vals = np.geomspace(lo, hi, count)
    else:
        vals = np.linspace(lo, hi, count)
    return Axis(name, tuple(float(x) for x in vals), "log" if spacing == "log" else "linear")


def read_config(path):
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = val
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


_UNITS_HELP = (
    "natural (default): hbar = c = k_B = 1 in a user length unit l. "
    "SI: lengths in m, T in K, mass in kg, beta in 1/J; energies in J, forces in N. "
    "Conversion uses CODATA hbar*c and k_B: T -> k_B T/(hbar c) [1/m], E = hbar c E_nat."
)


def _add_common(p):
    p.add_argument("--config", help="key = value file merged under explicit flags")
    p.add_argument("--units", choices=("natural", "SI"), default=None, help=_UNITS_HELP)
    p.add_argument("--tol", type=float, default=None, help="relative series tolerance (1e-12)")
    p.add_argument("--max-terms", type=int, default=None, help="term budget per index (1e6)")
    p.add_argument("--jobs", type=int, default=None, help="worker threads for grid points")
    p.add_argument("--axis1", default=None, help="name:min:max:count[:log]")
    p.add_argument("--axis2", default=None, help="name:min:max:count[:log]")
    p.add_argument("--on-error", choices=("fail", "skip"), default=None,
                   help="fail (default) or emit nan rows for failing grid points")
    p.add_argument("--diagnostics", action="store_true", help="report the numeric backend on stderr")


def build_parser():
    parser = _Parser(prog="fraccasimir", description=__doc__.splitlines()[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    parser.target_parsers = {}
    for t in TARGETS.values():
        sp = sub.add_parser(t.name, help=t.help, description=t.help)
        for prm in t.params:
            sp.add_argument(f"--{prm.name}", default=None, help=prm.help)
        _add_common(sp)
        parser.target_parsers[t.name] = sp
    sw = sub.add_parser("sweep", help="run TARGET over --axis1/--axis2 grids",
                        description="sweep --target NAME [flags of subcommand NAME]")
    sw.add_argument("--target", required=True, choices=sorted(TARGETS))
    return parser


def _parse_scalar(prm, text):
    try:
        if prm.vector:
            vals = [float(x) for x in str(text).split(",") if x.strip()]
            if not vals:
                raise ValueError
            return vals
        if prm.integer:
            return int(float(text))
        return float(text)
    except ValueError:
        raise UsageError(f"--{prm.name}: cannot parse '{text}'") from None


def _resolve(target, ns):
    """Merge explicit flags over config over defaults; split off axes."""
    cfg = read_config(ns.config) if ns.config else {}
    common = {"units": "natural", "tol": 1e-12, "max_terms": 10**6, "jobs": 1,
              "axis1": None, "axis2": None, "on_error": "fail"}
    names = {p.name for p in target.params} | set(common) | {"config", "diagnostics"}
    unknown = sorted(set(cfg) - names)
    if unknown:
        raise UsageError(f"unknown config keys for {target.name}: {', '.join(unknown)}")
    opts = {}
    for key, dflt in common.items():
        val = getattr(ns, key)
        opts[key] = val if val is not None else cfg.get(key, dflt)
    try:
        opts["tol"] = float(opts["tol"])
        opts["max_terms"] = int(float(opts["max_terms"]))
        opts["jobs"] = max(1, int(opts["jobs"]))
    except ValueError:
        raise UsageError("tol, max-terms and jobs must be numeric") from None
    if opts["units"] not in ("natural", "SI"):
        raise UsageError(f"units must be natural or SI, got {opts['units']}")

    axes = [parse_axis(opts[k]) for k in ("axis1", "axis2") if opts[k]]
    explicit, values = set(), {}
    for prm in target.params:
        raw = getattr(ns, prm.name)
        if raw is not None:
            explicit.add(prm.name)
        elif prm.name in cfg:
            raw = cfg[prm.name]
        if raw is not None and prm.name in _INLINE_AXES.get(target.name, ()) \
                and ":" in str(raw):
            axes.append(parse_axis(str(raw), prm.name))
            explicit.discard(prm.name)
            continue
        values[prm.name] = prm.default if raw is None else _parse_scalar(prm, raw)
    params = {p.name: p for p in target.params}
    seen = set()
    for ax in axes:
        prm = params.get(ax.name)
        if prm is None or prm.vector:
            raise UsageError(f"{target.name} has no scalar parameter '{ax.name}' to sweep")
        if ax.name in explicit:
            raise UsageError(f"'{ax.name}' is both an axis and a fixed parameter")
        if ax.name in seen:
            raise UsageError(f"'{ax.name}' appears on two axes")
        seen.add(ax.name)
        values.pop(ax.name, None)
    if len(axes) > 2:
        raise UsageError("at most two axes")
    missing = [p.name for p in target.params
               if p.name not in seen and values.get(p.name) is None and p.default is None
               and p.name not in ("D", "k2", "k3")]
    if missing:
        raise UsageError(f"{target.name} needs --{', --'.join(missing)}")
    return opts, values, axes


# -- evaluation and CSV ------------------------------------------------------

def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _to_natural(target, point, units):
    if units != "SI":
        return dict(point)
    out = {}
    for prm in target.params:
        v = point.get(prm.name)
        if v is None or prm.integer:
            out[prm.name] = v
        elif prm.vector:
            out[prm.name] = [to_natural(prm.kind, x) for x in v]
        else:
            out[prm.name] = to_natural(prm.kind, v)
    return out


def evaluate_point(target, point, units, ctl):
    """Evaluate ``target`` at one grid point given in ``units``; outputs in ``units``."""
    res = target.compute(_to_natural(target, point, units), ctl)
    out = []
    for (name, kind), val in zip(target.columns_for(point), res):
        if kind is None or isinstance(val, str):
            out.append(val)
        elif units == "SI":
            out.append(from_natural(kind, val))
        else:
            out.append(val)
    return tuple(out)


def _grid(axes):
    if not axes:
        return [()]
    if len(axes) == 1:
        return [(v,) for v in axes[0].values]
    return [(u, v) for u in axes[0].values for v in axes[1].values]


def run_target(target, opts, values, axes, argv, err=sys.stderr):
    """Evaluate the grid and return the CSV text (raises on failure)."""
    ctl = SeriesControl(rel_tol=opts["tol"], max_terms=opts["max_terms"])
    units = opts["units"]
    params = {p.name: p for p in target.params}
    columns = target.columns_for(values)
    points = []
    for coords in _grid(axes):
        pt = dict(values)
        pt.update({ax.name: c for ax, c in zip(axes, coords)})
        points.append(pt)

    def work(pt):
        try:
            return evaluate_point(target, pt, units, ctl), None
        except PoleError as exc:
            if target.name == "region-scan":
                return None, exc  # pole-adjacent s: dropped with a diagnostic
            if opts["on_error"] == "skip":
                return tuple(math.nan if k else "" for _, k in columns), exc
            raise
        except (DomainError, ConvergenceError) as exc:
            if opts["on_error"] == "skip":
                return tuple(math.nan if k else "" for _, k in columns), exc
            raise

    if opts["jobs"] > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=opts["jobs"]) as pool:
            results = list(pool.map(work, points))
    else:
        results = [work(pt) for pt in points]

    buf = io.StringIO()
    buf.write(f"# fraccasimir {__version__}\n")
    buf.write("# command: " + " ".join(argv) + "\n")
    buf.write(f"# rel_tol={_fmt(ctl.rel_tol)} max_terms={ctl.max_terms} units={units}\n")
    fixed = []
    for name, v in values.items():
        if v is None:
            continue
        text = ",".join(_fmt(x) for x in v) if isinstance(v, list) else _fmt(v)
        fixed.append(f"{name}={text}")
    buf.write("# fixed: " + " ".join(fixed) + "\n")
    head = [f"{ax.name}[{label(params[ax.name].kind, units)}]" for ax in axes]
    head += [name if kind is None else f"{name}[{label(kind, units)}]"
             for name, kind in columns]
    buf.write(",".join(head) + "\n")
    for pt, (row, exc) in zip(points, results):
        if row is not None:
            coords = [pt[ax.name] for ax in axes]
            buf.write(",".join(_fmt(x) for x in coords + list(row)) + "\n")
        if exc is not None:
            err.write(_error_line(exc, pt) + "\n")
    return buf.getvalue()


def _error_line(exc, point=None):
    rec = {"error": type(exc).__name__, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        rec["diagnostics"] = {k: _jsonable(v) for k, v in diag.items()}
    if point is not None:
        rec["point"] = {k: _jsonable(v) for k, v in point.items()}
    return json.dumps(rec, sort_keys=True)


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return repr(v)


def run(argv=None, out=None, err=None):
    """Run the command line and return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        ns, rest = parser.parse_known_args(argv)
        if ns.command == "sweep":
            target = TARGETS[ns.target]
            ns = parser.target_parsers[target.name].parse_args(rest)
        else:
            if rest:
                parser.error(f"unrecognized arguments: {' '.join(rest)}")
            target = TARGETS[ns.command]
        opts, values, axes = _resolve(target, ns)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    try:
        text = run_target(target, opts, values, axes, argv, err)
    except UsageError as exc:
        err.write(_error_line(exc) + "\n")
        return EXIT_USAGE
    except (DomainError, ConvergenceError) as exc:
        err.write(_error_line(exc) + "\n")
        return EXIT_DOMAIN
    out.write(text)
    if ns.diagnostics:
        err.write(f"# backend={backend_name()}\n")
    return EXIT_OK


def main():
    sys.exit(run())
