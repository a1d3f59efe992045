"""Command-line entry point exposing every module's checks and scans.

Structured verdicts go out as JSON, scan series as CSV; identical
invocations produce bit-identical data output (deterministic orderings,
shortest round-trip float rendering in JSON, 17 significant digits in CSV).
When ``--out`` is given the data goes to that path and a run manifest with
the config snapshot, parameters, version, and wall time is written next to
it; stdout runs print the data only.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfg
from .basis import enumerate_basis, per_level_counts
from .oscillators import ccr_residual_entries
from .physical import noghost_report
from .propagator import (Bump1D, EvaluatorControls, InternalVector,
                         PauliJordanEvaluator, SmearingFunction, SpacetimeBump,
                         locality_scan)
from .virasoro import (OnShellMomentum, fit_central_coefficient, mass_spectrum,
                       standard_onshell_momentum, virasoro_bracket_residual)
from . import fields as fields_mod
from . import stringcone as cone_mod
from . import worldsheet as ws_mod


def fmt(x):
    """17-significant-digit rendering for CSV floats."""
    return format(float(x), ".17g")


def rat(x):
    """Canonical exact rendering for rationals."""
    f = Fraction(x)
    return str(f)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str = __version__
    wall_time_s: float = 0.0
    outputs: list = field(default_factory=list)

    def to_json(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.version,
            "wall_time_s": self.wall_time_s,
            "outputs": self.outputs,
        }


def _emit(text, args, manifest):
    if getattr(args, "out", None):
        path = Path(args.out)
        path.write_text(text, encoding="utf-8")
        manifest.outputs.append(str(path))
        man_path = Path(str(path) + ".manifest.json")
        manifest.wall_time_s = time.time() - manifest.wall_time_s
        man_path.write_text(json.dumps(manifest.to_json(), indent=2) + "\n",
                            encoding="utf-8")
        manifest.outputs.append(str(man_path))
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _parallel_map(fn, items):
    workers = cfg.worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


_ARG_TO_FIELD = {"d": "d", "a": "a", "gauge": "gauge", "cutoff": "level_cutoff",
                 "particle_cutoff": "particle_cutoff", "dcm": "d_cm"}


def _model_from_args(args, **defaults):
    overrides = dict(defaults)
    for attr, field_name in _ARG_TO_FIELD.items():
        val = getattr(args, attr, None)
        if val is not None:
            overrides[field_name] = str(val)
    return cfg.config_from_sources(getattr(args, "config", None), overrides)


# ---------------------------------------------------------------------------
# subcommands

def cmd_basis(args, manifest):
    basis = enumerate_basis(args.directions, args.cutoff)
    data = {
        "directions": args.directions,
        "cutoff": args.cutoff,
        "per_level": [{"level": lv, "count": c} for lv, c in per_level_counts(basis)],
        "total": basis.dim,
    }
    _emit(_json_text(data), args, manifest)
    return 0


def cmd_ccr_check(args, manifest):
    model = _model_from_args(args, level_cutoff=str(args.cutoff))
    basis = enumerate_basis(model.oscillator_directions, model.level_cutoff)
    metric = model.metric()
    n = model.level_cutoff
    results = []
    all_zero = True
    for am in range(1, n + 1):
        for an in range(1, n + 1):
            if am + an > n:
                continue
            for m in (am, -am):
                for nn in (an, -an):
                    for mu in range(basis.directions):
                        for nu in range(basis.directions):
                            bad = ccr_residual_entries(m, nn, mu, nu, basis, metric)
                            ok = not bad
                            all_zero = all_zero and ok
                            results.append({"m": m, "n": nn, "mu": mu, "nu": nu,
                                            "pass": ok})
    data = {
        "cutoff": n,
        "gauge": model.gauge.value,
        "directions": basis.directions,
        "pairs_checked": len(results),
        "all_zero": all_zero,
        "results": results,
    }
    _emit(_json_text(data), args, manifest)
    return 0 if all_zero else 1


def cmd_virasoro_check(args, manifest):
    model = _model_from_args(args, gauge="cov", level_cutoff=str(args.cutoff))
    basis = enumerate_basis(model.d, model.level_cutoff)
    metric = model.metric()
    if args.momentum:
        p = tuple(Fraction(tok) for tok in args.momentum.split(","))
        if len(p) != model.d:
            print(f"error: momentum needs {model.d} components", file=sys.stderr)
            return 2
        mom = OnShellMomentum(r=-sum(s * x * x for s, x in zip(metric.signs, p)), p=p)
    else:
        mom = standard_onshell_momentum(min(2, model.level_cutoff // 2), model.d, model.a)
    max_mode = min(3, model.level_cutoff)
    pairs = []
    for m in range(-max_mode, max_mode + 1):
        for nn in range(-max_mode, max_mode + 1):
            if (m, nn) == (0, 0):
                continue
            if abs(m) + abs(nn) <= model.level_cutoff:
                pairs.append((m, nn))

    def check(pair):
        m, nn = pair
        return virasoro_bracket_residual(m, nn, mom, basis, metric).is_zero()

    verdicts = _parallel_map(check, pairs)
    all_zero = all(verdicts)
    fit_modes = tuple(m for m in (1, 2, 3) if 2 * m <= model.level_cutoff)
    central = None
    if len(fit_modes) >= 2:
        c_fit, _ = fit_central_coefficient(mom, basis, metric, modes=fit_modes)
        central = rat(c_fit)
    data = {
        "cutoff": model.level_cutoff,
        "d": model.d,
        "momentum": [rat(x) for x in mom.p],
        "pairs_checked": len(pairs),
        "all_zero": all_zero,
        "fitted_central_coefficient": central,
    }
    _emit(_json_text(data), args, manifest)
    return 0 if all_zero else 1


def cmd_spectrum(args, manifest):
    model = _model_from_args(args, level_cutoff=str(args.cutoff))
    rows = []
    for level, m2, deg in mass_spectrum(model.level_cutoff,
                                        model.oscillator_directions, model.a):
        rows.append((str(level), rat(m2), str(deg)))
    _emit(_csv(("level", "mass_squared", "degeneracy"), rows), args, manifest)
    return 0


def cmd_noghost(args, manifest):
    rows = noghost_report(args.d, Fraction(args.a), args.max_level)
    data = []
    all_match = True
    for row in rows:
        all_match = all_match and row["match"]
        data.append({
            "level": row["level"],
            "r": rat(row["r"]),
            "dim_Hprime": row["dim_Hprime"],
            "dim_radical": row["dim_radical"],
            "dim_phys": row["dim_phys"],
            "signature": list(row["signature"]),
            "lightcone_degeneracy": row["lightcone_degeneracy"],
            "match": row["match"],
        })
    _emit(_json_text(data), args, manifest)
    return 0 if all_match else 1


def _default_internal(levels, basis, metric):
    """Canonical transverse internal vector with weight at each mass level."""
    coeffs = {}
    for r in levels:
        level = int((Fraction(r) + 2) // 2)
        if level == 0:
            coeffs[basis.index[()]] = Fraction(1)
        else:
            coeffs[basis.index[((level, 2),)]] = Fraction(1)
    return InternalVector(basis, metric, coeffs)


def cmd_locality_scan(args, manifest):
    if args.dcm != 2:
        print("error: locality scan is implemented for --dcm 2", file=sys.stderr)
        return 2
    levels = [Fraction(tok) for tok in args.levels.split(",")]
    seps = [float(tok) for tok in args.separations.split(",")]
    tlike = [float(tok) for tok in args.timelike.split(",")] if args.timelike else [2.5, 3.5]
    cutoff = max(1, max(int((r + 2) // 2) for r in levels))
    basis = enumerate_basis(26, cutoff)
    metric = cfg.minkowski_metric(26)
    internal = _default_internal(levels, basis, metric)
    rows, control = locality_scan(seps, tlike, [float(r) for r in levels],
                                  internal, internal, Fraction(1),
                                  bump_radius=args.radius, h=args.h)
    csv_rows = []
    ok = True
    for row in rows:
        if row.kind == "spacelike" and row.commutator_abs > args.tolerance * control:
            ok = False
        csv_rows.append((fmt(row.separation), row.kind, fmt(row.commutator_abs),
                         fmt(row.control_magnitude)))
    _emit(_csv(("separation", "kind", "commutator_abs", "control_magnitude"),
               csv_rows), args, manifest)
    return 0 if ok else 1


def cmd_pauli_jordan(args, manifest):
    controls = EvaluatorControls(xmax=args.xmax, h=args.h, width=args.width)
    ev = PauliJordanEvaluator(float(Fraction(args.r)), args.dcm, controls)
    ts = np.arange(0.0, args.tmax + 1e-12, args.dt_out)
    xs = np.arange(-args.xmax + controls.h, args.xmax - controls.h, args.dx_out)
    rows = []
    for t in ts:
        vals = ev.value(float(t), xs.reshape(-1, 1)) if len(xs) else []
        for x, v in zip(xs, np.atleast_1d(vals)):
            rows.append((fmt(t), fmt(x), fmt(v)))
    _emit(_csv(("t", "x", "value"), rows), args, manifest)
    return 0


def cmd_field_ccr(args, manifest):
    if args.dcm != 2:
        print("error: field CCR check is implemented for --dcm 2", file=sys.stderr)
        return 2
    basis = enumerate_basis(26, 2)
    metric = cfg.minkowski_metric(26)
    v1 = InternalVector(basis, metric, {basis.index[((1, 2),)]: Fraction(1)})
    v2 = InternalVector(basis, metric, {basis.index[((1, 2),)]: Fraction(1),
                                        basis.index[((2, 2),)]: Fraction(1, 2)})
    v3 = InternalVector(basis, metric, {basis.index[((2, 3),)]: Fraction(1)})
    pairs = [
        (SmearingFunction(SpacetimeBump(Bump1D(0.0, 0.5), (Bump1D(0.0, 0.5),)), v1),
         SmearingFunction(SpacetimeBump(Bump1D(0.6, 0.5), (Bump1D(0.4, 0.5),)), v1)),
        (SmearingFunction(SpacetimeBump(Bump1D(-0.1, 0.45), (Bump1D(0.1, 0.5),)), v2),
         SmearingFunction(SpacetimeBump(Bump1D(0.9, 0.4), (Bump1D(-0.3, 0.45),)), v2)),
        (SmearingFunction(SpacetimeBump(Bump1D(0.2, 0.4), (Bump1D(-0.2, 0.4),)), v3),
         SmearingFunction(SpacetimeBump(Bump1D(0.7, 0.45), (Bump1D(0.3, 0.5),)), v3)),
    ]
    shells = fields_mod.ShellGrid(args.pmax, args.shell_points)
    reports = []
    worst = 0.0
    for F, G in pairs:
        rep = fields_mod.field_ccr_report(F, G, Fraction(1), shells,
                                          args.particle_cutoff,
                                          propagator_kwargs={"h": args.h})
        worst = max(worst, rep["relative_mismatch"])
        reports.append({
            "fock_commutator": [rep["fock_commutator"].real, rep["fock_commutator"].imag],
            "propagator_commutator": [rep["propagator_commutator"].real,
                                      rep["propagator_commutator"].imag],
            "relative_mismatch": rep["relative_mismatch"],
            "offdiagonal_max": rep["offdiagonal_max"],
            "hermiticity_defect": rep["hermiticity_defect"],
        })
    data = {"pairs": reports, "max_relative_mismatch": worst,
            "tolerance": args.tolerance, "pass": worst <= args.tolerance}
    _emit(_json_text(data), args, manifest)
    return 0 if worst <= args.tolerance else 1


def cmd_observable_check(args, manifest):
    spec_path = Path(args.spec)
    payload = json.loads(spec_path.read_text(encoding="utf-8"))
    d = int(payload.get("d", 26))
    cutoff = int(payload.get("cutoff", 2))
    a = Fraction(str(payload.get("a", 1)))
    basis = enumerate_basis(d, cutoff)
    metric = cfg.minkowski_metric(d)
    coeffs = {}
    for term in payload["internal"]:
        modes = tuple(sorted((int(n), int(mu)) for n, mu in term["modes"]))
        coeffs[basis.index[modes]] = coeffs.get(basis.index[modes], 0) \
            + Fraction(str(term.get("coeff", 1)))
    b = payload.get("bump", {})
    bump = SpacetimeBump(Bump1D(float(b.get("t_center", 0.0)), float(b.get("t_radius", 0.5))),
                         (Bump1D(float(b.get("x_center", 0.0)), float(b.get("x_radius", 0.5))),))
    F = SmearingFunction(bump, InternalVector(basis, metric, coeffs))
    sh = payload.get("shells", {})
    shells = fields_mod.ShellGrid(float(sh.get("pmax", 50.0)), int(sh.get("n", 2000)))
    tol = float(payload.get("tolerance", 1e-9))
    ok, worst, details = fields_mod.observable_check(F, a, shells, tol=tol)
    data = {"observable": ok, "max_residual": worst, "tolerance": tol,
            "components": details}
    _emit(_json_text(data), args, manifest)
    return 0 if ok else 1


def cmd_worldsheet_demo(args, manifest):
    modes = np.zeros((2, 4), dtype=complex)
    modes[0] = (0.3 + 0.1j, 0.2, -0.1j, 0.05)
    modes[1] = (0.0, 0.1j, 0.05, -0.02)
    ws = ws_mod.WorldsheetSolution(x=np.zeros(4), p=np.array([1.0, 0.3, 0.2, 0.1]),
                                   modes=modes)
    rows = []
    worst_wave = 0.0
    worst_neumann = 0.0
    for tau in np.linspace(0.0, 1.0, args.samples):
        for sigma in np.linspace(0.0, np.pi, args.samples):
            x_val, dtau, dsig = ws_mod.evaluate(ws, tau, sigma)
            res = ws_mod.wave_residual(ws, tau, sigma)
            worst_wave = max(worst_wave, float(np.max(np.abs(res))))
            rows.append((fmt(tau), fmt(sigma)) + tuple(fmt(v) for v in x_val)
                        + (fmt(float(np.max(np.abs(res)))),))
        for edge in (0.0, np.pi):
            _, _, dsig = ws_mod.evaluate(ws, tau, edge)
            worst_neumann = max(worst_neumann, float(np.max(np.abs(dsig))))
    header = ("tau", "sigma") + tuple(f"X{mu}" for mu in range(4)) + ("wave_residual",)
    text = _csv(header, rows)
    _emit(text, args, manifest)
    ok = worst_wave < 1e-12 and worst_neumann < 1e-12
    return 0 if ok else 1


def cmd_string_cone(args, manifest):
    config = cone_mod.ConeConfig(d_cm=args.dcm, n_modes=args.n_modes, h=args.h,
                                 extent=args.extent, cfl=args.cfl)
    bump = cone_mod.point_bump(args.data_radius)
    hist, stencil = cone_mod.solve(config, bump,
                                   lambda *m: np.zeros_like(m[0]), args.T)
    rows = []
    for i, t in enumerate(hist.times):
        rows.append((fmt(t), fmt(hist.support_radius_extended[i]),
                     fmt(hist.support_radius_com[i]),
                     fmt(hist.leakage_extended[i]), fmt(hist.leakage_com[i]),
                     fmt(hist.energies[i])))
    _emit(_csv(("t", "support_radius_extended", "support_radius_com",
                "leakage_extended", "leakage_com", "weighted_energy"), rows),
          args, manifest)
    ok = max(hist.leakage_extended) < args.leakage_threshold
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="stringfock",
        description="Exact and numerical workbench for the free open bosonic string field.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="write output here (plus a .manifest.json)")

    p = sub.add_parser("basis", help="enumerate the truncated basis")
    p.add_argument("--directions", type=int, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    common(p)

    p = sub.add_parser("ccr-check", help="exact mode commutator residuals")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--gauge", choices=("lc", "cov"))
    common(p)

    p = sub.add_parser("virasoro-check", help="constraint bracket residuals")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--momentum", help="comma-separated exact rational components")
    common(p)

    p = sub.add_parser("spectrum", help="mass-squared spectrum with degeneracies")
    p.add_argument("--gauge", choices=("lc", "cov"), required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--a", default="1")
    p.add_argument("--d", type=int)
    common(p)

    p = sub.add_parser("noghost", help="constraint solve and quotient signature per level")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", default="1")
    p.add_argument("--max-level", type=int, required=True, dest="max_level")
    common(p)

    p = sub.add_parser("locality-scan", help="smeared commutator across separations")
    p.add_argument("--dcm", type=int, default=2)
    p.add_argument("--levels", default="-2,0,2")
    p.add_argument("--separations", default="2.1,3,4,5,6")
    p.add_argument("--timelike", default="2.5,3.5")
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--h", type=float, default=0.004)
    p.add_argument("--tolerance", type=float, default=1e-6)
    common(p)

    p = sub.add_parser("pauli-jordan", help="commutator function field dump")
    p.add_argument("--r", required=True)
    p.add_argument("--dcm", type=int, default=2)
    p.add_argument("--xmax", type=float, default=6.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--width", type=float, default=0.08)
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--dt-out", type=float, default=0.5, dest="dt_out")
    p.add_argument("--dx-out", type=float, default=0.25, dest="dx_out")
    common(p)

    p = sub.add_parser("field-ccr", help="two-route field commutator comparison")
    p.add_argument("--dcm", type=int, default=2)
    p.add_argument("--particle-cutoff", type=int, default=3, dest="particle_cutoff")
    p.add_argument("--pmax", type=float, default=50.0)
    p.add_argument("--shell-points", type=int, default=2000, dest="shell_points")
    p.add_argument("--h", type=float, default=0.005)
    p.add_argument("--tolerance", type=float, default=1e-4)
    common(p)

    p = sub.add_parser("observable-check", help="constraint residuals of a smeared field")
    p.add_argument("--spec", required=True, help="field description JSON file")
    common(p)

    p = sub.add_parser("worldsheet-demo", help="classical sheet samples and residuals")
    p.add_argument("--samples", type=int, default=9)
    common(p)

    p = sub.add_parser("string-cone", help="extended-metric domain of dependence run")
    p.add_argument("--N", type=int, default=1, dest="n_modes")
    p.add_argument("--dcm", type=int, default=2)
    p.add_argument("--h", type=float, default=0.025)
    p.add_argument("--T", type=float, default=1.5)
    p.add_argument("--extent", type=float, default=3.0)
    p.add_argument("--cfl", type=float, default=0.4)
    p.add_argument("--data-radius", type=float, default=0.4, dest="data_radius")
    p.add_argument("--leakage-threshold", type=float, default=1e-6,
                   dest="leakage_threshold")
    common(p)

    return parser


_HANDLERS = {
    "basis": cmd_basis,
    "ccr-check": cmd_ccr_check,
    "virasoro-check": cmd_virasoro_check,
    "spectrum": cmd_spectrum,
    "noghost": cmd_noghost,
    "locality-scan": cmd_locality_scan,
    "pauli-jordan": cmd_pauli_jordan,
    "field-ccr": cmd_field_ccr,
    "observable-check": cmd_observable_check,
    "worldsheet-demo": cmd_worldsheet_demo,
    "string-cone": cmd_string_cone,
}


def dispatch(argv):
    """Run one subcommand; 0 on success, 1 on failed checks, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    manifest = RunManifest(command=args.command,
                           parameters={k: v for k, v in vars(args).items()
                                       if k not in ("command",) and v is not None},
                           wall_time_s=time.time())
    try:
        return _HANDLERS[args.command](args, manifest)
    except (cfg.ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
