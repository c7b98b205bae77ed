"""Command-line runner: ``bvf <command> [options]``.

Every command accepts ``--config FILE`` (a JSON object whose keys are the
option names with dashes replaced by underscores); flags given on the command
line override the file.  Reports are JSON documents with ``"schema": "bvf/1"``
written to ``--out`` (default: stdout); traces go to ``--csv``.

Exit codes: 0 success, 1 validation error, 2 numerical failure or failed check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, heat, inequality, minkowski, spectral
from .checks import acceptance_suite, inequality_sweep, random_catalog, trivial_suite
from .discrepancy import (
    TruncationCapped,
    cassels_montgomery_check,
    cm_witness,
    discrepancy,
    quadratic_discrepancy_fourier,
    quadratic_discrepancy_mc,
    recursive_decomposition,
    scaling_study,
)
from .errors import BVFError, TailNotControlled, ValidationError
from .geometry.facets import jump_product, perimeter_of, total_variation
from .geometry.measure import WhiskerDisk, l1_norm, l2_norm_sq, sup_norm
from .io import (
    catalog_listing,
    config_hash,
    function_to_dict,
    jsonable,
    parse_function,
    parse_pointset,
    parse_region,
    pointset_csv,
)
from .parallel import set_threads

SCHEMA = "bvf/1"
# options that do not change results and are left out of the config hash
_PLUMBING = {"config", "out", "csv", "threads", "command"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"not a comma-separated list of numbers: {text!r}") from exc


def _grid(value, name: str) -> np.ndarray | None:
    if value is None:
        return None
    g = np.asarray(_floats(value) if isinstance(value, str) else value, dtype=float)
    if g.size == 0 or np.any(~np.isfinite(g)) or np.any(g <= 0):
        raise ValidationError(f"{name} must contain positive numbers")
    diffs = np.diff(g)
    if g.size > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValidationError(f"{name} must be strictly monotone")
    return g


# ---------------------------------------------------------------------------
# commands; each returns (result dict, csv text or None, ok flag)


def cmd_catalog(cfg):
    if cfg["show"]:
        u = parse_function(cfg["show"])
        facts = {"volume": u.mass, "l1": l1_norm(u), "l2_sq": l2_norm_sq(u), "sup": sup_norm(u),
                 "total_variation": total_variation(u), "J": jump_product(u, u).value, "diam": u.diam}
        if len(u.terms) == 1:
            facts["perimeter"] = perimeter_of(u)
        return {"function": function_to_dict(u), "facts": facts}, None, True
    return {"shapes": catalog_listing()}, None, True


def _estimate_result(est) -> dict:
    return {"kind": est.kind, "limit": est.limit, "uncertainty": est.uncertainty, "diagnostics": est.diagnostics}


def _exact_J(u, v):
    try:
        return jump_product(u, u if v is None else v).value
    except BVFError:
        return None


def cmd_spectral_asymptote(cfg):
    u = parse_function(cfg["shape"])
    v = parse_function(cfg["v"]) if cfg["v"] else None
    if cfg["estimator"] == "cutoff":
        est = spectral.jump_estimate_cutoff(u, v, R_max=float(cfg["Rmax"]))
        prof = spectral.spectral_profile(u, float(cfg["Rmax"]), 2.0, v=v)
        trace = prof.to_csv()
    elif cfg["estimator"] == "gaussian":
        est = spectral.jump_estimate_gaussian(u, t_grid=_grid(cfg["t_grid"], "t grid"), v=v)
        trace = est.to_csv()
    else:
        raise ValidationError("estimator must be 'cutoff' or 'gaussian'")
    res = _estimate_result(est)
    res["exact_J"] = _exact_J(u, v)
    return res, trace, True


def cmd_tail(cfg):
    u = parse_function(cfg["shape"])
    est = spectral.tail_asymptote(u, R_max=float(cfg["Rmax"]), R_min=cfg["Rmin"])
    res = _estimate_result(est)
    res["exact_J"] = _exact_J(u, None)
    return res, est.to_csv(), True


def cmd_gaussian_asymptote(cfg):
    cfg = dict(cfg, estimator="gaussian")
    return cmd_spectral_asymptote(cfg)


def cmd_heat_asymptote(cfg):
    u = parse_function(cfg["shape"])
    v = parse_function(cfg["v"]) if cfg["v"] else None
    t_grid = _grid(cfg["t_grid"], "t grid")
    est = heat.heat_jump_estimate(u, v, t_grid)
    curve = heat.heat_curve(u, v, est.params)
    res = _estimate_result(est)
    res["exact_J"] = _exact_J(u, v)
    if cfg["derivative_at"] is not None:
        t = float(cfg["derivative_at"])
        res["sqrt_pi_minus_dH"] = -math.sqrt(math.pi) * heat.heat_derivative(u, v, t)
    return res, curve.to_csv(), True


def cmd_relative_heat(cfg):
    region = parse_region(cfg["shape"])
    if isinstance(region, WhiskerDisk):
        raise ValidationError("relative heat content needs a catalog shape")
    t_grid = _grid(cfg["t_grid"], "t grid")
    t_grid = np.asarray(1e-2 * 2.0 ** -np.arange(5) if t_grid is None else t_grid)
    vals = [heat.relative_heat_content_set(region, float(t)) for t in t_grid]
    rows = ["t,relative_heat"] + [f"{float(t)!r},{v!r}" for t, v in zip(t_grid, vals)]
    target = region.perimeter / math.sqrt(math.pi)
    return {"t": t_grid, "values": vals, "target": target, "last": vals[-1]}, "\n".join(rows) + "\n", True


def cmd_minkowski_derivative(cfg):
    region = parse_region(cfg["region"])
    h = _grid(cfg["h_grid"], "h grid")
    xis = np.asarray(_floats(cfg["xi"]), dtype=float).reshape(-1, 2)
    rows, out = ["xi0,xi1,quotient_re,quotient_im,target_re,target_im,abs_err"], []
    for xi in xis:
        est = minkowski.ft_difference_quotient(region, xi, h)
        lim, tgt = complex(est.limit), complex(est.diagnostics["target"])
        out.append({"xi": xi, "quotient": lim, "target": tgt, "abs_err": abs(lim - tgt)})
        rows.append(",".join(repr(float(x)) for x in (xi[0], xi[1], lim.real, lim.imag, tgt.real, tgt.imag,
                                                       abs(lim - tgt))))
    fam = minkowski.dilation_family(region, h, samples=int(cfg["samples"]), seed=int(cfg["seed"]))
    per = region.perimeter
    res = {"quotients": out, "minkowski_content": fam.sm, "minkowski_residual": fam.residual,
           "perimeter": per, "gap": fam.sm - per, "method": fam.method}
    return res, "\n".join(rows) + "\n", True


def cmd_weak_probe(cfg):
    region = parse_region(cfg["region"])
    table = minkowski.weak_convergence_probe(region, h_grid=_grid(cfg["h_grid"], "h grid"), tol=float(cfg["tol"]))
    ok = all(table.verdicts.values())
    return {"limits": table.limits, "verdicts": table.verdicts, "all_converged": ok, "note": table.note}, \
        table.to_csv(), ok


def cmd_discrepancy(cfg):
    u = parse_function(cfg["u"])
    P = parse_pointset(cfg["pointset"], u.dim, int(cfg["seed"]))
    res = {"N": P.N, "provenance": P.provenance, "u_catalog_id": cfg["u"]}
    if cfg["delta"] is not None or cfg["tau"] is not None or cfg["angle"] is not None:
        tau = None if cfg["tau"] is None else _floats(cfg["tau"])
        rho = None if cfg["angle"] is None else float(cfg["angle"])
        res["D"] = discrepancy(u, P, tau, 1.0 if cfg["delta"] is None else float(cfg["delta"]), rho)
        return res, None, True
    method = cfg["method"]
    if method not in ("fourier", "mc", "both"):
        raise ValidationError("method must be fourier, mc or both")
    reports = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationCapped)
        warnings.simplefilter("always", TailNotControlled)
        if method in ("fourier", "both"):
            reports["fourier"] = quadratic_discrepancy_fourier(u, P, cfg["M"]).to_dict()
        if method in ("mc", "both"):
            reports["monte_carlo"] = quadratic_discrepancy_mc(u, P, int(cfg["samples"]), int(cfg["seed"])).to_dict()
    res["reports"] = reports
    ok = True
    if method == "both":
        f, m = reports["fourier"], reports["monte_carlo"]
        bound = m["ci_half_width"] + (f["tail_bound"] or 0.0)
        res["agree"] = abs(f["value"] - m["value"]) <= bound
        ok = res["agree"]
    res["warnings"] = sorted({str(w.message) for w in caught})
    return res, None, ok


def cmd_pointset(cfg):
    d = int(cfg["d"])
    P = parse_pointset(cfg["pointset"], d, int(cfg["seed"]))
    res = {"N": P.N, "d": d, "provenance": P.provenance, "params": P.params}
    kind = cfg["pointset"].partition(":")[0]
    if kind == "composite":
        plan = recursive_decomposition(P.N, d)
        res["plan"] = {"K": plan.K, "parts": plan.parts, "remainder": plan.remainder,
                       "relazione": plan.relazione_holds(), "recursione": plan.recursione_holds()}
    return res, pointset_csv(P), True


def cmd_cm_check(cfg):
    if cfg["witness"]:
        res_ = cfg["resolution"]
        w = cm_witness(float(cfg["M"]), int(cfg["d"]), None if res_ is None else float(res_), int(cfg["seed"]))
        res = {"x": w.x, "count": w.count, "target": w.target, "coefficients_ok": w.coefficients_ok,
               "nonnegative_ok": w.nonnegative_ok}
        return res, None, w.coefficients_ok and w.nonnegative_ok
    P = parse_pointset(cfg["pointset"], int(cfg["d"]), int(cfg["seed"]))
    r = cassels_montgomery_check(P, float(cfg["M"]))
    return {"lhs": r.lhs, "rhs": r.rhs, "holds": r.holds, "M": r.M, "N": r.N}, None, r.holds


def cmd_scaling_study(cfg):
    u = parse_function(cfg["u"])
    N = [int(x) for x in _floats(cfg["N"])]
    study = scaling_study(u, cfg["construction"], N, M=cfg["M"], seed=int(cfg["seed"]))
    J = jump_product(u, u).value
    res = {"construction": study.construction, "J": J, "normalized": study.normalized,
           "normalized_over_J": study.normalized / J if J else None,
           "tail_slope": study.tail_slope(min(5, len(N))) if len(N) >= 2 else None}
    return res, study.to_csv(), True


def cmd_inequalities(cfg):
    if cfg["u"]:
        catalog = [parse_function(cfg["u"])]
    else:
        catalog = random_catalog(int(cfg["seed"]), int(cfg["random"]))
    rows = inequality_sweep(catalog, int(cfg["seed"]))
    lines = ["catalog_id,check,lhs,rhs,margin,holds"]
    for r in rows:
        lines.append(f"{r['catalog_id']},{r['check']},{r['lhs']!r},{r['rhs']!r},{r['margin']!r},{str(r['holds']).lower()}")
    ok = all(r["holds"] for r in rows)
    return {"constants": inequality.constants(catalog[0].dim), "instances": len(catalog), "all_hold": ok}, \
        "\n".join(lines) + "\n", ok


def cmd_verify_all(cfg):
    suite = cfg["suite"]
    results = []
    if suite in ("trivial", "all"):
        results += trivial_suite()
    if suite in ("acceptance", "all"):
        results += acceptance_suite()
    if suite not in ("trivial", "acceptance", "all"):
        raise ValidationError("suite must be trivial, acceptance or all")
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    return {"suite": suite, "passed": ok, "checks": [r.to_dict() for r in results]}, None, ok


# ---------------------------------------------------------------------------
# parser


COMMANDS = {
    "catalog": (cmd_catalog, "list named shapes or describe one function", {"show": None}),
    "spectral-asymptote": (cmd_spectral_asymptote, "jump functional from the spectral profile",
                           {"shape": "square", "v": None, "estimator": "cutoff", "Rmax": 500.0, "t_grid": None}),
    "tail": (cmd_tail, "tail-energy law 2 pi^2 R int_{|xi|>R} |u^|^2",
             {"shape": "square", "Rmax": 500.0, "Rmin": None}),
    "gaussian-asymptote": (cmd_gaussian_asymptote, "Gaussian-damped spectral estimator",
                           {"shape": "square", "v": None, "t_grid": None}),
    "heat-asymptote": (cmd_heat_asymptote, "heat-content deficit estimator",
                       {"shape": "square", "v": None, "t_grid": None, "derivative_at": None}),
    "relative-heat": (cmd_relative_heat, "relative heat content of a set", {"shape": "square", "t_grid": None}),
    "minkowski-derivative": (cmd_minkowski_derivative, "difference quotients of dilated-set transforms",
                             {"region": "square", "xi": "0,0,1,0", "h_grid": None, "samples": 1_000_000,
                              "seed": 0}),
    "weak-probe": (cmd_weak_probe, "weak convergence of dilation measures",
                   {"region": "square", "h_grid": None, "tol": 1e-3}),
    "discrepancy": (cmd_discrepancy, "discrepancy D and quadratic discrepancy D_2",
                    {"u": "ball:0.25", "pointset": "lattice:4", "method": "fourier", "M": None,
                     "samples": 100_000, "seed": 0, "tau": None, "delta": None, "angle": None}),
    "pointset": (cmd_pointset, "generate a point set as CSV", {"pointset": "lattice:4", "d": 2, "seed": 0}),
    "cm-check": (cmd_cm_check, "Cassels-Montgomery inequality or witness search",
                 {"pointset": "random:16", "M": 4.0, "d": 2, "seed": 0, "witness": False, "resolution": None}),
    "scaling-study": (cmd_scaling_study, "normalized D_2 along growing point sets",
                      {"u": "ball:0.25", "construction": "lattice", "N": "4,9,16,25,36", "M": 64.0, "seed": 0}),
    "inequalities": (cmd_inequalities, "translation-energy and isoperimetric checks",
                     {"u": None, "random": 50, "seed": 0}),
    "verify-all": (cmd_verify_all, "run a verification suite", {"suite": "trivial", "seed": 0}),
}

_TYPES = {"Rmax": float, "Rmin": float, "derivative_at": float, "samples": int, "seed": int, "M": float,
          "delta": float, "angle": float, "d": int, "random": int, "tol": float, "resolution": float}
_CHOICES = {"estimator": ["cutoff", "gaussian"], "method": ["fourier", "mc", "both"],
            "construction": ["lattice", "composite", "random"], "suite": ["trivial", "acceptance", "all"]}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bvf", description="Fourier asymptotics, heat content and discrepancy of BV functions.")
    p.add_argument("--version", action="version", version=f"bvf {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_, defaults) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--config", help="JSON file with option values")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--csv", help="write the CSV trace here")
        sp.add_argument("--threads", type=int, help="worker threads (default: BVF_THREADS or 1)")
        for key, default in defaults.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=None,
                                help=f"default: {default}")
                continue
            kw = {"dest": key, "default": None, "help": f"default: {default}"}
            if key in _TYPES:
                kw["type"] = _TYPES[key]
            if key in _CHOICES:
                kw["choices"] = _CHOICES[key]
            if key == "shape":
                sp.add_argument("--u", dest="shape", default=None, help=argparse.SUPPRESS)
            sp.add_argument(flag, **kw)
    return p


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def resolve_config(args: argparse.Namespace) -> dict:
    defaults = COMMANDS[args.command][2]
    file_cfg = _load_config(args.config)
    unknown = set(file_cfg) - set(defaults) - _PLUMBING
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = dict(defaults)
    cfg.update({k: v for k, v in file_cfg.items() if k in defaults})
    cfg.update({k: v for k, v in vars(args).items() if k in defaults and v is not None})
    if "seed" in cfg and not (0 <= int(cfg["seed"]) < 2**64):
        raise ValidationError("seed must be a 64-bit unsigned integer")
    for k in ("out", "csv", "threads"):
        cfg_v = vars(args).get(k)
        cfg[k] = cfg_v if cfg_v is not None else file_cfg.get(k)
    return cfg


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg["threads"] is not None:
            if int(cfg["threads"]) < 1:
                raise ValidationError("threads must be positive")
            set_threads(int(cfg["threads"]))
        fn = COMMANDS[args.command][0]
        result, trace, ok = fn(cfg)
    except ValidationError as exc:
        print(f"bvf: validation error: {exc}", file=sys.stderr)
        return 1
    except BVFError as exc:
        print(f"bvf: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    finally:
        set_threads(None)
    hashed = {k: v for k, v in cfg.items() if k not in _PLUMBING}
    report = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "command": args.command,
        "config": hashed,
        "config_hash": config_hash(hashed),
        "seed": cfg.get("seed"),
        "ok": bool(ok),
        "result": result,
    }
    _emit(json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n", cfg["out"])
    if trace is not None and cfg["csv"]:
        _emit(trace, cfg["csv"])
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
