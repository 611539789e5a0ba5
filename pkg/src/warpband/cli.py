"""Command-line front end.

Every run is described by a ``RunConfig``: either read from ``--config`` or
assembled from subcommand flags (flags override config parameters).  Exit
status is 0 when every check passes, 1 when any check is violated and 2 on
configuration errors.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path

import numpy as np

from .checker import (ComparisonMap, Verdict, foliation_sweep, hypothesis_report,
                      identity_map, rigidity_report)
from .cone import (ConeModel, cone_band, cone_foliation_leaf, cone_tensor_components,
                   cross_section_condition)
from .config import (Command, RunConfig, dumps, format_float, load_config, parse_profile,
                     resolve_output, write_atomic)
from .errors import ConfigError, ConvergenceError, PreconditionError, WarpbandError
from .geometry import SymmetricBand, spectral_scalar_curvature
from .models import ModelSpec, build_model_profile, model_band, model_ode_residual
from .stability import ltilde_spectrum
from .variation import (Family, first_variation_check, integral_identity_check,
                        linearized_eta_check, modified_tensors, rewrite_identity_check)

__all__ = ["run_config", "main", "build_parser"]

DEFAULT_TOL = 1e-8
MIN_ORDER = 1.9

# a non-model band used when ``verify`` is run without a band
_DEMO_BAND = {
    "n": 3, "gamma": 1.0,
    "rho": {"family": "sin", "a": 1.0, "b": 1.0, "domain": [0.4, 2.6]},
    "u": {"family": "exp", "a": 1.0, "b": 0.3, "domain": [0.4, 2.6]},
}


def _num(params, key, default=None, kind=float):
    v = params.get(key, default)
    if v is None:
        raise ConfigError(f"missing parameter {key!r}")
    try:
        return kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} must be {kind.__name__}, got {v!r}") from None


def _band(d) -> SymmetricBand:
    if not isinstance(d, dict):
        raise ConfigError("band must be an object")
    if d.get("model"):
        spec = _model_spec(d["model"])
        return model_band(spec, weight_scale=_num(d, "weight_scale", 1.0))
    dom = d.get("domain")
    try:
        return SymmetricBand(_num(d, "n", kind=int), parse_profile(d.get("rho")),
                             parse_profile(d.get("u")), _num(d, "gamma", 0.0),
                             None if dom is None else tuple(dom), bool(d.get("conical", False)))
    except (ValueError, WarpbandError) as exc:
        raise ConfigError(f"invalid band: {exc}") from exc


def _model_spec(d) -> ModelSpec:
    try:
        return ModelSpec.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def _emit(cfg, default_name, text):
    path = resolve_output(cfg.output_path, default_name)
    if path is None:
        sys.stdout.write(text)
    else:
        write_atomic(path, text)
    return path


# ---------------------------------------------------------------- commands

def _run_model(cfg: RunConfig) -> int:
    p = cfg.parameters
    spec = _model_spec({"n": p.get("n", 3), "gamma": p.get("gamma", 1.0),
                        "Lambda": p.get("Lambda", 1.0), "sign": p.get("sign", "positive"),
                        "domain": p.get("domain")})
    num = _num(p, "num", 101, int)
    if num < 2:
        raise ConfigError("num must be at least 2")
    tol = cfg.tolerance()
    mp = build_model_profile(spec)
    band = model_band(spec)
    t = band.grid(num, interior=band.conical)
    ode = np.asarray(model_ode_residual(mp.rho, spec.n, spec.gamma, spec.target, t))
    lam = np.asarray(spectral_scalar_curvature(band, t)) - spec.target
    out = io.StringIO()
    out.write(f"# n={spec.n}\n# gamma={format_float(spec.gamma)}\n"
              f"# Lambda={format_float(spec.target)}\n")
    out.write(f"# a={format_float(mp.a)}\n# b={format_float(mp.b)}\n")
    out.write("t,xi,m,u,ode_residual,lambda_residual\n")
    cols = (t, mp.rho(t), mp.m(t), mp.u(t), ode, lam)
    for row in zip(*(np.asarray(c, dtype=float) for c in cols)):
        out.write(",".join(format_float(x) for x in row) + "\n")
    _emit(cfg, "model.csv", out.getvalue())
    worst = max(float(np.max(np.abs(ode))), float(np.max(np.abs(lam))))
    return 0 if worst <= tol else 1


def _run_spectrum(cfg: RunConfig) -> int:
    p = cfg.parameters
    entries = ltilde_spectrum(_num(p, "n", 3, int), _num(p, "gamma", 0.0),
                              _num(p, "radius", 1.0), _num(p, "xi", 1.0),
                              _num(p, "k_max", 8, int))
    out = io.StringIO()
    out.write("k,multiplicity,lambda\n")
    for e in entries:
        out.write(f"{e.degree},{e.multiplicity},{format_float(e.value)}\n")
    _emit(cfg, "spectrum.csv", out.getvalue())
    return 0


_IDENTITIES = ("first_variation", "linearized_eta", "rewrite", "vary_u", "vary_g")


def _verify_one(c, tol, min_order):
    ident = c.get("identity", "first_variation").replace("-", "_")
    if ident not in _IDENTITIES:
        raise ConfigError(f"unknown identity {ident!r}; choose from {_IDENTITIES}")
    if ident == "rewrite":
        rep = rewrite_identity_check(
            _num(c, "gamma", 1.0),
            parse_profile(c.get("u", {"family": "compose", "outer": {"family": "exp", "b": 0.5},
                                     "inner": {"family": "cos"}})),
            parse_profile(c.get("phi", {"family": "cos", "a": 1.0, "b": 1.0, "offset": 2.0})),
            _num(c, "radius", 1.0))
    else:
        band = _band(c.get("band", _DEMO_BAND))
        lo, hi = band.domain
        mu = c.get("mu", 0.0)
        mu = parse_profile(mu) if isinstance(mu, dict) else _num(c, "mu", 0.0)
        s = _num(c, "s", 0.5 * (lo + hi))
        if ident == "first_variation":
            rep = first_variation_check(band, mu, s, _num(c, "h_fd", 1e-2))
        elif ident == "linearized_eta":
            rep = linearized_eta_check(band, mu, s, _num(c, "eps", 1e-2))
        else:
            delta = parse_profile(c.get("delta", {"family": "sin", "a": 0.1, "b": 1.0}))
            rep = integral_identity_check(band, Family(ident), delta, _num(c, "eps", 1e-3))
    order = rep.convergence_order
    ok = rep.residual <= tol or (not math.isnan(order) and order >= min_order)
    return {"identity": ident, "pass": ok, **rep.to_dict()}


def _run_verify(cfg: RunConfig) -> int:
    p = cfg.parameters
    checks = p.get("checks")
    if checks is None:
        ident = p.get("identity", "all")
        names = _IDENTITIES if ident == "all" else (ident,)
        checks = [{**p, "identity": name} for name in names]
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list")
    tol = cfg.tolerance()
    min_order = cfg.tolerance("min_order", MIN_ORDER)
    rows = []
    for c in checks:
        try:
            rows.append(_verify_one(c, tol, min_order))
        except (ValueError, WarpbandError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot run check {c.get('identity')!r}: {exc}") from exc
    _emit(cfg, "verify.jsonl", "".join(dumps(r) + "\n" for r in rows))
    return 0 if all(r["pass"] for r in rows) else 1


def _run_cone(cfg: RunConfig) -> int:
    p = cfg.parameters
    try:
        cone = ConeModel(_num(p, "A", 1.0), _num(p, "n", 3, int), _num(p, "gamma", 0.0),
                         None if p.get("alpha") is None else _num(p, "alpha"))
    except WarpbandError as exc:
        raise ConfigError(str(exc)) from exc
    ts = p.get("t", [0.01, 0.005, 0.0025])
    ts = [float(x) for x in (ts if isinstance(ts, list) else [ts])]
    modes = _num(p, "modes", 16, int)
    g1 = parse_profile(p.get("g1", {"family": "cos", "a": 0.5, "b": 1.0}))
    u1 = parse_profile(p["u1"]) if p.get("u1") is not None else None
    rows = []
    radial, spherical = cone_tensor_components(cone)
    R = modified_tensors(cone_band(cone, 0.5, 2.0), 1.0)
    rows.append({"kind": "tensor", "radial": radial, "spherical": spherical,
                 "radial_definition": float(R.R_rad), "spherical_definition": float(R.R_sph)})
    cond = cross_section_condition(cone.n, cone.gamma, cone.A)
    rows.append({"kind": "condition", "holds": cond.holds, "margin": cond.margin,
                 "conformant": cone.conformant})
    ok = cond.holds
    for t in ts:
        try:
            sol = cone_foliation_leaf(cone, g1, t, modes, u1)
        except ConvergenceError as exc:
            sol = exc.solution
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc
        ok = ok and sol.converged
        rows.append({"kind": "leaf", "t": t, "eta_hat": sol.eta_hat,
                     "residual_norm": sol.residual_norm, "iterations": sol.iterations,
                     "converged": sol.converged, "coefficients": sol.coefficients})
    _emit(cfg, "cone.jsonl", "".join(dumps(r) + "\n" for r in rows))
    return 0 if ok else 1


def _run_check_band(cfg: RunConfig) -> int:
    p = cfg.parameters
    if "band" not in p or "model" not in p:
        raise ConfigError("check-band needs 'band' and 'model'")
    band = _band(p["band"])
    model = _model_spec(p["model"])
    m = p.get("map", "identity")
    try:
        if m == "identity":
            cmap = identity_map(band.domain)
        elif isinstance(m, dict) and "tau" in m:
            cmap = ComparisonMap(parse_profile(m["tau"]))
        else:
            raise ConfigError("map must be 'identity' or an object with 'tau'")
        num = _num(p, "num", 1001, int)
        tol = cfg.tolerance()
        rep = hypothesis_report(band, model, cmap, tol, num)
        rig = rigidity_report(band, model, cmap, tol, num, require_hypotheses=False)
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from exc
    report = {**rep.to_dict(), "rigidity_flags_all_true": rig.all_true,
              "rigidity_first_false": rig.first_false}
    sweep_csv = None
    if "lambda" in rep.violations or "map:range" in rep.violations:
        report["sweep"] = "skipped: curvature hypothesis or map range fails"
    else:
        sw = foliation_sweep(band, model, cmap, num=_num(p, "sweep_num", 2001, int),
                             tol=cfg.tolerance("sweep", 1e-7))
        report["sweep_nonincreasing"] = sw.nonincreasing
        report["sweep_first_violation"] = sw.first_violation
        report["sweep_max_increase"] = sw.max_increase
        buf = io.StringIO()
        buf.write("t,eta,Q,monotone\n")
        for row in sw.rows():
            buf.write(",".join(format_float(x) for x in row) + "\n")
        sweep_csv = buf.getvalue()
    text = dumps(report) + "\n"
    path = resolve_output(cfg.output_path, "check_band.json")
    if path is None:
        sys.stdout.write(text)
        if sweep_csv is not None:
            sys.stdout.write("\n" + sweep_csv)
    else:
        write_atomic(path, text)
        if sweep_csv is not None:
            write_atomic(Path(path).with_name(Path(path).stem + "_sweep.csv"), sweep_csv)
    return 1 if rep.verdict is Verdict.VIOLATED else 0


_DISPATCH = {
    Command.MODEL: _run_model,
    Command.SPECTRUM: _run_spectrum,
    Command.VERIFY: _run_verify,
    Command.CONE: _run_cone,
    Command.CHECK_BAND: _run_check_band,
}


def run_config(config: RunConfig) -> int:
    """Run one configuration and return its exit status (0, 1 or 2)."""
    try:
        return _DISPATCH[Command(config.command)](config)
    except ConfigError as exc:
        print(f"warpband: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, WarpbandError) as exc:
        print(f"warpband: configuration error: {exc}", file=sys.stderr)
        return 2


# ---------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpband",
                                 description="Warped-band curvature and comparison checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--tolerance", type=float, help="override the default tolerance")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    ap.add_argument("--config", dest="g_config", help=argparse.SUPPRESS)
    ap.add_argument("--tolerance", dest="g_tolerance", type=float, help=argparse.SUPPRESS)
    ap.add_argument("--output", dest="g_output", help=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command")

    s = sub.add_parser("model", parents=[common], help="model profile grid as CSV")
    s.add_argument("--n", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--Lambda", type=float)
    s.add_argument("--sign", choices=["positive", "negative", "zero"])
    s.add_argument("--domain", type=float, nargs=2)
    s.add_argument("--num", type=int)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of the slice operator")
    s.add_argument("--n", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--radius", type=float)
    s.add_argument("--xi", type=float)
    s.add_argument("--k-max", dest="k_max", type=int)

    s = sub.add_parser("verify", parents=[common], help="variational identity checks")
    s.add_argument("--identity", choices=["all", *_IDENTITIES])
    s.add_argument("--s", type=float)
    s.add_argument("--eps", type=float)

    s = sub.add_parser("cone", parents=[common], help="cone tensors, condition and leaves")
    s.add_argument("--n", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--A", type=float)
    s.add_argument("--t", type=float, nargs="+")
    s.add_argument("--modes", type=int)

    sub.add_parser("check-band", parents=[common], help="hypothesis report and sweep")
    return ap


_GLOBAL = {"config", "tolerance", "output", "command", "g_config", "g_tolerance", "g_output"}


def config_from_args(args) -> RunConfig:
    path = getattr(args, "config", None) or args.g_config
    if path is not None:
        cfg = load_config(path)
        if args.command is not None and Command(args.command) is not cfg.command:
            raise ConfigError(f"config command {cfg.command.value!r} does not match "
                              f"subcommand {args.command!r}")
    elif args.command is None:
        raise ConfigError("a subcommand or --config is required")
    else:
        cfg = RunConfig(args.command)
    for k, v in vars(args).items():
        if k not in _GLOBAL and v is not None:
            cfg.parameters[k] = v
    tol = getattr(args, "tolerance", None) or args.g_tolerance
    if tol is not None:
        if not tol > 0:
            raise ConfigError("--tolerance must be positive")
        cfg.tolerances["default"] = tol
    out = getattr(args, "output", None) or args.g_output
    if out is not None:
        cfg.output_path = out
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"warpband: configuration error: {exc}", file=sys.stderr)
        return 2
    return run_config(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
