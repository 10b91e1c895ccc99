"""Command-line front end.

Every subcommand runs with defaults, writes its numeric artifacts as CSV
(one header line, repr() floats, LF endings) into --out, and finishes by
writing run_manifest.json describing the run: the command, its parameters,
the resolved solver configuration and its hash, derived constants, and a
sha256 per output file.  Reruns with the same inputs produce byte-identical
CSVs; only the manifest timestamp moves.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure
(the manifest is still written with status "error").
"""

import argparse
import dataclasses
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ConfigError, SolverError, UnknownKeyError
from .odes import exponents
from .shooting import (
    FAMILY_BLOWUP,
    FAMILY_GLOBAL,
    FAMILY_SHOCK,
    ShootConfig,
    build_compact_profile,
    build_extension_pair,
    solve_blowup_family,
    solve_farfield,
    solve_global,
    solve_shock_bvp,
    sweep_parameter,
)

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ShootConfig)}
_FLAG_FIELDS = ("y_max", "delta", "rtol", "atol")


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def load_config(path):
    """Read a flat key = value config file into a dict of floats.

    Lines are `name = value`; blank lines and # comments are ignored.
    Unknown keys raise UnknownKeyError, bad numbers ValueError.
    """
    overrides = {}
    text = Path(path).read_text(encoding="utf-8")
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UnknownKeyError(f"malformed config line: {raw!r}")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise UnknownKeyError(f"unknown config key: {key}")
        overrides[key] = float(val.strip())
    return overrides


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_profile_csv(path, profile):
    _write_csv(path, "y,f,fp", zip(profile.grid, profile.f, profile.fp))


def _outcome_dict(outcome):
    if outcome is None:
        return None
    return {"kind": outcome.kind, "value": outcome.value, "location": outcome.location}


def _tail_dict(tail):
    if tail is None:
        return None
    return {
        "amplitude": tail.amplitude,
        "exponent": tail.exponent,
        "expected_exponent": tail.expected_exponent,
        "r_squared": tail.r_squared,
        "rms_residual": tail.rms_residual,
        "pinned": tail.pinned,
    }


# ------------------------------------------------------------------ commands


def _cmd_shock_solve(args, cfg, out):
    res = solve_shock_bvp(cfg)
    prof = res.profile
    write_profile_csv(out / "profile.csv", prof)
    # odd extension through the origin; the profile slope there is 1
    g = np.concatenate([-prof.grid[::-1], [0.0], prof.grid])
    f = np.concatenate([-prof.f[::-1], [0.0], prof.f])
    fp = np.concatenate([prof.fp[::-1], [1.0], prof.fp])
    _write_csv(out / "profile_odd.csv", "y,f,fp", zip(g, f, fp))
    derived = {
        "A_star": res.param_value,
        "iterations": res.iterations,
        "boundary_residual": res.residual,
        "m_minus": prof.params.m_minus,
        "m_plus": prof.params.m_plus,
        "f_end": float(prof.f[-1]),
    }
    return derived, ["profile.csv", "profile_odd.csv"]


def _cmd_sweep(args, cfg, out):
    values = [float(v) for v in args.values.split(",")]
    fixed = {}
    if args.family in (FAMILY_BLOWUP, FAMILY_GLOBAL):
        alpha = args.alpha
        if alpha is None:
            alpha = 0.5 if args.family == FAMILY_BLOWUP else -0.5
        if args.param != "alpha":
            fixed["alpha"] = alpha
    records = sweep_parameter(args.family, args.param, values, cfg, fixed=fixed or None)
    outputs = []
    outcomes = {}
    for rec in records:
        key = repr(float(rec.value))
        entry = {"outcome": _outcome_dict(rec.outcome), "error": rec.error}
        if rec.profile is not None:
            name = f"sweep_{rec.param_name}_{key}.csv"
            write_profile_csv(out / name, rec.profile)
            outputs.append(name)
            entry["tail"] = _tail_dict(rec.profile.tail)
        outcomes[key] = entry
    return {"outcomes": outcomes, "fixed": fixed}, outputs


def _cmd_farfield(args, cfg, out):
    res = solve_farfield(args.B, cfg)
    write_profile_csv(out / "farfield.csv", res.profile)
    return {"outcome": _outcome_dict(res.outcome)}, ["farfield.csv"]


def _cmd_blowup(args, cfg, out):
    res = solve_blowup_family(args.alpha, args.A, cfg)
    write_profile_csv(out / "blowup.csv", res.profile)
    derived = {
        "outcome": _outcome_dict(res.outcome),
        "tail": _tail_dict(res.profile.tail),
        "tail_exponent_expected": res.profile.params.tail_exponent,
    }
    return derived, ["blowup.csv"]


def _cmd_global(args, cfg, out):
    res = solve_global(args.alpha, args.F0, cfg, F1=args.F1)
    write_profile_csv(out / "global.csv", res.profile)
    params = res.profile.params
    derived = {
        "outcome": _outcome_dict(res.outcome),
        "tail": _tail_dict(res.profile.tail),
        "tail_exponent_expected": params.tail_exponent,
    }
    if args.F1 is None:
        derived["launch_curvature"] = params.beta**2 / (params.alpha * args.F0)
    return derived, ["global.csv"]


def _cmd_extension_pair(args, cfg, out):
    pair = build_extension_pair(args.alpha, args.A, cfg)
    write_profile_csv(out / "pair_blowup.csv", pair.minus)
    write_profile_csv(out / "pair_global_rescaled.csv", pair.plus)
    x = np.geomspace(0.1, 10.0, 101)
    u_minus = pair.amplitude_minus * x**pair.tail_power
    u_plus = pair.amplitude_plus * x**pair.tail_power
    _write_csv(out / "final_traces.csv", "x,u_minus,u_plus", zip(x, u_minus, u_plus))
    derived = {
        "scale_a": pair.scale_a,
        "tail_power": pair.tail_power,
        "amplitude_minus": pair.amplitude_minus,
        "amplitude_plus": pair.amplitude_plus,
        "match_rel_error": pair.match_rel_error,
        "free_exponent_minus": pair.free_fit_minus.exponent,
        "free_exponent_plus": pair.free_fit_plus.exponent,
    }
    return derived, ["pair_blowup.csv", "pair_global_rescaled.csv", "final_traces.csv"]


def _cmd_compact(args, cfg, out):
    profile, flat, outcome = build_compact_profile(args.B, cfg)
    write_profile_csv(out / "compact.csv", profile)
    derived = {
        "outcome": _outcome_dict(outcome),
        "a_flat": flat.a_flat,
        "flat_r_squared": flat.r_squared,
        "flat_window": list(flat.window),
    }
    return derived, ["compact.csv"]


def _cmd_verify(args, cfg, out):
    from . import verification as ver

    rows = []
    if args.alpha is None:
        res = solve_shock_bvp(cfg)
        prof = res.profile
        rows.append(("A_star", res.param_value))
        rows.append(("reflection_residual_max", ver.reflection_check(prof).max_abs))
    elif 0.0 < args.alpha < 1.0:
        res = solve_blowup_family(args.alpha, args.A, cfg)
        prof = res.profile
        if prof.tail is not None:
            rows.append(("tail_exponent", prof.tail.exponent))
            rows.append(("tail_exponent_expected", prof.tail.expected_exponent))
            rows.append(("tail_r_squared", prof.tail.r_squared))
    elif args.alpha < 0.0:
        res = solve_global(args.alpha, args.F0, cfg)
        prof = res.profile
        crit = ver.max_principle_scan(prof)
        rows.append(("critical_points", float(len(crit))))
        if crit:
            gaps = [
                abs(c.second_derivative - c.ode_implied) / max(1.0, abs(c.ode_implied))
                for c in crit
            ]
            rows.append(("max_principle_worst_gap", max(gaps)))
            rows.append(("min_critical_curvature", min(c.second_derivative for c in crit)))
    else:
        raise SolverError("verify needs alpha < 0, alpha in (0, 1), or no alpha")

    res_ode = ver.ode_residual(prof)
    rows.append(("ode_residual_max", res_ode.max_abs))
    rows.append(("ode_residual_rms", res_ode.rms))
    par = ver.parabolicity(prof)
    rows.append(("parabolicity_min", par.min_value))
    pde = ver.pde_residual(prof)
    rows.append(("pde_residual_rms", pde.rms))
    rows.append(("pde_residual_rms_half", pde.rms_half))
    rows.append(("pde_order", pde.order))

    with open(out / "verify.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("check,value\n")
        for name, value in rows:
            fh.write(f"{name},{float(value)!r}\n")
    return {name: float(value) for name, value in rows}, ["verify.csv"]


def _cmd_exponents(args, cfg, out):
    if args.alpha is not None:
        alphas = [args.alpha]
    else:
        alphas = np.linspace(-1.0, 0.9, 39)
    rows = []
    for a in alphas:
        m_minus, m_plus = exponents(float(a))
        rows.append((float(a), m_minus, m_plus))
    _write_csv(out / "exponents.csv", "alpha,m_minus,m_plus", rows)
    derived = {}
    if len(rows) == 1:
        derived = {"m_minus": rows[0][1], "m_plus": rows[0][2]}
        derived["product"] = rows[0][1] * rows[0][2]
    return derived, ["exponents.csv"]


# -------------------------------------------------------------------- driver


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--config", help="key = value solver config file")
    common.add_argument("--y-max", dest="y_max", type=float, help="span end")
    common.add_argument("--delta", type=float, help="launch offset")
    common.add_argument("--rtol", type=float, help="relative step tolerance")
    common.add_argument("--atol", type=float, help="absolute step tolerance")

    parser = _Parser(prog="simshock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("shock-solve", parents=[common],
                       help="solve the standing-profile boundary value problem")
    p.set_defaults(handler=_cmd_shock_solve, param_keys=())

    p = sub.add_parser("sweep", parents=[common],
                       help="integrate a family over a list of parameter values")
    p.add_argument("--family", default=FAMILY_SHOCK)
    p.add_argument("--param", default="A")
    p.add_argument("--values", default="-2,-1.5,-1,-0.5,0.5,1")
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(handler=_cmd_sweep, param_keys=("family", "param", "values", "alpha"))

    p = sub.add_parser("farfield", parents=[common],
                       help="integrate inward from the far-field expansion")
    p.add_argument("--B", type=float, default=-1.0)
    p.set_defaults(handler=_cmd_farfield, param_keys=("B",))

    p = sub.add_parser("blowup", parents=[common],
                       help="integrate a pre-critical profile and fit its tail")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--A", type=float, default=-1.0)
    p.set_defaults(handler=_cmd_blowup, param_keys=("alpha", "A"))

    p = sub.add_parser("global", parents=[common],
                       help="integrate a post-critical profile from its smooth origin")
    p.add_argument("--alpha", type=float, default=-0.5)
    p.add_argument("--F0", type=float, default=1.0)
    p.add_argument("--F1", type=float, default=None)
    p.set_defaults(handler=_cmd_global, param_keys=("alpha", "F0", "F1"))

    p = sub.add_parser("extension-pair", parents=[common],
                       help="build the matched pre/post-critical pair")
    p.add_argument("--alpha", type=float, default=-0.5)
    p.add_argument("--A", type=float, default=-1.0)
    p.set_defaults(handler=_cmd_extension_pair, param_keys=("alpha", "A"))

    p = sub.add_parser("compact", parents=[common],
                       help="glue a flat-decay profile to the zero state")
    p.add_argument("--B", type=float, default=1.0)
    p.set_defaults(handler=_cmd_compact, param_keys=("B",))

    p = sub.add_parser("verify", parents=[common],
                       help="run residual and structure checks on a solved profile")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--A", type=float, default=-1.0)
    p.add_argument("--F0", type=float, default=1.0)
    p.set_defaults(handler=_cmd_verify, param_keys=("alpha", "A", "F0"))

    p = sub.add_parser("exponents", parents=[common],
                       help="tabulate the origin correction exponents")
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(handler=_cmd_exponents, param_keys=("alpha",))

    return parser


def run(argv):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    out = Path(args.out)
    try:
        overrides = load_config(args.config) if args.config else {}
        for name in _FLAG_FIELDS:
            value = getattr(args, name)
            if value is not None:
                overrides[name] = value
        cfg = ShootConfig(**overrides)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"simshock: error: {exc}", file=sys.stderr)
        return 1

    out.mkdir(parents=True, exist_ok=True)
    params = {k: getattr(args, k) for k in args.param_keys}
    manifest = {
        "command": args.command,
        "params": params,
        "config": dataclasses.asdict(cfg),
    }
    manifest["config_hash"] = hashlib.sha256(
        json.dumps({k: manifest[k] for k in ("command", "params", "config")},
                   sort_keys=True).encode()
    ).hexdigest()

    try:
        derived, outputs = args.handler(args, cfg, out)
        manifest["status"] = "ok"
        manifest["error"] = None
    except SolverError as exc:
        derived, outputs = {}, []
        manifest["status"] = "error"
        manifest["error"] = f"{type(exc).__name__}: {exc}"

    manifest["derived_constants"] = derived
    manifest["outputs"] = {
        name: hashlib.sha256((out / name).read_bytes()).hexdigest()
        for name in outputs
    }
    manifest["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(out / "run_manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    if manifest["status"] != "ok":
        print(f"simshock: {manifest['error']}", file=sys.stderr)
        return 2
    return 0


def main():
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
