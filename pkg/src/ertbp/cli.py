"""Command-line front end: one subcommand per pipeline stage.

Every run resolves an explicit RunConfig (defaults < config file < flags);
output files embed that config so a run can be reproduced bit-identically
from its own artifact. Errors map to distinct exit codes (see errors.py).
"""
import argparse
import dataclasses
import datetime
import json
import sys

import gmpy2

from . import __version__
from .dynamics import (SystemParams, orbital_period, reference_initial_state,
                       reference_params, unit_system, convert_state, PhaseState)
from .ephemeris import (affine_table_velocity, compare_sequences,
                        fit_frame_params, jupiter_ellipse_sequence,
                        spacecraft_ephemeris)
from .errors import ConfigError, ErtbpError, NonConvergence, exit_code_for
from .frames import (EPOCH, FrameParams, build_frame, days_per_ut,
                     fitted_frame_params)
from .horizons import fixture_path, horizons_fetch, horizons_parse
from .monodromy import classify_stability, eigenvalues_4x4, state_transition_matrix
from .precision import format_mpfr, mpfr_str, working_precision
from .refine import closure_residual, newton_refine
from .svg import emit_svg_trace
from .taylor import (IntegratorConfig, active_backend, propagate,
                     propagate_dense, reference_config)

EPHEMERIS_CSV_HEADER = ("date,x_au,y_au,z_au,"
                        "vx_au_ut,vy_au_ut,vz_au_ut,"
                        "vx_au_day,vy_au_day,vz_au_day")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Fully serializable description of one CLI run."""
    params: dict
    integrator: dict
    frame: dict
    output: str | None = None
    format: str = "csv"
    svg_frame: str = "inertial"
    allow_network: bool = False
    digits: int = 30

    def to_jsonable(self):
        return dataclasses.asdict(self)


def _short_str(value):
    """Shortest decimal string that re-parses to the same extended value."""
    from .precision import PARSE_DIGITS, as_mpfr
    for digits in range(2, 40):
        with working_precision(PARSE_DIGITS):
            candidate = format_mpfr(value, digits)
            if as_mpfr(candidate, PARSE_DIGITS) == value:
                return candidate
    return mpfr_str(value)


def _params_dict(params):
    return {k: _short_str(v) for k, v in dataclasses.asdict(params).items()
            if v is not None}


def _frame_dict(fp):
    return {k: _short_str(v) for k, v in dataclasses.asdict(fp).items()}


def _integrator_dict(cfg):
    return dataclasses.asdict(cfg)


def build_run_config(args):
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)

    params_kw = dict(file_cfg.get("params", {}))
    for field in ("mu", "e", "r0", "G", "m1", "m2", "period_days"):
        value = getattr(args, field, None)
        if value is not None:
            params_kw[field] = value
    params = (SystemParams.from_values(**params_kw) if params_kw
              else reference_params())

    integ_kw = dict(file_cfg.get("integrator", {}))
    for field in ("order", "precision_digits", "step", "mode"):
        value = getattr(args, field, None)
        if value is not None:
            integ_kw[field] = value
    config = (reference_config().with_(**integ_kw) if integ_kw
              else reference_config())

    frame_kw = dict(file_cfg.get("frame", {}))
    for field in ("inclination_deg", "node_deg", "argperi_deg",
                  "aphelion_au", "offset_au"):
        value = getattr(args, field, None)
        if value is not None:
            frame_kw[field] = value
    fp = (FrameParams.from_values(**frame_kw) if frame_kw
          else fitted_frame_params())

    run = RunConfig(
        params=_params_dict(params),
        integrator=_integrator_dict(config),
        frame=_frame_dict(fp),
        output=getattr(args, "output", None),
        format=getattr(args, "format", "csv") or "csv",
        svg_frame=getattr(args, "frame_of_reference", "inertial") or "inertial",
        allow_network=bool(getattr(args, "allow_network", False)),
        digits=getattr(args, "digits", 30) or 30,
    )
    return run, params, config, fp


def _resolve_t_end(spec_text, params, config):
    with working_precision(config.precision_digits):
        if spec_text is None or spec_text.strip().upper() == "T":
            return orbital_period(params.e)
        return gmpy2.mpfr(spec_text.strip())


def _print_state(state, digits):
    print(f"t     = {format_mpfr(state.t, digits)}")
    print(f"theta = {format_mpfr(state.theta, digits)}")
    print(f"z     = ({format_mpfr(state.z[0], digits)}, {format_mpfr(state.z[1], digits)})")
    print(f"v     = ({format_mpfr(state.v[0], digits)}, {format_mpfr(state.v[1], digits)})")


def _initial_state(args, config):
    fields = (getattr(args, "z1", None), getattr(args, "z2", None),
              getattr(args, "v1", None), getattr(args, "v2", None))
    if any(f is not None for f in fields):
        if any(f is None for f in fields):
            raise ConfigError("give all of --z1 --z2 --v1 --v2 or none")
        with working_precision(config.precision_digits):
            return PhaseState.make(t=0, theta=getattr(args, "theta0", None) or 0,
                                   z=fields[:2], v=fields[2:])
    return reference_initial_state()


def cmd_propagate(args):
    run, params, config, _ = build_run_config(args)
    state0 = _initial_state(args, config)
    t_end = _resolve_t_end(args.t_end, params, config)
    final = propagate(state0, t_end, params, config)
    print(f"# backend: {active_backend()}")
    _print_state(final, run.digits)
    return 0


def cmd_closure(args):
    run, params, config, _ = build_run_config(args)
    state0 = _initial_state(args, config)
    period = _resolve_t_end(args.t_end, params, config)
    residual = closure_residual(state0, period, params, config)
    with working_precision(config.precision_digits):
        print("closure residual over one period:")
        print(f"  dz    = ({format_mpfr(residual.dz[0], run.digits)}, "
              f"{format_mpfr(residual.dz[1], run.digits)}) ud")
        print(f"  dv    = ({format_mpfr(residual.dv[0], run.digits)}, "
              f"{format_mpfr(residual.dv[1], run.digits)}) ud/ut")
        print(f"  dz_si = ({format_mpfr(residual.dz_si[0], 6)}, "
              f"{format_mpfr(residual.dz_si[1], 6)}) m"
              f"  (≈ {float(residual.dz_si[0]):.2f} m, {float(residual.dz_si[1]):.2f} m)")
        print(f"  dv_si = ({format_mpfr(residual.dv_si[0], 6)}, "
              f"{format_mpfr(residual.dv_si[1], 6)}) m/s")
        print(f"  |r|   = {format_mpfr(residual.norm_si(), 6)} m (1 s velocity weight)")
    return 0


def cmd_refine(args):
    run, params, config, _ = build_run_config(args)
    state0 = _initial_state(args, config)
    period = _resolve_t_end(args.t_end, params, config)
    report = newton_refine(state0, period, params, config,
                           max_iter=args.max_iter,
                           stm_method=args.stm_method)
    with working_precision(config.precision_digits):
        for k, (vec, res) in enumerate(report.iterations):
            print(f"iter {k}: residual {format_mpfr(res, 6)} m")
        for k, cond in enumerate(report.condition_estimates):
            print(f"  cond(M-I) at iter {k}: {format_mpfr(cond, 6)}")
        print(f"converged: {report.converged}")
        print("final state:")
        _print_state(report.final, run.digits)
    if run.output:
        with open(run.output, "w") as fh:
            json.dump({"config": run.to_jsonable(),
                       "report": report.to_jsonable()}, fh, indent=2)
        print(f"wrote {run.output}")
    return 0


def cmd_monodromy(args):
    run, params, config, _ = build_run_config(args)
    state0 = _initial_state(args, config)
    period = _resolve_t_end(args.t_end, params, config)
    mono = state_transition_matrix(state0, period, params, config,
                                   method=args.stm_method)
    eigs = eigenvalues_4x4(mono.matrix, config.precision_digits)
    report = classify_stability(eigs)
    digits = max(run.digits, 25)
    with working_precision(config.precision_digits):
        print(f"# method: {args.stm_method}")
        print(f"det(M) - 1 = {format_mpfr(mono.determinant() - 1, 6)}")
        for k, (ev, mod) in enumerate(zip(report.eigenvalues, report.moduli), 1):
            print(f"lambda_{k} = {format_mpfr(ev.real, digits)} "
                  f"{'+' if ev.imag >= 0 else '-'} {format_mpfr(abs(ev.imag), digits)} i"
                  f"   |lambda_{k}| = {format_mpfr(mod, digits)}")
        print(f"classification: {report.classification}")
    return 0


def _ephemeris_rows(records, frame, fp, digits):
    rows = []
    with working_precision(50):
        for rec in records:
            date = rec.date.strftime("%Y-%b-%d %H:%M:%S")
            pos = [format_mpfr(v, digits) for v in rec.position]
            v_ut = [format_mpfr(v, digits) for v in rec.velocity_ut]
            v_day = [format_mpfr(v, digits) for v in rec.velocity_day]
            rows.append((date, pos, v_ut, v_day))
    return rows


def _write_table(run, rows):
    lines = []
    if run.format == "csv":
        lines.append("# config: " + json.dumps(run.to_jsonable(), sort_keys=True))
        lines.append(EPHEMERIS_CSV_HEADER)
        for date, pos, v_ut, v_day in rows:
            lines.append(",".join([date, *pos, *v_ut, *v_day]))
        text = "\n".join(lines) + "\n"
    else:
        payload = {"config": run.to_jsonable(),
                   "records": [{"date": date, "position": pos,
                                "velocity_ut": v_ut, "velocity_day": v_day}
                               for date, pos, v_ut, v_day in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    if run.output:
        with open(run.output, "w") as fh:
            fh.write(text)
        print(f"wrote {run.output}")
    else:
        sys.stdout.write(text)


def cmd_ephemeris(args):
    run, params, config, fp = build_run_config(args)
    state0 = _initial_state(args, config)
    start = datetime.datetime.strptime(args.start_date, "%Y-%m-%d") \
        if args.start_date else EPOCH
    records = spacecraft_ephemeris(start, args.step_days, args.count,
                                   state0, params, config, fp)
    with working_precision(config.precision_digits):
        frame = build_frame(fp)
        if args.table_velocity:
            records = [dataclasses.replace(
                r, velocity_ut=affine_table_velocity(r.velocity_ut, frame, fp))
                for r in records]
    _write_table(run, _ephemeris_rows(records, frame, fp, args.table_digits))
    return 0


def _positions_from_file(path):
    with open(path) as fh:
        return [r.position for r in horizons_parse(fh.read())]


def cmd_compare(args):
    build_run_config(args)
    seq_a = _positions_from_file(args.file_a)
    seq_b = _positions_from_file(args.file_b)
    stats = compare_sequences(seq_a, seq_b)
    print(f"count = {stats.count}")
    print(f"min   = {stats.min:.8f} AU")
    print(f"max   = {stats.max:.8f} AU")
    print(f"rms   = {stats.rms:.8f} AU")
    return 0


def cmd_ellipse(args):
    run, params, config, fp = build_run_config(args)
    seq = jupiter_ellipse_sequence(args.count, params, fp)
    with open(args.reference or fixture_path()) as fh:
        reference = [r.position for r in horizons_parse(fh.read())]
    stats = compare_sequences(seq, reference[:len(seq)])
    print(f"count = {stats.count}")
    print(f"min   = {stats.min:.8f} AU")
    print(f"max   = {stats.max:.8f} AU")
    print(f"rms   = {stats.rms:.8f} AU")
    return 0


def cmd_fit(args):
    run, params, config, fp = build_run_config(args)
    with open(args.reference or fixture_path()) as fh:
        records = horizons_parse(fh.read())
    try:
        fitted, stats = fit_frame_params(records, initial_guess=fp,
                                         objective=args.objective,
                                         budget=args.budget)
        converged = True
    except NonConvergence as exc:
        fitted, stats, converged = exc.best_params, exc.best_stats, False
        print(f"warning: {exc}", file=sys.stderr)
    for field in ("inclination_deg", "node_deg", "argperi_deg",
                  "aphelion_au", "offset_au"):
        print(f"{field} = {float(getattr(fitted, field)):.9f}")
    print(f"objective({args.objective}) = {getattr(stats, args.objective):.8f} AU")
    print(f"min {stats.min:.8f}  max {stats.max:.8f}  rms {stats.rms:.8f}")
    return 0 if converged else exit_code_for(NonConvergence(""))


def cmd_fetch(args):
    run, *_ = build_run_config(args)
    text = horizons_fetch(body_id=args.body, start=args.start, stop=args.stop,
                          step=args.step_size, endpoint_url=args.endpoint,
                          allow_network=run.allow_network,
                          cache_dir=args.cache_dir)
    if run.output:
        with open(run.output, "w") as fh:
            fh.write(text)
        print(f"wrote {run.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_trace(args):
    run, params, config, _ = build_run_config(args)
    state0 = _initial_state(args, config)
    t_end = _resolve_t_end(args.t_end, params, config)
    with working_precision(config.precision_digits):
        times = [t_end * i / (args.samples - 1) for i in range(args.samples)]
    trajectory = propagate_dense(state0, t_end, times, params, config)
    svg = emit_svg_trace(trajectory, run.svg_frame, e=params.e)
    if run.output:
        with open(run.output, "w") as fh:
            fh.write(svg)
        print(f"wrote {run.output}")
    else:
        sys.stdout.write(svg)
    return 0


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file (params/integrator/frame)")
    sub.add_argument("--digits", type=int, default=30,
                     help="printed significant digits (default 30)")
    sub.add_argument("--output", help="output file path")
    for field in ("mu", "e", "r0", "G", "m1", "m2", "period-days"):
        sub.add_argument(f"--{field}", dest=field.replace("-", "_"))
    sub.add_argument("--order", type=int)
    sub.add_argument("--precision-digits", type=int, dest="precision_digits")
    sub.add_argument("--step")
    sub.add_argument("--mode", choices=("fixed", "adaptive"))
    for field in ("inclination-deg", "node-deg", "argperi-deg",
                  "aphelion-au", "offset-au"):
        sub.add_argument(f"--{field}", dest=field.replace("-", "_"))


def _add_state(sub):
    for field in ("z1", "z2", "v1", "v2", "theta0"):
        sub.add_argument(f"--{field}")
    sub.add_argument("--t-end", dest="t_end",
                     help="end time in ut, or 'T' for one period (default)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ertbp",
        description="High-precision laboratory for a near-periodic orbit of the "
                    "Sun-Jupiter elliptic restricted three-body problem.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("propagate", help="integrate the spacecraft state")
    _add_common(p); _add_state(p)
    p.set_defaults(func=cmd_propagate)

    p = subs.add_parser("closure", help="periodicity residual over one period")
    _add_common(p); _add_state(p)
    p.set_defaults(func=cmd_closure)

    p = subs.add_parser("refine", help="Newton refinement of the seed state")
    _add_common(p); _add_state(p)
    p.add_argument("--max-iter", type=int, default=10, dest="max_iter")
    p.add_argument("--stm-method", default="central_difference",
                   choices=("variational", "central_difference"), dest="stm_method")
    p.set_defaults(func=cmd_refine)

    p = subs.add_parser("monodromy", help="monodromy matrix and eigenvalues")
    _add_common(p); _add_state(p)
    p.add_argument("--stm-method", default="variational",
                   choices=("variational", "central_difference"), dest="stm_method")
    p.set_defaults(func=cmd_monodromy)

    p = subs.add_parser("ephemeris", help="dated spacecraft ephemeris table")
    _add_common(p); _add_state(p)
    p.add_argument("--start-date", dest="start_date", help="YYYY-MM-DD (default epoch)")
    p.add_argument("--step-days", type=int, default=19, dest="step_days")
    p.add_argument("--count", type=int, default=229)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--table-digits", type=int, default=6, dest="table_digits")
    p.add_argument("--table-velocity", action="store_true", dest="table_velocity",
                   help="emit velocities under the published table's affine convention")
    p.set_defaults(func=cmd_ephemeris)

    p = subs.add_parser("compare", help="distance statistics between two files")
    _add_common(p)
    p.add_argument("file_a"); p.add_argument("file_b")
    p.set_defaults(func=cmd_compare)

    p = subs.add_parser("ellipse", help="ideal-ellipse sequence vs a reference file")
    _add_common(p)
    p.add_argument("--count", type=int, default=4333)
    p.add_argument("--reference", default=None,
                   help="Horizons-format file (default: committed fixture)")
    p.set_defaults(func=cmd_ellipse, reference_default=True)

    p = subs.add_parser("fit", help="fit the five immersion parameters")
    _add_common(p)
    p.add_argument("--reference", help="Horizons-format file (default: committed fixture)")
    p.add_argument("--objective", choices=("rms", "max"), default="rms")
    p.add_argument("--budget", type=int, default=20000)
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("fetch", help="fetch vector records (explicit network flag)")
    _add_common(p)
    p.add_argument("--allow-network", action="store_true", dest="allow_network")
    p.add_argument("--body", default="5")
    p.add_argument("--start", default="2017-02-17")
    p.add_argument("--stop", default="2028-12-28")
    p.add_argument("--step-size", default="1 d", dest="step_size")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.set_defaults(func=cmd_fetch)

    p = subs.add_parser("trace", help="SVG plot of the orbit")
    _add_common(p); _add_state(p)
    p.add_argument("--frame-of-reference", dest="frame_of_reference",
                   choices=("inertial", "rotating-pulsating"), default="inertial")
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_trace)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "endpoint", "") is None:
        from .horizons import DEFAULT_ENDPOINT
        args.endpoint = DEFAULT_ENDPOINT
    try:
        return args.func(args)
    except ErtbpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
