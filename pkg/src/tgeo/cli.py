"""Command-line front end: ``tgeo <subcommand> ...``.

Results are JSON, samples and trajectories are CSV. Floats are written with
Python's shortest round-trip repr. Exit codes: 0 ok, 2 invalid input,
3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from .errors import NoSolutionFound, TGeoError, ZeroDensity

EXIT_OK, EXIT_INVALID, EXIT_NOCONV = 0, 2, 3


class UsageError(Exception):
    pass


def _vec(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}: {exc}") from None


def _pts(text: str) -> np.ndarray:
    """Points separated by ';', coordinates by ','."""
    return np.array([_vec(p) for p in text.split(";") if p.strip()])


def _json_arg(text: str):
    if text is None:
        return None
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _spec(args):
    from .geometry import WorldFunctionSpec, parse_spec

    if getattr(args, "spec", None) is None:
        raise UsageError("--spec is required (kind:n[:d] or JSON)")
    if args.spec.lstrip().startswith("{"):
        return WorldFunctionSpec.from_dict(json.loads(args.spec))
    return parse_spec(args.spec)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scalar_text(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true\n" if x else "false\n"
    return repr(float(x)) + "\n"


# -- subcommand handlers -------------------------------------------------------

def cmd_sigma(args):
    from .geometry import sigma

    spec = _spec(args)
    _emit(args, _scalar_text(sigma(spec, _vec(args.p), _vec(args.q))))


def _pair(args, a, b):
    from .geometry import PairVector

    return PairVector(np.array(_vec(getattr(args, a))), np.array(_vec(getattr(args, b))))


def cmd_product(args):
    from .geometry import scalar_product

    spec = _spec(args)
    _emit(args, _scalar_text(scalar_product(spec, _pair(args, "p0", "p1"), _pair(args, "q0", "q1"))))


def cmd_equiv(args):
    from .vectors import is_equivalent

    spec = _spec(args)
    _emit(args, _scalar_text(is_equivalent(spec, _pair(args, "p0", "p1"), _pair(args, "q0", "q1"), args.tol)))


def _skeleton_from(args):
    from .geometry import load_scene

    if args.input:
        spec, pts = load_scene(_json_arg(args.input))
        names = sorted(pts, key=lambda k: (len(k), k))
        return spec, np.stack([pts[k] for k in names])
    return _spec(args), _pts(args.points)


def cmd_gram(args):
    from .vectors import gram_matrix, is_linearly_dependent

    spec, sk = _skeleton_from(args)
    g = gram_matrix(spec, sk)
    _emit(args, _dump({
        "gram": g, "determinant": float(np.linalg.det(g)),
        "linearly_dependent": is_linearly_dependent(spec, sk, args.tol),
    }))


def cmd_euclid(args):
    from .euclid import EuclidSampleConfig, euclideaness_check

    spec = _spec(args)
    cfg = EuclidSampleConfig(n_samples=args.samples, tol=args.tol, seed=args.seed)
    _emit(args, euclideaness_check(spec, args.n_claim, cfg).to_json(indent=2, sort_keys=True) + "\n")


def cmd_solve(args):
    from .geometry import WorldFunctionSpec, distorted
    from .solver import SolverConfig, solve_equivalent_null, solve_equivalent_timelike, solve_skeleton_equivalence

    cfg = SolverConfig(seed=args.seed, n_starts=args.starts)
    if args.closed_form:
        spec = _spec(args) if args.spec else distorted(args.lambda0 ** 2)
        if args.closed_form == "null":
            fam = solve_equivalent_null(spec, args.s)
        else:
            fam = solve_equivalent_timelike(spec, args.s, args.a, args.b, _vec(args.q), args.closed_form)
        _emit(args, _dump({"families": [fam.to_dict(n_samples=args.samples, seed=args.seed)], "existence": None}))
        return
    if args.input:
        req = _json_arg(args.input)
        unknown = set(req) - {"task", "spec", "skeleton", "q0"}
        if unknown:
            raise UsageError(f"unknown request fields: {sorted(unknown)}")
        spec = WorldFunctionSpec.from_dict(req["spec"])
        sk, q0 = np.asarray(req["skeleton"], float), np.asarray(req["q0"], float)
    else:
        spec, sk, q0 = _spec(args), _pts(args.skeleton), np.array(_vec(args.q0))
    try:
        fam, report = solve_skeleton_equivalence(spec, sk, q0, cfg)
    except NoSolutionFound as exc:
        _emit(args, _dump({"families": [], "existence": exc.report.to_dict() if exc.report else None}))
        raise
    _emit(args, _dump({"families": [fam.to_dict()], "existence": report.to_dict()}))


def cmd_sum(args):
    from .geometry import PairVector
    from .solver import SolverConfig, vector_sum

    spec = _spec(args)
    a, b = _pts(args.v1), _pts(args.v2)
    fam = vector_sum(spec, PairVector(a[0], a[1]), PairVector(b[0], b[1]), _vec(args.r0), args.order,
                     SolverConfig(seed=args.seed))
    _emit(args, _dump({"families": [fam.to_dict(n_samples=args.samples, seed=args.seed)]}))


def cmd_scale(args):
    from .geometry import PairVector
    from .solver import SolverConfig, scalar_multiply

    spec = _spec(args)
    v = _pts(args.v)
    fam = scalar_multiply(spec, PairVector(v[0], v[1]), args.alpha, _vec(args.p0), args.version,
                          SolverConfig(seed=args.seed))
    _emit(args, _dump({"families": [fam.to_dict(n_samples=args.samples, seed=args.seed)]}))


def cmd_object(args):
    from .errors import NegativeSigma
    from .objects import ElementaryObject, contains, envelope_value

    spec, sk = _skeleton_from(args)
    obj = ElementaryObject(args.kind, sk, spec)
    R = _vec(args.r)
    try:
        f = float(envelope_value(obj, R))
    except NegativeSigma:
        f = None
    _emit(args, _dump({"kind": args.kind, "envelope_value": f, "contains": contains(obj, R, args.tol)}))


def cmd_tube(args):
    from .geometry import distorted
    from .objects import sample_tube_surface

    spec = distorted(args.lambda0 ** 2)
    res = sample_tube_surface(spec, args.mu, args.lambda0, args.n_t, args.n_phi, args.window)
    if args.summary:
        sys.stderr.write(_dump({"r_min": res.r_min, "r_max": res.r_max, "window": res.window,
                                "max_envelope_residual": float(np.nanmax(np.abs(res.residual)))}))
    _emit(args, res.to_csv())


def cmd_chain(args):
    from .chain import ChainState, EnsembleConfig, ensemble_paths, run_ensemble

    cfg = EnsembleConfig(mu=args.mu, lambda0=args.lambda0, n_steps=args.steps, n_chains=args.chains,
                         seed=args.seed, b=args.b_coeff, threads=args.threads)
    stats = run_ensemble(cfg)
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        paths = ensemble_paths(cfg)
        width = len(str(cfg.n_chains - 1))
        for i, pts in enumerate(paths):
            st = ChainState(pts, cfg.mu, cfg.lambda0, cfg.seed)
            with open(os.path.join(args.csv_dir, f"chain_{i:0{width}d}.csv"), "w") as fh:
                fh.write(st.to_csv())
    _emit(args, _dump(stats.to_dict()))


def cmd_ensemble(args):
    from .hydro import EnsembleState, evolve, gaussian_state, residuals, trajectory_csv

    if args.input:
        state = EnsembleState.from_dict(_json_arg(args.input))
    else:
        state = gaussian_state(args.half_width, args.cells, args.s0, args.hbar, args.m)
    keep = max(1, args.keep_every)
    final, hist = evolve(state, state.t + args.t_end, args.cfl, keep_every=keep)
    if hist[-1] is not final:
        hist.append(final)
    if args.state_out:
        with open(args.state_out, "w") as fh:
            fh.write(_dump(final.to_dict()))
    if args.summary:
        cont, mom = residuals(hist) if len(hist) > 1 else (0.0, 0.0)
        sys.stderr.write(_dump({"t": final.t, "mass": final.mass, "width": final.width(),
                                "continuity_residual": cont, "momentum_residual": mom}))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroDensity)
        _emit(args, trajectory_csv(hist))


# -- parser ---------------------------------------------------------------------

def _globals(suppress: bool) -> argparse.ArgumentParser:
    # Subcommands re-declare the globals with suppressed defaults so a value
    # given before the subcommand name is not overwritten.
    g = argparse.ArgumentParser(add_help=False)

    def d(value):
        return argparse.SUPPRESS if suppress else value

    g.add_argument("--output", "-o", default=d(None), help="write results here instead of stdout")
    g.add_argument("--seed", type=int, default=d(0), help="seed for sampled or random work (default 0)")
    g.add_argument("--tol", type=float, default=d(1e-9), help="scale-free tolerance (default 1e-9)")
    g.add_argument("--threads", type=int, default=d(1), help="worker cap for chain runs (default 1)")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals(suppress=True)
    p = argparse.ArgumentParser(prog="tgeo", description=__doc__.splitlines()[0], parents=[_globals(False)])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    def spec_arg(sp, required=True):
        sp.add_argument("--spec", required=required, help="kind:n[:d], e.g. distorted:4:0.01, or spec JSON")

    sp = add("sigma", cmd_sigma, "world function sigma(P, Q)")
    spec_arg(sp)
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)

    for name, fn, help_ in (("product", cmd_product, "scalar product (P0P1 . Q0Q1)"),
                            ("equiv", cmd_equiv, "is Q0Q1 equivalent to P0P1")):
        sp = add(name, fn, help_)
        spec_arg(sp)
        for k in ("p0", "p1", "q0", "q1"):
            sp.add_argument(f"--{k}", required=True)

    for name, fn, help_ in (("gram", cmd_gram, "Gram matrix and determinant of a skeleton"),
                            ("object", cmd_object, "envelope value and membership of a point")):
        sp = add(name, fn, help_)
        spec_arg(sp, required=False)
        sp.add_argument("--points", help="skeleton points 'x,y;x,y;...'")
        sp.add_argument("--input", help="scene JSON (path or inline)")
        if name == "object":
            sp.add_argument("--kind", required=True, choices=["segment", "sphere", "cylinder", "straight_line"])
            sp.add_argument("--r", required=True, help="query point")

    sp = add("euclid-check", cmd_euclid, "sampled Euclideaness conditions I-IV")
    spec_arg(sp)
    sp.add_argument("--n-claim", type=int, default=None)
    sp.add_argument("--samples", type=int, default=64)

    sp = add("solve", cmd_solve, "equivalence solver (closed forms or numeric)")
    spec_arg(sp, required=False)
    sp.add_argument("--input", help="request JSON {task, spec, skeleton, q0}")
    sp.add_argument("--skeleton")
    sp.add_argument("--q0")
    sp.add_argument("--starts", type=int, default=32)
    sp.add_argument("--closed-form", choices=["I", "II", "null"])
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--q", default="1,0,0")
    sp.add_argument("--lambda0", type=float, default=0.1)
    sp.add_argument("--samples", type=int, default=4)

    sp = add("sum", cmd_sum, "multivariant vector sum")
    spec_arg(sp)
    sp.add_argument("--v1", required=True, help="'origin;end'")
    sp.add_argument("--v2", required=True, help="'origin;end'")
    sp.add_argument("--r0", required=True)
    sp.add_argument("--order", choices=["12", "21"], default="12")
    sp.add_argument("--samples", type=int, default=4)

    sp = add("scale", cmd_scale, "multiplication of a vector by a real number")
    spec_arg(sp)
    sp.add_argument("--v", required=True, help="'origin;end'")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p0", required=True)
    sp.add_argument("--version", choices=["A", "B"], default="A")
    sp.add_argument("--samples", type=int, default=4)

    sp = add("tube", cmd_tube, "sample the tube surface around one link (CSV)")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--lambda0", type=float, required=True)
    sp.add_argument("--n-t", type=int, default=64)
    sp.add_argument("--n-phi", type=int, default=64)
    sp.add_argument("--window", choices=["valid", "full"], default="valid")
    sp.add_argument("--summary", action="store_true", help="also print radii and residual JSON to stderr")

    sp = add("chain", cmd_chain, "Monte Carlo world-line ensemble statistics (JSON)")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--lambda0", type=float, required=True)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--chains", type=int, default=1000)
    sp.add_argument("--b-coeff", type=float, default=1.0)
    sp.add_argument("--csv-dir", help="also write one CSV per chain into this directory")

    sp = add("ensemble", cmd_ensemble, "1-D Bohm hydrodynamics trajectory (CSV)")
    sp.add_argument("--input", help="initial state JSON {x, rho, v, hbar, m, t}")
    sp.add_argument("--half-width", type=float, default=8.0)
    sp.add_argument("--cells", type=int, default=400)
    sp.add_argument("--s0", type=float, default=1.0)
    sp.add_argument("--hbar", type=float, default=1.0)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--t-end", type=float, default=0.5)
    sp.add_argument("--cfl", type=float, default=0.25)
    sp.add_argument("--keep-every", type=int, default=500)
    sp.add_argument("--state-out", help="write the final state JSON here")
    sp.add_argument("--summary", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        args.func(args)
    except NoSolutionFound as exc:
        sys.stderr.write(f"tgeo: no solution found: {exc}\n")
        return EXIT_NOCONV
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except (UsageError, TGeoError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        sys.stderr.write(f"tgeo: error: {msg}\n")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
