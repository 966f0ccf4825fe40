"""Command-line interface: ``wedgeprob {sample,analyze,experiment,witness,verify-decomposition}``.

Exit status is 0 on success, 1 on validation errors (bad input, failed
verification) and 2 when a resource guard trips. Errors are printed to stderr
as a single JSON object ``{"error": kind, "message": ...}``.
"""

import argparse
import json
import sys

import numpy as np

from .errors import NumericalError, ResourceGuardError, ValidationError
from .experiments import KNOWN_TESTS, ExperimentConfig, omega_from_spec, run_experiment
from .io import dumps, load_json, matrix_from_json, matrix_to_json, tuple_from_json, tuple_to_json
from .sampling import IsometryTuple, SeededRng, sample_haar_tuple, tuple_rank
from .separability import (
    ProductDecomposition,
    decide,
    verify_product_decomposition,
    witness_from_pure,
    witness_value,
)
from .states import DensityMatrix, MarginalState, purify, state_from_tuple, tuple_from_state
from .tensor import DEFAULT_REL_TOL, partial_trace


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dims(text):
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--dims expects 'm,n', got {text!r}") from exc
    return m, n


def _emit(obj, out=None):
    text = dumps(obj) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args):
    omega = omega_from_spec(args.omega, args.n, SeededRng(args.seed, 2**63))
    xi = purify(omega)
    samples = []
    for i in range(args.stream, args.stream + args.count):
        v = sample_haar_tuple(args.n, args.m, args.r, SeededRng(args.seed, i))
        entry = {"stream": i, "tuple": tuple_to_json(v.components)}
        if not args.no_state:
            entry["state"] = matrix_to_json(state_from_tuple(v, xi).matrix)
        samples.append(entry)
    _emit({"n": args.n, "m": args.m, "r": args.r, "seed": args.seed, "omega": args.omega,
           "samples": samples}, args.out)
    return 0


def _analyze_tuple(v, args):
    omega = omega_from_spec(args.omega, v.n, SeededRng(args.seed, 2**63))
    xi = purify(omega)
    verdict = decide(v, xi, args.rel_tol)
    out = verdict.to_dict()
    out["dims"] = {"n": v.n, "m": v.m, "r": v.r}
    out["tuple_rank"] = tuple_rank(v, args.rel_tol)
    return out


def _analyze_state(rho, m, n, args):
    rho = DensityMatrix.from_matrix(rho)
    omega = MarginalState.from_matrix(partial_trace(rho.matrix, m, n, "first"))
    # a non-faithful marginal yields a tuple on its support C^{r0}
    xi = purify(omega)
    r = rho.rank(args.rel_tol)
    v = tuple_from_state(rho, r, xi, m=m)
    verdict = decide(v, xi, args.rel_tol, rho=rho, dims=(m, n))
    out = verdict.to_dict()
    out["dims"] = {"n": n, "m": m, "r": r}
    out["marginal_rank"] = xi.r0
    return out


def cmd_analyze(args):
    if (args.tuple is None) == (args.state is None):
        raise UsageError("analyze needs exactly one of --tuple or --state")
    if args.tuple is not None:
        v = IsometryTuple(tuple_from_json(load_json(args.tuple)))
        result = _analyze_tuple(v, args)
    else:
        if args.dims is None:
            raise UsageError("analyze --state requires --dims m,n")
        m, n = _dims(args.dims)
        result = _analyze_state(matrix_from_json(load_json(args.state)), m, n, args)
    _emit(result, args.out)
    return 0


def cmd_experiment(args):
    if args.config:
        cfg_dict = load_json(args.config)
    else:
        cfg_dict = {}
    overrides = {
        "n": args.n,
        "m": args.m,
        "r_list": args.r_list,
        "samples": args.samples,
        "master_seed": args.seed,
        "omega": args.omega,
        "rel_tol": args.rel_tol,
        "tests": args.tests.split(",") if args.tests else None,
        "workers": args.workers,
    }
    cfg_dict.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in ("n", "m", "r_list", "samples") if k not in cfg_dict]
    if missing:
        raise UsageError(f"experiment is missing {', '.join(missing)}")
    cfg = ExperimentConfig.from_dict(cfg_dict)
    report = run_experiment(cfg)
    text = report.to_json() + "\n" if args.format == "json" else report.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_witness(args):
    m, n = _dims(args.dims)
    zeta = matrix_from_json(load_json(args.state)).reshape(-1)
    c, alpha = witness_from_pure(zeta, m, n)
    value = witness_value(c, np.outer(zeta, zeta.conj()))
    _emit({"alpha": alpha, "c": matrix_to_json(c), "value_on_state": value}, args.out)
    return 0


def _decomposition_from_json(obj):
    try:
        terms = obj["terms"]
        weights = [float(t["weight"]) for t in terms]
        xis = [matrix_from_json(t["xi"]).reshape(-1) for t in terms]
        etas = [matrix_from_json(t["eta"]).reshape(-1) for t in terms]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed decomposition JSON: {exc}") from exc
    if not terms:
        raise ValidationError("decomposition has no terms")
    return ProductDecomposition(weights, np.stack(xis), np.stack(etas))


def decomposition_to_json(decomp):
    return {"terms": [{"weight": float(w), "xi": matrix_to_json(x), "eta": matrix_to_json(e)}
                      for w, x, e in zip(decomp.weights, decomp.xis, decomp.etas)]}


def cmd_verify_decomposition(args):
    rho = matrix_from_json(load_json(args.state))
    decomp = _decomposition_from_json(load_json(args.decomposition))
    ok = verify_product_decomposition(rho, decomp, args.tol)
    _emit({"valid": ok, "terms": len(decomp), "tol": args.tol}, args.out)
    return 0 if ok else 1


def build_parser():
    p = _Parser(prog="wedgeprob", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("sample", help="draw random isometry tuples and their states")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stream", type=int, default=0, help="first RNG stream id")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--omega", default="maximally-mixed")
    s.add_argument("--no-state", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    a = sub.add_parser("analyze", help="wedge invariant and separability verdict")
    a.add_argument("--tuple")
    a.add_argument("--state")
    a.add_argument("--dims", help="m,n for --state")
    a.add_argument("--omega", default="maximally-mixed", help="marginal used with --tuple")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("experiment", help="seeded Monte Carlo campaign")
    e.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    e.add_argument("--n", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--r", "--r-list", dest="r_list", type=lambda t: [int(x) for x in t.split(",")])
    e.add_argument("--samples", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--omega")
    e.add_argument("--rel-tol", type=float)
    e.add_argument("--tests", help=f"comma-separated subset of {','.join(KNOWN_TESTS)}")
    e.add_argument("--workers", type=int)
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    w = sub.add_parser("witness", help="entanglement witness for a pure state")
    w.add_argument("--state", required=True, help="matrix JSON of the state vector (mn x 1)")
    w.add_argument("--dims", required=True)
    w.add_argument("--out")
    w.set_defaults(func=cmd_witness)

    d = sub.add_parser("verify-decomposition", help="check a product decomposition against a state")
    d.add_argument("--state", required=True)
    d.add_argument("--decomposition", required=True)
    d.add_argument("--tol", type=float, default=1e-8)
    d.add_argument("--out")
    d.set_defaults(func=cmd_verify_decomposition)
    return p


def _fail(kind, exc, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return args.func(args)
    except ResourceGuardError as exc:
        return _fail("resource_guard", exc, 2)
    except UsageError as exc:
        return _fail("usage", exc, 1)
    except (ValidationError, NumericalError, OSError, json.JSONDecodeError) as exc:
        return _fail("validation", exc, 1)


if __name__ == "__main__":
    sys.exit(main())
