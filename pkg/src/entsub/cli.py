"""
Command-line entry point.

Every command prints one JSON document ``{schema_version, command, config,
payload, timing}`` to stdout (or ``--out``).  Errors go to stderr as JSON.
Exit status: 0 on success, 2 on invalid input, 3 when a certificate search
fails.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time

from .bounds import ThresholdReport
from .discrimination import (
    StateSet,
    build_povm,
    generic_verdict,
    multicopy_certificate,
    simulate,
)
from .errors import EntsubError, InvalidInput, SearchFailure
from .hilbert import SpaceSpec
from .jsonio import (
    OutputDocument,
    certificate_from_dict,
    certificate_to_dict,
    count_result_to_dict,
    load_json,
    product_to_dict,
    search_result_to_dict,
    simulation_to_dict,
    state_set_from_file,
    state_to_dict,
    states_to_dict,
    subspace_from_dict,
    subspace_to_dict,
)
from .sampling import DEFAULT_SEED, RngStream, random_product_state, random_state, random_states, random_subspace
from .search import (
    SearchConfig,
    enumerate_products,
    find_low_rank_in_subspace,
    find_product_in_subspace,
)
from .sweep import INPUT_STREAM_BASE, run_sweep, write_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SEARCH_FAILURE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_search(p):
    d = SearchConfig()
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--max-sweeps", type=int, default=d.max_sweeps)
    p.add_argument("--conv-tol", type=float, default=d.conv_tol)
    p.add_argument("--membership-tol", type=float, default=d.membership_tol)
    p.add_argument("--cluster-tol", type=float, default=d.cluster_tol)
    p.add_argument("--saturation-window", type=int, default=d.saturation_window)


def _add_common(p):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entsub", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="closed-form thresholds for a space")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--copies", type=_int_list, default=[1])
    p.add_argument("--n", type=_int_list, default=[])
    _add_common(p)

    p = sub.add_parser("verdict", help="generic distinguishability verdict")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--copies", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("sample-state", help="Haar-random (product) state")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--product", action="store_true")
    _add_common(p)

    p = sub.add_parser("sample-subspace", help="uniformly random subspace")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--s", type=int, required=True)
    _add_common(p)

    for name in ("find-product", "count-product"):
        p = sub.add_parser(name)
        p.add_argument("subspace")
        _add_search(p)
        _add_common(p)

    p = sub.add_parser("find-low-rank")
    p.add_argument("subspace")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--cut", type=_int_list, default=[0], help="factor indices on the left")
    _add_search(p)
    _add_common(p)

    p = sub.add_parser("certify", help="search a Chefles certificate")
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--n", type=int)
    p.add_argument("--states")
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--product-states", action="store_true")
    _add_search(p)
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte-Carlo run of the certificate POVM")
    p.add_argument("--cert", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--weights", type=lambda t: [float(x) for x in t.split(",")], default=None)
    _add_common(p)

    p = sub.add_parser("sweep", help="run a grid experiment")
    p.add_argument("spec")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    _add_search(p)
    _add_common(p)
    return parser


def _search_config(args) -> SearchConfig:
    return SearchConfig(restarts=args.restarts, max_sweeps=args.max_sweeps,
                        conv_tol=args.conv_tol, membership_tol=args.membership_tol,
                        cluster_tol=args.cluster_tol, saturation_window=args.saturation_window)


def _config_echo(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "out"}
    return json.loads(json.dumps(cfg))


def _dispatch(args) -> tuple[object, int]:
    cmd = args.command
    if cmd == "bounds":
        rep = ThresholdReport.for_space(SpaceSpec(tuple(args.dims)), args.copies, args.n)
        return rep.to_dict(), EXIT_OK
    if cmd == "verdict":
        space = SpaceSpec(tuple(args.dims))
        v = generic_verdict(space, args.n, args.copies)
        return {"dims": args.dims, "n": args.n, "copies": args.copies, "verdict": v}, EXIT_OK
    rng = RngStream(args.seed, 0)
    if cmd == "sample-state":
        space = SpaceSpec(tuple(args.dims))
        if args.n == 1:
            x = random_product_state(space, rng) if args.product else random_state(space, rng)
            return (product_to_dict(x) if args.product else state_to_dict(x)), EXIT_OK
        return states_to_dict(random_states(space, args.n, rng, product=args.product)), EXIT_OK
    if cmd == "sample-subspace":
        return subspace_to_dict(random_subspace(SpaceSpec(tuple(args.dims)), args.s, rng)), EXIT_OK
    if cmd == "find-product":
        S = subspace_from_dict(load_json(args.subspace))
        return search_result_to_dict(find_product_in_subspace(S, _search_config(args), rng)), EXIT_OK
    if cmd == "count-product":
        S = subspace_from_dict(load_json(args.subspace))
        return count_result_to_dict(enumerate_products(S, _search_config(args), rng)), EXIT_OK
    if cmd == "find-low-rank":
        S = subspace_from_dict(load_json(args.subspace))
        res = find_low_rank_in_subspace(S, args.rank, _search_config(args), rng, cut=tuple(args.cut))
        return search_result_to_dict(res), EXIT_OK
    if cmd == "certify":
        if args.states:
            psi = state_set_from_file(args.states)
        elif args.dims and args.n:
            space = SpaceSpec(tuple(args.dims))
            psi = StateSet.of(random_states(space, args.n, RngStream(args.seed, INPUT_STREAM_BASE),
                                            product=args.product_states))
        else:
            raise InvalidInput("certify needs --states or both --dims and --n")
        cert = multicopy_certificate(psi, args.copies, _search_config(args), rng)
        payload = certificate_to_dict(cert)
        payload["expected"] = generic_verdict(psi.space, psi.n, args.copies)
        return payload, EXIT_OK
    if cmd == "simulate":
        obj = load_json(args.cert)
        cert = certificate_from_dict(obj)
        povm = build_povm(cert, args.weights)
        rep = simulate(povm, cert.state_set(), args.trials, rng)
        out = simulation_to_dict(rep)
        out["completeness_error"] = povm.completeness_error()
        out["min_eigenvalue"] = float(povm.min_eigenvalues().min())
        return out, EXIT_OK
    raise InvalidInput(f"unknown command {cmd!r}")


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    """Parse ``argv``, run the command and return the exit status."""
    t0 = time.perf_counter()
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        if command == "sweep":
            spec = load_json(args.spec)
            fields, rows = run_sweep(spec, _search_config(args),
                                     args.out if args.format == "csv" else None, args.format)
            if args.format == "csv":
                if not args.out:
                    buf = io.StringIO()
                    write_csv(buf, fields, rows)
                    sys.stdout.write(buf.getvalue())
            else:
                doc = OutputDocument(command, _config_echo(args), rows,
                                     {"seconds": time.perf_counter() - t0})
                _emit(doc.to_json(indent=1) + "\n", args.out)
            return EXIT_OK
        payload, code = _dispatch(args)
        doc = OutputDocument(command, _config_echo(args), payload,
                             {"seconds": time.perf_counter() - t0})
        _emit(doc.to_json(indent=1) + "\n", args.out)
        return code
    except SearchFailure as e:
        err = {"error": "search-failure", "command": command, "message": str(e),
               "index": e.index, "best_overlap": e.best_overlap,
               "complement_schmidt_ranks": e.witness,
               "heuristic": not (e.witness and max(e.witness.values()) > 1)}
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_SEARCH_FAILURE
    except (InvalidInput, argparse.ArgumentTypeError) as e:
        sys.stderr.write(json.dumps({"error": "invalid-input", "command": command,
                                     "message": str(e)}) + "\n")
        return EXIT_INVALID
    except EntsubError as e:
        err = {"error": type(e).__name__, "command": command, "message": str(e)}
        if hasattr(e, "formula_expected"):
            err["formula_expected"] = e.formula_expected
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
