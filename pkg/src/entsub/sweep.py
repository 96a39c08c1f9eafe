"""
Grid experiments producing one table row per cell.

A sweep spec is a JSON object::

    {"kind": "threshold", "seed": 7, "instances": 20,
     "grid": {"dims": [[2, 2]], "n": [2, 3, 4, 5, 6], "copies": [1]},
     "product_states": false, "restarts": 200}

``kind`` is ``threshold`` (grid keys dims, n, copies) or ``count`` (grid
keys dims, s).  Cells are the Cartesian product of the grid lists, in the
order dims, n/s, copies.  Instance i of cell c draws its random input from
``RngStream(seed, 2**33 + c).child(i)`` and its searches from
``RngStream(seed, c).child(i)``.
"""

from __future__ import annotations

import csv
import itertools
import os
from collections import Counter

from .bounds import product_count_formula, s_max
from .discrimination import StateSet, generic_verdict, multicopy_certificate
from .errors import CountingUnsupported, InvalidInput, SearchFailure
from .hilbert import SpaceSpec
from .sampling import RngStream, random_states, random_subspace
from .search import SearchConfig, enumerate_products

INPUT_STREAM_BASE = 2 ** 33

THRESHOLD_FIELDS = ["cell", "dims", "n", "copies", "instances", "expected", "valid",
                    "failures", "dependent", "valid_rate", "concordant", "seed"]
COUNT_FIELDS = ["cell", "dims", "s", "instances", "formula", "count", "count_min",
                "count_max", "matches", "saturated", "seed"]


def _dims_str(dims) -> str:
    return "x".join(str(d) for d in dims)


def parse_spec(spec: dict) -> tuple[str, list[dict], dict]:
    if not isinstance(spec, dict):
        raise InvalidInput("sweep spec must be a JSON object")
    kind = spec.get("kind", "threshold")
    grid = spec.get("grid", {})
    if not isinstance(grid, dict):
        raise InvalidInput("'grid' must be an object of lists")
    try:
        dims_list = [tuple(int(d) for d in ds) for ds in grid.get("dims", [])]
        for ds in dims_list:
            SpaceSpec(ds)
        if kind == "threshold":
            ns = [int(n) for n in grid.get("n", [])]
            cs = [int(c) for c in grid.get("copies", [1])]
            cells = [{"dims": d, "n": n, "copies": c} for d, n, c in itertools.product(dims_list, ns, cs)]
        elif kind == "count":
            ss = [int(s) for s in grid.get("s", [])]
            cells = [{"dims": d, "s": s} for d, s in itertools.product(dims_list, ss)]
        else:
            raise InvalidInput(f"unknown sweep kind {kind!r}")
        opts = {
            "seed": int(spec.get("seed", 0)),
            "instances": int(spec.get("instances", 10)),
            "product_states": bool(spec.get("product_states", False)),
            "restarts": int(spec.get("restarts", SearchConfig.restarts)),
        }
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"malformed sweep spec: {e}") from None
    if opts["instances"] < 1:
        raise InvalidInput("instances must be >= 1")
    return kind, cells, opts


def threshold_cell(index: int, cell: dict, opts: dict, cfg: SearchConfig) -> dict:
    space = SpaceSpec(cell["dims"])
    n, c = cell["n"], cell["copies"]
    seed = opts["seed"]
    valid = failures = dependent = 0
    for i in range(opts["instances"]):
        states = random_states(space, n, RngStream(seed, INPUT_STREAM_BASE + index).child(i),
                               product=opts["product_states"])
        try:
            cert = multicopy_certificate(StateSet.of(states), c, cfg, RngStream(seed, index).child(i))
            valid += cert.valid
            failures += not cert.valid
        except SearchFailure:
            failures += 1
        except InvalidInput:
            dependent += 1
    expected = generic_verdict(space, n, c)
    agree = valid if expected == "expected-distinguishable" else failures + dependent
    return {"cell": index, "dims": _dims_str(space.dims), "n": n, "copies": c,
            "instances": opts["instances"], "expected": expected, "valid": valid,
            "failures": failures, "dependent": dependent,
            "valid_rate": valid / opts["instances"],
            "concordant": agree / opts["instances"], "seed": seed}


def count_cell(index: int, cell: dict, opts: dict, cfg: SearchConfig) -> dict:
    space = SpaceSpec(cell["dims"])
    s = cell["s"]
    seed = opts["seed"]
    formula = product_count_formula(space, s)
    row = {"cell": index, "dims": _dims_str(space.dims), "s": s, "instances": opts["instances"],
           "formula": formula, "seed": seed}
    if s > s_max(space) + 1:
        row.update(count="infinite", count_min="infinite", count_max="infinite",
                   matches=opts["instances"], saturated=0)
        return row
    counts = []
    sat = 0
    for i in range(opts["instances"]):
        S = random_subspace(space, s, RngStream(seed, INPUT_STREAM_BASE + index).child(i))
        try:
            res = enumerate_products(S, cfg, RngStream(seed, index).child(i))
        except CountingUnsupported:
            continue
        counts.append(res.count)
        sat += res.saturated
    mode = Counter(counts).most_common(1)[0][0]
    row.update(count=mode, count_min=min(counts), count_max=max(counts),
               matches=sum(c == formula for c in counts), saturated=sat)
    return row


def run_sweep(spec: dict, cfg: SearchConfig = SearchConfig(), out_path=None, fmt: str = "csv"):
    """Run every cell of ``spec`` and return the list of row dicts.

    With ``out_path`` and CSV format, cells already present in an existing
    file are skipped and new rows are appended, so an interrupted sweep can
    be resumed.
    """
    kind, cells, opts = parse_spec(spec)
    cfg = cfg.replace(restarts=opts["restarts"])
    fields = THRESHOLD_FIELDS if kind == "threshold" else COUNT_FIELDS
    runner = threshold_cell if kind == "threshold" else count_cell
    done = set()
    rows = []
    if out_path and fmt == "csv" and os.path.exists(out_path) and os.path.getsize(out_path) > 0:
        with open(out_path, newline="") as fh:
            for r in csv.DictReader(fh):
                done.add(int(r["cell"]))
                rows.append(r)
    writer = None
    fh = None
    if out_path and fmt == "csv":
        fresh = not done
        fh = open(out_path, "a" if not fresh else "w", newline="")
        writer = csv.DictWriter(fh, fieldnames=fields)
        if fresh:
            writer.writeheader()
            fh.flush()
    try:
        for index, cell in enumerate(cells):
            if index in done:
                continue
            row = runner(index, cell, opts, cfg)
            rows.append(row)
            if writer:
                writer.writerow(row)
                fh.flush()
    finally:
        if fh:
            fh.close()
    rows.sort(key=lambda r: int(r["cell"]))
    return fields, rows


def write_csv(stream, fields, rows):
    w = csv.DictWriter(stream, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
