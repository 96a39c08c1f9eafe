"""
A threshold sweep
=================

The same grid the command line ``sweep`` subcommand runs, called directly.
"""

import sys

from entsub.search import SearchConfig
from entsub.sweep import run_sweep, write_csv

spec = {"kind": "threshold", "seed": 11, "instances": 10,
        "grid": {"dims": [[2, 2], [2, 2, 2]], "n": [2, 3, 4, 5], "copies": [1]}}
fields, rows = run_sweep(spec, SearchConfig())
write_csv(sys.stdout, fields, rows)
