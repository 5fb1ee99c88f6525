"""Scale sweep in three dimensions, written as plot-ready CSV.

Matches the default experiment: fBm product with h=0.8, c1=3.5.  Pass a
larger upper scale on the command line (e.g. ``python 06_scale_sweep.py 11``)
for a longer run.
"""

import sys

from mixholder import ExperimentConfig, emit_table, run_experiment

hi = int(sys.argv[1]) if len(sys.argv) > 1 else 9
records = run_experiment(ExperimentConfig(d=3, m_range=(5, hi), test_points=200_000))
sys.stdout.write(emit_table(records, "csv"))
