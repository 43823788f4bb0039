"""
Error versus recovery threshold table
=====================================

Run both schemes with both distributions for s = 1..4 on a 60x4 by 4x60
problem and print the mean normalized error per recovery threshold. The same
run is available from the shell as ``codedmm run --config configs/table1.cfg``.
"""

from pathlib import Path

from codedmm.experiments import parse_config, run_experiment, summarize_table

cfg = parse_config(Path(__file__).parent.parent / "configs" / "table1.cfg", {"trials": "2000"})
records = run_experiment(cfg)
print(summarize_table(records))
