"""
A small phase-transition grid
=============================

Success rate over (R, M) cells on short signals; the CSV and manifest are
what the ``hvaf experiment`` command writes.
"""
import tempfile
from pathlib import Path

from hvaf.experiments import PhaseGridSpec, phase_grid_rows, phase_transition, write_csv, write_manifest

spec = PhaseGridSpec(R_values=[1, 2, 3], M_values=[8, 14, 20], n=31, trials=5, seed=0)
grid = phase_transition(spec)
print("rows R, columns M")
print(grid)

out = Path(tempfile.mkdtemp())
rows = phase_grid_rows(spec, grid)
write_csv(rows, out / "results.csv")
write_manifest(out / "manifest.json", spec, spec.seed, rows)
print((out / "results.csv").read_text())
