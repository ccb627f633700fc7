"""Walkthrough: when does a second compression hide a forgery?

A forged image is recompressed at quality qf2.  If qf2 is finer than the
original qf1, authentic blocks stay compatible with the declared
double-compression chain while manipulated blocks do not, and detection
works.  If qf2 is much coarser, the second quantizer swallows the evidence
and every block projects back to compatibility — accuracy collapses to
chance.  This demo sweeps a small grid to show both regimes.

Run:  python demos/double_compression_grid.py   (a few minutes on one core)
"""

from jpegcompat.experiments import experiment_grid, format_grid_table

cells = experiment_grid(n_images=4, qf1_list=[60, 90], qf2_list=[50, 90],
                        n_iter=400, kind="blur", seed=7, size=128)

for c in cells:
    rates = ", ".join(f"{k}: {v:.2f}" for k, v in c["verdict_rates"].items())
    print(f"qf1={c['qf1']} qf2={c['qf2']}: acc {100 * c['acc']:5.1f} "
          f"fpr {100 * c['fpr']:.2f}%  ({rates})")

print()
print(format_grid_table(cells))
print()
print("reading the table: detection only works above the diagonal "
      "(qf2 finer than qf1); the 90->50 cell is chance level.")
