"""
End-to-end sweep: container in, CSV, plots, and summary out
===========================================================

Runs the whole pipeline on a small synthetic dataset: embedding sweep,
feature extraction, per-dimension PCA baseline and spectral-feature
classification, and report rendering. Everything lands in one output
directory whose contents are listed at the end.
"""

import tempfile
from pathlib import Path

import numpy as np

from mpsl import DatasetMatrix, RunConfig, run_sweep, save_matrix

rng = np.random.default_rng(61)

# same population-coded clusters as demo 06, saved to a container first
sizes = (7, 13, 70)
basis, _ = np.linalg.qr(rng.normal(size=(50, 3)))
centers = (10.0 / np.sqrt(2.0)) * basis.T
blocks, labels = [], []
for cls, count in enumerate(sizes):
    blocks.append(centers[cls] + rng.normal(size=(count, 50)))
    labels.extend([cls] * count)
ds = DatasetMatrix(data=np.vstack(blocks), labels=np.array(labels),
                   class_names={i: "pop%d" % s for i, s in enumerate(sizes)})

work = Path(tempfile.mkdtemp(prefix="mpsl-demo-"))
container = work / "clusters.mpslmat"
save_matrix(ds, container)

# a small grid keeps this demo quick; the defaults cover the full sweep
cfg = RunConfig(data=str(container), out=str(work / "out"),
                dims=(5, 10), neighbors=(5, 10), threads=1, seed=3)
artifacts = run_sweep(cfg)

print("artifacts written to", cfg.out)
for name in sorted(artifacts):
    path = artifacts[name]
    print("  %-12s %s (%d bytes)" % (name, path.name, path.stat().st_size))

print()
print("results.csv:")
print(artifacts["results"].read_text(), end="")
