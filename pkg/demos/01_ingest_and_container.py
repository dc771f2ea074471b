"""
Loading an image tree and round-tripping the matrix container
=============================================================

Builds a tiny grayscale image tree on disk, vectorizes it, and shows that
the binary container preserves data, labels, and class names exactly.
"""

import tempfile
from pathlib import Path

import numpy as np

from mpsl import load_dataset, load_matrix, save_matrix, write_pgm

work = Path(tempfile.mkdtemp(prefix="mpsl-demo-"))

# two classes: horizontal and vertical gradients at 16x16
rng = np.random.default_rng(7)
ramp = np.linspace(0, 255, 16)
for name, base in [("across", np.tile(ramp, (16, 1))),
                   ("down", np.tile(ramp[:, None], (1, 16)))]:
    class_dir = work / "images" / name
    class_dir.mkdir(parents=True)
    for i in range(6):
        noisy = np.clip(base + rng.normal(scale=10, size=base.shape), 0, 255)
        write_pgm(class_dir / ("img%d.pgm" % i), np.rint(noisy).astype(np.uint8))

ds = load_dataset(work / "images", resolution=16)
print("loaded %d images, %d pixels each" % (ds.m, ds.n))
print("classes:", ds.class_names)
print("labels:", ds.labels.tolist())

# the container stores the float64 matrix, labels, and the class map
container = work / "dataset.mpslmat"
save_matrix(ds, container)
back = load_matrix(container)
print("container round trip exact:",
      np.array_equal(back.data, ds.data)
      and np.array_equal(back.labels, ds.labels)
      and back.class_names == ds.class_names)
print("container size: %d bytes" % container.stat().st_size)
