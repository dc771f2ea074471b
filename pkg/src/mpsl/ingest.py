"""Dataset ingestion: image loading, preprocessing, and the matrix container.

A dataset on disk is a root directory with one subdirectory per class; class
ids are assigned by lexicographic subdirectory name. Images are 8-bit
grayscale after conversion, resized to a square resolution with
corner-aligned bilinear interpolation, and vectorized row-major into a
float64 matrix with one row per image.

The native image format is binary PGM (P5); ASCII PGM (P2) and PPM (P6/P3,
converted to luma) are also parsed directly. Other formats are decoded
through Pillow when it is installed.

Matrices round-trip through a little-endian binary container:

    magic "MPSLMAT1" | u64 m | u64 n | u64 map_len |
    m*n float64 row-major | m u32 labels | map_len bytes UTF-8 JSON class map
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"MPSLMAT1"

#: Extensions parsed without any imaging library.
NATIVE_SUFFIXES = (".pgm", ".ppm")
#: Extensions handed to Pillow when available.
CODEC_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


class DatasetError(ValueError):
    """Structural problem with an on-disk dataset or image file."""


class MatrixFormatError(ValueError):
    """Structural problem with a matrix container."""


class MagicNumberError(MatrixFormatError):
    """Container does not begin with the expected magic bytes."""


class TruncatedFileError(MatrixFormatError):
    """Container is shorter than its header promises."""


@dataclass
class ImageRecord:
    """One loaded image: pixel grid, integer class label, origin path."""

    pixels: np.ndarray
    label: int
    source_id: str


@dataclass
class DatasetMatrix:
    """Vectorized dataset: m x n float64 data with per-row labels."""

    data: np.ndarray
    labels: np.ndarray
    class_names: dict[int, str] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def validate(self) -> None:
        if self.data.ndim != 2:
            raise ValueError("data must be 2-D, got shape %r" % (self.data.shape,))
        if self.labels.ndim != 1 or len(self.labels) != self.data.shape[0]:
            raise ValueError(
                "labels length %d does not match row count %d"
                % (len(self.labels), self.data.shape[0])
            )
        if len(self.labels) and self.labels.min() < 0:
            raise ValueError("labels must be non-negative")
        missing = set(int(v) for v in self.labels) - set(self.class_names)
        if missing:
            raise ValueError("labels %s missing from class_names" % sorted(missing))


# ---------------------------------------------------------------------------
# PGM / PPM parsing

def _read_netpbm_tokens(raw: bytes, count: int, path: str) -> tuple[list[int], int]:
    # Header tokens are whitespace-separated integers; '#' starts a comment
    # that runs to end of line. Returns the tokens and the offset of the
    # byte following the single whitespace that terminates the last token.
    tokens: list[int] = []
    i = 0
    n = len(raw)
    while len(tokens) < count:
        while i < n and raw[i : i + 1].isspace():
            i += 1
        if i < n and raw[i : i + 1] == b"#":
            while i < n and raw[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < n and not raw[i : i + 1].isspace():
            i += 1
        if start == i:
            raise DatasetError("%s: malformed header" % path)
        try:
            tokens.append(int(raw[start:i]))
        except ValueError:
            raise DatasetError("%s: non-numeric header token %r" % (path, raw[start:i]))
    if i >= n or not raw[i : i + 1].isspace():
        raise DatasetError("%s: malformed header" % path)
    return tokens, i + 1


def read_netpbm(path: str | Path) -> np.ndarray:
    """Parse a PGM/PPM file into a uint8 array (H x W or H x W x 3).

    Raises DatasetError for unknown magic, 16-bit data (maxval > 255),
    short pixel payloads, or malformed headers.
    """
    path = str(path)
    raw = Path(path).read_bytes()
    magic = raw[:2]
    if magic not in (b"P5", b"P2", b"P6", b"P3"):
        raise DatasetError("%s: not a PGM/PPM file (magic %r)" % (path, magic))
    channels = 3 if magic in (b"P6", b"P3") else 1
    (width, height, maxval), offset = _read_netpbm_tokens(raw[2:], 3, path)
    offset += 2
    if width <= 0 or height <= 0:
        raise DatasetError("%s: bad dimensions %dx%d" % (path, width, height))
    if maxval > 255:
        raise DatasetError(
            "%s: unsupported bit depth (maxval %d, only 8-bit supported)" % (path, maxval)
        )
    if maxval <= 0:
        raise DatasetError("%s: bad maxval %d" % (path, maxval))
    count = width * height * channels
    if magic in (b"P5", b"P6"):
        body = raw[offset : offset + count]
        if len(body) < count:
            raise DatasetError(
                "%s: truncated pixel data (%d of %d bytes)" % (path, len(body), count)
            )
        flat = np.frombuffer(body, dtype=np.uint8, count=count)
    else:
        try:
            tokens = raw[offset:].decode("ascii").split()[:count]
            flat = np.array(tokens, dtype=np.int64)
        except (ValueError, UnicodeDecodeError):
            raise DatasetError("%s: malformed ASCII pixel data" % path)
        if flat.size < count:
            raise DatasetError(
                "%s: truncated pixel data (%d of %d samples)" % (path, flat.size, count)
            )
        if flat.min() < 0 or flat.max() > 255:
            raise DatasetError("%s: ASCII sample out of byte range" % path)
        flat = flat.astype(np.uint8)
    if channels == 3:
        return flat.reshape(height, width, 3)
    return flat.reshape(height, width)


def write_pgm(path: str | Path, pixels: np.ndarray) -> None:
    """Write a uint8 grayscale array as binary PGM (P5)."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError("PGM writer expects a 2-D array")
    arr = arr.astype(np.uint8)
    header = b"P5\n%d %d\n255\n" % (arr.shape[1], arr.shape[0])
    _atomic_write_bytes(path, header + arr.tobytes())


def write_ppm(path: str | Path, pixels: np.ndarray) -> None:
    """Write a uint8 H x W x 3 array as binary PPM (P6)."""
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("PPM writer expects an H x W x 3 array")
    arr = arr.astype(np.uint8)
    header = b"P6\n%d %d\n255\n" % (arr.shape[1], arr.shape[0])
    _atomic_write_bytes(path, header + arr.tobytes())


def _load_image_array(path: Path) -> np.ndarray:
    suffix = path.suffix.lower()
    if suffix in NATIVE_SUFFIXES:
        return read_netpbm(path)
    try:
        from PIL import Image
    except ImportError:
        raise DatasetError(
            "%s: no native parser for %r and Pillow is not installed" % (path, suffix)
        )
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "RGB"):
                img = img.convert("RGB")
            arr = np.asarray(img)
    except Exception as exc:
        raise DatasetError("%s: cannot decode image (%s)" % (path, exc))
    if arr.dtype != np.uint8:
        raise DatasetError("%s: unsupported bit depth (dtype %s)" % (path, arr.dtype))
    return arr


# ---------------------------------------------------------------------------
# Preprocessing

#: BT.601 luma weights for RGB to grayscale conversion.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(pixels: np.ndarray) -> np.ndarray:
    """Collapse an H x W x 3 RGB array to 8-bit luma; pass grayscale through.

    Luma is round(0.299 R + 0.587 G + 0.114 B) clamped to [0, 255].
    """
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        return arr.astype(np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("expected H x W or H x W x 3, got shape %r" % (arr.shape,))
    r, g, b = LUMA_WEIGHTS
    luma = r * arr[:, :, 0].astype(np.float64) + g * arr[:, :, 1] + b * arr[:, :, 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def resize_bilinear(pixels: np.ndarray, target: int) -> np.ndarray:
    """Resize a 2-D image to target x target, corner-aligned bilinear.

    Sample position for output index i is i * (S - 1) / (T - 1), so the
    first and last samples coincide with the source corners and resizing
    to the source size is the identity. A single-sample target reads the
    source center. Returns float64; intensities are not re-quantized.
    """
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image, got shape %r" % (arr.shape,))
    if target < 1:
        raise ValueError("target resolution must be >= 1, got %d" % target)

    def positions(size: int) -> np.ndarray:
        if target == 1:
            return np.array([(size - 1) / 2.0])
        return np.arange(target) * ((size - 1) / (target - 1))

    ys = positions(arr.shape[0])
    xs = positions(arr.shape[1])
    y0 = np.clip(np.floor(ys).astype(int), 0, max(arr.shape[0] - 2, 0))
    x0 = np.clip(np.floor(xs).astype(int), 0, max(arr.shape[1] - 2, 0))
    y1 = np.minimum(y0 + 1, arr.shape[0] - 1)
    x1 = np.minimum(x0 + 1, arr.shape[1] - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = arr[np.ix_(y0, x0)] * (1 - fx) + arr[np.ix_(y0, x1)] * fx
    bottom = arr[np.ix_(y1, x0)] * (1 - fx) + arr[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bottom * fy


def vectorize(pixels: np.ndarray) -> np.ndarray:
    """Flatten an image row-major into a float64 vector."""
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image, got shape %r" % (arr.shape,))
    return arr.reshape(-1)


# ---------------------------------------------------------------------------
# Directory ingestion

def load_dataset(root_dir: str | Path, resolution: int = 128) -> DatasetMatrix:
    """Load a class-per-subdirectory image tree into a DatasetMatrix.

    Class ids follow lexicographic subdirectory order; rows follow
    (class name, file name) lexicographic order, so two loads of the same
    tree produce identical matrices.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise DatasetError("%s: not a directory" % root)
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError("%s: no class subdirectories" % root)
    if resolution < 1:
        raise ValueError("resolution must be >= 1, got %d" % resolution)

    supported = NATIVE_SUFFIXES + CODEC_SUFFIXES
    rows: list[np.ndarray] = []
    labels: list[int] = []
    class_names: dict[int, str] = {}
    for label, class_dir in enumerate(class_dirs):
        class_names[label] = class_dir.name
        files = sorted(
            p for p in class_dir.iterdir()
            if p.is_file() and p.suffix.lower() in supported
        )
        if not files:
            raise DatasetError("%s: class directory has no images" % class_dir)
        for path in files:
            gray = to_grayscale(_load_image_array(path))
            rows.append(vectorize(resize_bilinear(gray, resolution)))
            labels.append(label)

    return DatasetMatrix(
        data=np.vstack(rows),
        labels=np.array(labels, dtype=np.int64),
        class_names=class_names,
    )


# ---------------------------------------------------------------------------
# Matrix container

def _atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    # Write-to-temp plus rename so readers never observe a partial file.
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(ds: DatasetMatrix, path: str | Path) -> None:
    """Serialize a DatasetMatrix to the binary container, atomically."""
    ds.validate()
    data = np.ascontiguousarray(ds.data, dtype="<f8")
    labels = np.asarray(ds.labels)
    if len(labels) and labels.max() >= 2**32:
        raise ValueError("labels exceed u32 range")
    class_map = json.dumps(
        {str(k): v for k, v in ds.class_names.items()},
        sort_keys=True, separators=(",", ":"),
    ).encode("utf-8")
    header = MAGIC + struct.pack("<QQQ", ds.m, ds.n, len(class_map))
    payload = header + data.tobytes() + labels.astype("<u4").tobytes() + class_map
    _atomic_write_bytes(path, payload)


def load_matrix(path: str | Path) -> DatasetMatrix:
    """Read a matrix container; bit-exact inverse of save_matrix."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 24:
        raise TruncatedFileError("%s: too short for a container header" % path)
    if raw[: len(MAGIC)] != MAGIC:
        raise MagicNumberError(
            "%s: bad magic %r (expected %r)" % (path, raw[: len(MAGIC)], MAGIC)
        )
    m, n, map_len = struct.unpack_from("<QQQ", raw, len(MAGIC))
    offset = len(MAGIC) + 24
    expected = offset + m * n * 8 + m * 4 + map_len
    if len(raw) < expected:
        raise TruncatedFileError(
            "%s: %d bytes but header promises %d" % (path, len(raw), expected)
        )
    data = np.frombuffer(raw, dtype="<f8", count=m * n, offset=offset).reshape(m, n)
    offset += m * n * 8
    labels = np.frombuffer(raw, dtype="<u4", count=m, offset=offset).astype(np.int64)
    offset += m * 4
    try:
        name_map = json.loads(raw[offset : offset + map_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MatrixFormatError("%s: bad class map (%s)" % (path, exc))
    ds = DatasetMatrix(
        data=data.copy(),
        labels=labels,
        class_names={int(k): str(v) for k, v in name_map.items()},
    )
    ds.validate()
    return ds
