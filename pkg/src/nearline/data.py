"""Dataset loading, validation, centering, and repeatable train/test splits."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

CENTERING_TOL = 1e-9


class DataFormatError(ValueError):
    """A file failed to parse; the message carries the row/column location."""


@dataclass(frozen=True)
class Dataset:
    """An n x d feature matrix with one integer class label per row.

    ``centered`` records whether the column means have been subtracted;
    ``mean_vector`` holds the subtracted mean in that case.  Instances are
    immutable (the arrays are marked read-only), so they are safe to share
    across threads.
    """

    features: np.ndarray
    labels: np.ndarray
    centered: bool = False
    mean_vector: np.ndarray | None = None

    def __post_init__(self):
        feats = np.array(self.features, dtype=float)
        labs = np.array(self.labels)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {feats.shape}")
        n, d = feats.shape
        if n < 2:
            raise ValueError(f"need at least 2 samples, got {n}")
        if d < 1:
            raise ValueError("need at least 1 feature dimension")
        if not np.isfinite(feats).all():
            bad = np.argwhere(~np.isfinite(feats))[0]
            raise ValueError(f"non-finite feature at row {bad[0]}, column {bad[1]}")
        if labs.shape != (n,):
            raise ValueError(f"labels must have exactly {n} entries, got shape {labs.shape}")
        if not np.issubdtype(labs.dtype, np.integer):
            if not np.all(labs == labs.astype(int)):
                raise ValueError("labels must be integers")
            labs = labs.astype(int)
        labs = labs.astype(np.int64)
        if (labs < 0).any():
            raise ValueError("class labels must be nonnegative")
        mean = self.mean_vector
        if self.centered:
            col_means = feats.mean(axis=0)
            if np.abs(col_means).max() > CENTERING_TOL:
                raise ValueError(
                    f"centered dataset has column mean {np.abs(col_means).max():.3e} > {CENTERING_TOL}"
                )
            if mean is None:
                mean = np.zeros(d)
            mean = np.array(mean, dtype=float)
            if mean.shape != (d,):
                raise ValueError(f"mean_vector must have length {d}")
            mean.setflags(write=False)
        elif mean is not None:
            raise ValueError("mean_vector is only meaningful on centered datasets")
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "mean_vector", mean)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        """Row subset as a fresh uncentered dataset (centering state is
        per-dataset and does not survive subsetting)."""
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.features[idx], self.labels[idx])


@dataclass(frozen=True)
class SplitSpec:
    """Parameters of the repeated random train/test split protocol."""

    train_fraction: float
    seed: int
    repeats: int = 10
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.repeats < 1:
            raise ValueError("repeats must be a positive integer")


def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataFormatError(f"non-numeric cell at row {row}, column {col}: {cell!r}") from None
    if not np.isfinite(value):
        raise DataFormatError(f"non-finite value at row {row}, column {col}: {cell!r}")
    return value


def _is_numeric(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column="last") -> Dataset:
    """Load a comma-separated dataset, one sample per row.

    An optional header row is auto-detected: if any cell of the first row
    fails to parse as a number, it is treated as column names.
    ``label_column`` selects the class-id column by name (requires a header),
    integer index, or the string "last".
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.rstrip("\n").rstrip("\r") for line in fh]
    rows = [line.split(",") for line in raw if line.strip() != ""]
    if not rows:
        raise DataFormatError(f"{path}: file contains no rows")

    header = None
    if any(not _is_numeric(cell) for cell in rows[0]):
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need at least 2 data rows, got {len(rows)}")

    width = len(rows[0])
    if header is not None and len(header) != width:
        raise DataFormatError(f"{path}: header has {len(header)} columns, data rows have {width}")

    if label_column == "last":
        label_idx = width - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else width + label_column
    else:
        if header is None:
            raise DataFormatError(
                f"{path}: label column {label_column!r} given by name but the file has no header"
            )
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DataFormatError(f"{path}: no column named {label_column!r} in header") from None
    if not 0 <= label_idx < width:
        raise DataFormatError(f"{path}: label column index {label_idx} out of range for width {width}")

    features = np.empty((len(rows), width - 1), dtype=float)
    labels = np.empty(len(rows), dtype=np.int64)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataFormatError(f"{path}: ragged row {r}: expected {width} cells, got {len(row)}")
        feat_col = 0
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == label_idx:
                try:
                    labels[r] = int(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: label at row {r}, column {c} is not an integer: {cell!r}"
                    ) from None
                if labels[r] < 0:
                    raise DataFormatError(f"{path}: negative label at row {r}, column {c}")
            else:
                features[r, feat_col] = _parse_float(cell, r, c)
                feat_col += 1
    return Dataset(features, labels)


def save_csv(dataset: Dataset, path) -> None:
    """Write features plus a final label column, floats at full round-trip
    precision (reloading reproduces the values bit for bit)."""
    path = Path(path)
    lines = []
    for row, label in zip(dataset.features, dataset.labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{int(label)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_pgm_tokens(data: bytes, path, count: int, offset: int) -> list[int]:
    # ASCII sample data: whitespace-separated integers after the header.
    text = data[offset:].split()
    if len(text) < count:
        raise DataFormatError(f"{path}: expected {count} ASCII samples, found {len(text)}")
    try:
        return [int(tok) for tok in text[:count]]
    except ValueError as exc:
        raise DataFormatError(f"{path}: bad ASCII sample: {exc}") from None


def load_pgm(path) -> tuple[np.ndarray, int]:
    """Read a binary (P5) or ASCII (P2) PGM image.

    Returns the pixel grid as a (height, width) integer array together with
    the file's maxval.  Header comments (``#`` to end of line) are skipped.
    """
    path = Path(path)
    data = path.read_bytes()
    # Header: magic, width, height, maxval, separated by whitespace/comments.
    pos = 0
    fields = []
    while len(fields) < 4:
        if pos >= len(data):
            raise DataFormatError(f"{path}: corrupt PGM header: truncated")
        ch = data[pos : pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace() and data[end : end + 1] != b"#":
                end += 1
            fields.append(data[pos:end])
            pos = end
    magic = fields[0].decode("ascii", errors="replace")
    if magic not in ("P2", "P5"):
        raise DataFormatError(f"{path}: corrupt PGM header: bad magic {magic!r}")
    try:
        width, height, maxval = (int(f) for f in fields[1:4])
    except ValueError:
        raise DataFormatError(f"{path}: corrupt PGM header: non-numeric dimensions") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise DataFormatError(
            f"{path}: corrupt PGM header: width={width} height={height} maxval={maxval}"
        )
    count = width * height
    if magic == "P2":
        values = _read_pgm_tokens(data, path, count, pos)
        pixels = np.array(values, dtype=np.int64)
    else:
        pos += 1  # single whitespace byte after maxval
        bytes_per = 1 if maxval < 256 else 2
        need = count * bytes_per
        raster = data[pos : pos + need]
        if len(raster) < need:
            raise DataFormatError(f"{path}: expected {need} raster bytes, found {len(raster)}")
        dtype = np.uint8 if bytes_per == 1 else np.dtype(">u2")
        pixels = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    if pixels.max(initial=0) > maxval:
        raise DataFormatError(f"{path}: sample value exceeds maxval {maxval}")
    return pixels.reshape(height, width), maxval


def load_pgm_dir(path, layout: str = "person-per-subdirectory") -> Dataset:
    """Load a directory of per-class subdirectories of PGM images.

    Class ids follow the lexicographic order of the subdirectory names; each
    image is flattened row-major and scaled by its maxval into [0, 1].  All
    images must share one width x height.
    """
    if layout != "person-per-subdirectory":
        raise ValueError(f"unsupported layout {layout!r}")
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"no such directory: {root}")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DataFormatError(f"{root}: no class subdirectories found")

    vectors, labels = [], []
    ref_shape, ref_file = None, None
    for class_id, class_dir in enumerate(class_dirs):
        files = sorted(p for p in class_dir.iterdir() if p.suffix.lower() == ".pgm")
        if not files:
            raise DataFormatError(f"{class_dir}: empty class directory (no .pgm files)")
        for f in files:
            grid, maxval = load_pgm(f)
            if ref_shape is None:
                ref_shape, ref_file = grid.shape, f
            elif grid.shape != ref_shape:
                raise DataFormatError(
                    f"image dimension mismatch: {ref_file} is {ref_shape[1]}x{ref_shape[0]} "
                    f"but {f} is {grid.shape[1]}x{grid.shape[0]}"
                )
            vectors.append(grid.reshape(-1).astype(float) / maxval)
            labels.append(class_id)
    return Dataset(np.vstack(vectors), np.array(labels))


def center(dataset: Dataset) -> Dataset:
    """Subtract the column mean, recording it in ``mean_vector``."""
    if dataset.centered:
        raise ValueError("dataset is already centered")
    mean = dataset.features.mean(axis=0)
    return Dataset(dataset.features - mean, dataset.labels, centered=True, mean_vector=mean)


def _train_counts(class_sizes: np.ndarray, train_fraction: float) -> np.ndarray:
    """Per-class train counts: floor quotas plus largest-remainder top-up.

    The total is fixed to round-half-up of ``train_fraction * n`` so the
    global fraction is honored exactly; remainder seats go to the classes
    with the largest fractional quota, ties to the smaller class id.
    """
    n = int(class_sizes.sum())
    total = int(np.floor(train_fraction * n + 0.5))
    quotas = train_fraction * class_sizes
    counts = np.floor(quotas).astype(int)
    remainder = total - int(counts.sum())
    if remainder > 0:
        frac = quotas - np.floor(quotas)
        order = np.lexsort((np.arange(len(class_sizes)), -frac))
        pos = 0
        while remainder > 0:
            c = order[pos % len(order)]
            if counts[c] < class_sizes[c]:
                counts[c] += 1
                remainder -= 1
            pos += 1
            if pos > 2 * len(order) and remainder > 0:
                raise ValueError("train_fraction leaves no room for a valid split")
    return counts


def split_indices(labels: np.ndarray, spec: SplitSpec, repeat_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, exhaustive (train, test) index arrays for one repeat.

    Deterministic in (spec.seed, repeat_index): the generator is seeded with
    the pair, so every repeat has its own reproducible stream.
    """
    if not 0 <= repeat_index < spec.repeats:
        raise ValueError(f"repeat_index must be in [0, {spec.repeats}), got {repeat_index}")
    labels = np.asarray(labels)
    n = labels.shape[0]
    rng = np.random.default_rng([spec.seed, repeat_index])

    if spec.stratified:
        classes = np.unique(labels)
        sizes = np.array([(labels == c).sum() for c in classes])
        counts = _train_counts(sizes, spec.train_fraction)
        if (counts < 1).any():
            small = classes[np.argmin(counts)]
            raise ValueError(
                f"class {small} too small for stratified split at train_fraction {spec.train_fraction}"
            )
        train_parts = []
        for c, count in zip(classes, counts):
            members = np.flatnonzero(labels == c)
            perm = rng.permutation(members.size)
            train_parts.append(members[perm[:count]])
        train = np.sort(np.concatenate(train_parts))
    else:
        total = int(np.floor(spec.train_fraction * n + 0.5))
        if total < 1:
            raise ValueError("train_fraction yields an empty training set")
        perm = rng.permutation(n)
        train = np.sort(perm[:total])

    mask = np.zeros(n, dtype=bool)
    mask[train] = True
    test = np.flatnonzero(~mask)
    if test.size == 0:
        raise ValueError("train_fraction leaves no test samples")
    return train, test


def random_split(dataset: Dataset, spec: SplitSpec, repeat_index: int) -> tuple[Dataset, Dataset]:
    """One repeat of the random split as (train, test) datasets."""
    train_idx, test_idx = split_indices(dataset.labels, spec, repeat_index)
    return dataset.subset(train_idx), dataset.subset(test_idx)
