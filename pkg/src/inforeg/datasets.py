"""Labeled and unlabeled point sets plus their CSV format.

CSV layout: header ``x1,...,xd,y``; labeled rows carry ``-1`` or ``1`` in the
``y`` column, unlabeled rows leave it empty.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from .errors import DimensionMismatchError, ReportWriteError
from .validation import FloatArray, check_nonempty, validate_labels

logger = logging.getLogger(__name__)


def _readonly(arr: FloatArray) -> FloatArray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Points ``x`` (n × d) with labels ``y`` in {-1, +1}."""

    x: FloatArray
    y: FloatArray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"x must be an (n, d) array, got shape {x.shape}")
        y = np.asarray(self.y, dtype=float).ravel()
        if y.shape[0] != x.shape[0]:
            raise ValueError(f"{x.shape[0]} points but {y.shape[0]} labels")
        if not validate_labels(y):
            raise ValueError("labels must be -1 or +1")
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "y", _readonly(y))

    @classmethod
    def from_arrays(cls, x: ArrayLike, y: ArrayLike) -> LabeledDataset:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls(arr, np.asarray(y, dtype=float))

    @property
    def dim(self) -> int:
        return int(self.x.shape[1])

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def concat(self, other: LabeledDataset) -> LabeledDataset:
        if other.dim != self.dim:
            raise DimensionMismatchError(self.dim, other.dim, "labeled dataset")
        return LabeledDataset(np.vstack([self.x, other.x]), np.concatenate([self.y, other.y]))

    def with_flipped_labels(self) -> LabeledDataset:
        return LabeledDataset(self.x, -self.y)

    def require_nonempty(self) -> None:
        check_nonempty(self.y, "labeled dataset")


@dataclass(frozen=True, eq=False)
class UnlabeledDataset:
    """Points ``x`` (m × d) without labels."""

    x: FloatArray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise ValueError(f"x must be an (m, d) array, got shape {x.shape}")
        object.__setattr__(self, "x", _readonly(x))

    @property
    def dim(self) -> int:
        return int(self.x.shape[1])

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def require_nonempty(self) -> None:
        check_nonempty(self.x, "unlabeled dataset")

    def check_pairs_with(self, labeled: LabeledDataset) -> None:
        if len(self) and self.dim != labeled.dim:
            raise DimensionMismatchError(labeled.dim, self.dim, "unlabeled dataset")


def read_dataset_csv(path: Path) -> tuple[LabeledDataset | None, UnlabeledDataset | None]:
    """Read a dataset CSV into its labeled and unlabeled parts."""

    logger.info("Reading dataset from %s", path)
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.reader(fp)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path} is empty")
        header = [h.strip() for h in header]
        if not header or header[-1] != "y":
            raise ValueError(f"{path}: last column must be 'y', got header {header}")
        dim = len(header) - 1
        if dim < 1:
            raise ValueError(f"{path}: at least one feature column is required")

        labeled_x: list[list[float]] = []
        labels: list[float] = []
        unlabeled_x: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != dim + 1:
                raise DimensionMismatchError(dim + 1, len(row), f"{path}:{lineno} row")
            features = [float(cell) for cell in row[:dim]]
            label = row[dim].strip()
            if label:
                labeled_x.append(features)
                labels.append(float(label))
            else:
                unlabeled_x.append(features)

    labeled = (
        LabeledDataset(np.asarray(labeled_x).reshape(-1, dim), np.asarray(labels))
        if labels
        else None
    )
    unlabeled = (
        UnlabeledDataset(np.asarray(unlabeled_x).reshape(-1, dim)) if unlabeled_x else None
    )
    logger.debug(
        "Read %d labeled and %d unlabeled rows",
        len(labels),
        len(unlabeled_x),
    )
    return labeled, unlabeled


def _format(value: float) -> str:
    return repr(float(value))


def write_dataset_csv(
    path: Path,
    labeled: LabeledDataset | None = None,
    unlabeled: UnlabeledDataset | None = None,
) -> Path:
    """Write labeled rows followed by unlabeled rows in the dataset CSV format."""

    parts = [d for d in (labeled, unlabeled) if d is not None and len(d)]
    if not parts:
        raise ValueError("nothing to write: both datasets are empty")
    dim = parts[0].dim
    for part in parts:
        if part.dim != dim:
            raise DimensionMismatchError(dim, part.dim, "dataset")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow([f"x{i + 1}" for i in range(dim)] + ["y"])
            if labeled is not None:
                for row, label in zip(labeled.x, labeled.y):
                    writer.writerow([_format(v) for v in row] + [str(int(label))])
            if unlabeled is not None:
                for row in unlabeled.x:
                    writer.writerow([_format(v) for v in row] + [""])
    except OSError as exc:
        raise ReportWriteError(path, str(exc)) from exc
    logger.info("Wrote dataset to %s", path)
    return path


def _moon_points(labels: FloatArray, noise: float, rng: np.random.Generator) -> FloatArray:
    t = rng.uniform(0.0, np.pi, size=labels.shape[0])
    upper = np.column_stack([np.cos(t), np.sin(t)])
    lower = np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)])
    x = np.where((labels > 0)[:, None], upper, lower)
    return x + rng.normal(0.0, noise, size=x.shape)


def two_moons(
    n_labeled: int, n_unlabeled: int, noise: float = 0.1, seed: int = 0
) -> tuple[LabeledDataset, UnlabeledDataset]:
    """Two interleaved half circles; labeled points alternate between the classes."""

    if n_labeled < 2:
        raise ValueError(f"n_labeled must be >= 2, got {n_labeled}")
    labeled_seq, unlabeled_seq = np.random.SeedSequence(seed).spawn(2)
    labeled_rng = np.random.default_rng(labeled_seq)
    unlabeled_rng = np.random.default_rng(unlabeled_seq)

    y = np.where(np.arange(n_labeled) % 2 == 0, 1.0, -1.0)
    labeled = LabeledDataset(_moon_points(y, noise, labeled_rng), y)
    hidden = np.where(unlabeled_rng.random(n_unlabeled) < 0.5, 1.0, -1.0)
    unlabeled = UnlabeledDataset(_moon_points(hidden, noise, unlabeled_rng).reshape(-1, 2))
    return labeled, unlabeled


__all__ = [
    "LabeledDataset",
    "UnlabeledDataset",
    "read_dataset_csv",
    "two_moons",
    "write_dataset_csv",
]
