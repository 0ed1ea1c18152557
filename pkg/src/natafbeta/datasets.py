"""Manifests and loaders for the six benchmark datasets.

Raw files are never bundled; each manifest records where the file comes
from, its schema, and the preprocessing it needs (columns to drop,
delimiter, label position).  ``fetch`` downloads a file when the network
allows it, and ``load_benchmark`` parses a local copy into a Dataset.
"""

from __future__ import annotations

import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .data import _split_rows, dataset_from_rows, impute_means

__all__ = ["DatasetManifest", "MANIFESTS", "fetch", "load_benchmark"]

_UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


@dataclass(frozen=True)
class DatasetManifest:
    """Schema and provenance of one benchmark file."""

    name: str
    filename: str
    urls: tuple
    n_rows: int
    n_attributes: int
    n_classes: int
    label_column: int = -1
    drop_columns: tuple = ()
    delimiter: str | None = ","
    missing_token: str = "?"
    notes: str = ""


MANIFESTS = {
    "iris": DatasetManifest(
        name="iris",
        filename="iris.data",
        urls=(f"{_UCI}/iris/iris.data",),
        n_rows=150,
        n_attributes=4,
        n_classes=3,
    ),
    "pima": DatasetManifest(
        name="pima",
        filename="pima-indians-diabetes.csv",
        urls=(
            "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.csv",
        ),
        n_rows=768,
        n_attributes=8,
        n_classes=2,
        notes="withdrawn from the original repository; fetched from a public mirror",
    ),
    "breast-cancer": DatasetManifest(
        name="breast-cancer",
        filename="breast-cancer-wisconsin.data",
        urls=(f"{_UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",),
        n_rows=699,
        n_attributes=9,
        n_classes=2,
        drop_columns=(0,),
        notes="column 0 is a sample id; 16 rows have a missing cell",
    ),
    "ionosphere": DatasetManifest(
        name="ionosphere",
        filename="ionosphere.data",
        urls=(f"{_UCI}/ionosphere/ionosphere.data",),
        n_rows=351,
        n_attributes=34,
        n_classes=2,
    ),
    "glass": DatasetManifest(
        name="glass",
        filename="glass.data",
        urls=(f"{_UCI}/glass/glass.data",),
        n_rows=214,
        n_attributes=9,
        n_classes=6,
        drop_columns=(0,),
        notes="column 0 is a row id; class 4 has no members in the file",
    ),
    "ecoli": DatasetManifest(
        name="ecoli",
        filename="ecoli.data",
        urls=(f"{_UCI}/ecoli/ecoli.data",),
        n_rows=336,
        n_attributes=7,
        n_classes=8,
        drop_columns=(0,),
        delimiter=None,
        notes="whitespace delimited; column 0 is a sequence name",
    ),
}


def fetch(name, data_dir="data", timeout=60):
    """Download one benchmark file into ``data_dir``; returns its path.

    Tries each manifest URL in turn.  Needs outbound network access;
    environments without it must place the file there by hand.
    """
    manifest = MANIFESTS[name]
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    target = data_dir / manifest.filename
    if target.exists():
        return target
    errors = []
    for url in manifest.urls:
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                target.write_bytes(resp.read())
            return target
        except OSError as exc:
            errors.append(f"{url}: {exc}")
    raise OSError(f"could not fetch {name!r}: " + "; ".join(errors))


def load_benchmark(name, data_dir="data", impute=True):
    """Parse a locally present benchmark file per its manifest.

    Drops id columns, handles the manifest delimiter and missing token,
    and imputes missing cells with column means unless ``impute`` is off.
    """
    manifest = MANIFESTS[name]
    path = Path(data_dir) / manifest.filename
    if not path.exists():
        raise FileNotFoundError(
            f"{path} not found; run the fetch script or place the file there "
            f"(source: {manifest.urls[0]})"
        )
    rows = _split_rows(path.read_text(encoding="utf-8"), manifest.delimiter)
    if manifest.drop_columns:
        drop = set(manifest.drop_columns)
        rows = [[cell for j, cell in enumerate(row) if j not in drop] for row in rows]
    ds = dataset_from_rows(
        rows,
        label_column=manifest.label_column,
        missing_token=manifest.missing_token,
        provenance=str(path),
    )
    expected = (manifest.n_rows, manifest.n_attributes)
    if (len(ds), ds.x.shape[1]) != expected:
        raise ValueError(
            f"{path}: parsed shape {(len(ds), ds.x.shape[1])}, manifest says {expected}"
        )
    return impute_means(ds) if impute else ds
