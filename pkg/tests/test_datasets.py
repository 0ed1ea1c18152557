"""Benchmark manifests and the local-file loader.

No network: loader behavior is exercised on synthetic files generated to
each manifest's schema.
"""

import numpy as np
import pytest

from natafbeta.datasets import MANIFESTS, load_benchmark


def synthesize(manifest, directory, rng):
    """Write a schema-conforming fake raw file for a manifest."""
    n_raw_cols = manifest.n_attributes + 1 + len(manifest.drop_columns)
    label_col = manifest.label_column % n_raw_cols
    sep = "," if manifest.delimiter == "," else " "
    lines = []
    for i in range(manifest.n_rows):
        cells = []
        for j in range(n_raw_cols):
            if j == label_col:
                cells.append(f"c{i % manifest.n_classes}")
            elif j in manifest.drop_columns:
                cells.append(f"id{i}")
            else:
                cells.append(f"{rng.uniform(0, 5):.4f}")
        lines.append(sep.join(cells))
    path = directory / manifest.filename
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestManifests:
    def test_six_benchmarks_declared(self):
        assert sorted(MANIFESTS) == [
            "breast-cancer", "ecoli", "glass", "ionosphere", "iris", "pima",
        ]

    def test_schema_fields_sane(self):
        for m in MANIFESTS.values():
            assert m.urls and all(u.startswith("https://") for u in m.urls)
            assert m.n_rows > 0 and m.n_attributes > 0 and m.n_classes >= 2
            assert m.filename
            assert m.label_column == -1

    def test_known_shapes(self):
        assert (MANIFESTS["iris"].n_rows, MANIFESTS["iris"].n_attributes) == (150, 4)
        assert (MANIFESTS["pima"].n_rows, MANIFESTS["pima"].n_attributes) == (768, 8)
        assert MANIFESTS["breast-cancer"].drop_columns == (0,)
        assert MANIFESTS["ecoli"].delimiter is None


class TestLoadBenchmark:
    def test_loads_conforming_file(self, tmp_path):
        rng = np.random.default_rng(1)
        synthesize(MANIFESTS["iris"], tmp_path, rng)
        ds = load_benchmark("iris", data_dir=tmp_path)
        assert ds.x.shape == (150, 4)
        assert ds.n_classes == 3

    def test_drop_columns_and_whitespace(self, tmp_path):
        rng = np.random.default_rng(2)
        synthesize(MANIFESTS["ecoli"], tmp_path, rng)
        ds = load_benchmark("ecoli", data_dir=tmp_path)
        assert ds.x.shape == (336, 7)
        assert ds.n_classes == 8

    def test_missing_cells_imputed_by_default(self, tmp_path):
        rng = np.random.default_rng(3)
        m = MANIFESTS["breast-cancer"]
        path = synthesize(m, tmp_path, rng)
        lines = path.read_text().splitlines()
        cells = lines[0].split(",")
        cells[3] = m.missing_token
        lines[0] = ",".join(cells)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        ds = load_benchmark("breast-cancer", data_dir=tmp_path)
        assert not np.isnan(ds.x).any()
        raw = load_benchmark("breast-cancer", data_dir=tmp_path, impute=False)
        assert np.isnan(raw.x).sum() == 1

    def test_shape_mismatch_rejected(self, tmp_path):
        rng = np.random.default_rng(4)
        m = MANIFESTS["iris"]
        path = synthesize(m, tmp_path, rng)
        text = path.read_text().splitlines()
        path.write_text("\n".join(text[:100]) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="manifest says"):
            load_benchmark("iris", data_dir=tmp_path)

    def test_absent_file_points_at_fetch(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="fetch"):
            load_benchmark("glass", data_dir=tmp_path)

    def test_unknown_name(self, tmp_path):
        with pytest.raises(KeyError):
            load_benchmark("wine", data_dir=tmp_path)
