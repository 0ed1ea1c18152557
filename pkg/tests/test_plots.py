"""Figure rendering to files (headless backend)."""

import numpy as np
import pytest

from natafbeta.classify import fit, fit_multiclass
from natafbeta.data import SimulationSpec, simulate
from natafbeta.evaluate import CvReport
from natafbeta.plots import save_cv_figure, save_field_figure, save_trace_figure
from natafbeta.special import DomainError

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@pytest.fixture(scope="module")
def binary_model():
    _, data = simulate(SimulationSpec(n=60, seed=14))
    return fit(data), data


def png_ok(path):
    assert path.exists() and path.stat().st_size > 0
    with path.open("rb") as fh:
        return fh.read(8) == PNG_MAGIC


class TestFieldFigure:
    def test_writes_png(self, tmp_path, binary_model):
        model, data = binary_model
        out = tmp_path / "field.png"
        save_field_figure(model, out, low=0.0, high=10.0, data=data)
        assert png_ok(out)

    def test_without_rug(self, tmp_path, binary_model):
        model, _ = binary_model
        out = tmp_path / "bare.png"
        save_field_figure(model, out, low=0.0, high=10.0)
        assert png_ok(out)

    def test_rejects_multidimensional_model(self, tmp_path):
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 5, size=(30, 2))
        c = (x[:, 0] > 2.5).astype(int)
        model = fit((x, c))
        with pytest.raises(DomainError):
            save_field_figure(model, tmp_path / "no.png", low=0.0, high=5.0)


class TestTraceFigure:
    def test_single_model(self, tmp_path, binary_model):
        model, _ = binary_model
        out = tmp_path / "trace.png"
        save_trace_figure([model], out)
        assert png_ok(out)

    def test_multiclass_traces_on_one_axis(self, tmp_path):
        rng = np.random.default_rng(3)
        x = np.concatenate([rng.normal(c, 0.5, size=15) for c in (0.0, 5.0, 10.0)])[:, None]
        models = fit_multiclass((x, np.repeat([0, 1, 2], 15)))
        out = tmp_path / "traces.png"
        save_trace_figure(models, out)
        assert png_ok(out)


class TestCvFigure:
    def test_report_bars(self, tmp_path):
        report = CvReport(
            per_fold=[(0.9, 0.85), (1.0, 0.95), (0.8, 0.75)],
            mean_ccr=0.9, std_ccr=0.1, mean_pcc=0.85, std_pcc=0.1,
            fold_seed=1, dataset_name="toy", k=3,
        )
        out = tmp_path / "cv.png"
        save_cv_figure(report, out)
        assert png_ok(out)
