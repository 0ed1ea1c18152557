"""Command-line front end.

Subcommands cover the full workflow: simulate a labelled 1-D dataset,
fit a model, predict on new points, run k-fold cross-validation, export
a predictive grid, and render report figures.  All randomness flows from
the --seed flag, so a fixed seed and fixed inputs give byte-identical
output files.  Diagnostics go to stderr; data goes to files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classify import BinaryModel, FitConfig, fit, fit_multiclass, load_model, predict, predict_multiclass
from .data import (
    SimulationSpec,
    impute_means,
    load_csv,
    load_points,
    save_csv,
    simulate,
    simulation_sidecar,
)
from .evaluate import cross_validate, write_report_csv, write_report_json
from .field import credible_band

__all__ = ["main", "build_parser"]


def _add_fit_flags(sub):
    sub.add_argument("--max-iter", type=int, default=100, help="optimizer iteration cap")
    sub.add_argument("--rel-tol", type=float, default=1e-3, help="relative stopping tolerance")
    sub.add_argument(
        "--wall-clock", type=float, default=7200.0, help="optimizer time budget in seconds"
    )


def _add_io_flags(sub):
    sub.add_argument("--label-column", type=int, default=-1, help="index of the class column")
    sub.add_argument("--missing-token", default="?", help="token marking a missing cell")


def _fit_config(args):
    return FitConfig(
        rel_tol=args.rel_tol, max_iter=args.max_iter, wall_clock_limit=args.wall_clock
    )


def _load_dataset(args):
    ds = load_csv(args.input, label_column=args.label_column, missing_token=args.missing_token)
    return impute_means(ds)


def _parse_levels(text):
    levels = [float(t) for t in text.split(",") if t.strip()]
    if not levels:
        raise ValueError("no quantile levels given")
    return levels


def _write_json(tree, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree, fh, indent=2)
        fh.write("\n")


def cmd_simulate(args):
    spec = SimulationSpec(n=args.n, seed=args.seed, grid_size=args.grid)
    p_true, data = simulate(spec)
    save_csv(data, args.output)
    _write_json(simulation_sidecar(spec, p_true), str(args.output) + ".json")
    print(f"wrote {args.output} ({len(data)} rows) and sidecar", file=sys.stderr)
    return 0


def cmd_fit(args):
    data = _load_dataset(args)
    config = _fit_config(args)
    if data.n_classes == 2:
        model = fit(data, config)
    else:
        model = fit_multiclass(data, config)
    from .classify import save_model

    save_model(model, args.output)
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def cmd_predict(args):
    model = load_model(args.model)
    points = load_points(args.input)
    dims = model.x_dim if isinstance(model, BinaryModel) else model[0].x_dim
    header_x = [f"x{j + 1}" for j in range(dims)]
    lines = []
    if isinstance(model, BinaryModel):
        result = predict(model, points)
        lines.append(",".join(header_x + ["prob_class1", "label"]))
        for row, p in zip(points, result.prob_class1):
            label = 1 if p > 0.5 else 0
            lines.append(",".join([f"{v:.6g}" for v in row] + [f"{p:.6g}", str(label)]))
    else:
        out = predict_multiclass(model, points)
        prob_cols = [f"prob_{k}" for k in out.class_ids]
        lines.append(",".join(header_x + prob_cols + ["label"]))
        for i, row in enumerate(points):
            cells = [f"{v:.6g}" for v in row]
            cells += [f"{p:.6g}" for p in out.probs[i]]
            cells.append(str(int(out.labels[i])))
            lines.append(",".join(cells))
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.output} ({len(points)} rows)", file=sys.stderr)
    return 0


def cmd_cross_validate(args):
    data = _load_dataset(args)
    name = args.name or Path(args.input).stem
    report = cross_validate(
        data,
        k=args.k,
        seed=args.seed,
        config=_fit_config(args),
        stratify=args.stratify,
        pcc_mode=args.pcc_mode,
        name=name,
    )
    write_report_json(report, args.output)
    write_report_csv(report, str(args.output) + ".csv")
    print(
        f"{name}: mean CCR {100 * report.mean_ccr:.1f}, mean PCC {100 * report.mean_pcc:.1f} "
        f"over {len(report.per_fold)} folds",
        file=sys.stderr,
    )
    return 0


def _field_grid_lines(model, low, high, grid, levels):
    if not isinstance(model, BinaryModel):
        raise ValueError("field export requires a binary model")
    if model.x_dim != 1:
        raise ValueError("field export requires a model over one attribute")
    pts = model.training_points[:, 0]
    lo = float(pts.min() if low is None else low)
    hi = float(pts.max() if high is None else high)
    xs = np.linspace(lo, hi, int(grid))
    result = predict(model, xs[:, None])
    bands = credible_band(result.field, levels)
    header = ["x", "a_post", "b_post", "predictive"] + [f"q_{q:g}" for q in levels]
    lines = [",".join(header)]
    for j, x in enumerate(xs):
        cells = [
            f"{x:.6g}",
            f"{result.field.a[j]:.6g}",
            f"{result.field.b[j]:.6g}",
            f"{result.prob_class1[j]:.6g}",
        ]
        cells += [f"{bands[i, j]:.6g}" for i in range(len(levels))]
        lines.append(",".join(cells))
    return lines


def cmd_export_field(args):
    model = load_model(args.model)
    levels = _parse_levels(args.levels)
    lines = _field_grid_lines(model, args.low, args.high, args.grid, levels)
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.output} ({len(lines) - 1} rows)", file=sys.stderr)
    return 0


def cmd_report(args):
    from . import plots

    model = load_model(args.model)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    levels = _parse_levels(args.levels)
    models = model if isinstance(model, list) else [model]
    written = []

    data = None
    if args.input:
        data = impute_means(
            load_csv(args.input, label_column=args.label_column, missing_token=args.missing_token)
        )
    if isinstance(model, BinaryModel) and model.x_dim == 1:
        lines = _field_grid_lines(model, args.low, args.high, args.grid, levels)
        field_csv = out_dir / "field.csv"
        field_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(field_csv)
        written.append(
            plots.save_field_figure(
                model,
                out_dir / "field.png",
                low=args.low,
                high=args.high,
                grid=args.grid,
                levels=levels,
                data=data,
            )
        )
    written.append(plots.save_trace_figure(models, out_dir / "trace.png"))
    if args.cv_report:
        from .evaluate import CvReport

        tree = json.loads(Path(args.cv_report).read_text(encoding="utf-8"))
        report = CvReport(
            per_fold=[(d["ccr"], d["pcc"]) for d in tree["per_fold"]],
            mean_ccr=tree["mean_ccr"],
            std_ccr=tree["std_ccr"],
            mean_pcc=tree["mean_pcc"],
            std_pcc=tree["std_pcc"],
            fold_seed=tree["fold_seed"],
            dataset_name=tree["dataset"],
            k=tree["k"],
            pcc_mode=tree.get("pcc_mode", "geometric"),
            failures=[(d["fold"], d["reason"]) for d in tree.get("failures", [])],
        )
        written.append(plots.save_cv_figure(report, out_dir / "cv.png"))
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="natafbeta",
        description="Random-field classifier with Beta class-probability marginals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a labelled 1-D dataset from the model prior")
    p.add_argument("--n", type=int, required=True, help="number of observations")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=int, default=101, help="true-curve grid resolution")
    p.add_argument("--output", required=True, help="dataset CSV path (sidecar JSON added)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit length scales and save the model")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="model JSON path")
    _add_io_flags(p)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="class probabilities for query points")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="CSV of bare attribute vectors")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cross-validate", help="k-fold benchmark with CCR and PCC")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="report JSON path (CSV row added)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--stratify", action="store_true", help="per-class fold assignment")
    p.add_argument("--pcc-mode", choices=("geometric", "arithmetic"), default="geometric")
    p.add_argument("--name", default=None, help="dataset name for the report")
    _add_io_flags(p)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_cross_validate)

    p = sub.add_parser("export-field", help="plot-ready predictive grid for a 1-D model")
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--grid", type=int, default=200, help="number of grid points")
    p.add_argument("--levels", default="0.05,0.5,0.95", help="comma-separated quantiles")
    p.add_argument("--low", type=float, default=None, help="grid lower bound")
    p.add_argument("--high", type=float, default=None, help="grid upper bound")
    p.set_defaults(func=cmd_export_field)

    p = sub.add_parser("report", help="render figures and grids for a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--input", default=None, help="training CSV for the observation rug")
    p.add_argument("--cv-report", default=None, help="report JSON to chart per-fold bars")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--levels", default="0.05,0.5,0.95")
    p.add_argument("--low", type=float, default=None)
    p.add_argument("--high", type=float, default=None)
    _add_io_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
