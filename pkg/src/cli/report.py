"""Console tables, results CSV frames and figures for each command.

CSV schemas (column order is fixed; version in SCHEMA_VERSION):

    baseline.csv        rank, spec, architecture, parameters, r2_mean, r2_sd, repeats
    baseline_folds.csv  spec, repeat, fold, pitcher_id, true_mean, predicted_mean,
                        epochs_run, train_r2, stopped_early
    grouping.csv        candidate, intermediate, expert, n_intermediate, n_expert,
                        d_ie, sigma_i, sigma_e, eta, skipped
    analysis1.csv       pitcher_id, level, group, true_mean, predicted_mean, mae, signed_error
    analysis2.csv       region, window, n_frames, r2_mean, r2_sd, repeats
"""

from typing import Any, Optional

import pandas as pd
from tabulate import tabulate

from src.analysis.ablation import AblationResult
from src.analysis.expertise import EXPERT, INTERMEDIATE, Analysis1Result
from src.cli.figures import bars_svg, lines_svg, scatter_svg
from src.harness.evaluation import BaselineSelection, EvaluationResult, WithinIndividualResult

SCHEMA_VERSION = 1

ANALYSIS1_COLUMNS = [
    "pitcher_id",
    "level",
    "group",
    "true_mean",
    "predicted_mean",
    "mae",
    "signed_error",
]


def table(frame: pd.DataFrame, floatfmt: str = ".4f") -> str:
    return tabulate(frame, headers="keys", tablefmt="github", floatfmt=floatfmt, showindex=False)


def baseline_summary(
    selection: BaselineSelection, within: Optional[WithinIndividualResult]
) -> dict[str, Any]:
    best = selection.best
    summary: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "rows": [r.model_dump(mode="json") for r in selection.rows],
        "best": best.spec.model_dump(mode="json"),
        "best_label": best.spec.label,
        "cross_individual_r2": best.r2_mean,
        "within_individual": within.model_dump(mode="json") if within else None,
    }
    return summary


def baseline_text(
    selection: BaselineSelection, within: Optional[WithinIndividualResult]
) -> str:
    lines = ["Baseline model selection (LOSOCV)", table(selection.to_frame())]
    best = selection.best
    lines.append(f"\nSelected baseline: {best.spec.label}")
    comparison = [["cross-individual", best.r2_mean]]
    if within is not None:
        comparison.insert(0, ["within-individual (pitch level)", within.r2])
        comparison.insert(1, ["within-individual (pitcher mean)", within.pitcher_mean_r2])
    lines.append(
        tabulate(comparison, headers=["evaluation", "R^2"], tablefmt="github", floatfmt=".4f")
    )
    return "\n".join(lines)


def folds_frame(evaluations: list[EvaluationResult]) -> pd.DataFrame:
    return pd.concat([e.to_frame() for e in evaluations], ignore_index=True)


def analysis1_frame(result: Analysis1Result) -> pd.DataFrame:
    rows = [p.model_dump(mode="json") for p in result.errors.pitchers]
    return pd.DataFrame(rows, columns=ANALYSIS1_COLUMNS)


def analysis1_summary(result: Analysis1Result) -> dict[str, Any]:
    best = result.grouping.best
    return {
        "schema_version": SCHEMA_VERSION,
        "grouping": best.model_dump(mode="json"),
        "groups": [g.model_dump(mode="json") for g in result.errors.groups],
        "absolute_test": result.absolute_test.model_dump(mode="json")
        if result.absolute_test
        else None,
        "signed_test": result.signed_test.model_dump(mode="json") if result.signed_test else None,
        "test_failures": result.test_failures,
        "calibration_slope": result.calibration_slope,
    }


def analysis1_text(result: Analysis1Result) -> str:
    lines = ["Expertise grouping candidates", table(result.grouping.to_frame())]
    rows = [
        [g.group, g.absolute.sample_size, g.absolute.mean, g.absolute.std_dev]
        + [g.signed.mean, g.signed.std_dev]
        for g in result.errors.groups
    ]
    lines.append("\nPrediction error by group (mph)")
    lines.append(
        tabulate(
            rows,
            headers=["group", "n", "MAE mean", "MAE SD", "signed mean", "signed SD"],
            tablefmt="github",
            floatfmt=".3f",
        )
    )
    for name, test in (("absolute", result.absolute_test), ("signed", result.signed_test)):
        if test is None:
            lines.append(f"{name}-error t-test: unavailable ({result.test_failures.get(name)})")
        else:
            lines.append(
                f"{name}-error t-test: t({test.degrees_of_freedom}) = {test.t_statistic:.3f}, "
                f"p = {test.p_value:.4f}, d = {test.cohens_d:.3f} "
                f"({test.effect_size_interpretation})"
            )
    return "\n".join(lines)


def analysis2_summary(result: AblationResult) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "spec": result.spec.model_dump(mode="json"),
        "cells": [c.model_dump(mode="json") for c in result.cells],
        "summary": [s.model_dump(mode="json") for s in result.summary],
        "control": result.control.model_dump(mode="json") if result.control else None,
        "emergence": {r.value: w for r, w in result.emergence.items()},
        "emergence_threshold": result.emergence_threshold,
    }


def analysis2_text(result: AblationResult) -> str:
    frame = result.to_frame()
    wide = frame.pivot(index="window", columns="region", values="r2_mean").reset_index()
    lines = ["Mean cross-individual R^2 by region and cumulative window", table(wide, ".3f")]
    emergence = [[r.value, w if w is not None else "-"] for r, w in result.emergence.items()]
    lines.append(
        tabulate(
            emergence,
            headers=["region", f"first window with R^2 > {result.emergence_threshold:g}"],
            tablefmt="github",
        )
    )
    if result.control is not None:
        lines.append(
            f"Full-input control: R^2 = {result.control.r2_mean:.4f} +/- {result.control.r2_sd:.4f}"
        )
    return "\n".join(lines)


def pitcher_means_figure(evaluation: dict[str, Any], levels: dict[str, str]) -> str:
    """Per-pitcher true vs predicted mean speed, coloured by competitive level."""
    points = []
    for fold in evaluation["folds"]:
        pid = fold["test_pitcher_id"]
        true_mean = sum(fold["truths"]) / len(fold["truths"])
        predicted = sum(fold["predictions"]) / len(fold["predictions"])
        points.append((true_mean, predicted, levels.get(pid, "unknown"), pid))
    return scatter_svg(
        points,
        title=f"LOSOCV pitcher means (R^2 = {evaluation['r2']:.3f})",
        x_label="True ball speed (mph)",
        y_label="Predicted ball speed (mph)",
    )


def group_errors_figure(analysis1: dict[str, Any]) -> str:
    """Mean absolute and signed error per group with SD whiskers."""
    groups = {g["group"]: g for g in analysis1["groups"]}
    order = [INTERMEDIATE, EXPERT]
    kinds = ("absolute", "signed")
    means = [[groups[name][kind]["mean"] for name in order] for kind in kinds]
    sds = [[groups[name][kind]["std_dev"] for name in order] for kind in kinds]
    return bars_svg(
        ["absolute error", "signed error"],
        order,
        means,
        sds,
        title="Prediction error by expertise group",
        y_label="Error (mph)",
    )


def ablation_figure(analysis2: dict[str, Any]) -> str:
    """Mean R^2 per region over cumulative windows with SD bands."""
    series: dict[str, tuple[list[float], list[float]]] = {}
    windows: list[int] = []
    for row in analysis2["summary"]:
        mean, sd = series.setdefault(row["region"], ([], []))
        mean.append(row["r2_mean"])
        sd.append(row["r2_sd"])
        if row["window"] not in windows:
            windows.append(row["window"])
    return lines_svg(
        sorted(windows),
        series,
        title="Generalization by body region and time window",
        x_label="Cumulative window",
        y_label="Cross-individual R^2",
    )
