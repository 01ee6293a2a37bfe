"""The six pipeline commands.

Each command receives the resolved `RunConfig` and the run directory layout,
writes its run manifest before any result, and returns the files it wrote.
"""

import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

from src.analysis.ablation import run_ablation
from src.analysis.expertise import run_analysis1
from src.cli import report
from src.cli.settings import RunConfig
from src.common.errors import CorpusError, PitchBenchError, ReportError
from src.common.paths import RunLayout
from src.common.persistence import RunManifest, read_json, write_csv, write_json, write_text
from src.dataset.corpus import LoaderConfig, load_corpus, prepare_corpus, write_corpus
from src.dataset.models import PitcherRecord
from src.dataset.synthetic import synthesize_corpus, write_raw_corpus
from src.harness.evaluation import (
    EvaluationResult,
    evaluate_losocv,
    evaluate_within_individual,
    select_baseline,
)
from src.models.specs import ModelSpec, model_spec_adapter

logger = logging.getLogger(__name__)

Command = Callable[[RunConfig, RunLayout], list[Path]]


def resolve_corpus(config: RunConfig, layout: RunLayout) -> list[PitcherRecord]:
    """Records from --corpus, else the run's corpus, else a fresh synthetic one."""
    if config.corpus is not None:
        return load_corpus(config.corpus, LoaderConfig())
    if layout.corpus_manifest.exists():
        logger.info("Using corpus %s", layout.corpus_manifest)
        return load_corpus(layout.corpus_manifest, LoaderConfig())
    logger.info("No corpus given; synthesizing %d pitchers (seed %d)", config.pitchers, config.seed)
    records = synthesize_corpus(config.synth_config(), config.seed)
    write_corpus(records, layout.corpus)
    return records


def _levels(records: list[PitcherRecord]) -> dict[str, str]:
    return {r.id: r.level.value for r in records}


def cmd_synth(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Write a synthetic corpus: normalized into corpus/, raw captures into raw/."""
    if config.raw:
        return [write_raw_corpus(config.synth_config(), config.seed, layout.raw_corpus)]
    records = synthesize_corpus(config.synth_config(), config.seed)
    return [write_corpus(records, layout.corpus)]


def cmd_prep(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Prepare a raw (or normalized) corpus into the run's normalized corpus.

    Raises:
        CorpusError: no input manifest, or any pitch file failed (all listed).
    """
    if config.corpus is None:
        raise CorpusError("prep needs an input manifest (--corpus)")
    loaded = prepare_corpus(config.corpus, LoaderConfig())
    log = {
        "source": str(config.corpus),
        "pitches": {f: entry.model_dump(mode="json") for f, entry in sorted(loaded.logs.items())},
        "mirrored_pitchers": sorted(r.id for r in loaded.records if r.mirrored),
        "errors": dict(sorted(loaded.errors.items())),
    }
    write_json(layout.prep_log, log)
    if loaded.errors:
        listing = "; ".join(f"{f}: {m}" for f, m in sorted(loaded.errors.items()))
        raise CorpusError(
            f"{len(loaded.errors)} pitch file(s) failed: {listing}", files=sorted(loaded.errors)
        )
    manifest = write_corpus(loaded.records, layout.corpus)
    return [manifest, layout.prep_log]


def cmd_baseline(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Rank the model grid under LOSOCV and persist the chosen baseline."""
    records = resolve_corpus(config, layout)
    train_config = config.train_config()
    selection = select_baseline(config.model_grid(), records, train_config, config.workers)
    best = selection.best.spec
    within = evaluate_within_individual(best, records, train_config)
    evaluation = selection.evaluation_of(best)

    write_csv(layout.baseline_csv, selection.to_frame())
    write_csv(layout.baseline_folds_csv, report.folds_frame(selection.evaluations))
    write_json(layout.baseline_json, report.baseline_summary(selection, within))
    write_json(layout.baseline_spec, best.model_dump(mode="json"))
    write_json(
        layout.baseline_evaluation,
        {**evaluation.model_dump(mode="json"), "levels": _levels(records)},
    )
    print(report.baseline_text(selection, within))
    return [
        layout.baseline_csv,
        layout.baseline_folds_csv,
        layout.baseline_json,
        layout.baseline_spec,
        layout.baseline_evaluation,
    ]


def _baseline_spec(config: RunConfig, layout: RunLayout) -> ModelSpec:
    override = config.baseline_spec()
    if override is not None:
        return override
    if not layout.baseline_spec.exists():
        raise ReportError(
            "no baseline selected; run `baseline` first or pass --baseline",
            missing=[str(layout.baseline_spec)],
        )
    return model_spec_adapter.validate_python(read_json(layout.baseline_spec))


def _baseline_evaluation(
    config: RunConfig, layout: RunLayout, records: list[PitcherRecord]
) -> EvaluationResult:
    spec = _baseline_spec(config, layout)
    if layout.baseline_evaluation.exists():
        data = read_json(layout.baseline_evaluation)
        data.pop("levels", None)
        stored = EvaluationResult.model_validate(data)
        if stored.spec == spec:
            return stored
    logger.info("Evaluating %s for analysis 1", spec.label)
    return evaluate_losocv(spec, records, config.train_config(), workers=config.workers)


def cmd_analyze1(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Expertise grouping, per-group errors, t-tests and the error bar chart."""
    records = resolve_corpus(config, layout)
    evaluation = _baseline_evaluation(config, layout, records)
    result = run_analysis1(evaluation, records)
    summary = report.analysis1_summary(result)

    write_csv(layout.grouping_csv, result.grouping.to_frame())
    write_csv(layout.analysis1_csv, report.analysis1_frame(result))
    write_json(layout.analysis1_json, summary)
    write_text(layout.group_errors_svg, report.group_errors_figure(summary))
    print(report.analysis1_text(result))
    return [layout.grouping_csv, layout.analysis1_csv, layout.analysis1_json, layout.group_errors_svg]


def cmd_analyze2(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Region x window ablation of the baseline and the line chart."""
    records = resolve_corpus(config, layout)
    spec = _baseline_spec(config, layout)
    result = run_ablation(
        records, spec, config.train_config(), config.ablation_config(), config.workers
    )
    summary = report.analysis2_summary(result)

    write_csv(layout.analysis2_csv, result.to_frame())
    write_json(layout.analysis2_json, summary)
    write_text(layout.ablation_svg, report.ablation_figure(summary))
    print(report.analysis2_text(result))
    return [layout.analysis2_csv, layout.analysis2_json, layout.ablation_svg]


def cmd_report(config: RunConfig, layout: RunLayout) -> list[Path]:
    """Consolidate every command's output into report.json and the figures.

    Raises:
        ReportError: referenced artifacts are missing (all listed); whatever
            is present is still rendered.
    """
    expected = layout.expected_files()
    missing = [p for p in expected if not p.exists()]
    if len(missing) == len(expected):
        raise ReportError(
            f"nothing to report in {layout.run_dir}; expected {[p.name for p in expected]}",
            missing=[p.name for p in missing],
        )

    outputs: list[Path] = []
    consolidated: dict[str, Any] = {"schema_version": report.SCHEMA_VERSION}
    if layout.baseline_json.exists():
        consolidated["baseline"] = read_json(layout.baseline_json)
    if layout.baseline_evaluation.exists():
        evaluation = read_json(layout.baseline_evaluation)
        levels = evaluation.pop("levels", {})
        consolidated["scatter"] = [
            {
                "pitcher_id": f["test_pitcher_id"],
                "level": levels.get(f["test_pitcher_id"]),
                "true_mean": sum(f["truths"]) / len(f["truths"]),
                "predicted_mean": sum(f["predictions"]) / len(f["predictions"]),
            }
            for f in evaluation["folds"]
        ]
        write_text(layout.pitcher_means_svg, report.pitcher_means_figure(evaluation, levels))
        outputs.append(layout.pitcher_means_svg)
    if layout.analysis1_json.exists():
        analysis1 = read_json(layout.analysis1_json)
        consolidated["analysis1"] = analysis1
        write_text(layout.group_errors_svg, report.group_errors_figure(analysis1))
        outputs.append(layout.group_errors_svg)
    if layout.analysis2_json.exists():
        analysis2 = read_json(layout.analysis2_json)
        consolidated["analysis2"] = {k: v for k, v in analysis2.items() if k != "cells"}
        write_text(layout.ablation_svg, report.ablation_figure(analysis2))
        outputs.append(layout.ablation_svg)
    consolidated["missing"] = [p.name for p in missing]
    write_json(layout.report_json, consolidated)
    outputs.append(layout.report_json)

    if missing:
        raise ReportError(
            f"report incomplete; missing {[p.name for p in missing]}",
            missing=[p.name for p in missing],
        )
    return outputs


COMMANDS: dict[str, Command] = {
    "prep": cmd_prep,
    "synth": cmd_synth,
    "baseline": cmd_baseline,
    "analyze1": cmd_analyze1,
    "analyze2": cmd_analyze2,
    "report": cmd_report,
}


def run_command(name: str, config: RunConfig, layout: RunLayout) -> list[Path]:
    """Run one command between its manifest's start and finish records."""
    manifest = RunManifest(
        layout.manifest(name), name, config.model_dump(mode="json"), config.seed
    ).start()
    logger.info("Starting %s in %s", name, layout.run_dir)
    try:
        outputs = COMMANDS[name](config, layout)
    except PitchBenchError as e:
        manifest.finish([], error=e.to_dict())
        raise
    except Exception as e:
        manifest.finish([], error={"type": type(e).__name__, "message": str(e), "context": {}})
        raise
    manifest.finish(outputs)
    logger.info("Finished %s: %d file(s) written", name, len(outputs))
    return outputs
