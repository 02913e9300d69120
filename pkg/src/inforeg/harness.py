"""Two-Gaussian benchmark: data generation, per-trial λ selection, aggregation.

Every random draw of trial ``t`` comes from ``SeedSequence([seed, t, tag])``
with one tag per purpose, so a trial's data and fits do not depend on which
other trials ran or in what order.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .config import get_settings
from .datasets import LabeledDataset, UnlabeledDataset, two_moons
from .errors import ExperimentAbortedError, NumericalError, ReportWriteError
from .logistic import error_rate
from .models import (
    ExperimentConfig,
    ExperimentReport,
    MethodSummary,
    TrialOutcome,
)
from .optimize import fit

logger = logging.getLogger(__name__)

gen_two_moons = two_moons


class Stream(IntEnum):
    LABELED = 0
    UNLABELED = 1
    TEST = 2
    VALIDATION = 3
    FIT = 4


def stream_rng(config: ExperimentConfig, trial: int, stream: Stream) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([config.seed, trial, int(stream)]))


def fit_seed(config: ExperimentConfig, trial: int) -> int:
    """Restart seed shared by every method and λ of one trial."""

    sequence = np.random.SeedSequence([config.seed, trial, int(Stream.FIT)])
    return int(sequence.generate_state(1)[0])


@dataclass(frozen=True)
class TrialData:
    labeled: LabeledDataset
    unlabeled: UnlabeledDataset
    validation: LabeledDataset
    test: LabeledDataset


def _draw(config: ExperimentConfig, n: int, rng: np.random.Generator) -> LabeledDataset:
    positive, negative = config.resolved_means()
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    centers = np.where((y > 0)[:, None], positive[None, :], negative[None, :])
    x = centers + rng.normal(0.0, math.sqrt(config.shared_covariance), size=(n, config.dim))
    return LabeledDataset(x, y)


def gen_two_gaussians(config: ExperimentConfig, trial_index: int) -> TrialData:
    """Labeled, unlabeled, validation and test sets for one trial.

    Labels are ±1 with equal probability and x | y ~ N(mean_y, σ²I). The
    labeled set is redrawn until it contains both classes.
    """

    labeled_rng = stream_rng(config, trial_index, Stream.LABELED)
    labeled = _draw(config, config.n_labeled, labeled_rng)
    redraws = 0
    while np.unique(labeled.y).shape[0] < 2:
        labeled = _draw(config, config.n_labeled, labeled_rng)
        redraws += 1
    if redraws:
        logger.debug("trial %d: redrew the labeled set %d times", trial_index, redraws)

    unlabeled = _draw(config, config.n_unlabeled, stream_rng(config, trial_index, Stream.UNLABELED))
    return TrialData(
        labeled=labeled,
        unlabeled=UnlabeledDataset(unlabeled.x),
        validation=_draw(
            config, config.n_validation, stream_rng(config, trial_index, Stream.VALIDATION)
        ),
        test=_draw(config, config.n_test, stream_rng(config, trial_index, Stream.TEST)),
    )


def _run_method(
    config: ExperimentConfig, method: str, data: TrialData, trial: int, seed: int
) -> TrialOutcome:
    lambdas = (0.0,) if method == "none" else tuple(sorted(config.lambda_grid))
    best: tuple[float, float, float] | None = None
    failures: list[str] = []
    for lam in lambdas:
        try:
            result = fit(
                data.labeled,
                data.unlabeled,
                config.fit_config(method, lam, seed),
                config.optimizer,
            )
        except (NumericalError, ValueError) as exc:
            logger.warning("trial %d: %s fit at lambda=%g failed: %s", trial, method, lam, exc)
            failures.append(f"lambda={lam:g}: {exc}")
            continue
        validation_error = error_rate(result.theta, data.validation)
        if best is None or validation_error < best[0]:
            best = (validation_error, lam, error_rate(result.theta, data.test))
    if best is None:
        return TrialOutcome(trial=trial, failure="; ".join(failures))
    _, lam, test_error = best
    return TrialOutcome(trial=trial, error=test_error, lam=lam)


def run_trial(config: ExperimentConfig, trial_index: int) -> dict[str, TrialOutcome]:
    """Fit every method on one trial; λ is chosen by validation error, ties to the smallest.

    Raises:
        ExperimentAbortedError: every method failed on this trial.
    """

    data = gen_two_gaussians(config, trial_index)
    seed = fit_seed(config, trial_index)
    outcomes = {
        method: _run_method(config, method, data, trial_index, seed) for method in config.methods
    }
    if all(o.error is None for o in outcomes.values()):
        details = "; ".join(f"{m}: {o.failure}" for m, o in outcomes.items())
        raise ExperimentAbortedError(f"every method failed on trial {trial_index}: {details}")
    return outcomes


def _summarize(outcomes: list[TrialOutcome]) -> MethodSummary:
    errors = [o.error for o in outcomes]
    finished = [e for e in errors if e is not None]
    mean: float | None
    standard_error: float | None
    if finished:
        mean = math.fsum(finished) / len(finished)
        sd = float(np.std(finished, ddof=1)) if len(finished) > 1 else 0.0
        standard_error = sd / math.sqrt(len(finished))
    else:
        mean, standard_error = None, None
    return MethodSummary(
        mean_error=mean,
        standard_error=standard_error,
        errors=tuple(errors),
        selected_lambdas=tuple(o.lam for o in outcomes),
        failures=len(errors) - len(finished),
    )


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Run ``config.trials`` independent trials and aggregate per method.

    Trials run on a thread pool of ``workers`` threads (``INFOREG_WORKERS`` by
    default); results are collected in trial order.
    """

    workers = workers or get_settings().workers
    logger.info(
        "Running %d trials of %s with %d worker(s)",
        config.trials,
        ", ".join(config.methods),
        workers,
    )
    started = time.perf_counter()

    def run(trial: int) -> dict[str, TrialOutcome]:
        outcomes = run_trial(config, trial)
        logger.debug(
            "trial %d: %s",
            trial,
            ", ".join(f"{m}={o.error}" for m, o in outcomes.items()),
        )
        return outcomes

    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_trial = list(pool.map(run, range(config.trials)))

    methods = {
        method: _summarize([trial[method] for trial in per_trial]) for method in config.methods
    }
    wall_time = time.perf_counter() - started
    for method, summary in methods.items():
        if summary.mean_error is None:
            logger.warning("%s failed on every trial", method)
            continue
        logger.info(
            "%s: mean error %.4f (se %.4f, %d failures)",
            method,
            summary.mean_error,
            summary.standard_error,
            summary.failures,
        )
    return ExperimentReport(config=config, methods=methods, wall_time=wall_time)


def report_csv(report: ExperimentReport) -> str:
    """Flat ``method,trial,lambda,error`` rows; failed trials leave both values empty."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["method", "trial", "lambda", "error"])
    for method in report.config.methods:
        summary = report.methods[method]
        for trial, (lam, error) in enumerate(zip(summary.selected_lambdas, summary.errors)):
            writer.writerow(
                [
                    method,
                    trial,
                    "" if lam is None else repr(float(lam)),
                    "" if error is None else repr(float(error)),
                ]
            )
    return buffer.getvalue()


def emit_report(report: ExperimentReport, path: Path) -> tuple[Path, Path]:
    """Write ``<path>.json`` (the full report) and ``<path>.csv`` (per-trial rows)."""

    json_path = path.with_suffix(".json")
    csv_path = path.with_suffix(".csv")
    for target, text in (
        (json_path, report.model_dump_json(indent=2, by_alias=True)),
        (csv_path, report_csv(report)),
    ):
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ReportWriteError(target, str(exc)) from exc
        logger.info("Wrote %s", target)
    return json_path, csv_path


def load_report(path: Path) -> ExperimentReport:
    return ExperimentReport.model_validate_json(path.read_text(encoding="utf-8"))


__all__ = [
    "Stream",
    "TrialData",
    "emit_report",
    "fit_seed",
    "gen_two_gaussians",
    "gen_two_moons",
    "load_report",
    "report_csv",
    "run_experiment",
    "run_trial",
    "stream_rng",
]
