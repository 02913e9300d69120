"""Command-line interface: ``inforeg <command> [options]``.

Exit codes: 0 on success, 1 on usage or input errors, 2 on numerical failures
(including a randomized check that found a violation).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
import uvicorn
from pydantic import BaseModel

from .config import get_settings, setup_logging
from .datasets import read_dataset_csv, write_dataset_csv
from .densities import Density, load_density
from .errors import CheckFailedError, EmptyDatasetError, NumericalError, ReportWriteError
from .harness import emit_report, gen_two_gaussians, gen_two_moons, run_experiment
from .logistic import error_rate, predict_proba
from .models import (
    REGULARIZER_ALIASES,
    AnchorSet,
    ContinuationSchedule,
    ExperimentConfig,
    FitConfig,
    ModelFile,
    OptimizerConfig,
    RegularizerKind,
    SweepReport,
    TheoryQuery,
)
from .nonparam1d import reference_curves, solve1d
from .optimize import continuation_study, fit
from .services.presets import PRESET_PREFIX, get_preset_registry
from .theory import (
    complexity_profile,
    isotropy_check,
    lemma3_sweep,
    lemma4_sweep,
    mass_slope,
    mi_sweep,
    random_unit_directions,
    sample_bound,
)

logger = logging.getLogger("inforeg.cli")

Handler = Callable[[argparse.Namespace], int]


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- helpers -----------------------------------------------------------------


def _emit_json(payload: BaseModel | dict[str, Any]) -> None:
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2, by_alias=True)
    else:
        text = json.dumps(payload, indent=2)
    sys.stdout.write(text + "\n")


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(path, str(exc)) from exc
    logger.info("Wrote %s", path)


def _rows_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _density(value: str) -> Density:
    """A density JSON path or ``preset:<name>``."""

    if value.startswith(PRESET_PREFIX):
        return get_preset_registry().resolve(value)
    return load_density(Path(value))


def _regularizer(value: str) -> RegularizerKind:
    try:
        return REGULARIZER_ALIASES[value]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown regularizer '{value}' (choose from {', '.join(REGULARIZER_ALIASES)})"
        ) from None


def _float_list(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got '{value}'"
        ) from None


def _read_anchors(path: Path) -> AnchorSet:
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["x", "y"]:
            raise ValueError(f"{path}: anchors CSV must have the header 'x,y'")
        pairs = [(float(row["x"]), int(float(row["y"]))) for row in reader if row["x"].strip()]
    return AnchorSet.from_pairs(pairs)


def _check_result(report: SweepReport) -> int:
    _emit_json(report)
    if not report.passed:
        raise CheckFailedError(
            f"{report.check}: {report.violations} of {report.instances} instances failed "
            f"(worst {report.worst:.6g})"
        )
    return 0


# --- commands ----------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    if args.moons:
        labeled, unlabeled = gen_two_moons(
            args.n_labeled or 6, args.n_unlabeled or 60, seed=args.seed or 0
        )
        write_dataset_csv(args.out, labeled, unlabeled)
        return 0

    base = (
        ExperimentConfig.model_validate_json(args.config.read_text(encoding="utf-8"))
        if args.config
        else ExperimentConfig()
    )
    updates = {
        key: value
        for key, value in (
            ("n_labeled", args.n_labeled),
            ("n_unlabeled", args.n_unlabeled),
            ("seed", args.seed),
        )
        if value is not None
    }
    config = ExperimentConfig.model_validate({**base.model_dump(), **updates})
    data = gen_two_gaussians(config, args.trial)
    write_dataset_csv(args.out, data.labeled, data.unlabeled)
    if args.test_out:
        write_dataset_csv(args.test_out, data.test)
    return 0


def _fit_config(args: argparse.Namespace) -> FitConfig:
    base: dict[str, Any] = (
        FitConfig.model_validate_json(args.config.read_text(encoding="utf-8")).model_dump()
        if args.config
        else {}
    )
    updates: dict[str, Any] = {
        key: value
        for key, value in (
            ("lam", args.lam),
            ("regularizer", args.reg),
            ("tau", args.tau),
            ("restarts", args.restarts),
            ("seed", args.seed),
        )
        if value is not None
    }
    if args.bias:
        updates["bias"] = True
    if args.no_norm_factor:
        updates["include_theta_norm_factor"] = False
    merged = {**base, **updates}
    kind = RegularizerKind(merged.get("regularizer", RegularizerKind.INFO_EMPIRICAL))
    if kind is RegularizerKind.INFO_KERNEL:
        if merged.get("tau") is None:
            merged["tau"] = 0.25
    else:
        merged["tau"] = None
    return FitConfig.model_validate(merged)


def cmd_fit(args: argparse.Namespace) -> int:
    labeled, unlabeled = read_dataset_csv(args.data)
    if labeled is None:
        raise EmptyDatasetError(f"{args.data} has no labeled rows")
    config = _fit_config(args)
    optimizer = OptimizerConfig(method=args.method, max_iter=args.max_iter)
    schedule = ContinuationSchedule.geometric(config.lam) if args.continuation else None
    result = fit(labeled, unlabeled, config, optimizer, schedule)
    if args.out:
        _write_text(args.out, result.to_model_file().model_dump_json(indent=2, by_alias=True))
    _emit_json(
        {
            "theta": list(result.theta.weights),
            "bias": result.theta.bias,
            "objective": result.objective,
            "reason": result.reason,
            "iterations": result.iterations,
            "restart_index": result.restart_index,
        }
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = ModelFile.model_validate_json(args.model.read_text(encoding="utf-8"))
    theta = model.theta_vector()
    labeled, unlabeled = read_dataset_csv(args.data)
    parts = [d.x for d in (labeled, unlabeled) if d is not None]
    if not parts:
        raise EmptyDatasetError(f"{args.data} has no rows")
    points = np.vstack(parts)
    probabilities = predict_proba(theta, points)
    header = [f"x{i + 1}" for i in range(points.shape[1])] + ["p"]
    rows = [list(x) + [p] for x, p in zip(points, probabilities)]
    _write_text(args.out, _rows_csv(header, rows))
    summary: dict[str, Any] = {"points": int(points.shape[0]), "error_rate": None}
    if labeled is not None:
        summary["error_rate"] = error_rate(theta, labeled)
        logger.info("Error rate on %d labeled rows: %.4f", len(labeled), summary["error_rate"])
    _emit_json(summary)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    base = (
        ExperimentConfig.model_validate_json(args.config.read_text(encoding="utf-8"))
        if args.config
        else ExperimentConfig()
    )
    updates = {
        key: value
        for key, value in (("trials", args.trials), ("seed", args.seed), ("tau", args.tau))
        if value is not None
    }
    config = ExperimentConfig.model_validate({**base.model_dump(), **updates})
    report = run_experiment(config, workers=args.workers)
    emit_report(report, args.out)
    _emit_json(
        {
            method: {
                "mean_error": summary.mean_error,
                "standard_error": summary.standard_error,
                "failures": summary.failures,
            }
            for method, summary in report.methods.items()
        }
    )
    return 0


def cmd_continuation(args: argparse.Namespace) -> int:
    study = continuation_study(instances=args.instances, lam=args.lam, seed=args.seed)
    _emit_json(study)
    return 0


def cmd_solve1d(args: argparse.Namespace) -> int:
    if args.reference:
        curves = reference_curves(dict(get_preset_registry().items()), grid=args.grid)
        rows = [[name, x, f] for name, curve in curves.items() for x, f in curve]
        _write_text(
            args.out,
            "density,x,f\n" + "".join(f"{n},{x!r},{f!r}\n" for n, x, f in rows),
        )
        _emit_json({"densities": sorted(curves)})
        return 0

    if args.density is None or args.anchors is None:
        raise ValueError("solve1d needs --density and --anchors (or --reference)")
    density = _density(args.density)
    anchors = _read_anchors(args.anchors)
    _, summary, curve = solve1d(anchors, density, args.lam, args.grid)
    _write_text(args.out, _rows_csv(["x", "f"], curve))
    payload = summary.model_dump_json(indent=2, by_alias=True)
    if args.summary:
        _write_text(args.summary, payload)
    sys.stdout.write(payload + "\n")
    return 0


def cmd_theory_profile(args: argparse.Namespace) -> int:
    density = _density(args.density)
    profile = complexity_profile(density, args.alphas, args.points)
    logger.info("Empirical mass slope K = %.6g", mass_slope(profile))
    if args.out:
        _write_text(args.out.with_suffix(".json"), profile.model_dump_json(indent=2))
        rows = zip(profile.alphas, profile.m_values, profile.c_values)
        _write_text(
            args.out.with_suffix(".csv"),
            "alpha,m_p,c_p\n" + "".join(f"{a!r},{m!r},{c}\n" for a, m, c in rows),
        )
    _emit_json(profile)
    return 0


def cmd_theory_bound(args: argparse.Namespace) -> int:
    query = TheoryQuery(
        epsilon=args.epsilon, delta=args.delta, gamma=args.gamma, density=_density(args.density)
    )
    _emit_json(sample_bound(query))
    return 0


def cmd_check_lemma3(args: argparse.Namespace) -> int:
    return _check_result(lemma3_sweep(args.instances, args.seed, workers=args.workers))


def cmd_check_lemma4(args: argparse.Namespace) -> int:
    return _check_result(
        lemma4_sweep(args.instances, args.seed, args.sample_size, workers=args.workers)
    )


def cmd_check_mi(args: argparse.Namespace) -> int:
    return _check_result(mi_sweep(args.instances, args.seed, args.diameters, workers=args.workers))


def cmd_check_isotropy(args: argparse.Namespace) -> int:
    if args.cov:
        cov = np.asarray(json.loads(args.cov), dtype=float)
    else:
        cov = args.scale * np.eye(args.dim)
    if args.eigenvectors:
        _, vectors = np.linalg.eigh(cov)
        directions = vectors.T
    else:
        directions = random_unit_directions(cov.shape[0], args.directions, args.seed)
    _emit_json(isotropy_check(cov, directions))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    settings = get_settings()
    uvicorn.run(
        "inforeg.main:app",
        host=args.host or settings.host,
        port=args.port or settings.port,
        reload=settings.reload,
    )
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inforeg", description="Information regularization toolkit.")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="override INFOREG_LOG_LEVEL",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a synthetic dataset CSV")
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--config", type=Path, help="ExperimentConfig JSON")
    gen.add_argument("--trial", type=int, default=0)
    gen.add_argument("--n-labeled", type=int, default=None)
    gen.add_argument("--n-unlabeled", type=int, default=None)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--moons", action="store_true", help="two moons instead of two Gaussians")
    gen.add_argument("--test-out", type=Path, help="also write the trial's test set")
    gen.set_defaults(handler=cmd_gen)

    fit_cmd = commands.add_parser("fit", help="fit a regularized logistic model")
    fit_cmd.add_argument("--data", type=Path, required=True)
    fit_cmd.add_argument("--config", type=Path, help="FitConfig JSON")
    fit_cmd.add_argument("--reg", type=_regularizer, default=None)
    fit_cmd.add_argument("--lambda", dest="lam", type=float, default=None)
    fit_cmd.add_argument("--tau", type=float, default=None)
    fit_cmd.add_argument("--restarts", type=int, default=None)
    fit_cmd.add_argument("--seed", type=int, default=None)
    fit_cmd.add_argument("--bias", action="store_true")
    fit_cmd.add_argument("--no-norm-factor", action="store_true")
    fit_cmd.add_argument("--continuation", action="store_true")
    fit_cmd.add_argument("--method", choices=["gradient", "newton"], default="gradient")
    fit_cmd.add_argument("--max-iter", type=int, default=500)
    fit_cmd.add_argument("--out", type=Path, help="model JSON to write")
    fit_cmd.set_defaults(handler=cmd_fit)

    predict_cmd = commands.add_parser("predict", help="score a dataset with a fitted model")
    predict_cmd.add_argument("--model", type=Path, required=True)
    predict_cmd.add_argument("--data", type=Path, required=True)
    predict_cmd.add_argument("--out", type=Path, required=True)
    predict_cmd.set_defaults(handler=cmd_predict)

    experiment = commands.add_parser("experiment", help="run the two-Gaussian benchmark")
    experiment.add_argument("--config", type=Path, help="ExperimentConfig JSON")
    experiment.add_argument("--trials", type=int, default=None)
    experiment.add_argument("--seed", type=int, default=None)
    experiment.add_argument("--tau", type=float, default=None)
    experiment.add_argument("--workers", type=int, default=None)
    experiment.add_argument("--out", type=Path, required=True, help="report path without suffix")
    experiment.set_defaults(handler=cmd_experiment)

    continuation = commands.add_parser(
        "continuation", help="compare continuation with cold starts on two-moon problems"
    )
    continuation.add_argument("--instances", type=int, default=100)
    continuation.add_argument("--lambda", dest="lam", type=float, default=1.0)
    continuation.add_argument("--seed", type=int, default=0)
    continuation.set_defaults(handler=cmd_continuation)

    solve = commands.add_parser("solve1d", help="minimal-information 1D conditional")
    solve.add_argument("--density", help="density JSON path or preset:<name>")
    solve.add_argument("--anchors", type=Path, help="anchors CSV with header x,y")
    solve.add_argument("--lambda", dest="lam", type=float, default=1.0)
    solve.add_argument("--grid", type=int, default=101)
    solve.add_argument("--out", type=Path, required=True, help="curve CSV")
    solve.add_argument("--summary", type=Path, help="summary JSON")
    solve.add_argument(
        "--reference", action="store_true", help="curves for every one-dimensional preset"
    )
    solve.set_defaults(handler=cmd_solve1d)

    theory = commands.add_parser("theory", help="complexity measures and bound checks")
    theory_commands = theory.add_subparsers(dest="theory_command", required=True)

    profile = theory_commands.add_parser("profile")
    profile.add_argument("--density", required=True)
    profile.add_argument("--alphas", type=_float_list, default=None)
    profile.add_argument("--points", type=int, default=50)
    profile.add_argument("--out", type=Path, help="write <out>.json and <out>.csv")
    profile.set_defaults(handler=cmd_theory_profile)

    bound = theory_commands.add_parser("bound")
    bound.add_argument("--epsilon", type=float, required=True)
    bound.add_argument("--delta", type=float, required=True)
    bound.add_argument("--gamma", type=float, required=True)
    bound.add_argument("--density", required=True)
    bound.set_defaults(handler=cmd_theory_bound)

    for name, handler, default_instances in (
        ("check-lemma3", cmd_check_lemma3, 100),
        ("check-lemma4", cmd_check_lemma4, 100),
        ("check-mi", cmd_check_mi, 10),
    ):
        check = theory_commands.add_parser(name)
        check.add_argument("--instances", type=int, default=default_instances)
        check.add_argument("--seed", type=int, default=0)
        check.add_argument("--workers", type=int, default=None)
        if name == "check-lemma4":
            check.add_argument("--sample-size", type=int, default=50)
        if name == "check-mi":
            check.add_argument("--diameters", type=_float_list, default=[0.4, 0.2, 0.1, 0.05])
        check.set_defaults(handler=handler)

    isotropy = theory_commands.add_parser("check-isotropy")
    isotropy.add_argument("--cov", help="covariance as a JSON matrix")
    isotropy.add_argument("--dim", type=int, default=2)
    isotropy.add_argument("--scale", type=float, default=1.0)
    isotropy.add_argument("--directions", type=int, default=100)
    isotropy.add_argument("--eigenvectors", action="store_true")
    isotropy.add_argument("--seed", type=int, default=0)
    isotropy.set_defaults(handler=cmd_check_isotropy)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    if args.log_level:
        settings = settings.model_copy(update={"log_level": args.log_level})
    setup_logging(settings, stream=sys.stderr)
    if getattr(args, "workers", 0) is None:
        args.workers = settings.workers

    handler: Handler = args.handler
    try:
        return handler(args)
    except NumericalError as exc:
        logger.error("%s", exc)
        return 2
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["build_parser", "main"]
