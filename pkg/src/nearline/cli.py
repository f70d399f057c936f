"""Command-line surface: train, project, evaluate, and compare.

Exit codes are a stable contract: 0 on success, 1 for validation problems
(flags, configuration, malformed data), 2 for I/O failures.  Every output
file is written atomically.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from nearline.baselines import BaselineConfig
from nearline.data import SplitSpec, load_csv, load_pgm_dir
from nearline.evaluate import ExperimentError, fit_method, run_experiment
from nearline.model_io import (
    atomic_write_text,
    load_model,
    report_csv,
    report_json,
    save_model,
)
from nearline.nlp import TrainConfig, project

log = logging.getLogger(__name__)

METHODS = ("nlp", "pca", "lpp")
FORMATS = ("csv", "pgm-dir")
CLASSIFIER_FLAGS = ("nn", "nearest-line")


class CliValidationError(ValueError):
    """Bad flags or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse normally exits the process on bad flags; raise instead so the
    # exit-code contract stays in one place.
    def error(self, message):
        raise CliValidationError(message)


@dataclass(frozen=True)
class RunSpec:
    """Parsed CLI invocation; ``to_flags`` reproduces the flag set exactly."""

    command: str
    data: str | None = None
    format: str = "csv"
    label_col: str = "last"
    method: str = "nlp"
    methods: tuple[str, ...] = ()
    k: int = 5
    dim: int | None = None
    dims: tuple[int, ...] = ()
    max_iters: int = 50
    tol: float = 1e-6
    eigen_order: str = "smallest"
    init: str = "pca"
    train_frac: float | None = None
    repeats: int = 10
    seed: int = 0
    classifier: str = "nn"
    out: str | None = None
    model: str | None = None
    quiet: bool = False

    def to_flags(self) -> list[str]:
        """Canonical argv that parses back into this exact spec."""
        flags = [self.command]
        if self.data is not None:
            flags += ["--data", self.data]
        flags += ["--format", self.format, "--label-col", self.label_col]
        flags += ["--method", self.method]
        if self.methods:
            flags += ["--methods", ",".join(self.methods)]
        flags += ["--k", str(self.k)]
        if self.dim is not None:
            flags += ["--dim", str(self.dim)]
        if self.dims:
            flags += ["--dims", ",".join(str(v) for v in self.dims)]
        flags += ["--max-iters", str(self.max_iters), "--tol", repr(self.tol)]
        flags += ["--eigen-order", self.eigen_order, "--init", self.init]
        if self.train_frac is not None:
            flags += ["--train-frac", repr(self.train_frac)]
        flags += ["--repeats", str(self.repeats), "--seed", str(self.seed)]
        flags += ["--classifier", self.classifier]
        if self.out is not None:
            flags += ["--out", self.out]
        if self.model is not None:
            flags += ["--model", self.model]
        if self.quiet:
            flags += ["--quiet"]
        return flags

    @staticmethod
    def from_argv(argv) -> "RunSpec":
        ns = _build_parser().parse_args(list(argv))
        values = {f.name: getattr(ns, f.name) for f in fields(RunSpec)}
        spec = RunSpec(**values)
        _validate_spec(spec)
        return spec


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _csv_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in _csv_list(text))
    except ValueError:
        raise CliValidationError(f"expected a comma-separated list of integers, got {text!r}") from None


def _build_parser() -> _Parser:
    shared = _Parser(add_help=False)
    shared.add_argument("--data", default=None)
    shared.add_argument("--format", choices=FORMATS, default="csv")
    shared.add_argument("--label-col", dest="label_col", default="last")
    shared.add_argument("--method", choices=METHODS, default="nlp")
    shared.add_argument("--methods", type=_csv_list, default=())
    shared.add_argument("--k", type=int, default=5)
    shared.add_argument("--dim", type=int, default=None)
    shared.add_argument("--dims", type=_csv_int_list, default=())
    shared.add_argument("--max-iters", dest="max_iters", type=int, default=50)
    shared.add_argument("--tol", type=float, default=1e-6)
    shared.add_argument("--eigen-order", dest="eigen_order", choices=("smallest", "largest"), default="smallest")
    shared.add_argument("--init", choices=("pca", "identity"), default="pca")
    shared.add_argument("--train-frac", dest="train_frac", type=float, default=None)
    shared.add_argument("--repeats", type=int, default=10)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--classifier", choices=CLASSIFIER_FLAGS, default="nn")
    shared.add_argument("--out", default=None)
    shared.add_argument("--model", default=None)
    shared.add_argument("--quiet", action="store_true")

    parser = _Parser(prog="nearline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command in ("train", "project", "evaluate", "compare"):
        sub.add_parser(command, parents=[shared])
    return parser


def _validate_spec(spec: RunSpec) -> None:
    need_data = spec.command in ("train", "project", "evaluate", "compare")
    if need_data and spec.data is None:
        raise CliValidationError(f"{spec.command} requires --data")
    if spec.out is None:
        raise CliValidationError(f"{spec.command} requires --out")
    if spec.command == "project":
        if spec.model is None:
            raise CliValidationError("project requires --model")
        return
    if spec.command == "train" and spec.dim is None:
        raise CliValidationError("train requires --dim")
    if spec.command in ("evaluate", "compare") and spec.train_frac is None:
        raise CliValidationError(f"{spec.command} requires --train-frac")
    if spec.command == "evaluate" and spec.dim is None:
        raise CliValidationError("evaluate requires --dim")
    if spec.command == "compare":
        if len(spec.methods) < 2:
            raise CliValidationError("compare requires --methods with at least 2 methods")
        unknown = [m for m in spec.methods if m not in METHODS]
        if unknown:
            raise CliValidationError(f"unknown methods: {unknown} (choose from {METHODS})")
        if not spec.dims:
            raise CliValidationError("compare requires --dims")


def _load_dataset(spec: RunSpec):
    if spec.format == "pgm-dir":
        return load_pgm_dir(spec.data)
    label_col = spec.label_col
    if label_col != "last":
        try:
            label_col = int(label_col)
        except ValueError:
            pass  # keep as a column name
    return load_csv(spec.data, label_col)


def _method_config(spec: RunSpec, method: str, d_prime: int):
    if method == "nlp":
        return TrainConfig(
            K=spec.k,
            d_prime=d_prime,
            max_iters=spec.max_iters,
            rel_tol=spec.tol,
            eigen_order=spec.eigen_order,
            init=spec.init,
            seed=spec.seed,
        )
    if method == "pca":
        return BaselineConfig(method="pca", d_prime=d_prime)
    return BaselineConfig(method="lpp", d_prime=d_prime, K=spec.k)


def _sibling_path(out, suffix: str) -> Path:
    out = Path(out)
    return out.with_name(out.stem + suffix)


def _classifier_name(spec: RunSpec) -> str:
    return spec.classifier.replace("-", "_")


def _cmd_train(spec: RunSpec) -> None:
    config = _method_config(spec, spec.method, spec.dim)
    dataset = _load_dataset(spec)
    model = fit_method(dataset, config)
    save_model(model, spec.out)
    trace_path = _sibling_path(spec.out, ".trace.csv")
    trace_lines = ["iteration,objective"]
    start = 1 if model.iterations_run > 0 else 0
    for i, value in enumerate(model.objective_trace):
        trace_lines.append(f"{start + i},{value!r}")
    atomic_write_text(trace_path, "\n".join(trace_lines) + "\n")
    if not spec.quiet:
        print(f"wrote {spec.out} and {trace_path}")


def _cmd_project(spec: RunSpec) -> None:
    model = load_model(spec.model)
    dataset = _load_dataset(spec)
    projected = project(model, dataset.features)
    lines = [
        ",".join(repr(float(v)) for v in row) + f",{int(label)}"
        for row, label in zip(projected, dataset.labels)
    ]
    atomic_write_text(spec.out, "\n".join(lines) + "\n")
    if not spec.quiet:
        print(f"wrote {spec.out}")


def _cmd_evaluate(spec: RunSpec) -> None:
    config = _method_config(spec, spec.method, spec.dim)
    split = SplitSpec(train_fraction=spec.train_frac, seed=spec.seed, repeats=spec.repeats)
    dataset = _load_dataset(spec)
    report = run_experiment(dataset, config, split, _classifier_name(spec))
    atomic_write_text(spec.out, report_json(report))
    csv_path = _sibling_path(spec.out, ".csv")
    atomic_write_text(csv_path, report_csv(report))
    print(f"accuracy: {report.mean_accuracy:.4f} ± {report.std_accuracy:.4f}")


def _cmd_compare(spec: RunSpec) -> None:
    split = SplitSpec(train_fraction=spec.train_frac, seed=spec.seed, repeats=spec.repeats)
    configs = {
        (method, dim): _method_config(spec, method, dim)
        for dim in spec.dims
        for method in spec.methods
    }
    dataset = _load_dataset(spec)
    rows = []
    means: dict[tuple[str, int], float] = {}
    for dim in spec.dims:
        for method in spec.methods:
            report = run_experiment(dataset, configs[(method, dim)], split, _classifier_name(spec))
            means[(method, dim)] = report.mean_accuracy
            for r, acc in enumerate(report.per_repeat_accuracy):
                rows.append(f"{method},{dim},{r},{acc!r}")
            log.info("method=%s d'=%d mean accuracy %.4f", method, dim, report.mean_accuracy)
    atomic_write_text(spec.out, "method,d_prime,repeat,accuracy\n" + "\n".join(rows) + "\n")

    # gnuplot-ready wide table: one row per dimension, one column per method
    table_lines = ["# d_prime " + " ".join(spec.methods)]
    for dim in spec.dims:
        cells = " ".join(f"{means[(m, dim)]:.4f}" for m in spec.methods)
        table_lines.append(f"{dim} {cells}")
    table = "\n".join(table_lines) + "\n"
    table_path = _sibling_path(spec.out, ".table.txt")
    atomic_write_text(table_path, table)
    if not spec.quiet:
        print(table, end="")
        print(f"wrote {spec.out} and {table_path}")


_COMMANDS = {
    "train": _cmd_train,
    "project": _cmd_project,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    try:
        spec = RunSpec.from_argv(sys.argv[1:] if argv is None else argv)
        logging.basicConfig(
            level=logging.WARNING if spec.quiet else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        _COMMANDS[spec.command](spec)
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ExperimentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
