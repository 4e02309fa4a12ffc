"""Command-line entry point exposing the full workflow.

Each subcommand is a thin shell over the corresponding library operation.
Exit codes: 0 success, 1 validation error, 2 I/O error.  Diagnostics go to
stderr; results go to files or stdout only, so identical inputs, flags, and
seeds produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ValidationError
from .featurize import FeaturizeRequest, featurize_data_files
from .features import feature_catalog
from .learn import LearnerSpec, model_from_featureset, predict_data_files, train_test_split
from .learn.model import predictions_for_featureset
from .persist import (
    WorkflowRecipe,
    load_featureset,
    load_model,
    replay_recipe,
    save_featureset,
    save_model,
    save_predictions,
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message, 1)


def _collect_inputs(inputs: list[str]) -> list[str]:
    paths: list[str] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found = sorted(str(f) for f in p.glob("*.csv"))
            if not found:
                raise CliError(f"no .csv files under directory {item}", 2)
            paths.extend(found)
        elif p.is_file():
            paths.append(str(p))
        else:
            raise CliError(f"input not found: {item}", 2)
    return paths


def _load_json_map(path: str, what: str) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {what} file: {exc}", 2)
    except json.JSONDecodeError as exc:
        raise CliError(f"{what} file is not valid JSON: {exc}", 1)
    if not isinstance(obj, dict):
        raise CliError(f"{what} file must contain a JSON object", 1)
    return obj


def _cmd_featurize(args) -> int:
    paths = _collect_inputs(args.input)
    params = _load_json_map(args.params, "--params") if args.params else {}
    req = FeaturizeRequest(
        features=tuple(f.strip() for f in args.features.split(",") if f.strip()),
        parallelism=args.workers,
        params=params,
    )
    fs = featurize_data_files(paths, req)
    save_featureset(fs, args.output)
    print(
        f"featurized {fs.n_series} series x {fs.n_channels} channel(s) "
        f"x {fs.n_features} feature(s) -> {args.output}",
        file=sys.stderr,
    )
    return 0


def _cmd_train(args) -> int:
    grid = _load_json_map(args.grid, "--grid") if args.grid else {}
    spec = LearnerSpec(
        kind=args.learner,
        param_grid=grid,
        cv_folds=args.cv,
        seed=args.seed,
    )
    fs = load_featureset(args.featureset)
    model = model_from_featureset(fs, spec)
    save_model(model, args.output)
    print(
        f"trained {model.kind} (params {json.dumps(model.params, sort_keys=True)}, "
        f"cv accuracy {model.cv_accuracy:.4f}) -> {args.output}",
        file=sys.stderr,
    )
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    if args.featureset:
        fs = load_featureset(args.featureset)
        pred = predictions_for_featureset(fs, model, return_probs=args.probs)
    else:
        paths = _collect_inputs(args.input)
        pred = predict_data_files(paths, model, return_probs=args.probs)
    save_predictions(pred, args.output)
    unpredictable = sum(1 for e in pred.errors if e)
    note = f" ({unpredictable} unpredictable)" if unpredictable else ""
    print(f"predicted {len(pred.names)} series{note} -> {args.output}", file=sys.stderr)
    return 0


def _cmd_split(args) -> int:
    train, test = train_test_split(args.n, args.test_fraction, args.seed)
    print(json.dumps({"train": train, "test": test}))
    return 0


def _cmd_features_list(_args) -> int:
    for entry in feature_catalog():
        print(f"{entry.name}\t{entry.description}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    frontend = args.frontend
    if frontend is None and Path("frontend/dist").is_dir():
        frontend = "frontend/dist"
    app = create_app(
        data_dir=args.data_dir,
        worker_pool_size=args.workers,
        frontend_dir=frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_recipe_replay(args) -> int:
    recipe = WorkflowRecipe.load(args.recipe)
    report = replay_recipe(recipe, args.workspace)
    for entry in report.entries:
        line = f"action {entry.index + 1} {entry.kind}: {entry.status}"
        if entry.detail:
            line += f" ({entry.detail})"
        print(line)
    return 0 if report.all_match else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tsworkbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="compute features for time-series files")
    p.add_argument("--input", nargs="+", required=True, metavar="DIR|FILE")
    p.add_argument("--features", required=True, help="comma-separated feature names")
    p.add_argument("--params", help="JSON file of feature parameters")
    p.add_argument("--workers", type=int, default=1, metavar="N")
    p.add_argument("--output", required=True, metavar="FSETFILE")
    p.set_defaults(fn=_cmd_featurize)

    p = sub.add_parser("train", help="build a model from a feature set")
    p.add_argument("--featureset", required=True, metavar="FSETFILE")
    p.add_argument("--learner", required=True, choices=["knn", "random_forest"])
    p.add_argument("--grid", help="JSON file mapping hyperparameter -> values")
    p.add_argument("--cv", type=int, default=5, metavar="K")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--output", required=True, metavar="MODELFILE")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("predict", help="generate predictions from a model")
    p.add_argument("--model", required=True, metavar="MODELFILE")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--featureset", metavar="FSETFILE")
    group.add_argument("--input", nargs="+", metavar="FILE")
    p.add_argument("--probs", action="store_true")
    p.add_argument("--output", required=True, metavar="PREDFILE")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("split", help="print a seeded train/test index split")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--test-fraction", type=float, required=True, metavar="F")
    p.add_argument("--seed", type=int, required=True, metavar="S")
    p.set_defaults(fn=_cmd_split)

    p = sub.add_parser("features", help="feature catalog commands")
    fsub = p.add_subparsers(dest="features_command", required=True)
    pl = fsub.add_parser("list", help="print the feature catalog")
    pl.set_defaults(fn=_cmd_features_list)

    p = sub.add_parser("serve", help="run the workflow HTTP service")
    p.add_argument("--port", type=int, required=True, metavar="P")
    p.add_argument("--workers", type=int, default=2, metavar="N")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default="./tsworkbench-data")
    p.add_argument("--frontend", help="directory with the built web UI")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("recipe", help="workflow recipe commands")
    rsub = p.add_subparsers(dest="recipe_command", required=True)
    pr = rsub.add_parser("replay", help="replay a recorded workflow")
    pr.add_argument("recipe", metavar="recipe.json")
    pr.add_argument("--workspace", required=True, metavar="DIR")
    pr.set_defaults(fn=_cmd_recipe_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
