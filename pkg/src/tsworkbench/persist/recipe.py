"""Replayable workflow recipes.

A recipe is an ordered, content-addressed log of workflow actions.  Inputs
and outputs are identified by SHA-256 (identity), while archive payload
integrity is CRC32 (a different job).  Replaying runs each action through
the same engine entry points and compares output hashes, so a recipe is a
verifiable record of an entire analysis.
"""

from __future__ import annotations

import hashlib
import json
import shlex
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping

from ..core import ValidationError
from ..featurize import FeaturizeRequest, featurize_data_files
from ..learn import LearnerSpec, model_from_featureset
from ..learn.model import predictions_for_featureset
from .archive import load_featureset, load_model, save_featureset, save_model, save_predictions

ACTION_KINDS = ("upload", "featurize", "build_model", "predict")


def file_hash(path: str | Path) -> str:
    """Content identity of a file: ``sha256:<hex>``."""
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Action:
    """One logged workflow step: full request params plus content hashes."""

    kind: str
    params: Mapping[str, Any]
    inputs: Mapping[str, Any]
    output: str
    timestamp: str

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValidationError(f"unknown action kind '{self.kind}'")
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "inputs", dict(self.inputs))

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "inputs": dict(self.inputs),
            "output": self.output,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_jsonable(cls, obj: Mapping) -> "Action":
        return cls(
            kind=obj["kind"],
            params=obj["params"],
            inputs=obj["inputs"],
            output=obj["output"],
            timestamp=obj["timestamp"],
        )


@dataclass
class WorkflowRecipe:
    actions: list[Action] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "schema_version": "1",
            "actions": [a.to_jsonable() for a in self.actions],
        }

    @classmethod
    def from_jsonable(cls, obj: Mapping) -> "WorkflowRecipe":
        return cls(actions=[Action.from_jsonable(a) for a in obj["actions"]])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_jsonable(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "WorkflowRecipe":
        return cls.from_jsonable(json.loads(Path(path).read_text(encoding="utf-8")))


def record_action(recipe: WorkflowRecipe, action: Action) -> None:
    """Append an action; build_model actions must carry an explicit seed so
    replays are deterministic."""
    if action.kind == "build_model" and "seed" not in action.params:
        raise ValidationError("build_model actions must record a seed")
    recipe.actions.append(action)


# -- action builders -----------------------------------------------------

def upload_action(path: str | Path, name: str | None = None) -> Action:
    digest = file_hash(path)
    return Action(
        kind="upload",
        params={"name": name or Path(path).name},
        inputs={"file": digest},
        output=digest,
        timestamp=_now(),
    )


def featurize_action(
    input_paths: list[str | Path],
    req: FeaturizeRequest,
    output_path: str | Path,
) -> Action:
    if req.custom_defs:
        raise ValidationError("recipes cannot record custom feature functions")
    return Action(
        kind="featurize",
        params={
            "features": list(req.features),
            "feature_params": dict(req.params),
            "input_names": [Path(p).name for p in input_paths],
            "output_name": Path(output_path).name,
        },
        inputs={"dataset": [file_hash(p) for p in input_paths]},
        output=file_hash(output_path),
        timestamp=_now(),
    )


def build_model_action(
    featureset_path: str | Path,
    spec: LearnerSpec,
    output_path: str | Path,
) -> Action:
    return Action(
        kind="build_model",
        params={
            "learner": spec.kind,
            "params": dict(spec.params),
            "param_grid": dict(spec.param_grid),
            "cv_folds": spec.cv_folds,
            "seed": spec.seed,
            "featureset_name": Path(featureset_path).name,
            "output_name": Path(output_path).name,
        },
        inputs={"featureset": file_hash(featureset_path)},
        output=file_hash(output_path),
        timestamp=_now(),
    )


def predict_action(
    model_path: str | Path,
    featureset_path: str | Path,
    return_probs: bool,
    output_path: str | Path,
) -> Action:
    return Action(
        kind="predict",
        params={
            "return_probs": return_probs,
            "model_name": Path(model_path).name,
            "featureset_name": Path(featureset_path).name,
            "output_name": Path(output_path).name,
        },
        inputs={
            "model": file_hash(model_path),
            "featureset": file_hash(featureset_path),
        },
        output=file_hash(output_path),
        timestamp=_now(),
    )


# -- replay ---------------------------------------------------------------

@dataclass(frozen=True)
class ReplayEntry:
    index: int
    kind: str
    status: str  # "match" | "mismatch" | "error"
    detail: str = ""


@dataclass(frozen=True)
class ReplayReport:
    entries: tuple[ReplayEntry, ...]

    @property
    def all_match(self) -> bool:
        return all(e.status == "match" for e in self.entries)


def _index_workspace(workspace: Path) -> dict[str, Path]:
    index: dict[str, Path] = {}
    for p in sorted(workspace.rglob("*")):
        if p.is_file():
            index.setdefault(file_hash(p), p)
    return index


def replay_recipe(recipe: WorkflowRecipe, workspace: str | Path) -> ReplayReport:
    """Re-run every action in order inside *workspace*; compare output hashes.

    Inputs are resolved by content hash among the workspace files (outputs
    of earlier actions become available to later ones).  A missing input or
    a failing action yields an "error" entry naming the action.
    """
    workspace = Path(workspace)
    index = _index_workspace(workspace)
    entries: list[ReplayEntry] = []

    for i, action in enumerate(recipe.actions):
        label = f"action {i + 1} ({action.kind})"

        def resolve(digest: str) -> Path:
            if digest not in index:
                raise FileNotFoundError(f"{label}: missing input {digest}")
            return index[digest]

        try:
            if action.kind == "upload":
                resolve(action.inputs["file"])
                produced = action.inputs["file"]
            else:
                out_path = workspace / action.params["output_name"]
                if action.kind == "featurize":
                    paths = [resolve(d) for d in action.inputs["dataset"]]
                    req = FeaturizeRequest(
                        features=tuple(action.params["features"]),
                        params=action.params.get("feature_params", {}),
                        parallelism=1,
                    )
                    save_featureset(featurize_data_files(paths, req), out_path)
                elif action.kind == "build_model":
                    fs = load_featureset(resolve(action.inputs["featureset"]))
                    spec = LearnerSpec(
                        kind=action.params["learner"],
                        params=action.params.get("params", {}),
                        param_grid=action.params.get("param_grid", {}),
                        cv_folds=int(action.params.get("cv_folds", 5)),
                        seed=int(action.params["seed"]),
                    )
                    save_model(model_from_featureset(fs, spec), out_path)
                elif action.kind == "predict":
                    model = load_model(resolve(action.inputs["model"]))
                    fs = load_featureset(resolve(action.inputs["featureset"]))
                    pred = predictions_for_featureset(
                        fs, model, bool(action.params.get("return_probs", False))
                    )
                    save_predictions(pred, out_path)
                produced = file_hash(out_path)
                index.setdefault(produced, out_path)
        except FileNotFoundError as exc:
            entries.append(ReplayEntry(i, action.kind, "error", str(exc)))
            continue
        except Exception as exc:
            entries.append(
                ReplayEntry(i, action.kind, "error", f"{label}: {exc}")
            )
            continue

        if produced == action.output:
            entries.append(ReplayEntry(i, action.kind, "match"))
        else:
            entries.append(
                ReplayEntry(
                    i,
                    action.kind,
                    "mismatch",
                    f"{label}: produced {produced}, recorded {action.output}",
                )
            )
    return ReplayReport(entries=tuple(entries))


# -- script export ---------------------------------------------------------

def export_recipe_script(recipe: WorkflowRecipe, program: str = "tsworkbench") -> str:
    """Emit an executable shell script: one CLI invocation per action.

    Run inside a fresh workspace that contains the recorded input files
    (same names, same bytes); the script then reproduces every output hash.
    """
    lines = [
        "#!/bin/sh",
        "# Replays a recorded workflow; run in a directory containing the",
        "# original input files.",
        "set -e",
        "",
    ]
    for i, action in enumerate(recipe.actions):
        p = action.params
        if action.kind == "upload":
            lines.append(f"test -f {shlex.quote(p['name'])}  # upload input")
            continue
        if action.kind == "featurize":
            if p.get("feature_params"):
                params_file = f"{p['output_name']}.params.json"
                lines.extend(_heredoc(params_file, p["feature_params"]))
                params_flag = f" --params {shlex.quote(params_file)}"
            else:
                params_flag = ""
            inputs = " ".join(shlex.quote(n) for n in p["input_names"])
            lines.append(
                f"{program} featurize --input {inputs} "
                f"--features {shlex.quote(','.join(p['features']))}"
                f"{params_flag} --workers 1 --output {shlex.quote(p['output_name'])}"
            )
        elif action.kind == "build_model":
            grid = {k: [v] for k, v in p.get("params", {}).items()}
            grid.update(p.get("param_grid", {}))
            grid_flag = ""
            if grid:
                grid_file = f"{p['output_name']}.grid.json"
                lines.extend(_heredoc(grid_file, grid))
                grid_flag = f" --grid {shlex.quote(grid_file)}"
            lines.append(
                f"{program} train --featureset {shlex.quote(p['featureset_name'])} "
                f"--learner {p['learner']}{grid_flag} "
                f"--cv {p.get('cv_folds', 5)} --seed {p['seed']} "
                f"--output {shlex.quote(p['output_name'])}"
            )
        elif action.kind == "predict":
            probs_flag = " --probs" if p.get("return_probs") else ""
            lines.append(
                f"{program} predict --model {shlex.quote(p['model_name'])} "
                f"--featureset {shlex.quote(p['featureset_name'])}{probs_flag} "
                f"--output {shlex.quote(p['output_name'])}"
            )
        else:
            raise ValidationError(f"cannot export action kind '{action.kind}'")
    lines.append("")
    return "\n".join(lines)


def _heredoc(filename: str, obj) -> list[str]:
    body = json.dumps(obj, sort_keys=True)
    return [f"cat > {shlex.quote(filename)} <<'JSON'", body, "JSON"]
