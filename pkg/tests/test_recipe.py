"""Workflow recipes: recording, replay, and CLI script export."""

import json
import subprocess

import numpy as np
import pytest

from tsworkbench import (
    FeaturizeRequest,
    LearnerSpec,
    WorkflowRecipe,
    export_recipe_script,
    featurize_data_files,
    model_from_featureset,
    record_action,
    replay_recipe,
    save_featureset,
    save_model,
)
from tsworkbench.core import ValidationError
from tsworkbench.learn.model import predictions_for_featureset
from tsworkbench.persist import (
    Action,
    build_model_action,
    featurize_action,
    file_hash,
    predict_action,
    save_predictions,
    upload_action,
)


FEATURES = ("mean", "std", "amplitude")


def synth_workspace(root, rng, n_files=6):
    """CSV inputs with targets plus a recorded featurize->train->predict run."""
    paths = []
    for i in range(n_files):
        label = "hi" if i % 2 else "lo"
        offset = 10.0 if i % 2 else 0.0
        lines = [f"# target={label}", "time,value"]
        for j in range(24):
            lines.append(f"{j},{offset + float(rng.normal()):.10g}")
        p = root / f"series{i}.csv"
        p.write_text("\n".join(lines) + "\n")
        paths.append(p)

    recipe = WorkflowRecipe()
    for p in paths:
        record_action(recipe, upload_action(p))

    req = FeaturizeRequest(features=FEATURES, parallelism=1)
    fs = featurize_data_files(paths, req)
    fset_path = root / "features.fset"
    save_featureset(fs, fset_path)
    record_action(recipe, featurize_action(paths, req, fset_path))

    spec = LearnerSpec(kind="knn", param_grid={"n_neighbors": [1, 2]}, cv_folds=3, seed=7)
    model = model_from_featureset(fs, spec)
    model_path = root / "model.bin"
    save_model(model, model_path)
    record_action(recipe, build_model_action(fset_path, spec, model_path))

    pred = predictions_for_featureset(fs, model)
    pred_path = root / "preds.json"
    save_predictions(pred, pred_path)
    record_action(recipe, predict_action(model_path, fset_path, False, pred_path))
    return recipe, paths


class TestRecordAction:
    def test_seed_mandatory_for_build_model(self):
        recipe = WorkflowRecipe()
        action = Action(
            kind="build_model",
            params={"learner": "knn"},
            inputs={"featureset": "sha256:00"},
            output="sha256:11",
            timestamp="t",
        )
        with pytest.raises(ValidationError, match="seed"):
            record_action(recipe, action)

    def test_hash_is_stable_and_sensitive(self, tmp_path):
        p = tmp_path / "f.bin"
        p.write_bytes(b"abc123")
        assert file_hash(p) == file_hash(p)
        before = file_hash(p)
        p.write_bytes(b"abc124")
        assert file_hash(p) != before


class TestReplay:
    def test_full_pipeline_all_match(self, tmp_path, rng):
        recipe, _ = synth_workspace(tmp_path, rng)
        report = replay_recipe(recipe, tmp_path)
        assert [e.status for e in report.entries] == ["match"] * len(recipe.actions)
        assert report.all_match

    def test_empty_recipe_empty_report(self, tmp_path):
        report = replay_recipe(WorkflowRecipe(), tmp_path)
        assert report.entries == ()

    def test_missing_input_names_action(self, tmp_path, rng):
        recipe, paths = synth_workspace(tmp_path, rng)
        paths[0].unlink()
        # Drop other copies of the same bytes: replay must fail on action 1.
        report = replay_recipe(recipe, tmp_path)
        first = report.entries[0]
        assert first.status == "error"
        assert "action 1" in first.detail
        assert "missing input" in first.detail

    def test_replay_determinism(self, tmp_path, rng):
        recipe, _ = synth_workspace(tmp_path, rng)
        a = replay_recipe(recipe, tmp_path)
        b = replay_recipe(recipe, tmp_path)
        assert a == b

    def test_recipe_json_roundtrip(self, tmp_path, rng):
        recipe, _ = synth_workspace(tmp_path, rng)
        p = tmp_path / "recipe.json"
        recipe.save(p)
        back = WorkflowRecipe.load(p)
        assert back.to_jsonable() == recipe.to_jsonable()


class TestScriptExport:
    def test_one_invocation_per_engine_action(self, tmp_path, rng):
        recipe, _ = synth_workspace(tmp_path, rng)
        script = export_recipe_script(recipe)
        command_lines = [
            line for line in script.splitlines() if line.startswith("tsworkbench ")
        ]
        engine_actions = [a for a in recipe.actions if a.kind != "upload"]
        assert len(command_lines) == len(engine_actions)
        for line in command_lines:
            assert line.split()[1] in ("featurize", "train", "predict")

    def test_script_reproduces_hashes_in_fresh_workspace(self, tmp_path, rng):
        source = tmp_path / "source"
        source.mkdir()
        recipe, paths = synth_workspace(source, rng)
        script = export_recipe_script(recipe)

        fresh = tmp_path / "fresh"
        fresh.mkdir()
        for p in paths:
            (fresh / p.name).write_bytes(p.read_bytes())
        script_path = fresh / "replay.sh"
        script_path.write_text(script)
        proc = subprocess.run(
            ["sh", str(script_path)], cwd=fresh, capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        for action in recipe.actions:
            if action.kind == "upload":
                continue
            out = fresh / action.params["output_name"]
            assert out.is_file(), f"missing {out}"
            assert file_hash(out) == action.output
