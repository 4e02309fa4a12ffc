"""HTTP workflow service: resources, queued background jobs, push channel.

Mutations flow client -> server over HTTP only; completion notifications
flow server -> client over the WebSocket push channel only.  Jobs run on a
fixed-size worker pool in FIFO order, and every artifact a job creates is
byte-identical to the one the corresponding library call would produce --
the service adds no computation of its own.  All actions append to the
project's workflow recipe.
"""

from __future__ import annotations

import asyncio
import itertools
import queue
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, UploadFile, WebSocket
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse

from .core import ValidationError
from .featurize import FeaturizeRequest, featurize_data_files
from .features import feature_catalog
from .graph import build_graph
from .learn import LearnerSpec, model_from_featureset
from .learn.model import predictions_for_featureset
from .persist import (
    WorkflowRecipe,
    build_model_action,
    export_recipe_script,
    featurize_action,
    load_featureset,
    load_model,
    load_predictions,
    predict_action,
    record_action,
    save_featureset,
    save_model,
    save_predictions,
    upload_action,
)
from .persist.series_csv import read_time_series_csv


class ApiError(Exception):
    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Job:
    """Background task; status only ever moves queued -> running -> done|failed."""

    id: str
    kind: str
    status: str = "queued"
    created: str = field(default_factory=_now)
    started: str | None = None
    finished: str | None = None
    result_ref: str | None = None
    error: str | None = None

    def to_jsonable(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "created": self.created,
            "started": self.started,
            "finished": self.finished,
            "result_ref": self.result_ref,
            "error": self.error,
        }


class PushHub:
    """Fans job-completion messages out to WebSocket subscribers.

    Messages are handed to the event loop without blocking the worker
    thread; there is no replay buffer, so late subscribers recover state via
    ``GET /api/jobs``.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._queues: list[asyncio.Queue] = []
        self._loop: asyncio.AbstractEventLoop | None = None

    def set_loop(self, loop: asyncio.AbstractEventLoop) -> None:
        with self._lock:
            self._loop = loop

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        with self._lock:
            self._queues.append(q)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        with self._lock:
            if q in self._queues:
                self._queues.remove(q)

    def broadcast(self, message: dict) -> None:
        with self._lock:
            loop = self._loop
            queues = list(self._queues)
        if loop is None:
            return
        for q in queues:
            loop.call_soon_threadsafe(q.put_nowait, dict(message))


class JobManager:
    """FIFO job queue consumed by a fixed pool of worker threads."""

    def __init__(self, pool_size: int, hub: PushHub):
        self.pool_size = pool_size
        self.hub = hub
        self.jobs: dict[str, Job] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self._queue: "queue.Queue[tuple[Job, Any] | None]" = queue.Queue()
        self._threads: list[threading.Thread] = []
        self._started = False

    def start(self) -> None:
        with self._lock:
            if self._started:
                return
            self._started = True
        for i in range(self.pool_size):
            t = threading.Thread(
                target=self._worker, name=f"job-worker-{i}", daemon=True
            )
            t.start()
            self._threads.append(t)

    def stop(self) -> None:
        for _ in self._threads:
            self._queue.put(None)

    def submit(self, job_id: str, kind: str, work) -> Job:
        job = Job(id=job_id, kind=kind)
        with self._lock:
            self.jobs[job.id] = job
            self._order.append(job.id)
        self._queue.put((job, work))
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self.jobs.get(job_id)

    def list(self) -> list[Job]:
        with self._lock:
            return [self.jobs[i] for i in self._order]

    def _worker(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            job, work = item
            with self._lock:
                job.status = "running"
                job.started = _now()
            try:
                result_ref = work()
                with self._lock:
                    job.finished = _now()
                    job.result_ref = result_ref
                    job.status = "done"
            except Exception as exc:
                with self._lock:
                    job.finished = _now()
                    job.error = str(exc)
                    job.status = "failed"
            # The resource is readable before the terminal status is
            # announced; exactly one message per terminal transition.
            self.hub.broadcast(
                {
                    "action": "job_complete",
                    "payload": {
                        "job_id": job.id,
                        "kind": job.kind,
                        "status": job.status,
                        "result_ref": job.result_ref,
                        "error": job.error,
                    },
                }
            )


class Project:
    """Single-namespace resource store backed by a data directory."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        for sub in ("datasets", "featuresets", "models", "predictions"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self.lock = threading.RLock()
        self.datasets: dict[str, dict] = {}
        self.featuresets: dict[str, dict] = {}
        self.models: dict[str, dict] = {}
        self.predictions: dict[str, dict] = {}
        self.recipe = WorkflowRecipe()
        self._counters = {
            kind: itertools.count(1)
            for kind in ("ds", "fset", "model", "pred", "job")
        }

    def new_id(self, kind: str) -> str:
        with self.lock:
            return f"{kind}-{next(self._counters[kind]):04d}"

    def record(self, action) -> None:
        with self.lock:
            record_action(self.recipe, action)
            self.recipe.save(self.root / "recipe.json")


def create_app(
    data_dir: str | Path = "./tsworkbench-data",
    worker_pool_size: int = 2,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service app; state lives under *data_dir*."""
    project = Project(data_dir)
    hub = PushHub()
    jobs = JobManager(worker_pool_size, hub)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        hub.set_loop(asyncio.get_running_loop())
        jobs.start()
        yield
        jobs.stop()

    app = FastAPI(title="tsworkbench service", lifespan=lifespan)
    app.state.project = project
    app.state.hub = hub
    app.state.jobs = jobs

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status_code, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(ValidationError)
    async def _domain_error(_req: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    # -- datasets ---------------------------------------------------------

    @app.post("/api/datasets", status_code=201)
    async def create_dataset(files: list[UploadFile], name: str | None = None):
        if not files:
            raise ApiError(400, "no files uploaded")
        ds_id = project.new_id("ds")
        ds_dir = project.root / "datasets" / ds_id
        ds_dir.mkdir(parents=True, exist_ok=True)
        paths: list[Path] = []
        series: list[str] = []
        for upload in files:
            filename = Path(upload.filename or "series.csv").name
            dest = ds_dir / filename
            dest.write_bytes(await upload.read())
            try:
                ts = read_time_series_csv(dest)
            except (ValidationError, ValueError) as exc:
                raise ApiError(400, f"invalid time-series file {filename}: {exc}")
            paths.append(dest)
            series.append(ts.name)
        if len(set(series)) != len(series):
            raise ApiError(400, "duplicate series names in upload")
        with project.lock:
            project.datasets[ds_id] = {
                "id": ds_id,
                "name": name or ds_id,
                "files": [str(p) for p in paths],
                "series": series,
            }
        for p in paths:
            project.record(upload_action(p))
        return {"id": ds_id, "name": name or ds_id, "n_series": len(series), "series": series}

    @app.get("/api/datasets")
    async def list_datasets():
        with project.lock:
            items = [
                {k: v for k, v in d.items() if k != "files"}
                | {"n_series": len(d["series"])}
                for d in project.datasets.values()
            ]
        return {"datasets": items}

    @app.get("/api/datasets/{ds_id}")
    async def get_dataset(ds_id: str):
        with project.lock:
            d = project.datasets.get(ds_id)
            if d is None:
                raise ApiError(404, f"dataset {ds_id} not found")
            return {k: v for k, v in d.items() if k != "files"} | {
                "n_series": len(d["series"])
            }

    # -- feature catalog ----------------------------------------------------

    @app.get("/api/features")
    async def list_features():
        return {
            "features": [
                {
                    "name": e.name,
                    "description": e.description,
                    "param_group": e.param_group,
                    "params": [
                        {"name": p.name, "kind": p.kind, "default": p.default}
                        for p in e.params
                    ],
                }
                for e in feature_catalog()
            ]
        }

    @app.post("/api/features")
    async def upload_feature_code():
        raise ApiError(
            405,
            "user-uploaded feature code is not accepted; register custom "
            "features through the library or CLI instead",
        )

    # -- featuresets --------------------------------------------------------

    def _require(store: dict, res_id: str, what: str) -> dict:
        with project.lock:
            rec = store.get(res_id)
        if rec is None:
            raise ApiError(404, f"{what} {res_id} not found")
        return rec

    def _require_ready(store: dict, res_id: str, what: str) -> dict:
        rec = _require(store, res_id, what)
        if rec["status"] == "pending":
            raise ApiError(409, f"{what} {res_id} is still being computed")
        if rec["status"] == "failed":
            raise ApiError(409, f"{what} {res_id} failed to compute")
        return rec

    @app.post("/api/featuresets", status_code=202)
    async def create_featureset(body: dict):
        ds = _require(project.datasets, str(body.get("dataset_id")), "dataset")
        features = body.get("features") or []
        if not isinstance(features, list) or not features:
            raise ApiError(400, "features must be a non-empty list")
        params = body.get("params") or {}
        try:
            build_graph(features, params=params)
        except ValidationError as exc:
            raise ApiError(400, str(exc))
        fset_id = project.new_id("fset")
        job_id = project.new_id("job")
        out_path = project.root / "featuresets" / f"{fset_id}.fset"
        with project.lock:
            project.featuresets[fset_id] = {
                "id": fset_id,
                "name": body.get("name") or fset_id,
                "dataset_id": ds["id"],
                "features": list(features),
                "params": dict(params),
                "status": "pending",
                "job_id": job_id,
                "path": str(out_path),
            }

        def work() -> str:
            req = FeaturizeRequest(
                features=tuple(features), params=params, parallelism=1
            )
            try:
                fs = featurize_data_files(ds["files"], req)
                save_featureset(fs, out_path)
                project.record(featurize_action(ds["files"], req, out_path))
                with project.lock:
                    rec = project.featuresets[fset_id]
                    rec["status"] = "ready"
                    rec["n_series"] = fs.n_series
                    rec["n_channels"] = fs.n_channels
            except Exception:
                with project.lock:
                    project.featuresets[fset_id]["status"] = "failed"
                raise
            return fset_id

        jobs.submit(job_id, "featurize", work)
        return {"job_id": job_id, "featureset_id": fset_id}

    @app.get("/api/featuresets")
    async def list_featuresets():
        with project.lock:
            items = [
                {k: v for k, v in rec.items() if k != "path"}
                for rec in project.featuresets.values()
            ]
        return {"featuresets": items}

    @app.get("/api/featuresets/{fset_id}")
    async def get_featureset(fset_id: str):
        rec = _require(project.featuresets, fset_id, "featureset")
        return {k: v for k, v in rec.items() if k != "path"}

    # -- models ---------------------------------------------------------------

    @app.post("/api/models", status_code=202)
    async def create_model(body: dict):
        fset = _require_ready(
            project.featuresets, str(body.get("featureset_id")), "featureset"
        )
        try:
            spec = LearnerSpec(
                kind=str(body.get("kind", "")),
                params=body.get("params") or {},
                param_grid=body.get("param_grid") or {},
                cv_folds=int(body.get("cv_folds", 5)),
                seed=int(body.get("seed", 0)),
            )
        except (TypeError, ValueError) as exc:
            raise ApiError(400, str(exc))
        model_id = project.new_id("model")
        job_id = project.new_id("job")
        out_path = project.root / "models" / f"{model_id}.model"
        with project.lock:
            project.models[model_id] = {
                "id": model_id,
                "name": body.get("name") or model_id,
                "featureset_id": fset["id"],
                "kind": spec.kind,
                "status": "pending",
                "job_id": job_id,
                "path": str(out_path),
            }

        def work() -> str:
            try:
                fs = load_featureset(fset["path"])
                model = model_from_featureset(fs, spec)
                save_model(model, out_path)
                project.record(build_model_action(fset["path"], spec, out_path))
                with project.lock:
                    rec = project.models[model_id]
                    rec["status"] = "ready"
                    rec["chosen_params"] = dict(model.params)
                    rec["cv_accuracy"] = model.cv_accuracy
                    rec["classes"] = list(model.classes)
            except Exception:
                with project.lock:
                    project.models[model_id]["status"] = "failed"
                raise
            return model_id

        jobs.submit(job_id, "train", work)
        return {"job_id": job_id, "model_id": model_id}

    @app.get("/api/models")
    async def list_models():
        with project.lock:
            items = [
                {k: v for k, v in rec.items() if k != "path"}
                for rec in project.models.values()
            ]
        return {"models": items}

    @app.get("/api/models/{model_id}")
    async def get_model(model_id: str):
        rec = _require(project.models, model_id, "model")
        return {k: v for k, v in rec.items() if k != "path"}

    # -- predictions ------------------------------------------------------------

    @app.post("/api/predictions", status_code=202)
    async def create_prediction(body: dict):
        model_rec = _require_ready(project.models, str(body.get("model_id")), "model")
        fset_id = body.get("featureset_id")
        dataset_id = body.get("dataset_id")
        if bool(fset_id) == bool(dataset_id):
            raise ApiError(400, "give exactly one of featureset_id or dataset_id")
        return_probs = bool(body.get("return_probs", False))
        pred_id = project.new_id("pred")
        job_id = project.new_id("job")
        out_path = project.root / "predictions" / f"{pred_id}.json"

        if fset_id:
            fset_rec = _require_ready(project.featuresets, str(fset_id), "featureset")
            source = {"featureset_id": fset_rec["id"]}
        else:
            ds = _require(project.datasets, str(dataset_id), "dataset")
            source = {"dataset_id": ds["id"]}

        with project.lock:
            project.predictions[pred_id] = {
                "id": pred_id,
                "model_id": model_rec["id"],
                **source,
                "return_probs": return_probs,
                "status": "pending",
                "job_id": job_id,
                "path": str(out_path),
            }

        def work() -> str:
            try:
                model = load_model(model_rec["path"])
                if fset_id:
                    fs_path = Path(fset_rec["path"])
                    fs = load_featureset(fs_path)
                else:
                    # Dataset input: featurize with the model's features first,
                    # recording the intermediate artifact like any other.
                    auto_id = project.new_id("fset")
                    fs_path = project.root / "featuresets" / f"{auto_id}.fset"
                    req = FeaturizeRequest(
                        features=model.feature_names, parallelism=1
                    )
                    fs = featurize_data_files(ds["files"], req)
                    save_featureset(fs, fs_path)
                    project.record(featurize_action(ds["files"], req, fs_path))
                    with project.lock:
                        project.featuresets[auto_id] = {
                            "id": auto_id,
                            "name": f"{auto_id} (for {pred_id})",
                            "dataset_id": ds["id"],
                            "features": list(model.feature_names),
                            "params": {},
                            "status": "ready",
                            "job_id": job_id,
                            "path": str(fs_path),
                            "n_series": fs.n_series,
                            "n_channels": fs.n_channels,
                        }
                pred = predictions_for_featureset(fs, model, return_probs)
                save_predictions(pred, out_path)
                project.record(
                    predict_action(model_rec["path"], fs_path, return_probs, out_path)
                )
                with project.lock:
                    project.predictions[pred_id]["status"] = "ready"
            except Exception:
                with project.lock:
                    project.predictions[pred_id]["status"] = "failed"
                raise
            return pred_id

        jobs.submit(job_id, "predict", work)
        return {"job_id": job_id, "prediction_id": pred_id}

    @app.get("/api/predictions")
    async def list_predictions():
        with project.lock:
            items = [
                {k: v for k, v in rec.items() if k != "path"}
                for rec in project.predictions.values()
            ]
        return {"predictions": items}

    @app.get("/api/predictions/{pred_id}")
    async def get_prediction(pred_id: str):
        rec = _require(project.predictions, pred_id, "prediction")
        out = {k: v for k, v in rec.items() if k != "path"}
        if rec["status"] == "ready":
            pred = load_predictions(rec["path"])
            out["classes"] = list(pred.classes)
            out["results"] = [
                {
                    "name": name,
                    "label": label,
                    "error": err,
                    "probs": None
                    if pred.probs is None
                    else {
                        c: (None if p != p else p)
                        for c, p in zip(pred.classes, pred.probs[i])
                    },
                }
                for i, (name, label, err) in enumerate(
                    zip(pred.names, pred.labels, pred.errors)
                )
            ]
        return out

    # -- jobs -----------------------------------------------------------------

    @app.get("/api/jobs")
    async def list_jobs():
        return {"jobs": [j.to_jsonable() for j in jobs.list()]}

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise ApiError(404, f"job {job_id} not found")
        return job.to_jsonable()

    # -- recipe -----------------------------------------------------------------

    @app.get("/api/projects/{_project_id}/recipe")
    async def get_recipe(_project_id: str):
        with project.lock:
            return project.recipe.to_jsonable()

    @app.get("/api/projects/{_project_id}/recipe/script")
    async def get_recipe_script(_project_id: str):
        with project.lock:
            text = export_recipe_script(project.recipe)
        return PlainTextResponse(text)

    # -- push channel -------------------------------------------------------------

    @app.websocket("/ws")
    async def push_channel(ws: WebSocket):
        await ws.accept()
        q = hub.subscribe()

        async def pump():
            while True:
                await ws.send_json(await q.get())

        task = asyncio.create_task(pump())
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    break
        finally:
            task.cancel()
            hub.unsubscribe(q)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True))

    return app
