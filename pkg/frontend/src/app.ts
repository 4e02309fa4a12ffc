// Application wiring: one store, one REST client, one push channel.
//
// Information flows in one direction only: user intents become HTTP
// requests, and the server speaks back through HTTP responses and push
// frames, both of which land in the store as actions.  There is no job
// polling while the push channel is connected; the job table is fetched
// once at startup and re-fetched after a reconnect.

import { ApiClient, type FetchLike } from "./api.js";
import { PushClient, type Scheduler, type SocketFactory } from "./push.js";
import { Store } from "./store.js";
import type { PushMessage } from "./types.js";
import { renderApp } from "./views.js";

export interface AppOptions {
    root: HTMLElement;
    fetchFn?: FetchLike;
    makeSocket?: SocketFactory;
    schedule?: Scheduler;
    wsUrl?: string;
}

export interface App {
    store: Store;
    api: ApiClient;
    push: PushClient;
    ready: Promise<void>;
    dispose(): void;
}

function defaultWsUrl(): string {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    return `${proto}://${location.host}/ws`;
}

export function createApp(options: AppOptions): App {
    const root = options.root;
    const store = new Store();
    const api = new ApiClient(
        options.fetchFn ?? ((input, init) => fetch(input, init)),
    );

    const render = () => {
        root.innerHTML = renderApp(store.getState());
    };
    store.subscribe(render);
    render();

    async function guarded<T>(work: Promise<T>): Promise<T | undefined> {
        try {
            return await work;
        } catch (error) {
            const message = error instanceof Error ? error.message : String(error);
            store.dispatch({ type: "request_failed", message });
            return undefined;
        }
    }

    async function refreshResources(): Promise<void> {
        const [datasets, featuresets, models, predictions] = await Promise.all([
            guarded(api.listDatasets()),
            guarded(api.listFeaturesets()),
            guarded(api.listModels()),
            guarded(api.listPredictions()),
        ]);
        if (datasets) store.dispatch({ type: "datasets_loaded", datasets });
        if (featuresets) store.dispatch({ type: "featuresets_loaded", featuresets });
        if (models) store.dispatch({ type: "models_loaded", models });
        if (predictions) store.dispatch({ type: "predictions_loaded", predictions });
    }

    const ready = (async () => {
        const features = await guarded(api.listFeatures());
        if (features) store.dispatch({ type: "catalog_loaded", features });
        await refreshResources();
        const jobs = await guarded(api.listJobs());
        if (jobs) store.dispatch({ type: "jobs_loaded", jobs });
    })();

    async function followUp(message: PushMessage): Promise<void> {
        if (message.action !== "job_complete") return;
        const { kind, status, result_ref } = message.payload;
        if (status !== "done" || !result_ref) return;
        if (kind === "featurize") {
            const featureset = await guarded(api.getFeatureset(result_ref));
            if (featureset) store.dispatch({ type: "featureset_updated", featureset });
        } else if (kind === "train") {
            const model = await guarded(api.getModel(result_ref));
            if (model) store.dispatch({ type: "model_updated", model });
        } else if (kind === "predict") {
            const prediction = await guarded(api.getPrediction(result_ref));
            if (prediction) store.dispatch({ type: "prediction_updated", prediction });
        }
    }

    const push = new PushClient(options.wsUrl ?? defaultWsUrl(), {
        onMessage: (message) => {
            store.dispatch({ type: "push_received", message });
            void followUp(message);
        },
        onStatus: (status) => {
            const previous = store.getState().connection;
            store.dispatch({ type: "connection_changed", status });
            if (status === "connected" && previous === "reconnecting") {
                // Push frames may have been missed while offline.
                void guarded(api.listJobs()).then((jobs) => {
                    if (jobs) store.dispatch({ type: "jobs_loaded", jobs });
                });
                void refreshResources();
            }
        },
        makeSocket: options.makeSocket,
        schedule: options.schedule,
    });
    push.connect();

    async function uploadDataset(): Promise<void> {
        const input = root.querySelector<HTMLInputElement>("#upload-files");
        const nameInput = root.querySelector<HTMLInputElement>("#upload-name");
        const files = Array.from(input?.files ?? []);
        if (!files.length) {
            store.dispatch({ type: "request_failed", message: "choose at least one CSV file" });
            return;
        }
        const dataset = await guarded(
            api.uploadDataset(files, nameInput?.value || undefined),
        );
        if (dataset) store.dispatch({ type: "dataset_created", dataset });
    }

    async function submitFeaturize(): Promise<void> {
        const form = store.getState().forms.featurize;
        if (!form.datasetId) {
            store.dispatch({ type: "request_failed", message: "pick a dataset first" });
            return;
        }
        if (!form.selected.length) {
            store.dispatch({ type: "request_failed", message: "select at least one feature" });
            return;
        }
        let params: Record<string, Record<string, unknown>> | undefined;
        if (form.paramsText.trim()) {
            try {
                params = JSON.parse(form.paramsText);
            } catch {
                store.dispatch({ type: "request_failed", message: "feature parameters are not valid JSON" });
                return;
            }
        }
        const response = await guarded(
            api.submitFeaturize({
                dataset_id: form.datasetId,
                features: form.selected,
                params,
            }),
        );
        if (!response) return;
        store.dispatch({
            type: "featureset_updated",
            featureset: {
                id: response.featureset_id,
                name: response.featureset_id,
                dataset_id: form.datasetId,
                features: form.selected.slice(),
                status: "pending",
                job_id: response.job_id,
            },
        });
    }

    async function submitModel(): Promise<void> {
        const form = store.getState().forms.model;
        if (!form.featuresetId) {
            store.dispatch({ type: "request_failed", message: "pick a feature set first" });
            return;
        }
        let grid: Record<string, unknown[]> = {};
        if (form.gridText.trim()) {
            try {
                grid = JSON.parse(form.gridText);
            } catch {
                store.dispatch({ type: "request_failed", message: "hyperparameter grid is not valid JSON" });
                return;
            }
        }
        const response = await guarded(
            api.submitModel({
                featureset_id: form.featuresetId,
                kind: form.kind,
                param_grid: grid,
                cv_folds: Number(form.cvFolds) || 5,
                seed: Number(form.seed) || 0,
            }),
        );
        if (!response) return;
        store.dispatch({
            type: "model_updated",
            model: {
                id: response.model_id,
                name: response.model_id,
                featureset_id: form.featuresetId,
                kind: form.kind,
                status: "pending",
                job_id: response.job_id,
            },
        });
    }

    async function submitPredict(): Promise<void> {
        const form = store.getState().forms.predict;
        if (!form.modelId || !form.source) {
            store.dispatch({ type: "request_failed", message: "pick a model and an input" });
            return;
        }
        const [sourceKind, sourceId] = form.source.split(":", 2);
        const response = await guarded(
            api.submitPrediction({
                model_id: form.modelId,
                featureset_id: sourceKind === "featureset" ? sourceId : undefined,
                dataset_id: sourceKind === "dataset" ? sourceId : undefined,
                return_probs: form.returnProbs,
            }),
        );
        if (!response) return;
        store.dispatch({
            type: "prediction_updated",
            prediction: {
                id: response.prediction_id,
                model_id: form.modelId,
                featureset_id: sourceKind === "featureset" ? sourceId : undefined,
                dataset_id: sourceKind === "dataset" ? sourceId : undefined,
                return_probs: form.returnProbs,
                status: "pending",
                job_id: response.job_id,
            },
        });
        store.dispatch({ type: "prediction_selected", id: response.prediction_id });
    }

    async function viewPrediction(id: string): Promise<void> {
        store.dispatch({ type: "prediction_selected", id });
        const current = store.getState().predictions.find((p) => p.id === id);
        if (current && current.status === "ready" && !current.results) {
            const prediction = await guarded(api.getPrediction(id));
            if (prediction) store.dispatch({ type: "prediction_updated", prediction });
        }
    }

    function onClick(event: Event): void {
        const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
        if (!target) return;
        const action = target.dataset.action;
        if (action === "select-tab") {
            store.dispatch({ type: "tab_selected", tab: target.dataset.tab as never });
        } else if (action === "dismiss-banner") {
            store.dispatch({ type: "banner_dismissed", index: Number(target.dataset.index) });
        } else if (action === "sort-predictions") {
            store.dispatch({
                type: "prediction_sort_toggled",
                column: target.dataset.column as "name" | "label",
            });
        } else if (action === "upload") {
            void uploadDataset();
        } else if (action === "submit-featurize") {
            void submitFeaturize();
        } else if (action === "submit-model") {
            void submitModel();
        } else if (action === "submit-predict") {
            void submitPredict();
        } else if (action === "view-prediction") {
            void viewPrediction(target.dataset.id ?? "");
        }
    }

    function onChange(event: Event): void {
        const target = event.target as HTMLElement;
        if (target.matches("[data-feature-checkbox]")) {
            store.dispatch({
                type: "feature_toggled",
                name: (target as HTMLInputElement).value,
            });
            return;
        }
        if (target.matches("[data-form-field]")) {
            const field = target.dataset.field ?? "";
            const form = target.dataset.form as "featurize" | "model" | "predict";
            const value =
                (target as HTMLInputElement).type === "checkbox"
                    ? (target as HTMLInputElement).checked
                    : (target as HTMLInputElement).value;
            store.dispatch({ type: "form_changed", form, field, value });
        }
    }

    root.addEventListener("click", onClick);
    root.addEventListener("change", onChange);

    return {
        store,
        api,
        push,
        ready,
        dispose() {
            push.close();
            root.removeEventListener("click", onClick);
            root.removeEventListener("change", onChange);
        },
    };
}
