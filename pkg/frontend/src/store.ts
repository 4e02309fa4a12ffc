// Unidirectional state container: every mutation is an action through the
// reducer, and actions originate only from HTTP response handling or push
// message handling (plus local UI intents like tab switches).

import type {
    CatalogFeature,
    DatasetInfo,
    FeaturesetInfo,
    JobInfo,
    ModelInfo,
    PredictionInfo,
    PushMessage,
} from "./types.js";

export type Tab = "data" | "featurize" | "model" | "predict";
export type ConnectionStatus = "connecting" | "connected" | "reconnecting";

export interface FeaturizeForm {
    datasetId: string;
    selected: string[];
    paramsText: string;
}

export interface ModelForm {
    featuresetId: string;
    kind: "knn" | "random_forest";
    gridText: string;
    cvFolds: string;
    seed: string;
}

export interface PredictForm {
    modelId: string;
    source: string; // "featureset:<id>" or "dataset:<id>"
    returnProbs: boolean;
}

export interface ClientState {
    activeTab: Tab;
    connection: ConnectionStatus;
    banners: string[];
    catalog: CatalogFeature[];
    datasets: DatasetInfo[];
    featuresets: FeaturesetInfo[];
    models: ModelInfo[];
    predictions: PredictionInfo[];
    jobs: Record<string, JobInfo>;
    activePredictionId: string;
    predictionSort: { column: "name" | "label"; dir: 1 | -1 };
    forms: {
        featurize: FeaturizeForm;
        model: ModelForm;
        predict: PredictForm;
    };
}

export function initialState(): ClientState {
    return {
        activeTab: "data",
        connection: "connecting",
        banners: [],
        catalog: [],
        datasets: [],
        featuresets: [],
        models: [],
        predictions: [],
        jobs: {},
        activePredictionId: "",
        predictionSort: { column: "name", dir: 1 },
        forms: {
            featurize: { datasetId: "", selected: [], paramsText: "" },
            model: {
                featuresetId: "",
                kind: "knn",
                gridText: '{"n_neighbors": [1, 2, 3, 4]}',
                cvFolds: "5",
                seed: "0",
            },
            predict: { modelId: "", source: "", returnProbs: false },
        },
    };
}

export type Action =
    | { type: "tab_selected"; tab: Tab }
    | { type: "connection_changed"; status: ConnectionStatus }
    | { type: "request_failed"; message: string }
    | { type: "banner_dismissed"; index: number }
    | { type: "catalog_loaded"; features: CatalogFeature[] }
    | { type: "datasets_loaded"; datasets: DatasetInfo[] }
    | { type: "dataset_created"; dataset: DatasetInfo }
    | { type: "featuresets_loaded"; featuresets: FeaturesetInfo[] }
    | { type: "featureset_updated"; featureset: FeaturesetInfo }
    | { type: "models_loaded"; models: ModelInfo[] }
    | { type: "model_updated"; model: ModelInfo }
    | { type: "predictions_loaded"; predictions: PredictionInfo[] }
    | { type: "prediction_updated"; prediction: PredictionInfo }
    | { type: "prediction_selected"; id: string }
    | { type: "prediction_sort_toggled"; column: "name" | "label" }
    | { type: "jobs_loaded"; jobs: JobInfo[] }
    | { type: "push_received"; message: PushMessage }
    | { type: "feature_toggled"; name: string }
    | { type: "form_changed"; form: "featurize" | "model" | "predict"; field: string; value: string | boolean };

function upsert<T extends { id: string }>(items: T[], item: T): T[] {
    const index = items.findIndex((x) => x.id === item.id);
    if (index < 0) {
        return [...items, item];
    }
    const next = items.slice();
    next[index] = { ...next[index], ...item };
    return next;
}

function applyPush(state: ClientState, message: PushMessage): ClientState {
    if (message.action !== "job_complete") {
        return state;
    }
    const { job_id, kind, status, result_ref, error } = message.payload;
    const existing = state.jobs[job_id];
    const jobs = {
        ...state.jobs,
        [job_id]: { ...existing, id: job_id, kind, status, result_ref, error },
    };
    const resourceStatus = status === "done" ? "ready" : status === "failed" ? "failed" : "pending";
    const next: ClientState = { ...state, jobs };
    if (status !== "done" && status !== "failed") {
        return next;
    }
    next.featuresets = state.featuresets.map((f) =>
        f.job_id === job_id ? { ...f, status: resourceStatus } : f,
    );
    next.models = state.models.map((m) =>
        m.job_id === job_id ? { ...m, status: resourceStatus } : m,
    );
    next.predictions = state.predictions.map((p) =>
        p.job_id === job_id ? { ...p, status: resourceStatus } : p,
    );
    return next;
}

export function reducer(state: ClientState, action: Action): ClientState {
    switch (action.type) {
        case "tab_selected":
            return { ...state, activeTab: action.tab };
        case "connection_changed":
            return { ...state, connection: action.status };
        case "request_failed":
            return { ...state, banners: [...state.banners, action.message] };
        case "banner_dismissed":
            return {
                ...state,
                banners: state.banners.filter((_, i) => i !== action.index),
            };
        case "catalog_loaded":
            return { ...state, catalog: action.features };
        case "datasets_loaded":
            return { ...state, datasets: action.datasets };
        case "dataset_created":
            return { ...state, datasets: upsert(state.datasets, action.dataset) };
        case "featuresets_loaded":
            return { ...state, featuresets: action.featuresets };
        case "featureset_updated":
            return {
                ...state,
                featuresets: upsert(state.featuresets, action.featureset),
            };
        case "models_loaded":
            return { ...state, models: action.models };
        case "model_updated":
            return { ...state, models: upsert(state.models, action.model) };
        case "predictions_loaded":
            return { ...state, predictions: action.predictions };
        case "prediction_updated":
            return {
                ...state,
                predictions: upsert(state.predictions, action.prediction),
            };
        case "prediction_selected":
            return { ...state, activePredictionId: action.id };
        case "prediction_sort_toggled": {
            const { column, dir } = state.predictionSort;
            const nextDir = action.column === column && dir === 1 ? -1 : 1;
            return {
                ...state,
                predictionSort: { column: action.column, dir: nextDir },
            };
        }
        case "jobs_loaded": {
            const jobs: Record<string, JobInfo> = {};
            for (const job of action.jobs) {
                jobs[job.id] = job;
            }
            return { ...state, jobs };
        }
        case "push_received":
            return applyPush(state, action.message);
        case "feature_toggled": {
            const selected = state.forms.featurize.selected.includes(action.name)
                ? state.forms.featurize.selected.filter((n) => n !== action.name)
                : [...state.forms.featurize.selected, action.name];
            return {
                ...state,
                forms: {
                    ...state.forms,
                    featurize: { ...state.forms.featurize, selected },
                },
            };
        }
        case "form_changed": {
            const forms = { ...state.forms };
            if (action.form === "featurize") {
                forms.featurize = { ...forms.featurize, [action.field]: action.value };
            } else if (action.form === "model") {
                forms.model = { ...forms.model, [action.field]: action.value };
            } else {
                forms.predict = { ...forms.predict, [action.field]: action.value };
            }
            return { ...state, forms };
        }
        default:
            return state;
    }
}

export type Listener = (state: ClientState) => void;

export class Store {
    private state: ClientState;
    private listeners: Listener[] = [];

    constructor(state: ClientState = initialState()) {
        this.state = state;
    }

    getState(): ClientState {
        return this.state;
    }

    dispatch(action: Action): void {
        this.state = reducer(this.state, action);
        for (const listener of this.listeners) {
            listener(this.state);
        }
    }

    subscribe(listener: Listener): () => void {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }
}
