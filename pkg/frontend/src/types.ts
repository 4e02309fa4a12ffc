// Wire types mirroring the service REST + push contract.

export type JobStatus = "queued" | "running" | "done" | "failed";
export type ResourceStatus = "pending" | "ready" | "failed";

export interface JobInfo {
    id: string;
    kind: string;
    status: JobStatus;
    created?: string;
    started?: string | null;
    finished?: string | null;
    result_ref: string | null;
    error: string | null;
}

export interface PushMessage {
    action: string;
    payload: {
        job_id: string;
        kind: string;
        status: JobStatus;
        result_ref: string | null;
        error: string | null;
    };
}

export interface DatasetInfo {
    id: string;
    name: string;
    n_series: number;
    series: string[];
}

export interface FeaturesetInfo {
    id: string;
    name: string;
    dataset_id: string;
    features: string[];
    status: ResourceStatus;
    job_id: string;
    n_series?: number;
    n_channels?: number;
}

export interface ModelInfo {
    id: string;
    name: string;
    featureset_id: string;
    kind: string;
    status: ResourceStatus;
    job_id: string;
    chosen_params?: Record<string, unknown>;
    cv_accuracy?: number;
    classes?: string[];
}

export interface PredictionRow {
    name: string;
    label: string | null;
    error: string | null;
    probs: Record<string, number | null> | null;
}

export interface PredictionInfo {
    id: string;
    model_id: string;
    featureset_id?: string;
    dataset_id?: string;
    return_probs: boolean;
    status: ResourceStatus;
    job_id: string;
    classes?: string[];
    results?: PredictionRow[];
}

export interface CatalogParam {
    name: string;
    kind: string;
    default: unknown;
}

export interface CatalogFeature {
    name: string;
    description: string;
    param_group: string | null;
    params: CatalogParam[];
}
