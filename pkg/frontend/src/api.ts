// Typed REST client; all state-changing traffic flows through here.

import type {
    CatalogFeature,
    DatasetInfo,
    FeaturesetInfo,
    JobInfo,
    ModelInfo,
    PredictionInfo,
} from "./types.js";

export class ApiError extends Error {
    constructor(message: string, readonly status: number) {
        super(message);
    }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
    constructor(
        private readonly fetchFn: FetchLike,
        private readonly base = "",
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(this.base + path, init);
        const text = await response.text();
        let body: unknown = null;
        if (text) {
            try {
                body = JSON.parse(text);
            } catch {
                body = null;
            }
        }
        if (!response.ok) {
            const message =
                body && typeof body === "object" && "error" in body
                    ? String((body as { error: unknown }).error)
                    : `${response.status} ${response.statusText}`;
            throw new ApiError(message, response.status);
        }
        return body as T;
    }

    private postJson<T>(path: string, payload: unknown): Promise<T> {
        return this.request<T>(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
        });
    }

    async listFeatures(): Promise<CatalogFeature[]> {
        const body = await this.request<{ features: CatalogFeature[] }>("/api/features");
        return body.features;
    }

    async listDatasets(): Promise<DatasetInfo[]> {
        const body = await this.request<{ datasets: DatasetInfo[] }>("/api/datasets");
        return body.datasets;
    }

    async uploadDataset(files: File[], name?: string): Promise<DatasetInfo> {
        const form = new FormData();
        for (const file of files) {
            form.append("files", file, file.name);
        }
        if (name) {
            form.append("name", name);
        }
        return this.request<DatasetInfo>("/api/datasets", {
            method: "POST",
            body: form,
        });
    }

    async listFeaturesets(): Promise<FeaturesetInfo[]> {
        const body = await this.request<{ featuresets: FeaturesetInfo[] }>(
            "/api/featuresets",
        );
        return body.featuresets;
    }

    getFeatureset(id: string): Promise<FeaturesetInfo> {
        return this.request<FeaturesetInfo>(`/api/featuresets/${id}`);
    }

    submitFeaturize(payload: {
        dataset_id: string;
        features: string[];
        params?: Record<string, Record<string, unknown>>;
    }): Promise<{ job_id: string; featureset_id: string }> {
        return this.postJson("/api/featuresets", payload);
    }

    async listModels(): Promise<ModelInfo[]> {
        const body = await this.request<{ models: ModelInfo[] }>("/api/models");
        return body.models;
    }

    getModel(id: string): Promise<ModelInfo> {
        return this.request<ModelInfo>(`/api/models/${id}`);
    }

    submitModel(payload: {
        featureset_id: string;
        kind: string;
        params?: Record<string, unknown>;
        param_grid?: Record<string, unknown[]>;
        cv_folds?: number;
        seed?: number;
    }): Promise<{ job_id: string; model_id: string }> {
        return this.postJson("/api/models", payload);
    }

    async listPredictions(): Promise<PredictionInfo[]> {
        const body = await this.request<{ predictions: PredictionInfo[] }>(
            "/api/predictions",
        );
        return body.predictions;
    }

    getPrediction(id: string): Promise<PredictionInfo> {
        return this.request<PredictionInfo>(`/api/predictions/${id}`);
    }

    submitPrediction(payload: {
        model_id: string;
        featureset_id?: string;
        dataset_id?: string;
        return_probs?: boolean;
    }): Promise<{ job_id: string; prediction_id: string }> {
        return this.postJson("/api/predictions", payload);
    }

    async listJobs(): Promise<JobInfo[]> {
        const body = await this.request<{ jobs: JobInfo[] }>("/api/jobs");
        return body.jobs;
    }
}
