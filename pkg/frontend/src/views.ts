// Pure views: state in, HTML string out.  All interactivity is declared
// with data-action attributes and handled by the app's event delegation,
// so rendering stays a pure function of the state container.

import type { ClientState, Tab } from "./store.js";
import type {
    FeaturesetInfo,
    JobStatus,
    ModelInfo,
    PredictionInfo,
    ResourceStatus,
} from "./types.js";

export function escapeHtml(value: unknown): string {
    return String(value)
        .replaceAll("&", "&amp;")
        .replaceAll("<", "&lt;")
        .replaceAll(">", "&gt;")
        .replaceAll('"', "&quot;")
        .replaceAll("'", "&#39;");
}

const TABS: Array<{ id: Tab; label: string }> = [
    { id: "data", label: "Data" },
    { id: "featurize", label: "Featurize" },
    { id: "model", label: "Build Model" },
    { id: "predict", label: "Predict" },
];

function chip(status: JobStatus | ResourceStatus | undefined): string {
    const text = status ?? "unknown";
    return `<span class="chip chip-${escapeHtml(text)}" data-status="${escapeHtml(text)}">${escapeHtml(text)}</span>`;
}

function jobChip(state: ClientState, jobId: string, fallback: ResourceStatus): string {
    const job = state.jobs[jobId];
    if (job) {
        return chip(job.status);
    }
    return chip(fallback === "ready" ? "done" : fallback === "failed" ? "failed" : "queued");
}

function connectionBadge(state: ClientState): string {
    return `<span id="connection" class="conn conn-${state.connection}">${escapeHtml(state.connection)}</span>`;
}

function banners(state: ClientState): string {
    if (!state.banners.length) {
        return "";
    }
    const items = state.banners
        .map(
            (message, i) => `
            <div class="banner" role="alert">
                <span>${escapeHtml(message)}</span>
                <button data-action="dismiss-banner" data-index="${i}">dismiss</button>
            </div>`,
        )
        .join("");
    return `<div id="banners">${items}</div>`;
}

function tabNav(state: ClientState): string {
    const buttons = TABS.map(
        (tab) => `
        <button class="tab${state.activeTab === tab.id ? " tab-active" : ""}"
                data-action="select-tab" data-tab="${tab.id}"
                aria-selected="${state.activeTab === tab.id}">
            ${tab.label}
        </button>`,
    ).join("");
    return `<nav id="tabs">${buttons}</nav>`;
}

function dataTab(state: ClientState): string {
    const rows = state.datasets
        .map(
            (d) => `
            <tr data-dataset-id="${escapeHtml(d.id)}">
                <td>${escapeHtml(d.id)}</td>
                <td>${escapeHtml(d.name)}</td>
                <td>${d.n_series}</td>
                <td>${d.series.map(escapeHtml).join(", ")}</td>
            </tr>`,
        )
        .join("");
    return `
    <section id="tab-data">
        <h2>Datasets</h2>
        <form id="upload-form">
            <input type="file" id="upload-files" multiple accept=".csv" />
            <input type="text" id="upload-name" placeholder="dataset name (optional)" />
            <button type="button" data-action="upload">Upload</button>
        </form>
        <table id="datasets">
            <thead><tr><th>id</th><th>name</th><th>series</th><th>names</th></tr></thead>
            <tbody>${rows}</tbody>
        </table>
    </section>`;
}

function featureChecklist(state: ClientState): string {
    const selected = new Set(state.forms.featurize.selected);
    return state.catalog
        .map(
            (f) => `
            <label class="feature" title="${escapeHtml(f.description)}">
                <input type="checkbox" data-feature-checkbox value="${escapeHtml(f.name)}"
                       ${selected.has(f.name) ? "checked" : ""} />
                ${escapeHtml(f.name)}
            </label>`,
        )
        .join("");
}

function datasetOptions(state: ClientState, current: string): string {
    const blank = `<option value="" ${current === "" ? "selected" : ""}>select dataset…</option>`;
    return (
        blank +
        state.datasets
            .map(
                (d) =>
                    `<option value="${escapeHtml(d.id)}" ${current === d.id ? "selected" : ""}>${escapeHtml(d.name)} (${d.n_series})</option>`,
            )
            .join("")
    );
}

function featuresetRow(state: ClientState, f: FeaturesetInfo): string {
    return `
    <tr data-featureset-id="${escapeHtml(f.id)}">
        <td>${escapeHtml(f.id)}</td>
        <td>${escapeHtml(f.name)}</td>
        <td>${escapeHtml(f.dataset_id)}</td>
        <td>${f.features.map(escapeHtml).join(", ")}</td>
        <td>${chip(f.status)}</td>
        <td class="job-chip" data-job-id="${escapeHtml(f.job_id)}">${jobChip(state, f.job_id, f.status)}</td>
    </tr>`;
}

function featurizeTab(state: ClientState): string {
    const form = state.forms.featurize;
    const rows = state.featuresets.map((f) => featuresetRow(state, f)).join("");
    return `
    <section id="tab-featurize">
        <h2>Featurize</h2>
        <form id="featurize-form">
            <label>Dataset
                <select data-form-field data-form="featurize" data-field="datasetId" id="featurize-dataset">
                    ${datasetOptions(state, form.datasetId)}
                </select>
            </label>
            <fieldset id="feature-checklist">
                <legend>Features (${form.selected.length} selected)</legend>
                ${featureChecklist(state)}
            </fieldset>
            <label>Feature parameters (JSON, optional)
                <textarea data-form-field data-form="featurize" data-field="paramsText"
                          id="featurize-params" rows="2">${escapeHtml(form.paramsText)}</textarea>
            </label>
            <button type="button" data-action="submit-featurize">Compute features</button>
        </form>
        <table id="featuresets">
            <thead><tr><th>id</th><th>name</th><th>dataset</th><th>features</th><th>status</th><th>job</th></tr></thead>
            <tbody>${rows}</tbody>
        </table>
    </section>`;
}

function modelRow(state: ClientState, m: ModelInfo): string {
    const params = m.chosen_params
        ? Object.entries(m.chosen_params)
              .map(([k, v]) => `${escapeHtml(k)}=${escapeHtml(v === null ? "none" : v)}`)
              .join(", ")
        : "";
    const accuracy =
        typeof m.cv_accuracy === "number" ? m.cv_accuracy.toFixed(4) : "";
    return `
    <tr data-model-id="${escapeHtml(m.id)}">
        <td>${escapeHtml(m.id)}</td>
        <td>${escapeHtml(m.kind)}</td>
        <td>${escapeHtml(m.featureset_id)}</td>
        <td>${chip(m.status)}</td>
        <td class="chosen-params">${params}</td>
        <td class="cv-accuracy">${accuracy}</td>
    </tr>`;
}

function modelTab(state: ClientState): string {
    const form = state.forms.model;
    const ready = state.featuresets.filter((f) => f.status === "ready");
    const options =
        `<option value="" ${form.featuresetId === "" ? "selected" : ""}>select featureset…</option>` +
        ready
            .map(
                (f) =>
                    `<option value="${escapeHtml(f.id)}" ${form.featuresetId === f.id ? "selected" : ""}>${escapeHtml(f.name)}</option>`,
            )
            .join("");
    const rows = state.models.map((m) => modelRow(state, m)).join("");
    return `
    <section id="tab-model">
        <h2>Build Model</h2>
        <form id="model-form">
            <label>Feature set
                <select data-form-field data-form="model" data-field="featuresetId" id="model-featureset">
                    ${options}
                </select>
            </label>
            <label>Learner
                <select data-form-field data-form="model" data-field="kind" id="model-kind">
                    <option value="knn" ${form.kind === "knn" ? "selected" : ""}>k-nearest neighbors</option>
                    <option value="random_forest" ${form.kind === "random_forest" ? "selected" : ""}>random forest</option>
                </select>
            </label>
            <label>Hyperparameter grid (JSON)
                <input type="text" data-form-field data-form="model" data-field="gridText"
                       id="model-grid" value="${escapeHtml(form.gridText)}" />
            </label>
            <label>CV folds
                <input type="number" data-form-field data-form="model" data-field="cvFolds"
                       id="model-cv" value="${escapeHtml(form.cvFolds)}" min="2" />
            </label>
            <label>Seed
                <input type="number" data-form-field data-form="model" data-field="seed"
                       id="model-seed" value="${escapeHtml(form.seed)}" min="0" />
            </label>
            <button type="button" data-action="submit-model">Build model</button>
        </form>
        <table id="models">
            <thead><tr><th>id</th><th>kind</th><th>featureset</th><th>status</th><th>chosen params</th><th>CV accuracy</th></tr></thead>
            <tbody>${rows}</tbody>
        </table>
    </section>`;
}

function sortedResults(pred: PredictionInfo, state: ClientState) {
    const rows = (pred.results ?? []).slice();
    const { column, dir } = state.predictionSort;
    rows.sort((a, b) => {
        const left = (column === "name" ? a.name : a.label) ?? "";
        const right = (column === "name" ? b.name : b.label) ?? "";
        return left < right ? -dir : left > right ? dir : 0;
    });
    return rows;
}

function predictionResults(state: ClientState): string {
    const pred = state.predictions.find((p) => p.id === state.activePredictionId);
    if (!pred) {
        return "";
    }
    if (pred.status !== "ready" || !pred.results) {
        return `<p id="prediction-placeholder">Prediction ${escapeHtml(pred.id)}: ${chip(pred.status)}</p>`;
    }
    const classes = pred.classes ?? [];
    const showProbs = pred.return_probs;
    const headProbs = showProbs
        ? classes.map((c) => `<th>p(${escapeHtml(c)})</th>`).join("")
        : "";
    const rows = sortedResults(pred, state)
        .map((row) => {
            const probCells = showProbs
                ? classes
                      .map((c) => {
                          const p = row.probs ? row.probs[c] : null;
                          return `<td>${p === null || p === undefined ? "" : Number(p).toFixed(4)}</td>`;
                      })
                      .join("")
                : "";
            return `
            <tr>
                <td>${escapeHtml(row.name)}</td>
                <td class="label-cell">${row.label === null ? `<em>${escapeHtml(row.error ?? "unpredictable")}</em>` : escapeHtml(row.label)}</td>
                ${probCells}
            </tr>`;
        })
        .join("");
    return `
    <table id="prediction-results">
        <thead>
            <tr>
                <th><button data-action="sort-predictions" data-column="name">name</button></th>
                <th><button data-action="sort-predictions" data-column="label">label</button></th>
                ${headProbs}
            </tr>
        </thead>
        <tbody>${rows}</tbody>
    </table>`;
}

function predictTab(state: ClientState): string {
    const form = state.forms.predict;
    const readyModels = state.models.filter((m) => m.status === "ready");
    const modelOptions =
        `<option value="" ${form.modelId === "" ? "selected" : ""}>select model…</option>` +
        readyModels
            .map(
                (m) =>
                    `<option value="${escapeHtml(m.id)}" ${form.modelId === m.id ? "selected" : ""}>${escapeHtml(m.name)} (${escapeHtml(m.kind)})</option>`,
            )
            .join("");
    const sourceOptions =
        `<option value="" ${form.source === "" ? "selected" : ""}>select input…</option>` +
        `<optgroup label="Feature sets">` +
        state.featuresets
            .filter((f) => f.status === "ready")
            .map(
                (f) =>
                    `<option value="featureset:${escapeHtml(f.id)}" ${form.source === `featureset:${f.id}` ? "selected" : ""}>${escapeHtml(f.name)}</option>`,
            )
            .join("") +
        `</optgroup><optgroup label="Datasets">` +
        state.datasets
            .map(
                (d) =>
                    `<option value="dataset:${escapeHtml(d.id)}" ${form.source === `dataset:${d.id}` ? "selected" : ""}>${escapeHtml(d.name)}</option>`,
            )
            .join("") +
        `</optgroup>`;
    const items = state.predictions
        .map(
            (p) => `
            <li>
                <button data-action="view-prediction" data-id="${escapeHtml(p.id)}"
                        class="${state.activePredictionId === p.id ? "active" : ""}">
                    ${escapeHtml(p.id)} (${escapeHtml(p.model_id)})
                </button>
                <span class="job-chip" data-job-id="${escapeHtml(p.job_id)}">${jobChip(state, p.job_id, p.status)}</span>
            </li>`,
        )
        .join("");
    return `
    <section id="tab-predict">
        <h2>Predict</h2>
        <form id="predict-form">
            <label>Model
                <select data-form-field data-form="predict" data-field="modelId" id="predict-model">
                    ${modelOptions}
                </select>
            </label>
            <label>Input
                <select data-form-field data-form="predict" data-field="source" id="predict-source">
                    ${sourceOptions}
                </select>
            </label>
            <label class="inline">
                <input type="checkbox" data-form-field data-form="predict" data-field="returnProbs"
                       id="predict-probs" ${form.returnProbs ? "checked" : ""} />
                include probabilities
            </label>
            <button type="button" data-action="submit-predict">Predict</button>
        </form>
        <ul id="prediction-list">${items}</ul>
        ${predictionResults(state)}
    </section>`;
}

export function renderApp(state: ClientState): string {
    const tab =
        state.activeTab === "data"
            ? dataTab(state)
            : state.activeTab === "featurize"
              ? featurizeTab(state)
              : state.activeTab === "model"
                ? modelTab(state)
                : predictTab(state);
    return `
    <header>
        <h1>tsworkbench</h1>
        ${connectionBadge(state)}
        ${tabNav(state)}
    </header>
    ${banners(state)}
    <main>${tab}</main>`;
}
