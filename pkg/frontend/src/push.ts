// Push-channel client: the only server -> client path.
//
// On connection loss it reconnects with exponential backoff; the consumer
// is told about every status change so the UI can show a "reconnecting"
// badge and re-fetch the job table once the channel is back.

import type { PushMessage } from "./types.js";

export interface SocketLike {
    onopen: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: string }) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    close(): void;
}

export type SocketFactory = (url: string) => SocketLike;
export type Scheduler = (fn: () => void, delayMs: number) => unknown;

export const BASE_RECONNECT_DELAY_MS = 1000;
export const MAX_RECONNECT_DELAY_MS = 30000;

export interface PushClientOptions {
    onMessage: (message: PushMessage) => void;
    onStatus: (status: "connecting" | "connected" | "reconnecting") => void;
    makeSocket?: SocketFactory;
    schedule?: Scheduler;
}

export function reconnectDelay(attempt: number): number {
    return Math.min(
        BASE_RECONNECT_DELAY_MS * 2 ** Math.max(0, attempt - 1),
        MAX_RECONNECT_DELAY_MS,
    );
}

export class PushClient {
    private socket: SocketLike | null = null;
    private attempt = 0;
    private stopped = false;

    constructor(
        private readonly url: string,
        private readonly options: PushClientOptions,
    ) {}

    connect(): void {
        if (this.stopped) {
            return;
        }
        const makeSocket =
            this.options.makeSocket ??
            ((url: string) => new WebSocket(url) as unknown as SocketLike);
        this.options.onStatus(this.attempt === 0 ? "connecting" : "reconnecting");
        const socket = makeSocket(this.url);
        this.socket = socket;
        socket.onopen = () => {
            this.attempt = 0;
            this.options.onStatus("connected");
        };
        socket.onmessage = (event) => {
            let message: PushMessage;
            try {
                message = JSON.parse(event.data) as PushMessage;
            } catch {
                return;
            }
            this.options.onMessage(message);
        };
        socket.onclose = () => {
            if (this.stopped) {
                return;
            }
            this.attempt += 1;
            this.options.onStatus("reconnecting");
            const schedule = this.options.schedule ?? setTimeout;
            schedule(() => this.connect(), reconnectDelay(this.attempt));
        };
    }

    close(): void {
        this.stopped = true;
        this.socket?.close();
    }
}
