// Server-sent-events subscription with automatic reconnect and backoff.

export interface StreamHandlers {
  onEvent: (name: string, data: any) => void;
  onConnectionChange: (state: "live" | "reconnecting") => void;
}

const EVENT_NAMES = ["odom", "command", "session", "mode", "speaker"];
const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 5000;

export class EventStream {
  private source: EventSource | null = null;
  private backoff = BACKOFF_START_MS;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(private url: string, private handlers: StreamHandlers) {}

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.source?.close();
    this.source = null;
  }

  private connect(): void {
    const source = new EventSource(this.url);
    this.source = source;
    source.onopen = () => {
      this.backoff = BACKOFF_START_MS;
      this.handlers.onConnectionChange("live");
    };
    for (const name of EVENT_NAMES) {
      source.addEventListener(name, (event: MessageEvent) => {
        try {
          this.handlers.onEvent(name, JSON.parse(event.data));
        } catch {
          // malformed event payloads are dropped
        }
      });
    }
    source.onerror = () => {
      this.handlers.onConnectionChange("reconnecting");
      source.close();
      if (this.stopped) {
        return;
      }
      this.timer = setTimeout(() => this.connect(), this.backoff);
      this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
    };
  }
}
