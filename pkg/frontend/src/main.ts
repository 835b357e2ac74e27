// Console wiring: bootstraps from /state + /map, folds stream events into
// the view, renders on animation frames, and maps UI actions to API calls.

import {
  ApiError,
  MANUAL_BUTTONS,
  getMap,
  getState,
  postCommand,
  postGoal,
  postStop,
  putMode,
} from "./api";
import { EventStream } from "./events";
import { draw } from "./render";
import {
  applyCommand,
  applyMode,
  applyOdom,
  applySession,
  applySpeaker,
  bootstrap,
  clickToGoal,
  ViewState,
} from "./state";
import { TERMINAL_STATUSES } from "./types";

let view: ViewState | null = null;

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const sessionDot = document.getElementById("session-dot")!;
const sessionLabel = document.getElementById("session-label")!;
const speakerLabel = document.getElementById("speaker-label")!;
const connLabel = document.getElementById("conn-label")!;
const modeButtons = Array.from(
  document.querySelectorAll<HTMLButtonElement>("button[data-mode]"),
);
const padButtons = Array.from(
  document.querySelectorAll<HTMLButtonElement>("button[data-cmd]"),
);
const stopButton = document.getElementById("estop") as HTMLButtonElement;
const statusBody = document.getElementById("status-body") as HTMLTableSectionElement;
const hint = document.getElementById("hint")!;

function showBanner(message: string): void {
  banner.textContent = message;
  banner.classList.add("visible");
  setTimeout(() => banner.classList.remove("visible"), 4000);
}

async function act<T>(promise: Promise<T>): Promise<T | null> {
  if (!view) return null;
  view.pendingActions += 1;
  try {
    return await promise;
  } catch (error) {
    showBanner(error instanceof ApiError ? error.reason : String(error));
    return null;
  } finally {
    view.pendingActions -= 1;
  }
}

function refreshControls(): void {
  if (!view) return;
  const mode = view.snapshot.mode;
  for (const button of modeButtons) {
    button.classList.toggle("active", button.dataset.mode === mode);
  }
  for (const button of padButtons) {
    button.disabled = mode !== "manual";
  }
  const session = view.snapshot.session;
  sessionDot.className = `dot ${session.state}`;
  sessionLabel.textContent =
    session.state + (session.rtt_ms != null ? ` (${session.rtt_ms.toFixed(0)} ms rtt)` : "");
  connLabel.textContent = view.connection === "live" ? "" : "stream reconnecting…";
  const speaker = view.snapshot.speaker;
  speakerLabel.textContent =
    speaker && speaker.age_ms < 5000 ? `speaker ${speaker.angle_deg.toFixed(0)}°` : "";
}

function refreshStatusTable(): void {
  if (!view) return;
  const rows = view.snapshot.queue.slice(-12).reverse();
  statusBody.innerHTML = "";
  for (const record of rows) {
    const tr = document.createElement("tr");
    tr.className = TERMINAL_STATUSES.has(record.status) ? `term ${record.status}` : record.status;
    const cmd = JSON.stringify(record.command);
    tr.innerHTML =
      `<td>${record.id}</td><td>${record.source}</td><td>${cmd}</td>` +
      `<td>${record.status}</td><td>${record.detail ?? ""}</td>`;
    statusBody.appendChild(tr);
  }
}

async function reload(): Promise<void> {
  const [snapshot, map] = await Promise.all([getState(), getMap()]);
  view = bootstrap(snapshot, map);
  canvas.width = view.meta.widthPx;
  canvas.height = view.meta.heightPx;
  refreshControls();
  refreshStatusTable();
}

function frame(): void {
  if (view) {
    draw(ctx, view, performance.now());
  }
  requestAnimationFrame(frame);
}

canvas.addEventListener("click", async (event) => {
  if (!view) return;
  const rect = canvas.getBoundingClientRect();
  const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
  const py = ((event.clientY - rect.top) / rect.height) * canvas.height;
  const goal = clickToGoal(px, py, view);
  if (goal === null) {
    hint.textContent = "switch to auto mode to click goals";
    setTimeout(() => (hint.textContent = ""), 2500);
    return;
  }
  const response = await act(postGoal(goal[0], goal[1]));
  if (response && view) {
    view.plannedPath = response.path;
  }
});

for (const button of modeButtons) {
  button.addEventListener("click", async () => {
    const mode = button.dataset.mode as "manual" | "auto";
    const result = await act(putMode(mode));
    if (result && view) {
      applyMode(view, mode);
      if (mode === "manual") view.plannedPath = [];
      refreshControls();
    }
  });
}

for (const button of padButtons) {
  button.addEventListener("click", () => {
    const payload = MANUAL_BUTTONS[button.dataset.cmd!];
    void act(postCommand(payload));
  });
}

stopButton.addEventListener("click", () => void act(postStop()));
document.addEventListener("keydown", (event) => {
  if (event.code === "Space" && !(event.target instanceof HTMLInputElement)) {
    event.preventDefault();
    void act(postStop());
  }
});

const stream = new EventStream("/api/v1/events", {
  onEvent(name, data) {
    if (!view) return;
    if (name === "odom") applyOdom(view, data);
    else if (name === "command") {
      applyCommand(view, data);
      refreshStatusTable();
    } else if (name === "session") applySession(view, data);
    else if (name === "mode") applyMode(view, data.mode);
    else if (name === "speaker") applySpeaker(view, data.angle_deg, performance.now());
    refreshControls();
  },
  onConnectionChange(state) {
    if (!view) return;
    view.connection = state;
    if (state === "live") {
      // a reconnect may have missed events; rebuild from truth
      void reload();
    }
    refreshControls();
  },
});

void reload().then(() => {
  stream.start();
  frame();
});
