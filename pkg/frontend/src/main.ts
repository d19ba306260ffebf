/** DOM wiring: canvas interactions, metrics panel, history timeline, toasts. */

import { ApiClient, HttpTransport } from "./api.js";
import { Positions } from "./layout.js";
import { panelView } from "./panel.js";
import { drawNetwork } from "./render.js";
import { cycleDocument, EditorState } from "./state.js";

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const panelEl = document.getElementById("panel")!;
const timelineEl = document.getElementById("timeline")!;
const toastEl = document.getElementById("toast")!;
const modeEl = document.getElementById("mode")!;

const state = new EditorState(new ApiClient(new HttpTransport("")));
const labels: string[] = [];
let positions = new Positions(0, canvas.width, canvas.height);

// add-arc interaction: click a source node, then a target node
let pendingTail: number | null = null;
let dragging: number | null = null;
let dragMoved = false;

function nodeLabels(n: number): string[] {
  while (labels.length < n) labels.push(String(labels.length + 1));
  return labels.slice(0, n);
}

function render(): void {
  const snapshot = state.current;
  if (!snapshot) return;
  const n = snapshot.flow.length;
  positions.ensure(n, canvas.width, canvas.height);
  if (snapshot.cloudNode !== null) nodeLabels(n)[snapshot.cloudNode] = "cloud";

  drawNetwork(ctx, {
    snapshot,
    positions,
    labels: nodeLabels(n),
    lastEdit: state.lastEdit,
  });
  if (pendingTail !== null) {
    const p = positions.get(pendingTail);
    ctx.beginPath();
    ctx.arc(p.x, p.y, 20, 0, 2 * Math.PI);
    ctx.strokeStyle = "#3182ce";
    ctx.lineWidth = 2;
    ctx.stroke();
  }

  const view = panelView(snapshot, nodeLabels(n));
  panelEl.innerHTML = `
    <h2>Stage ${view.stage}</h2>
    <dl>
      <dt>Max-flow arc</dt><dd>${view.maxFlowArc} = <strong>${view.maxFlowValue}</strong></dd>
      <dt>Conservation residual</dt><dd>${view.premagicResidual}</dd>
      <dt>Network entropy</dt><dd>${view.networkEntropy} bits</dd>
      ${view.referenceArc ? `<dt>Reference arc</dt><dd>${view.referenceArc} = ${view.referenceFlow}</dd>` : ""}
      ${view.cloud ? `<dt>Cloud node</dt><dd>${view.cloud}</dd>` : ""}
    </dl>
    <h3>Per-node entropy (bits)</h3>
    <div class="bars">
      ${view.entropyBars
        .map(
          (bar) => `
        <div class="bar-row">
          <span class="bar-label">${bar.label}</span>
          <span class="bar"><span class="bar-fill" style="width:${(bar.fraction * 100).toFixed(1)}%"></span></span>
          <span class="bar-text">${bar.text}</span>
        </div>`,
        )
        .join("")}
    </div>`;

  if (state.history.length > 1) {
    timelineEl.style.display = "flex";
    timelineEl.innerHTML = state.history
      .map(
        (snap, stage) =>
          `<button class="stage${stage === state.history.length - 1 ? " current" : ""}" data-stage="${stage}">
             ${stage}
           </button>`,
      )
      .join("");
  } else {
    timelineEl.style.display = "none";
  }

  if (state.toast) {
    toastEl.textContent = `${state.toast.code}: ${state.toast.message}`;
    toastEl.classList.add("visible");
  } else {
    toastEl.classList.remove("visible");
  }

  modeEl.textContent =
    pendingTail === null
      ? "click a node to start an arc; shift-click an arc label area to remove"
      : `adding arc from node ${nodeLabels(n)[pendingTail]}; click the target node`;
}

canvas.addEventListener("mousedown", (event) => {
  const rect = canvas.getBoundingClientRect();
  const x = event.clientX - rect.left;
  const y = event.clientY - rect.top;
  dragging = positions.hit(x, y);
  dragMoved = false;
});

canvas.addEventListener("mousemove", (event) => {
  if (dragging === null) return;
  const rect = canvas.getBoundingClientRect();
  positions.moveTo(dragging, event.clientX - rect.left, event.clientY - rect.top);
  dragMoved = true;
  render();
});

canvas.addEventListener("mouseup", (event) => {
  const rect = canvas.getBoundingClientRect();
  const x = event.clientX - rect.left;
  const y = event.clientY - rect.top;
  const node = dragging;
  dragging = null;
  if (dragMoved || node === null) {
    render();
    return;
  }
  if (event.shiftKey) {
    pendingTail = null;
  } else if (pendingTail === null) {
    pendingTail = node;
  } else if (pendingTail !== node) {
    const tail = pendingTail;
    pendingTail = null;
    void state.addArc(tail, node);
  } else {
    pendingTail = null;
  }
  render();
});

// shift-click near an arc midpoint removes it
canvas.addEventListener("click", (event) => {
  if (!event.shiftKey || !state.current) return;
  const rect = canvas.getBoundingClientRect();
  const x = event.clientX - rect.left;
  const y = event.clientY - rect.top;
  const snapshot = state.current;
  snapshot.flow.forEach((row, tail) => {
    row.forEach((value, head) => {
      if (value <= 0) return;
      const a = positions.get(tail);
      const b = positions.get(head);
      const mx = (a.x + b.x) / 2;
      const my = (a.y + b.y) / 2;
      if (Math.hypot(mx - x, my - y) < 16) {
        void state.removeArc(tail, head);
      }
    });
  });
});

timelineEl.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const stage = target.dataset.stage;
  if (stage !== undefined) void state.undoToStage(Number(stage));
});

toastEl.addEventListener("click", () => state.dismissToast());

state.onChange(render);

void state.createSession(cycleDocument(5), [1, 2]);
