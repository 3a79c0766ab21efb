/**
 * Browser entry: wires the socket, view model, input mapping, audio, and
 * canvas together. Keyboard presses dispatch to the server inside the
 * keydown handler itself (well under a frame); the screen only ever shows
 * server-acknowledged snapshots.
 */

import { ChordPlayer } from "./audio.js";
import { PerformerClient } from "./client.js";
import { applyServerMessage, initialView, renderFrame, type ViewState } from "./gridview.js";
import { DEFAULT_KEY_MAPPING, mapGamepadButton, mapKey } from "./input.js";
import { readoutLines, systemLabel } from "./readout.js";

const GRID = 16;
const CELL = 36;
const GAP = 2;

const canvas = document.getElementById("grid") as HTMLCanvasElement;
const marquee = document.getElementById("marquee") as HTMLDivElement;
const readout = document.getElementById("readout") as HTMLDivElement;
const status = document.getElementById("status") as HTMLDivElement;
const ctx2d = canvas.getContext("2d")!;

let view: ViewState = initialView();
const audio = new ChordPlayer();

const wsUrl =
  new URLSearchParams(location.search).get("server") ??
  `ws://${location.hostname || "127.0.0.1"}:${location.port || "8765"}/ws/performer`;

const client = new PerformerClient(wsUrl, (url) => new WebSocket(url));

client.onMessage((msg) => {
  view = applyServerMessage(view, msg, performance.now());
  if (msg.type === "effect" && msg.name === "chord_on" && msg.payload.freqs) {
    audio.playChord(msg.payload.freqs);
  }
  if (msg.type === "effect" && msg.name === "fade") {
    audio.fadeOut(msg.payload.seconds ?? 5);
  }
  updateOverlays();
});

function updateOverlays(): void {
  const lines = readoutLines(view.snapshot);
  readout.innerHTML = lines.length
    ? lines.map((l) => `<div>${l}</div>`).join("")
    : "<div class='muted'>no chord</div>";
  const bits: string[] = [];
  bits.push(client.connected ? "connected" : "disconnected");
  if (view.snapshot) {
    bits.push(systemLabel(view.snapshot));
    bits.push(`${view.snapshot.history_len} shapes`);
    bits.push(view.snapshot.mode);
  }
  if (!audio.available) bits.push("audio unavailable, visual only");
  if (view.lastReason) bits.push(`rejected: ${view.lastReason}`);
  if (view.lastError) bits.push(`error: ${view.lastError}`);
  status.textContent = bits.join(" · ");
}

window.addEventListener("keydown", (event) => {
  if (event.repeat) return;
  const action = mapKey(event.code, DEFAULT_KEY_MAPPING);
  if (!action || !client.connected) return;
  event.preventDefault();
  client.sendAction(action); // dispatch immediately, same task as the event
});

// Standard-mapping gamepads: poll once per frame, edge-triggered.
const padPressed = new Map<number, boolean>();
function pollGamepad(): void {
  const pad = navigator.getGamepads?.()[0];
  if (!pad) return;
  pad.buttons.forEach((b, i) => {
    const was = padPressed.get(i) ?? false;
    if (b.pressed && !was) {
      const action = mapGamepadButton(i);
      if (action && client.connected) client.sendAction(action);
    }
    padPressed.set(i, b.pressed);
  });
}

function draw(): void {
  pollGamepad();
  const frame = renderFrame(view, performance.now(), GRID, GRID);
  const size = GRID * (CELL + GAP) + GAP;
  canvas.width = size;
  canvas.height = size;
  ctx2d.fillStyle = "#101014";
  ctx2d.fillRect(0, 0, size, size);

  for (let r = 0; r < frame.rows; r++) {
    for (let c = 0; c < frame.cols; c++) {
      const fill = frame.cells[r]?.[c];
      ctx2d.fillStyle = fill ?? "#1d1d24";
      ctx2d.fillRect(GAP + c * (CELL + GAP), GAP + r * (CELL + GAP), CELL, CELL);
    }
  }
  // pending cells: bright outline over the fill
  ctx2d.lineWidth = 3;
  ctx2d.strokeStyle = "#ffffff";
  for (const [r, c] of frame.pending) {
    ctx2d.strokeRect(GAP + c * (CELL + GAP) + 2, GAP + r * (CELL + GAP) + 2, CELL - 4, CELL - 4);
  }
  // cursor: corner ticks so it reads over any color
  if (frame.cursor) {
    const [r, c] = frame.cursor;
    ctx2d.strokeStyle = "#f5f5f5";
    ctx2d.lineWidth = 2;
    ctx2d.strokeRect(GAP + c * (CELL + GAP) - 1, GAP + r * (CELL + GAP) - 1, CELL + 2, CELL + 2);
  }
  if (frame.flash > 0) {
    ctx2d.fillStyle = `rgba(255,255,255,${frame.flash.toFixed(3)})`;
    ctx2d.fillRect(0, 0, size, size);
  }
  if (frame.dim > 0) {
    ctx2d.fillStyle = `rgba(0,0,0,${frame.dim.toFixed(3)})`;
    ctx2d.fillRect(0, 0, size, size);
  }
  marquee.style.background = frame.marqueeColor ?? "#1d1d24";
  requestAnimationFrame(draw);
}

client
  .connect()
  .then(() => {
    updateOverlays();
    requestAnimationFrame(draw);
  })
  .catch((err) => {
    status.textContent = `connection failed: ${err.message ?? err}`;
  });
