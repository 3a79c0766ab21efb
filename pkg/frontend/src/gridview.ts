/**
 * Pure view model: folds server messages into a ViewState and renders
 * time-dependent Frames (flash burst, fade-out) from it. No DOM here so
 * the whole pipeline is unit-testable; main.ts blits Frames to a canvas.
 */

import { colorCss } from "./palette.js";
import type { ServerMessage, Snapshot } from "./protocol.js";

export const FLASH_MS = 150;

export interface ViewState {
  snapshot: Snapshot | null;
  flashAt: number | null; // ms timestamp of the last flash effect
  fadeAt: number | null; // ms timestamp when the fade started
  fadeMs: number;
  marqueeColor: number | null;
  lastError: string | null;
  lastReason: string | null; // most recent rejection reason, for the status bar
}

export function initialView(): ViewState {
  return {
    snapshot: null,
    flashAt: null,
    fadeAt: null,
    fadeMs: 0,
    marqueeColor: null,
    lastError: null,
    lastReason: null,
  };
}

/** Fold one server message into the view state; returns a new state. */
export function applyServerMessage(view: ViewState, msg: ServerMessage, nowMs: number): ViewState {
  switch (msg.type) {
    case "snapshot":
      return { ...view, snapshot: msg, marqueeColor: view.marqueeColor ?? msg.next_color };
    case "effect":
      if (msg.name === "flash") {
        return { ...view, flashAt: nowMs };
      }
      if (msg.name === "fade") {
        return { ...view, fadeAt: nowMs, fadeMs: (msg.payload.seconds ?? 5) * 1000 };
      }
      if (msg.name === "marquee") {
        return { ...view, marqueeColor: msg.payload.color_index ?? null };
      }
      return view; // chord_on is handled by the audio layer
    case "result":
      return { ...view, lastReason: msg.accepted ? null : msg.reason };
    case "error":
      return { ...view, lastError: msg.message };
  }
}

export interface Frame {
  rows: number;
  cols: number;
  /** fill color per cell, row-major; null = unlit */
  cells: (string | null)[][];
  cursor: [number, number] | null;
  pending: [number, number][];
  /** 0..1 white overlay from the tuning-swap flash */
  flash: number;
  /** 0..1 darkness from the end-of-game fade (1 = fully black) */
  dim: number;
  marqueeColor: string | null;
}

/** Render the state at a moment in time. Degrades to an empty frame until
 * the first snapshot arrives. */
export function renderFrame(view: ViewState, nowMs: number, rows = 16, cols = 16): Frame {
  const snap = view.snapshot;
  const cells: (string | null)[][] = [];
  for (let r = 0; r < rows; r++) {
    cells.push(new Array<string | null>(cols).fill(null));
  }
  if (snap) {
    for (const [r, c, color] of snap.cells) {
      if (r >= 0 && r < rows && c >= 0 && c < cols) {
        const row = cells[r]!;
        row[c] = colorCss(color);
      }
    }
  }

  let flash = 0;
  if (view.flashAt !== null) {
    const age = nowMs - view.flashAt;
    if (age >= 0 && age < FLASH_MS) {
      flash = 1 - age / FLASH_MS;
    }
  }

  let dim = 0;
  if (view.fadeAt !== null && view.fadeMs > 0) {
    dim = Math.min(1, Math.max(0, (nowMs - view.fadeAt) / view.fadeMs));
  } else if (snap && snap.mode === "ended") {
    dim = 1; // joined after the fade finished
  }

  return {
    rows,
    cols,
    cells,
    cursor: snap && snap.mode !== "ended" ? snap.cursor : null,
    pending: snap ? snap.pending : [],
    flash,
    dim,
    marqueeColor: view.marqueeColor === null ? null : colorCss(view.marqueeColor),
  };
}
