/**
 * Pitch readout: renders the served chord voices as text. All values come
 * from the server (frequency, nearest 12TET note, cent deviation); the UI
 * does no tuning math of its own.
 */

import type { ChordVoice, Snapshot } from "./protocol.js";

export function formatCents(cents: number): string {
  const sign = cents >= 0 ? "+" : "−";
  return `${sign}${Math.abs(cents).toFixed(1)}¢`;
}

export function formatVoice(voice: ChordVoice): string {
  const hz =
    Number.isInteger(voice.freq_hz) ? voice.freq_hz.toFixed(0) : voice.freq_hz.toFixed(2);
  return `${hz} Hz ≈ ${voice.tet_name} ${formatCents(voice.cents_off)}`;
}

/** Lines for the overlay; empty when no chord is sounding. */
export function readoutLines(snapshot: Snapshot | null): string[] {
  if (!snapshot || !snapshot.chord) {
    return [];
  }
  return snapshot.chord.map(formatVoice);
}

export function systemLabel(snapshot: Snapshot | null): string {
  if (!snapshot) return "";
  return snapshot.system === "5" ? "five-limit" : "seven-limit";
}
