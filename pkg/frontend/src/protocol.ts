/**
 * Wire types for the session service, matching PROTOCOL.md at the repo root.
 * The server is the source of truth; the UI never derives musical state
 * locally, it only renders what these messages carry.
 */

export type MoveArg = "up" | "down" | "left" | "right";
export type ButtonArg =
  | "draw"
  | "sonify"
  | "shift"
  | "mirror"
  | "rotate"
  | "delete"
  | "change_tuning"
  | "end_game";

export type InputAction =
  | { kind: "move"; arg: MoveArg }
  | { kind: "button"; arg: ButtonArg };

export interface InputMessage {
  type: "input";
  at: number;
  kind: "move" | "button";
  arg: string;
}

export interface ChordVoice {
  freq_hz: number;
  tet_name: string;
  cents_off: number;
}

export interface Snapshot {
  type: "snapshot";
  mode: "drawing" | "shifting" | "ended";
  system: "5" | "7";
  cursor: [number, number];
  pending: [number, number][];
  cells: [number, number, number][];
  history_len: number;
  next_color: number;
  chord: ChordVoice[] | null;
}

export interface EffectMessage {
  type: "effect";
  name: "chord_on" | "flash" | "fade" | "marquee";
  payload: {
    freqs?: number[];
    seconds?: number;
    color_index?: number;
  };
}

export interface ResultMessage {
  type: "result";
  at: number;
  accepted: boolean;
  reason: string | null;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = Snapshot | EffectMessage | ResultMessage | ErrorMessage;

export function parseServerMessage(raw: string): ServerMessage {
  const msg = JSON.parse(raw);
  if (
    msg === null ||
    typeof msg !== "object" ||
    !["snapshot", "effect", "result", "error"].includes(msg.type)
  ) {
    throw new Error(`unrecognized server message: ${raw.slice(0, 120)}`);
  }
  return msg as ServerMessage;
}

export function inputMessage(action: InputAction, at: number): InputMessage {
  return { type: "input", at, kind: action.kind, arg: action.arg };
}
