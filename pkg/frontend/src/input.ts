/**
 * Input mapping: keyboard codes and gamepad buttons to instrument actions.
 * Unmapped inputs yield null and are dropped.
 */

import type { ButtonArg, InputAction, MoveArg } from "./protocol.js";

export type KeyMapping = Record<string, InputAction>;

const move = (arg: MoveArg): InputAction => ({ kind: "move", arg });
const button = (arg: ButtonArg): InputAction => ({ kind: "button", arg });

/** Number row mirrors the cabinet's eight buttons; letters are mnemonics. */
export const DEFAULT_KEY_MAPPING: KeyMapping = {
  ArrowUp: move("up"),
  ArrowDown: move("down"),
  ArrowLeft: move("left"),
  ArrowRight: move("right"),
  Digit1: button("draw"),
  Digit2: button("sonify"),
  Digit3: button("shift"),
  Digit4: button("mirror"),
  Digit5: button("rotate"),
  Digit6: button("delete"),
  Digit7: button("change_tuning"),
  Digit8: button("end_game"),
  KeyD: button("draw"),
  KeyS: button("sonify"),
  KeyH: button("shift"),
  KeyM: button("mirror"),
  KeyR: button("rotate"),
  KeyX: button("delete"),
  KeyT: button("change_tuning"),
  KeyE: button("end_game"),
};

export function mapKey(code: string, mapping: KeyMapping = DEFAULT_KEY_MAPPING): InputAction | null {
  return mapping[code] ?? null;
}

/**
 * Standard-mapping gamepad: D-pad (12-15) is the joystick, face/shoulder
 * buttons 0-7 are the eight instrument buttons.
 */
const GAMEPAD_BUTTONS: (InputAction | null)[] = [
  button("draw"),
  button("sonify"),
  button("shift"),
  button("mirror"),
  button("rotate"),
  button("delete"),
  button("change_tuning"),
  button("end_game"),
  null,
  null,
  null,
  null,
  move("up"),
  move("down"),
  move("left"),
  move("right"),
];

export function mapGamepadButton(index: number): InputAction | null {
  return GAMEPAD_BUTTONS[index] ?? null;
}
