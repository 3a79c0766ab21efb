/** Shape palette, index-aligned with the server's color indices. */

export const PALETTE_NAMES = ["red", "orange", "yellow", "green", "blue", "violet"] as const;

export const PALETTE_CSS: Record<(typeof PALETTE_NAMES)[number], string> = {
  red: "#e5484d",
  orange: "#f76b15",
  yellow: "#ffe629",
  green: "#30a46c",
  blue: "#0090ff",
  violet: "#8e4ec6",
};

export function colorName(index: number): (typeof PALETTE_NAMES)[number] {
  const name = PALETTE_NAMES[((index % PALETTE_NAMES.length) + PALETTE_NAMES.length) % PALETTE_NAMES.length];
  return name as (typeof PALETTE_NAMES)[number];
}

export function colorCss(index: number): string {
  return PALETTE_CSS[colorName(index)];
}
