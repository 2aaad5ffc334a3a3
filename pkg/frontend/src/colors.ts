// The ten grid colors, indexed 0-9 in the fixed order the compiler's
// preamble binds them. Hex values follow the common task-viewer palette.
export const COLOR_NAMES = [
  "black", "blue", "red", "green", "yellow",
  "grey", "pink", "orange", "teal", "maroon",
] as const;

export const COLOR_HEX = [
  "#000000", "#0074D9", "#FF4136", "#2ECC40", "#FFDC00",
  "#AAAAAA", "#F012BE", "#FF851B", "#7FDBFF", "#870C25",
] as const;

export const N_COLORS = 10;
