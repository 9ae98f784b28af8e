/** Tiny 5x7 bitmap font for raster labels (lowercase, digits, few marks). */

const G: Record<string, string[]> = {
  a: ["", "", ".###.", "....#", ".####", "#...#", ".####"],
  b: ["#....", "#....", "####.", "#...#", "#...#", "#...#", "####."],
  c: ["", "", ".####", "#....", "#....", "#....", ".####"],
  d: ["....#", "....#", ".####", "#...#", "#...#", "#...#", ".####"],
  e: ["", "", ".###.", "#...#", "#####", "#....", ".####"],
  f: ["..##.", ".#...", "####.", ".#...", ".#...", ".#...", ".#..."],
  g: ["", "", ".####", "#...#", ".####", "....#", "####."],
  h: ["#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#"],
  i: ["..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."],
  j: ["...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."],
  k: ["#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."],
  l: [".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."],
  m: ["", "", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#.#.#"],
  n: ["", "", "####.", "#...#", "#...#", "#...#", "#...#"],
  o: ["", "", ".###.", "#...#", "#...#", "#...#", ".###."],
  p: ["", "", "####.", "#...#", "####.", "#....", "#...."],
  q: ["", "", ".####", "#...#", ".####", "....#", "....#"],
  r: ["", "", "#.###", "##...", "#....", "#....", "#...."],
  s: ["", "", ".####", "#....", ".###.", "....#", "####."],
  t: [".#...", ".#...", "####.", ".#...", ".#...", ".#...", "..###"],
  u: ["", "", "#...#", "#...#", "#...#", "#...#", ".####"],
  v: ["", "", "#...#", "#...#", "#...#", ".#.#.", "..#.."],
  w: ["", "", "#.#.#", "#.#.#", "#.#.#", "#.#.#", ".#.#."],
  x: ["", "", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"],
  y: ["", "", "#...#", "#...#", ".####", "....#", "####."],
  z: ["", "", "#####", "...#.", "..#..", ".#...", "#####"],
  "0": [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."],
  "1": ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."],
  "2": [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"],
  "3": [".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."],
  "4": ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."],
  "5": ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."],
  "6": [".###.", "#....", "####.", "#...#", "#...#", "#...#", ".###."],
  "7": ["#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."],
  "8": [".###.", "#...#", ".###.", "#...#", "#...#", "#...#", ".###."],
  "9": [".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."],
  ".": ["", "", "", "", "", ".##..", ".##.."],
  "-": ["", "", "", "#####", "", "", ""],
  "/": ["....#", "...#.", "..#..", "..#..", ".#...", "#....", "#...."],
  "=": ["", "", "#####", "", "#####", "", ""],
  ":": ["", ".##..", ".##..", "", ".##..", ".##..", ""],
  " ": ["", "", "", "", "", "", ""],
};

export const GLYPH_W = 6; // 5 pixels + 1 spacing
export const GLYPH_H = 7;

/** Pixel offsets of a string at scale 1 (dx, dy from the top-left corner). */
export function glyphPixels(text: string): { dx: number; dy: number }[] {
  const out: { dx: number; dy: number }[] = [];
  let cx = 0;
  for (const ch of text.toLowerCase()) {
    const rows = G[ch] ?? G["."];
    for (let r = 0; r < GLYPH_H; r++) {
      const row = rows[r] ?? "";
      for (let c = 0; c < row.length; c++) {
        if (row[c] === "#") {
          out.push({ dx: cx + c, dy: r });
        }
      }
    }
    cx += GLYPH_W;
  }
  return out;
}

export function textWidth(text: string): number {
  return text.length * GLYPH_W;
}
