import { glyphPixels, textWidth, GLYPH_H } from "./font.js";
import { Figure, Primitive, Pt } from "./layout.js";

/** Software rasterizer painting the display list onto an RGB buffer.
 * Deliberately simple (Bresenham strokes, vertical-span band fill) so the
 * output is bit-stable across platforms. */
export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array; // RGB, row-major

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number], alpha = 1) {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(rgb[c] * alpha + this.data[i + c] * (1 - alpha));
    }
  }
}

function parseColor(hex: string): [number, number, number] {
  const v = hex.replace("#", "");
  return [parseInt(v.slice(0, 2), 16), parseInt(v.slice(2, 4), 16),
          parseInt(v.slice(4, 6), 16)];
}

function drawSegment(cv: Canvas, a: Pt, b: Pt, rgb: [number, number, number],
                     width: number, dash: boolean, phase: { d: number }) {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const steps = Math.max(1, Math.ceil(Math.max(Math.abs(dx), Math.abs(dy))));
  const stepLen = Math.hypot(dx, dy) / steps;
  for (let s = 0; s <= steps; s++) {
    const t = s / steps;
    phase.d += s === 0 ? 0 : stepLen;
    if (dash && Math.floor(phase.d / 5) % 2 === 1) continue;
    const x = a.x + t * dx;
    const y = a.y + t * dy;
    cv.set(x, y, rgb);
    if (width >= 2) {
      // thicken perpendicular to the dominant direction
      if (Math.abs(dx) >= Math.abs(dy)) {
        cv.set(x, y + 1, rgb);
      } else {
        cv.set(x + 1, y, rgb);
      }
    }
  }
}

function drawBand(cv: Canvas, lo: Pt[], hi: Pt[],
                  rgb: [number, number, number]) {
  const interp = (pts: Pt[], x: number): number => {
    if (x <= pts[0].x) return pts[0].y;
    for (let i = 1; i < pts.length; i++) {
      if (x <= pts[i].x) {
        const t = (x - pts[i - 1].x) / (pts[i].x - pts[i - 1].x || 1);
        return pts[i - 1].y + t * (pts[i].y - pts[i - 1].y);
      }
    }
    return pts[pts.length - 1].y;
  };
  const xStart = Math.ceil(Math.min(lo[0].x, hi[0].x));
  const xEnd = Math.floor(Math.max(lo[lo.length - 1].x, hi[hi.length - 1].x));
  for (let x = xStart; x <= xEnd; x++) {
    const yA = interp(lo, x);
    const yB = interp(hi, x);
    const top = Math.round(Math.min(yA, yB));
    const bottom = Math.round(Math.max(yA, yB));
    for (let y = top; y <= bottom; y++) {
      cv.set(x, y, rgb, 0.55);
    }
  }
}

function drawText(cv: Canvas, p: Extract<Primitive, { t: "text" }>) {
  const rgb = parseColor(p.color);
  const scale = p.size >= 12 ? 2 : 1;
  const w = textWidth(p.s) * scale;
  const x0 = p.anchor === "middle" ? p.x - w / 2 :
    p.anchor === "end" ? p.x - w : p.x;
  const y0 = p.y - GLYPH_H * scale; // baseline like the vector output
  for (const { dx, dy } of glyphPixels(p.s)) {
    for (let sx = 0; sx < scale; sx++) {
      for (let sy = 0; sy < scale; sy++) {
        cv.set(x0 + dx * scale + sx, y0 + dy * scale + sy, rgb);
      }
    }
  }
}

export function rasterize(fig: Figure): Canvas {
  const cv = new Canvas(fig.width, fig.height);
  for (const p of fig.primitives) {
    switch (p.t) {
      case "rect": {
        const rgb = parseColor(p.color);
        for (let y = p.y; y < p.y + p.h; y++) {
          for (let x = p.x; x < p.x + p.w; x++) {
            cv.set(x, y, rgb);
          }
        }
        break;
      }
      case "band":
        drawBand(cv, p.lo, p.hi, parseColor(p.color));
        break;
      case "line": {
        const rgb = parseColor(p.color);
        const phase = { d: 0 };
        for (let i = 1; i < p.pts.length; i++) {
          drawSegment(cv, p.pts[i - 1], p.pts[i], rgb, p.width, p.dash, phase);
        }
        break;
      }
      case "cross": {
        const rgb = parseColor(p.color);
        const s = p.size;
        drawSegment(cv, { x: p.x - s, y: p.y - s }, { x: p.x + s, y: p.y + s },
                    rgb, 2, false, { d: 0 });
        drawSegment(cv, { x: p.x - s, y: p.y + s }, { x: p.x + s, y: p.y - s },
                    rgb, 2, false, { d: 0 });
        break;
      }
      case "text":
        drawText(cv, p);
        break;
    }
  }
  return cv;
}
