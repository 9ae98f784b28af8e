import { BandRow, CurveKind, Series } from "./curves.js";

export type Pt = { x: number; y: number };

export type Primitive =
  | { t: "rect"; x: number; y: number; w: number; h: number; color: string }
  | { t: "band"; lo: Pt[]; hi: Pt[]; color: string }
  | { t: "line"; pts: Pt[]; color: string; dash: boolean; width: number }
  | { t: "cross"; x: number; y: number; color: string; size: number }
  | { t: "text"; x: number; y: number; s: string; color: string; size: number;
      anchor: "start" | "middle" | "end" };

export interface Figure {
  width: number;
  height: number;
  primitives: Primitive[];
}

export const WIDTH = 640;
export const HEIGHT = 480;
const MARGIN = { left: 64, right: 16, top: 20, bottom: 48 };

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b",
                 "#e377c2"];
const AXIS_COLOR = "#222222";
const BAND_COLOR = "#cccccc";
const TICKS = [0, 0.2, 0.4, 0.6, 0.8, 1];

const AXIS_LABELS: Record<CurveKind, [string, string]> = {
  pr: ["recall", "precision"],
  roc: ["false positive rate", "true positive rate"],
};

function scaleX(v: number): number {
  return MARGIN.left + v * (WIDTH - MARGIN.left - MARGIN.right);
}

function scaleY(v: number): number {
  return HEIGHT - MARGIN.bottom - v * (HEIGHT - MARGIN.top - MARGIN.bottom);
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

/** Build the device-space display list for one figure. */
export function layoutFigure(kind: CurveKind, series: Series[],
                             band?: BandRow[]): Figure {
  const prims: Primitive[] = [];
  prims.push({ t: "rect", x: 0, y: 0, w: WIDTH, h: HEIGHT, color: "#ffffff" });

  if (band && band.length > 0) {
    prims.push({
      t: "band",
      lo: band.map((b) => ({ x: scaleX(clamp01(b.fpr)), y: scaleY(clamp01(b.tprLo)) })),
      hi: band.map((b) => ({ x: scaleX(clamp01(b.fpr)), y: scaleY(clamp01(b.tprHi)) })),
      color: BAND_COLOR,
    });
  }

  // frame and ticks
  const x0 = scaleX(0), x1 = scaleX(1), y0 = scaleY(0), y1 = scaleY(1);
  prims.push({ t: "line", pts: [{ x: x0, y: y0 }, { x: x1, y: y0 }],
               color: AXIS_COLOR, dash: false, width: 1 });
  prims.push({ t: "line", pts: [{ x: x0, y: y0 }, { x: x0, y: y1 }],
               color: AXIS_COLOR, dash: false, width: 1 });
  for (const tick of TICKS) {
    const tx = scaleX(tick), ty = scaleY(tick);
    prims.push({ t: "line", pts: [{ x: tx, y: y0 }, { x: tx, y: y0 + 4 }],
                 color: AXIS_COLOR, dash: false, width: 1 });
    prims.push({ t: "text", x: tx, y: y0 + 16, s: tick.toFixed(1),
                 color: AXIS_COLOR, size: 10, anchor: "middle" });
    prims.push({ t: "line", pts: [{ x: x0 - 4, y: ty }, { x: x0, y: ty }],
                 color: AXIS_COLOR, dash: false, width: 1 });
    prims.push({ t: "text", x: x0 - 7, y: ty + 4, s: tick.toFixed(1),
                 color: AXIS_COLOR, size: 10, anchor: "end" });
  }
  const [xLabel, yLabel] = AXIS_LABELS[kind];
  prims.push({ t: "text", x: (x0 + x1) / 2, y: HEIGHT - 14, s: xLabel,
               color: AXIS_COLOR, size: 12, anchor: "middle" });
  prims.push({ t: "text", x: x0, y: MARGIN.top - 6, s: yLabel,
               color: AXIS_COLOR, size: 12, anchor: "start" });

  // one color per method, in first-appearance order
  const methodColor = new Map<string, string>();
  for (const s of series) {
    if (!methodColor.has(s.method)) {
      methodColor.set(s.method, PALETTE[methodColor.size % PALETTE.length]);
    }
  }

  for (const s of series) {
    const color = methodColor.get(s.method)!;
    const pts = s.points.map((p) => ({ x: scaleX(clamp01(p.x)),
                                       y: scaleY(clamp01(p.y)) }));
    prims.push({ t: "line", pts, color, dash: !s.solid, width: 2 });
    for (let i = 0; i < s.points.length; i++) {
      if (s.points[i].marker) {
        prims.push({ t: "cross", x: pts[i].x, y: pts[i].y, color, size: 6 });
      }
    }
  }

  // legend, top-right inside the frame
  let ly = MARGIN.top + 12;
  for (const s of series) {
    const color = methodColor.get(s.method)!;
    const lx = x1 - 150;
    prims.push({ t: "line", pts: [{ x: lx, y: ly - 4 }, { x: lx + 24, y: ly - 4 }],
                 color, dash: !s.solid, width: 2 });
    prims.push({ t: "text", x: lx + 30, y: ly, s: `${s.method}/${s.dataset}`,
                 color: AXIS_COLOR, size: 10, anchor: "start" });
    ly += 14;
  }
  return { width: WIDTH, height: HEIGHT, primitives: prims };
}
