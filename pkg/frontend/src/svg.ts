import { Figure, Primitive } from "./layout.js";

const f = (v: number) => (Math.round(v * 100) / 100).toString();

function pathOf(pts: { x: number; y: number }[]): string {
  return pts.map((p, i) => `${i === 0 ? "M" : "L"}${f(p.x)} ${f(p.y)}`).join(" ");
}

function emit(p: Primitive): string {
  switch (p.t) {
    case "rect":
      return `<rect x="${f(p.x)}" y="${f(p.y)}" width="${f(p.w)}" height="${f(p.h)}" fill="${p.color}"/>`;
    case "band": {
      const outline = [...p.lo, ...[...p.hi].reverse()];
      return `<polygon points="${outline.map((q) => `${f(q.x)},${f(q.y)}`).join(" ")}" fill="${p.color}" fill-opacity="0.55" stroke="none"/>`;
    }
    case "line": {
      const dash = p.dash ? ` stroke-dasharray="6 4"` : "";
      return `<path d="${pathOf(p.pts)}" fill="none" stroke="${p.color}" stroke-width="${f(p.width)}"${dash}/>`;
    }
    case "cross": {
      const s = p.size;
      return `<path d="M${f(p.x - s)} ${f(p.y - s)} L${f(p.x + s)} ${f(p.y + s)} M${f(p.x - s)} ${f(p.y + s)} L${f(p.x + s)} ${f(p.y - s)}" stroke="${p.color}" stroke-width="2" fill="none"/>`;
    }
    case "text": {
      const anchor = p.anchor === "start" ? "" : ` text-anchor="${p.anchor}"`;
      return `<text x="${f(p.x)}" y="${f(p.y)}" font-family="Helvetica, Arial, sans-serif" font-size="${p.size}" fill="${p.color}"${anchor}>${escapeXml(p.s)}</text>`;
    }
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function figureToSvg(fig: Figure): string {
  const body = fig.primitives.map(emit).join("\n  ");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${fig.width}" height="${fig.height}" viewBox="0 0 ${fig.width} ${fig.height}">\n  ${body}\n</svg>\n`;
}
