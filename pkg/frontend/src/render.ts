import { CurveKind, parseBand, parseCurves, toSeries } from "./curves.js";
import { layoutFigure } from "./layout.js";
import { encodePng } from "./png.js";
import { rasterize } from "./raster.js";
import { figureToSvg } from "./svg.js";

export interface Rendered {
  svg: string;
  png: Buffer;
  warnings: string[];
}

/** Render one curve CSV (and optional ROC null-band CSV) to SVG + PNG. */
export function render(curveCsv: string, kind: CurveKind,
                       bandCsv?: string): Rendered {
  const parsed = parseCurves(curveCsv, kind);
  const warnings = [...parsed.warnings];
  let band;
  if (bandCsv !== undefined) {
    if (kind !== "roc") {
      warnings.push("null band ignored for pr figures");
    } else {
      band = parseBand(bandCsv);
    }
  }
  const fig = layoutFigure(kind, toSeries(parsed.rows), band);
  const canvas = rasterize(fig);
  return {
    svg: figureToSvg(fig),
    png: encodePng(canvas.width, canvas.height, canvas.data),
    warnings,
  };
}
