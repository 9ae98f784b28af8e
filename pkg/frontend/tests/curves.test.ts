import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { parseBand, parseCurves, toSeries } from "../src/curves.js";

const PR_CSV = readFileSync(new URL("./fixtures/pr.csv", import.meta.url), "utf-8");
const ROC_CSV = readFileSync(new URL("./fixtures/roc.csv", import.meta.url), "utf-8");
const BAND_CSV = readFileSync(new URL("./fixtures/band.csv", import.meta.url), "utf-8");

describe("parseCurves", () => {
  it("parses a pr file produced by the evaluation pipeline", () => {
    const parsed = parseCurves(PR_CSV, "pr");
    expect(parsed.rows.length).toBeGreaterThan(2);
    expect(parsed.warnings).toEqual([]);
    expect(parsed.rows[0].method).toBe("lcd");
    expect(parsed.rows[0].y).toBeGreaterThan(0);
  });

  it("parses a roc file", () => {
    const parsed = parseCurves(ROC_CSV, "roc");
    expect(parsed.rows.every((r) => r.x >= 0 && r.x <= 1)).toBe(true);
  });

  it("rejects a pr file read as roc", () => {
    expect(() => parseCurves(PR_CSV, "roc")).toThrow(/unknown columns/);
  });

  it("rejects unknown columns", () => {
    const text = PR_CSV.replace(/\r/g, "").trim().split("\n")
      .map((line, i) => `${line},${i === 0 ? "extra" : "0"}`)
      .join("\n");
    expect(() => parseCurves(text, "pr")).toThrow(/unknown columns/);
  });

  it("rejects empty files", () => {
    const headerOnly = PR_CSV.split("\n")[0];
    expect(() => parseCurves(headerOnly, "pr")).toThrow(/no data rows/);
  });

  it("rejects non-numeric cells", () => {
    const lines = PR_CSV.split("\n");
    const broken = [lines[0], lines[1].replace(/^lcd,biased,[^,]+/,
      "lcd,biased,oops")].join("\n");
    expect(() => parseCurves(broken, "pr")).toThrow(/non-numeric/);
  });

  it("downgrades a missing marker column to a warning", () => {
    const lines = PR_CSV.trim().split("\n");
    const noMarker = lines.map((l) => l.replace(/\r$/, ""))
      .map((l) => l.split(",").slice(0, -1).join(","))
      .join("\n");
    const parsed = parseCurves(noMarker, "pr");
    expect(parsed.warnings).toHaveLength(1);
    expect(parsed.warnings[0]).toMatch(/marker/);
    expect(parsed.rows.every((r) => !r.marker)).toBe(true);
  });
});

describe("toSeries", () => {
  it("splits by method and arm, solid only for the biased arm", () => {
    const series = toSeries(parseCurves(PR_CSV, "pr").rows);
    const keys = series.map((s) => `${s.method}/${s.dataset}`);
    expect(keys).toEqual(["lcd/biased", "lcd/unbiased"]);
    expect(series[0].solid).toBe(true);
    expect(series[1].solid).toBe(false);
  });

  it("orders points by descending threshold", () => {
    const series = toSeries(parseCurves(PR_CSV, "pr").rows);
    for (const s of series) {
      for (let i = 1; i < s.points.length; i++) {
        expect(s.points[i].x).toBeGreaterThanOrEqual(s.points[i - 1].x);
      }
    }
  });
});

describe("parseBand", () => {
  it("parses and sorts the envelope", () => {
    const band = parseBand(BAND_CSV);
    expect(band[0].fpr).toBe(0);
    expect(band.every((b) => b.tprLo <= b.tprHi)).toBe(true);
  });

  it("rejects unknown columns", () => {
    expect(() => parseBand("fpr,tpr_lo,tpr_hi,bogus\n0,0,1,2\n"))
      .toThrow(/unknown band columns/);
  });
});
