import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { render } from "../src/render.js";
import { main } from "../src/main.js";

const fx = (name: string) =>
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8");
const golden = (name: string) =>
  readFileSync(new URL(`./golden/${name}`, import.meta.url));

describe("render", () => {
  it("matches the pr golden files byte for byte", () => {
    const { svg, png, warnings } = render(fx("pr.csv"), "pr");
    expect(warnings).toEqual([]);
    expect(svg).toBe(golden("pr.svg").toString("utf-8"));
    expect(Buffer.compare(png, golden("pr.png"))).toBe(0);
  });

  it("matches the roc golden files (with gray null band)", () => {
    const { svg, png } = render(fx("roc.csv"), "roc", fx("band.csv"));
    expect(svg).toBe(golden("roc.svg").toString("utf-8"));
    expect(Buffer.compare(png, golden("roc.png"))).toBe(0);
  });

  it("draws the biased arm solid and the unbiased arm dashed", () => {
    const { svg } = render(fx("pr.csv"), "pr");
    const curves = svg.split("\n").filter(
      (l) => l.includes('stroke-width="2"') && l.includes("path"));
    const dashed = curves.filter((l) => l.includes("stroke-dasharray"));
    expect(dashed.length).toBeGreaterThan(0);
    expect(dashed.length).toBeLessThan(curves.length);
  });

  it("marks the p=0.01-equivalent threshold with a cross", () => {
    const { svg } = render(fx("pr.csv"), "pr");
    // crosses are two crossing segments in one path (M..L..M..L)
    const crosses = svg.match(/M[\d. ]+L[\d. ]+M[\d. ]+L[\d. ]+/g) ?? [];
    expect(crosses.length).toBeGreaterThanOrEqual(2);
  });

  it("renders the gray band only for roc", () => {
    const roc = render(fx("roc.csv"), "roc", fx("band.csv"));
    expect(roc.svg).toContain("polygon");
    const pr = render(fx("pr.csv"), "pr", fx("band.csv"));
    expect(pr.svg).not.toContain("polygon");
    expect(pr.warnings.some((w) => w.includes("band"))).toBe(true);
  });

  it("legend carries one entry per method and arm", () => {
    const { svg } = render(fx("pr.csv"), "pr");
    expect(svg).toContain(">lcd/biased<");
    expect(svg).toContain(">lcd/unbiased<");
  });

  it("emits a valid png signature and nonzero payload", () => {
    const { png } = render(fx("pr.csv"), "pr");
    expect([...png.subarray(0, 8)]).toEqual(
      [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    expect(png.length).toBeGreaterThan(1000);
  });

  it("is deterministic", () => {
    const a = render(fx("roc.csv"), "roc", fx("band.csv"));
    const b = render(fx("roc.csv"), "roc", fx("band.csv"));
    expect(a.svg).toBe(b.svg);
    expect(Buffer.compare(a.png, b.png)).toBe(0);
  });

  it("rejects mismatched kind/columns", () => {
    expect(() => render(fx("pr.csv"), "roc")).toThrow();
  });
});

describe("cli entry", () => {
  it("writes svg and png next to --out", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "pr.csv");
    writeFileSync(input, fx("pr.csv"));
    const out = join(dir, "figure.svg");
    const code = main([input, "--kind", "pr", "--out", out]);
    expect(code).toBe(0);
    expect(existsSync(join(dir, "figure.svg"))).toBe(true);
    expect(existsSync(join(dir, "figure.png"))).toBe(true);
  });

  it("fails with usage on bad flags", () => {
    expect(main(["--kind", "pr"])).toBe(2);
  });

  it("fails cleanly on a bad file", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "bad.csv");
    writeFileSync(input, "method,dataset\nlcd,biased\n");
    expect(main([input, "--kind", "pr", "--out", join(dir, "x")])).toBe(1);
  });
});
