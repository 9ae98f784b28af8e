import { readFileSync, writeFileSync } from "node:fs";
import { render } from "./render.js";
import { CurveKind } from "./curves.js";

const USAGE =
  "usage: selbias-plots <curves.csv> --kind pr|roc --out <path> [--band <null.csv>]\n" +
  "writes <path>.svg and <path>.png (a .svg/.png suffix on --out is stripped)";

function parseArgs(argv: string[]) {
  const positional: string[] = [];
  const flags: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a.startsWith("--")) {
      const value = argv[i + 1];
      if (value === undefined) throw new Error(`missing value for ${a}`);
      flags[a.slice(2)] = value;
      i++;
    } else {
      positional.push(a);
    }
  }
  return { positional, flags };
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    console.error(USAGE);
    return 2;
  }
  const { positional, flags } = parsed;
  const kind = flags.kind as CurveKind;
  if (positional.length !== 1 || (kind !== "pr" && kind !== "roc") ||
      !flags.out) {
    console.error(USAGE);
    return 2;
  }
  try {
    const curveCsv = readFileSync(positional[0], "utf-8");
    const bandCsv = flags.band ? readFileSync(flags.band, "utf-8") : undefined;
    const { svg, png, warnings } = render(curveCsv, kind, bandCsv);
    for (const w of warnings) console.error(`warning: ${w}`);
    const base = flags.out.replace(/\.(svg|png)$/, "");
    writeFileSync(`${base}.svg`, svg);
    writeFileSync(`${base}.png`, png);
    console.log(`${base}.svg`);
    console.log(`${base}.png`);
    return 0;
  } catch (err) {
    console.error(String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(main(process.argv.slice(2)));
}
