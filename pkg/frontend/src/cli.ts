#!/usr/bin/env node
/** CLI: render --csv PATH --kind {antennas|power|aoa} --out PATH */

import { CsvSchemaError, SWEEP_KINDS, SweepKind } from "./csv.js";
import { DEFAULT_USER_AOA_DEG } from "./figure.js";
import { renderFigure } from "./render.js";

const USAGE =
  "usage: render --csv PATH --kind {antennas|power|aoa} --out PATH " +
  "[--markers DEG,DEG,...]";

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    console.error(USAGE);
    return 1;
  }
  const flags = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      console.error(`bad argument '${key}'\n${USAGE}`);
      return 1;
    }
    flags.set(key.slice(2), value);
  }
  const csvPath = flags.get("csv");
  const kind = flags.get("kind");
  const outPath = flags.get("out");
  const known = new Set(["csv", "kind", "out", "markers"]);
  for (const key of flags.keys()) {
    if (!known.has(key)) {
      console.error(`unknown flag '--${key}'\n${USAGE}`);
      return 1;
    }
  }
  if (!csvPath || !kind || !outPath) {
    console.error(USAGE);
    return 1;
  }
  if (!SWEEP_KINDS.includes(kind as SweepKind)) {
    console.error(`unknown kind '${kind}'\n${USAGE}`);
    return 1;
  }
  let markers = DEFAULT_USER_AOA_DEG;
  const rawMarkers = flags.get("markers");
  if (rawMarkers !== undefined) {
    markers = rawMarkers.split(",").map(Number);
    if (markers.some(Number.isNaN)) {
      console.error(`bad --markers value '${rawMarkers}'\n${USAGE}`);
      return 1;
    }
  }
  try {
    const rows = renderFigure({
      csvPath,
      kind: kind as SweepKind,
      outPath,
      userAoaDeg: markers,
    });
    console.log(`rendered ${rows.length} rows to ${outPath}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvSchemaError) {
      console.error(`CSV schema error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
