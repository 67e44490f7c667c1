/** File-level entry: read a sweep CSV, render the figure, write the image. */

import { readFileSync, writeFileSync } from "fs";

import { parseSweepCsv, SweepRow } from "./csv.js";
import { FigureSpec, renderSvg } from "./figure.js";

export function renderFigure(spec: FigureSpec): SweepRow[] {
  const text = readFileSync(spec.csvPath, "utf8");
  const rows = parseSweepCsv(text);
  const svg = renderSvg(rows, spec);
  writeFileSync(spec.outPath, svg, "utf8");
  return rows;
}
