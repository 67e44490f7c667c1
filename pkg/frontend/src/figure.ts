/** Builds and renders the sum-rate sweep figures. */

import * as echarts from "echarts";

import { CsvSchemaError, methodsOf, SweepKind, SweepRow } from "./csv.js";

export interface FigureSpec {
  csvPath: string;
  kind: SweepKind;
  outPath: string;
  /** Vertical marker positions (degrees) drawn on the aoa figure. */
  userAoaDeg?: number[];
  width?: number;
  height?: number;
}

export const DEFAULT_USER_AOA_DEG = [-10, 0, 10];

const X_LABEL: Record<SweepKind, string> = {
  antennas: "Jammer antennas",
  power: "Jammer power (dBm)",
  aoa: "Jammer arrival angle (deg)",
};

const METHOD_LABEL: Record<string, string> = {
  no_jammer: "No Jammer",
  no_protection: "No Protection",
  analytic: "Analytic",
  minsinr: "MinSINR",
  zf: "ZF",
};

export function methodLabel(method: string): string {
  return METHOD_LABEL[method] ?? method;
}

/** echarts option for one sweep figure: one line series per method. */
export function buildOption(
  rows: SweepRow[],
  spec: FigureSpec,
): echarts.EChartsCoreOption {
  const mismatched = rows.find((r) => r.sweep !== spec.kind);
  if (mismatched) {
    throw new CsvSchemaError(
      `column 'sweep' contains '${mismatched.sweep}' but the requested kind is '${spec.kind}'`,
    );
  }
  const methods = methodsOf(rows);
  const series: echarts.SeriesOption[] = methods.map((method) => ({
    name: methodLabel(method),
    type: "line",
    showSymbol: true,
    data: rows
      .filter((r) => r.method === method)
      .sort((a, b) => a.value - b.value)
      .map((r) => [r.value, r.meanRate]),
  }));

  if (spec.kind === "aoa") {
    const markers = spec.userAoaDeg ?? DEFAULT_USER_AOA_DEG;
    const markSeries: echarts.SeriesOption = {
      name: "user-aoa-markers",
      type: "line",
      data: [],
      markLine: {
        silent: true,
        symbol: "none",
        lineStyle: { color: "#cc0000", type: "solid" },
        label: { show: false },
        data: markers.map((deg) => ({ xAxis: deg })),
      },
    };
    series.push(markSeries);
  }

  return {
    animation: false,
    legend: {
      top: 0,
      data: methods.map(methodLabel),
    },
    grid: { left: 60, right: 20, top: 40, bottom: 45 },
    xAxis: {
      type: "value",
      name: X_LABEL[spec.kind],
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: "value",
      name: "Rate (bits / s / Hz)",
      nameLocation: "middle",
      nameGap: 40,
    },
    series,
  };
}

/** Render rows to an SVG string (server side, no DOM). */
export function renderSvg(rows: SweepRow[], spec: FigureSpec): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: spec.width ?? 800,
    height: spec.height ?? 520,
  });
  try {
    chart.setOption(buildOption(rows, spec));
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
