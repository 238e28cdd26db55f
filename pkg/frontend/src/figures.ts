/** Figure recipes: which CSV, which rows, which axes, which reference lines. */

import type { ReferenceLine } from "./svg.js";

export interface FigureRecipe {
  id: string;
  /** CSV file name the experiment driver writes for this figure. */
  csvFile: string;
  title: string;
  xLabel: string;
  yLabel: string;
  /** Convert the swept value to decibels for the x axis. */
  xInDb?: boolean;
  yLog?: boolean;
  /** Rows must match all of these column values. */
  filter: Record<string, string>;
  /** Columns whose distinct combinations become one line each. */
  seriesBy: string[];
  referenceLines?: ReferenceLine[];
}

export const RECIPES: Record<string, FigureRecipe> = {
  fig2: {
    id: "fig2",
    csvFile: "mse-vs-pp.csv",
    title: "Channel estimation MSE vs pilot power",
    xLabel: "pilot power (dB)",
    yLabel: "estimation MSE",
    xInDb: true,
    yLog: true,
    filter: { value_name: "mse" },
    seriesBy: ["series", "method", "user"],
  },
  fig3: {
    id: "fig3",
    csvFile: "rate-vs-k.csv",
    title: "Sum rate vs number of user pairs",
    xLabel: "user pairs K",
    yLabel: "sum rate (bits/s/Hz)",
    filter: { value_name: "sum_rate" },
    seriesBy: ["method"],
  },
  fig4a: {
    id: "fig4a",
    csvFile: "rate-vs-m.csv",
    title: "Sum rate vs antenna count",
    xLabel: "antennas M",
    yLabel: "sum rate (bits/s/Hz)",
    filter: { value_name: "sum_rate" },
    seriesBy: ["method"],
  },
  fig4b: {
    id: "fig4b",
    csvFile: "rate-vs-m.csv",
    title: "Sum rate vs antenna count, K growing with M",
    xLabel: "antennas M",
    yLabel: "sum rate (bits/s/Hz)",
    filter: { value_name: "sum_rate" },
    seriesBy: ["method"],
  },
  fig5a: {
    id: "fig5a",
    csvFile: "required-power.csv",
    title: "Source power needed for the target sum rate",
    xLabel: "antennas M",
    yLabel: "required source power",
    yLog: true,
    filter: { value_name: "required_power", series: "source" },
    seriesBy: ["hw_case"],
  },
  fig5b: {
    id: "fig5b",
    csvFile: "rate-ratio.csv",
    title: "Sum-rate ratios under 1/M source-power scaling",
    xLabel: "antennas M",
    yLabel: "sum-rate ratio",
    filter: { value_name: "rate_ratio" },
    seriesBy: ["series"],
    referenceLines: [
      { label: "1", value: 1.0 },
      { label: "4/pi^2", value: 4 / Math.PI ** 2 },
    ],
  },
  fig7a: {
    id: "fig7a",
    csvFile: "required-power.csv",
    title: "Relay power needed for the target sum rate",
    xLabel: "antennas M",
    yLabel: "required relay power",
    yLog: true,
    filter: { value_name: "required_power", series: "relay" },
    seriesBy: ["hw_case"],
  },
  fig7b: {
    id: "fig7b",
    csvFile: "rate-ratio.csv",
    title: "Sum-rate ratios under 1/M relay-power scaling",
    xLabel: "antennas M",
    yLabel: "sum-rate ratio",
    filter: { value_name: "rate_ratio" },
    seriesBy: ["series"],
    referenceLines: [
      { label: "2/pi", value: 2 / Math.PI },
      { label: "4/pi^2", value: 4 / Math.PI ** 2 },
    ],
  },
  fig8: {
    id: "fig8",
    csvFile: "power-alloc.csv",
    title: "Optimized vs uniform power allocation",
    xLabel: "antennas M",
    yLabel: "sum rate (bits/s/Hz)",
    filter: { value_name: "sum_rate" },
    seriesBy: ["series", "hw_case"],
  },
};

export const FIGURE_IDS = Object.keys(RECIPES);
