/** The five figure kinds rendered from harness artifacts. */

import {
  RELAX_COLUMNS,
  SERIES_COLUMNS,
  SUMMARY_COLUMNS,
  fitLogSlope,
  numericColumn,
  readCsv,
  readFieldTable,
  stringColumn,
} from "./data";
import { PALETTE, Plot } from "./svg";

export interface RenderResult {
  svg: string;
  /** extra values the CLI reports on stdout (e.g. the fitted slope) */
  report: Record<string, number>;
}

export function renderSeries(inputPath: string): RenderResult {
  const table = readCsv(inputPath, SERIES_COLUMNS);
  const t = numericColumn(table, "t");
  const plot = new Plot({
    title: "run diagnostics",
    xLabel: "t",
    yLabel: "value",
  });
  const picks = ["l2_dist", "hgamma2", "moment2", "annular_mass"] as const;
  picks.forEach((name, i) => {
    plot.add({ label: name, x: t, y: numericColumn(table, name), color: PALETTE[i] });
  });
  return { svg: plot.render(), report: {} };
}

export function renderSweepMap(inputPath: string): RenderResult {
  const table = readCsv(inputPath, SUMMARY_COLUMNS);
  const A = numericColumn(table, "A");
  const outcome = stringColumn(table, "outcome");
  const peak = numericColumn(table, "max_l2_dist");
  const plot = new Plot({
    title: "amplitude sweep outcome map",
    xLabel: "A",
    yLabel: "max_l2_dist",
  });
  const classes: Array<[string, string]> = [["blowup", PALETTE[1]], ["global", PALETTE[2]]];
  for (const [label, color] of classes) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < A.length; i++) {
      if (outcome[i] === label) {
        xs.push(A[i]);
        ys.push(peak[i]);
      }
    }
    if (xs.length > 0) {
      plot.add({ label, x: xs, y: ys, color, marker: true });
    }
  }
  return { svg: plot.render(), report: {} };
}

export function renderRelaxCurve(inputPath: string): RenderResult {
  const table = readCsv(inputPath, RELAX_COLUMNS);
  const A = numericColumn(table, "A");
  const ratio = numericColumn(table, "ratio");
  const plot = new Plot({
    title: "relaxation: decay ratio vs amplitude",
    xLabel: "A",
    yLabel: "ratio",
  });
  plot.add({ label: "ratio", x: A, y: ratio, color: PALETTE[0], marker: true });
  return { svg: plot.render(), report: {} };
}

export function renderTransportSlope(inputPath: string): RenderResult {
  const table = readCsv(inputPath, SERIES_COLUMNS);
  const t = numericColumn(table, "t");
  const h = numericColumn(table, "hgamma2");
  const slope = fitLogSlope(t, h);
  const logH = h.map(Math.log);
  const tbar = t.reduce((a, b) => a + b, 0) / t.length;
  const ybar = logH.reduce((a, b) => a + b, 0) / logH.length;
  const fit = t.map((ti) => ybar + slope * (ti - tbar));
  const plot = new Plot({
    title: "transport growth of hgamma2",
    xLabel: "t",
    yLabel: "log hgamma2",
  });
  plot.add({ label: "log hgamma2", x: t, y: logH, color: PALETTE[0] });
  plot.add({ label: `fit slope=${Number(slope.toPrecision(8))}`, x: t, y: fit, color: PALETTE[1] });
  return { svg: plot.render(), report: { fitted_log_slope: slope } };
}

/** Radial power spectrum of a scalar field dump (power-of-two grids). */
export function renderSpectrum(inputPath: string): RenderResult {
  const field = readFieldTable(inputPath);
  if (field.dim !== 2) {
    throw new Error("spectrum figures support dim=2 field tables");
  }
  if (field.components.length !== 1) {
    throw new Error("spectrum figures need a scalar field table");
  }
  const n = field.n;
  if ((n & (n - 1)) !== 0) {
    throw new Error("spectrum figures require a power-of-two resolution");
  }
  const { re, im } = fft2(field.components[0], n);
  const half = n / 2;
  const energy = new Array<number>(half + 1).fill(0);
  for (let i = 0; i < n; i++) {
    const ki = i < half ? i : i - n;
    for (let j = 0; j < n; j++) {
      const kj = j < half ? j : j - n;
      const kmag = Math.sqrt(ki * ki + kj * kj);
      const bin = Math.min(half, Math.round(kmag));
      const idx = i * n + j;
      energy[bin] += (re[idx] * re[idx] + im[idx] * im[idx]) / (n * n * n * n);
    }
  }
  const ks: number[] = [];
  const es: number[] = [];
  for (let k = 1; k <= half; k++) {
    if (energy[k] > 0) {
      ks.push(k);
      es.push(energy[k]);
    }
  }
  const plot = new Plot({
    title: "radial energy spectrum",
    xLabel: "|k|",
    yLabel: "energy",
    logY: true,
  });
  plot.add({ label: "shell energy", x: ks, y: es, color: PALETTE[0], marker: true });
  return { svg: plot.render(), report: {} };
}

/** In-place radix-2 complex FFT over rows then columns. */
function fft2(values: number[], n: number): { re: Float64Array; im: Float64Array } {
  const re = Float64Array.from(values);
  const im = new Float64Array(n * n);
  const rowRe = new Float64Array(n);
  const rowIm = new Float64Array(n);
  // rows
  for (let i = 0; i < n; i++) {
    rowRe.set(re.subarray(i * n, (i + 1) * n));
    rowIm.set(im.subarray(i * n, (i + 1) * n));
    fft1(rowRe, rowIm);
    re.set(rowRe, i * n);
    im.set(rowIm, i * n);
  }
  // columns
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      rowRe[i] = re[i * n + j];
      rowIm[i] = im[i * n + j];
    }
    fft1(rowRe, rowIm);
    for (let i = 0; i < n; i++) {
      re[i * n + j] = rowRe[i];
      im[i * n + j] = rowIm[i];
    }
  }
  return { re, im };
}

function fft1(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  // bit reversal
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wRe = Math.cos(angle);
    const wIm = Math.sin(angle);
    for (let start = 0; start < n; start += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const even = start + k;
        const odd = start + k + len / 2;
        const tRe = re[odd] * curRe - im[odd] * curIm;
        const tIm = re[odd] * curIm + im[odd] * curRe;
        re[odd] = re[even] - tRe;
        im[odd] = im[even] - tIm;
        re[even] += tRe;
        im[even] += tIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

export const FIGURE_KINDS: Record<string, (input: string) => RenderResult> = {
  series: renderSeries,
  sweep_map: renderSweepMap,
  relax_curve: renderRelaxCurve,
  transport_slope: renderTransportSlope,
  spectrum: renderSpectrum,
};
