/** Minimal deterministic SVG plotting: line charts and scatter plots with
 *  labeled axes. No timestamps, no randomness; identical inputs give
 *  identical bytes. */

export interface SeriesSpec {
  label: string;
  x: number[];
  y: number[];
  color: string;
  marker?: boolean;
}

export interface PlotOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY?: boolean;
  width?: number;
  height?: number;
}

const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };

function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  return Number(v.toPrecision(8)).toString();
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * factor;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export class Plot {
  private readonly opts: Required<PlotOptions>;
  private series: SeriesSpec[] = [];

  constructor(opts: PlotOptions) {
    this.opts = {
      logY: false,
      width: 640,
      height: 420,
      ...opts,
    };
  }

  add(series: SeriesSpec): void {
    if (series.x.length !== series.y.length) {
      throw new Error(`series ${series.label}: x/y length mismatch`);
    }
    this.series.push(series);
  }

  /** Straight reference line in data coordinates. */
  addLine(x0: number, y0: number, x1: number, y1: number, color: string, label: string): void {
    this.add({ label, x: [x0, x1], y: [y0, y1], color });
  }

  render(): string {
    const { width, height, logY } = this.opts;
    const transformY = (v: number) => (logY ? Math.log10(v) : v);
    const xs = this.series.flatMap((s) => s.x);
    const ys = this.series.flatMap((s) => s.y.map(transformY)).filter(Number.isFinite);
    let xLo = Math.min(...xs);
    let xHi = Math.max(...xs);
    let yLo = Math.min(...ys);
    let yHi = Math.max(...ys);
    if (!(xHi > xLo)) {
      xLo -= 0.5;
      xHi += 0.5;
    }
    if (!(yHi > yLo)) {
      yLo -= 0.5;
      yHi += 0.5;
    }
    const padY = 0.05 * (yHi - yLo);
    yLo -= padY;
    yHi += padY;
    const plotW = width - MARGIN.left - MARGIN.right;
    const plotH = height - MARGIN.top - MARGIN.bottom;
    const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
    const py = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;

    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    parts.push(
      `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">` +
      `${escapeXml(this.opts.title)}</text>`
    );
    // frame
    parts.push(
      `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#444" stroke-width="1"/>`
    );
    // ticks
    for (const tx of niceTicks(xLo, xHi, 6)) {
      const x = px(tx);
      parts.push(`<line x1="${fmt(x)}" y1="${MARGIN.top + plotH}" x2="${fmt(x)}" y2="${MARGIN.top + plotH + 4}" stroke="#444"/>`);
      parts.push(
        `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11">${fmt(tx)}</text>`
      );
    }
    for (const ty of niceTicks(yLo, yHi, 6)) {
      const y = py(ty);
      const label = logY ? `1e${fmt(ty)}` : fmt(ty);
      parts.push(`<line x1="${MARGIN.left - 4}" y1="${fmt(y)}" x2="${MARGIN.left}" y2="${fmt(y)}" stroke="#444"/>`);
      parts.push(
        `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" ` +
        `font-size="11">${label}</text>`
      );
    }
    parts.push(
      `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" text-anchor="middle" ` +
      `font-size="12">${escapeXml(this.opts.xLabel)}</text>`
    );
    parts.push(
      `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${escapeXml(this.opts.yLabel)}</text>`
    );
    // series
    this.series.forEach((s, index) => {
      const pts: string[] = [];
      for (let i = 0; i < s.x.length; i++) {
        const yv = transformY(s.y[i]);
        if (!Number.isFinite(yv)) continue;
        pts.push(`${fmt(px(s.x[i]))},${fmt(py(yv))}`);
      }
      if (pts.length > 1) {
        parts.push(
          `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" ` +
          `stroke-width="1.5"/>`
        );
      }
      if (s.marker || pts.length === 1) {
        for (const p of pts) {
          const [cx, cy] = p.split(",");
          parts.push(`<circle cx="${cx}" cy="${cy}" r="3" fill="${s.color}"/>`);
        }
      }
      const ly = MARGIN.top + 14 + 14 * index;
      parts.push(
        `<rect x="${MARGIN.left + 8}" y="${ly - 8}" width="10" height="10" fill="${s.color}"/>`
      );
      parts.push(
        `<text x="${MARGIN.left + 22}" y="${ly}" font-size="11">${escapeXml(s.label)}</text>`
      );
    });
    parts.push("</svg>");
    return parts.join("\n") + "\n";
  }
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export const PALETTE = [
  "#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#d68910", "#117a8b",
] as const;
