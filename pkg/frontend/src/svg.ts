export interface SeriesPoint {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
}

export interface ChartSpec {
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 64, right: 150, top: 16, bottom: 46 };

const PALETTE = [
  '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
  '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
];

function escapeXml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function niceStep(rawStep: number): number {
  const pow10 = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const frac = rawStep / pow10;
  let nice: number;
  if (frac <= 1) nice = 1;
  else if (frac <= 2) nice = 2;
  else if (frac <= 5) nice = 5;
  else nice = 10;
  return nice * pow10;
}

interface Axis {
  lo: number;
  hi: number;
  ticks: number[];
  format: (v: number) => string;
}

function buildAxis(values: number[], tickCount: number): Axis {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    const pad = Math.max(0.5, Math.abs(lo) * 0.05);
    lo -= pad;
    hi += pad;
  }
  const step = niceStep((hi - lo) / (tickCount - 1));
  lo = Math.floor(lo / step) * step;
  hi = Math.ceil(hi / step) * step;
  const decimals = Math.max(0, -Math.floor(Math.log10(step)));
  const ticks: number[] = [];
  for (let v = lo; v <= hi + step * 1e-9; v += step) {
    ticks.push(v);
  }
  const format = (v: number) => {
    const text = v.toFixed(decimals);
    return text === '-' + (0).toFixed(decimals) ? (0).toFixed(decimals) : text;
  };
  return { lo, hi, ticks, format };
}

/** Render a deterministic standalone SVG line chart. */
export function lineChart(spec: ChartSpec): string {
  if (spec.series.length === 0) {
    throw new Error('chart needs at least one series');
  }
  for (const s of spec.series) {
    if (s.points.length === 0) {
      throw new Error(`series ${JSON.stringify(s.label)} has no points`);
    }
  }
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p.y));
  const xAxis = buildAxis(xs, 6);
  const yAxis = buildAxis(ys, 6);

  const plotWidth = WIDTH - MARGIN.left - MARGIN.right;
  const plotHeight = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) =>
    (MARGIN.left + ((v - xAxis.lo) / (xAxis.hi - xAxis.lo)) * plotWidth).toFixed(2);
  const sy = (v: number) =>
    (MARGIN.top + (1 - (v - yAxis.lo) / (yAxis.hi - yAxis.lo)) * plotHeight).toFixed(2);

  const lines: string[] = [];
  lines.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="11">`);
  lines.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  for (const tick of yAxis.ticks) {
    const y = sy(tick);
    lines.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotWidth}" y2="${y}" ` +
      `stroke="#dddddd" stroke-width="1"/>`);
    lines.push(
      `<text x="${MARGIN.left - 6}" y="${y}" text-anchor="end" dominant-baseline="middle">` +
      `${yAxis.format(tick)}</text>`);
  }
  for (const tick of xAxis.ticks) {
    const x = sx(tick);
    const base = MARGIN.top + plotHeight;
    lines.push(
      `<line x1="${x}" y1="${base}" x2="${x}" y2="${base + 4}" stroke="#333333" stroke-width="1"/>`);
    lines.push(
      `<text x="${x}" y="${base + 16}" text-anchor="middle">${xAxis.format(tick)}</text>`);
  }

  // axes on top of the gridlines
  lines.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
    `y2="${MARGIN.top + plotHeight}" stroke="#333333" stroke-width="1"/>`);
  lines.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotHeight}" ` +
    `x2="${MARGIN.left + plotWidth}" y2="${MARGIN.top + plotHeight}" ` +
    `stroke="#333333" stroke-width="1"/>`);
  lines.push(
    `<text x="${MARGIN.left + plotWidth / 2}" y="${HEIGHT - 10}" text-anchor="middle" ` +
    `font-size="12">${escapeXml(spec.xLabel)}</text>`);
  lines.push(
    `<text x="16" y="${MARGIN.top + plotHeight / 2}" text-anchor="middle" font-size="12" ` +
    `transform="rotate(-90 16 ${MARGIN.top + plotHeight / 2})">${escapeXml(spec.yLabel)}</text>`);

  spec.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = series.points.map((p) => `${sx(p.x)},${sy(p.y)}`).join(' ');
    lines.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const p of series.points) {
      lines.push(`<circle cx="${sx(p.x)}" cy="${sy(p.y)}" r="3" fill="${color}"/>`);
    }
    const legendY = MARGIN.top + 10 + i * 18;
    const legendX = MARGIN.left + plotWidth + 12;
    lines.push(
      `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 18}" y2="${legendY}" ` +
      `stroke="${color}" stroke-width="1.5"/>`);
    lines.push(
      `<text x="${legendX + 24}" y="${legendY}" dominant-baseline="middle">` +
      `${escapeXml(series.label)}</text>`);
  });

  lines.push('</svg>');
  return lines.join('\n') + '\n';
}
