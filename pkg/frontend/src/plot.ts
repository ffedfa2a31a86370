import { AggRow } from './schema';
import { Trace } from './trace';
import { Series, lineChart } from './svg';

export interface SweepOptions {
  x: string;
  schemes?: string[];
}

/** One line per scheme, swept parameter on x, mean objective in dB on y. */
export function plotSweep(rows: AggRow[], options: SweepOptions): string {
  const params = [...new Set(rows.map((r) => r.sweepParam))];
  if (params.length !== 1 || params[0] !== options.x) {
    throw new Error(
      `CSV sweeps ${params.map((p) => JSON.stringify(p)).join(', ')}, not ${JSON.stringify(options.x)}`);
  }
  const schemeOrder = [...new Set(rows.map((r) => r.scheme))];
  let schemes = schemeOrder;
  if (options.schemes !== undefined) {
    const wanted = options.schemes.map((s) => s.trim()).filter((s) => s !== '');
    if (wanted.length === 0) {
      throw new Error('empty scheme filter');
    }
    for (const name of wanted) {
      if (!schemeOrder.includes(name)) {
        throw new Error(
          `unknown scheme ${JSON.stringify(name)}, CSV has ${schemeOrder.join(', ')}`);
      }
    }
    schemes = schemeOrder.filter((s) => wanted.includes(s));
  }
  const series: Series[] = schemes.map((scheme) => ({
    label: scheme,
    points: rows
      .filter((r) => r.scheme === scheme)
      .sort((a, b) => a.sweepValue - b.sweepValue)
      .map((r) => ({ x: r.sweepValue, y: r.meanObjectiveDb })),
  }));
  return lineChart({
    xLabel: options.x,
    yLabel: 'mean objective (dB)',
    series,
  });
}

/** Objective in dB versus iteration index for one optimization run. */
export function plotTrace(trace: Trace): string {
  const label = typeof trace.meta.scheme === 'string' ? trace.meta.scheme : 'objective';
  return lineChart({
    xLabel: 'iteration',
    yLabel: 'objective (dB)',
    series: [{
      label,
      points: trace.points.map((p) => ({ x: p.iteration, y: p.objectiveDb })),
    }],
  });
}
