#!/usr/bin/env node
import { readFileSync, writeFileSync } from 'fs';
import yargs from 'yargs/yargs';

import { parseAggCsv } from './schema';
import { parseTraceJsonl } from './trace';
import { plotSweep, plotTrace } from './plot';

interface Options {
  in: string;
  out: string;
  x?: string;
  trace: boolean;
  schemes?: string;
}

export function run(argv: string[]): void {
  const args = yargs(argv)
    .usage('$0 --in <agg.csv> --x <param> --out <fig.svg>')
    .option('in', { type: 'string', demandOption: true, describe: 'input CSV (or trace JSONL with --trace)' })
    .option('out', { type: 'string', demandOption: true, describe: 'output SVG file' })
    .option('x', { type: 'string', describe: 'swept parameter on the x axis' })
    .option('trace', { type: 'boolean', default: false, describe: 'render a convergence trace instead of a sweep' })
    .option('schemes', { type: 'string', describe: 'comma-separated scheme filter' })
    .strict()
    .help()
    .parseSync() as Options;

  if (args.trace === (args.x !== undefined)) {
    throw new Error('pass exactly one of --x <param> or --trace');
  }
  const text = readFileSync(args.in, 'utf8');
  let svg: string;
  if (args.trace) {
    const trace = parseTraceJsonl(text);
    svg = plotTrace(trace);
    console.log(`trace ${args.in}: ${trace.points.length} iterations`);
  } else {
    const rows = parseAggCsv(text);
    svg = plotSweep(rows, {
      x: args.x as string,
      schemes: args.schemes === undefined ? undefined : args.schemes.split(','),
    });
    console.log(`sweep ${args.in}: ${rows.length} rows`);
  }
  writeFileSync(args.out, svg);
  console.log(`wrote ${args.out}`);
}

if (require.main === module) {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    console.error((err as Error).message);
    process.exit(1);
  }
}
