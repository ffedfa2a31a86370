import { SchemaError } from './schema';

export interface TracePoint {
  iteration: number;
  objectiveDb: number;
}

export interface Trace {
  meta: Record<string, unknown>;
  points: TracePoint[];
}

/** Parse an iteration trace: one meta line, then one JSON record per iteration. */
export function parseTraceJsonl(text: string): Trace {
  const lines = text.split('\n').filter((l) => l.trim() !== '');
  if (lines.length === 0) {
    throw new SchemaError('trace file is empty');
  }
  let records: Record<string, unknown>[];
  try {
    records = lines.map((l) => JSON.parse(l));
  } catch (err) {
    throw new SchemaError(`trace line is not JSON: ${(err as Error).message}`);
  }
  const meta = records[0];
  if (meta.type !== 'meta') {
    throw new SchemaError(`first trace line must have type "meta", got ${JSON.stringify(meta.type)}`);
  }
  const points: TracePoint[] = [];
  records.slice(1).forEach((rec, i) => {
    if (rec.type !== 'iteration') {
      throw new SchemaError(`trace line ${i + 2}: expected type "iteration", got ${JSON.stringify(rec.type)}`);
    }
    const iteration = Number(rec.iteration);
    const objectiveDb = Number(rec.objective_db);
    if (!Number.isFinite(iteration) || !Number.isFinite(objectiveDb)) {
      throw new SchemaError(`trace line ${i + 2}: iteration or objective_db missing`);
    }
    points.push({ iteration, objectiveDb });
  });
  if (points.length === 0) {
    throw new SchemaError('trace has no iteration records');
  }
  return { meta, points };
}
