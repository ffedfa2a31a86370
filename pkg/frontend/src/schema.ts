import { parse } from 'papaparse';

export const SCHEMA_VERSION = '1';

const AGG_COLUMNS = [
  'schema_version',
  'sweep_param',
  'sweep_value',
  'scheme',
  'realizations',
  'mean_objective_linear',
  'mean_objective_db',
  'mean_iterations',
] as const;

export interface AggRow {
  sweepParam: string;
  sweepValue: number;
  scheme: string;
  realizations: number;
  meanObjectiveLinear: number;
  meanObjectiveDb: number;
  meanIterations: number;
}

export class SchemaError extends Error {}

function toNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`row ${line}: ${column} is not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

/** Parse an aggregate sweep CSV, rejecting unknown schema versions. */
export function parseAggCsv(text: string): AggRow[] {
  const parsed = parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`CSV parse error: ${first.message} (row ${first.row})`);
  }
  const header = parsed.meta.fields ?? [];
  for (const column of AGG_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`missing column ${column}`);
    }
  }
  const rows: AggRow[] = [];
  parsed.data.forEach((record, i) => {
    const line = i + 2; // header is line 1
    const version = record.schema_version;
    if (version !== SCHEMA_VERSION) {
      throw new SchemaError(
        `unsupported schema_version ${JSON.stringify(version)} on row ${line}, expected ${JSON.stringify(SCHEMA_VERSION)}`);
    }
    if (record.sweep_param === '' || record.scheme === '') {
      throw new SchemaError(`row ${line}: empty sweep_param or scheme`);
    }
    rows.push({
      sweepParam: record.sweep_param,
      sweepValue: toNumber(record.sweep_value, 'sweep_value', line),
      scheme: record.scheme,
      realizations: toNumber(record.realizations, 'realizations', line),
      meanObjectiveLinear: toNumber(record.mean_objective_linear, 'mean_objective_linear', line),
      meanObjectiveDb: toNumber(record.mean_objective_db, 'mean_objective_db', line),
      meanIterations: toNumber(record.mean_iterations, 'mean_iterations', line),
    });
  });
  if (rows.length === 0) {
    throw new SchemaError('CSV has a header but no data rows');
  }
  return rows;
}
