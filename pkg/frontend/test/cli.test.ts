import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { spawnSync } from 'child_process';
import { describe, it, expect } from 'vitest';

import { run } from '../src/cli';

const FIXTURES = join(__dirname, 'fixtures');
const DIST_CLI = join(__dirname, '..', 'dist', 'cli.js');

function tmpOut(name: string): string {
  return join(mkdtempSync(join(tmpdir(), 'figures-')), name);
}

describe('cli run', () => {
  it('renders a sweep', () => {
    const out = tmpOut('fig.svg');
    run(['--in', join(FIXTURES, 'slope_agg.csv'), '--x', 'pmax_dbm', '--out', out]);
    const svg = readFileSync(out, 'utf8');
    expect(svg.startsWith('<svg ')).toBe(true);
    expect(svg.trimEnd().endsWith('</svg>')).toBe(true);
  });

  it('renders a convergence trace', () => {
    const out = tmpOut('conv.svg');
    run(['--in', join(FIXTURES, 'convergence_proposed.jsonl'), '--trace', '--out', out]);
    expect(readFileSync(out, 'utf8')).toContain('<polyline');
  });

  it('applies the scheme filter', () => {
    const out = tmpOut('fpa.svg');
    run(['--in', join(FIXTURES, 'multi_agg.csv'), '--x', 'pmax_dbm',
         '--schemes', 'fpa', '--out', out]);
    const svg = readFileSync(out, 'utf8');
    expect((svg.match(/<polyline/g) ?? []).length).toBe(1);
  });

  it('demands exactly one of --x and --trace', () => {
    const out = tmpOut('never.svg');
    const csv = join(FIXTURES, 'multi_agg.csv');
    expect(() => run(['--in', csv, '--out', out])).toThrow(/exactly one/);
    expect(() => run(['--in', csv, '--x', 'pmax_dbm', '--trace', '--out', out]))
      .toThrow(/exactly one/);
    expect(existsSync(out)).toBe(false);
  });

  it('exits nonzero on a schema version mismatch (built binary)', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figures-'));
    const bad = join(dir, 'bad.csv');
    writeFileSync(bad,
      'schema_version,sweep_param,sweep_value,scheme,realizations,'
      + 'mean_objective_linear,mean_objective_db,mean_iterations\n'
      + '7,pmax_dbm,15,fpa,5,1.0,0.0,7\n');
    const result = spawnSync('node', [DIST_CLI, '--in', bad, '--x', 'pmax_dbm',
                                      '--out', join(dir, 'fig.svg')], { encoding: 'utf8' });
    expect(result.status).toBe(1);
    expect(result.stderr).toContain('schema_version');
  });
});
