import * as fs from 'fs';

export interface TraceRow {
  iter: number;
  residualSq: number;
  guaranteed: boolean;
  bound: number; // NaN when the producer had no fixed point to measure against
}

export interface Trace {
  label: string;
  rows: TraceRow[];
}

export class TraceFormatError extends Error {}

export const REQUIRED_COLUMNS = ['iter', 'residual_sq', 'guaranteed', 'bound'] as const;

export function parseTraceCsv(text: string, label: string): Trace {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new TraceFormatError(`trace "${label}": file is empty`);
  }
  const header = lines[0].split(',').map((s) => s.trim());
  const index: Record<string, number> = {};
  for (const col of REQUIRED_COLUMNS) {
    const at = header.indexOf(col);
    if (at < 0) {
      throw new TraceFormatError(`trace "${label}": missing required column "${col}"`);
    }
    index[col] = at;
  }
  const rows: TraceRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(',');
    rows.push({
      iter: Number(parts[index['iter']]),
      residualSq: Number(parts[index['residual_sq']]),
      guaranteed: parts[index['guaranteed']].trim() === '1',
      bound: Number(parts[index['bound']]),
    });
  }
  if (rows.length === 0) {
    throw new TraceFormatError(`trace "${label}": no data rows`);
  }
  return { label, rows };
}

export function loadTrace(path: string, label: string): Trace {
  return parseTraceCsv(fs.readFileSync(path, 'utf8'), label);
}
