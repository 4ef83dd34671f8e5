import * as fs from 'fs';
import * as path from 'path';

import { Trace, TraceFormatError, loadTrace } from './csv.js';
import {
  Box,
  circle,
  decadeTicks,
  document,
  expLabel,
  line,
  linearScale,
  log10Scale,
  polyline,
  px,
  text,
} from './svg.js';

export interface PlotInput {
  path: string;
  label: string;
}

export interface PlotJob {
  inputs: PlotInput[];
  outPath: string;
  envelope: boolean;
  markGuaranteed: boolean;
  radius?: number; // envelope scale R; inferred from the bound column when absent
  title?: string;
  width: number;
  height: number;
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];

export function defaultJob(inputs: PlotInput[], outPath: string): PlotJob {
  return {
    inputs,
    outPath,
    envelope: false,
    markGuaranteed: true,
    width: 860,
    height: 540,
  };
}

function inferRadiusSq(traces: Trace[]): number | undefined {
  for (const t of traces) {
    for (const row of t.rows) {
      if (Number.isFinite(row.bound) && row.bound > 0) {
        return (row.bound * (row.iter + 1) ** 2) / 4;
      }
    }
  }
  return undefined;
}

export function renderSvg(traces: Trace[], job: PlotJob): string {
  if (traces.length === 0) {
    throw new TraceFormatError('nothing to plot');
  }
  const plot: Box = { left: 70, top: 30, width: job.width - 100, height: job.height - 90 };

  const maxIter = Math.max(...traces.map((t) => t.rows[t.rows.length - 1].iter));
  const radiusSq = job.radius !== undefined ? job.radius * job.radius : inferRadiusSq(traces);
  const envelopeOn = job.envelope && radiusSq !== undefined;

  const positives = traces.flatMap((t) => t.rows.map((r) => r.residualSq).filter((v) => v > 0));
  if (positives.length === 0) {
    throw new TraceFormatError('no positive residuals to place on a log axis');
  }
  let yMin = Math.min(...positives);
  let yMax = Math.max(...positives);
  if (envelopeOn) {
    yMin = Math.min(yMin, (4 * radiusSq!) / (maxIter + 1) ** 2);
    yMax = Math.max(yMax, 4 * radiusSq!);
  }
  const sx = linearScale([0, maxIter], [plot.left, plot.left + plot.width]);
  const sy = log10Scale([yMin, yMax], [plot.top + plot.height, plot.top]);

  const body: string[] = [];
  // frame and y decade grid
  body.push(
    line(plot.left, plot.top, plot.left, plot.top + plot.height, 'stroke="#333" stroke-width="1"'),
    line(
      plot.left,
      plot.top + plot.height,
      plot.left + plot.width,
      plot.top + plot.height,
      'stroke="#333" stroke-width="1"'
    )
  );
  for (const tick of decadeTicks(yMin, yMax)) {
    if (tick < yMin / 10 || tick > yMax * 10) continue;
    const y = sy(Math.min(Math.max(tick, yMin), yMax));
    body.push(
      line(plot.left, y, plot.left + plot.width, y, 'stroke="#ddd" stroke-width="0.5" class="grid"'),
      text(plot.left - 8, y + 4, expLabel(tick), 'text-anchor="end" font-size="11" class="ytick"')
    );
  }
  const xStep = Math.max(1, Math.ceil(maxIter / 8));
  for (let k = 0; k <= maxIter; k += xStep) {
    const x = sx(k);
    body.push(
      line(x, plot.top + plot.height, x, plot.top + plot.height + 4, 'stroke="#333" stroke-width="1"'),
      text(x, plot.top + plot.height + 18, String(k), 'text-anchor="middle" font-size="11" class="xtick"')
    );
  }
  body.push(
    text(
      plot.left + plot.width / 2,
      job.height - 14,
      'iteration k',
      'text-anchor="middle" font-size="12"'
    ),
    text(16, plot.top + plot.height / 2, 'residual&#178;', `font-size="12" transform="rotate(-90 16 ${px(plot.top + plot.height / 2)})"`)
  );
  if (job.title) {
    body.push(text(plot.left + plot.width / 2, 20, job.title, 'text-anchor="middle" font-size="14"'));
  }

  if (envelopeOn) {
    const pts: Array<[number, number]> = [];
    for (let k = 0; k <= maxIter; k++) {
      const v = (4 * radiusSq!) / (k + 1) ** 2;
      if (v >= yMin && v <= yMax) {
        pts.push([sx(k), sy(v)]);
      }
    }
    body.push(
      polyline(
        pts,
        'fill="none" stroke="#555" stroke-width="1.2" stroke-dasharray="6,4" class="envelope"'
      )
    );
  }

  traces.forEach((trace, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts: Array<[number, number]> = [];
    for (const row of trace.rows) {
      if (row.residualSq > 0) {
        pts.push([sx(row.iter), sy(Math.min(Math.max(row.residualSq, yMin), yMax))]);
      }
    }
    body.push(polyline(pts, `fill="none" stroke="${color}" stroke-width="1.6" class="curve"`));
    if (job.markGuaranteed) {
      for (const row of trace.rows) {
        if (row.guaranteed && row.residualSq > 0) {
          body.push(
            circle(sx(row.iter), sy(row.residualSq), 2.6, `fill="${color}" class="marker"`)
          );
        }
      }
    }
    const ly = plot.top + 16 + 18 * i;
    const lx = plot.left + plot.width - 150;
    body.push(
      line(lx, ly - 4, lx + 22, ly - 4, `stroke="${color}" stroke-width="2" class="legend-line"`),
      text(lx + 28, ly, trace.label, 'font-size="12" class="legend"')
    );
  });
  if (envelopeOn) {
    const ly = plot.top + 16 + 18 * traces.length;
    const lx = plot.left + plot.width - 150;
    body.push(
      line(lx, ly - 4, lx + 22, ly - 4, 'stroke="#555" stroke-width="1.2" stroke-dasharray="6,4"'),
      text(lx + 28, ly, 'envelope 4R&#178;/(k+1)&#178;', 'font-size="12" class="legend"')
    );
  }
  return document(job.width, job.height, body);
}

export function render(job: PlotJob): string {
  const traces = job.inputs.map((input) => loadTrace(input.path, input.label));
  const svg = renderSvg(traces, job);
  fs.mkdirSync(path.dirname(path.resolve(job.outPath)), { recursive: true });
  fs.writeFileSync(job.outPath, svg);
  return job.outPath;
}
