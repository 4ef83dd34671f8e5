// render --out fig.svg [--envelope] [--radius R] [--title T] trace1.csv:OHM trace2.csv:Dual-OHM ...
//
// Output is an SVG image; each positional argument is a trace CSV produced
// by the vertexkit lab (columns iter,residual_sq,guaranteed,bound) with an
// optional :LABEL suffix.

import { PlotInput, PlotJob, defaultJob, render } from './render.js';

export function parseArgs(argv: string[]): PlotJob {
  const inputs: PlotInput[] = [];
  let outPath: string | undefined;
  let envelope = false;
  let markGuaranteed = true;
  let radius: number | undefined;
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '--out') {
      outPath = argv[++i];
    } else if (arg === '--envelope') {
      envelope = true;
    } else if (arg === '--no-markers') {
      markGuaranteed = false;
    } else if (arg === '--radius') {
      radius = Number(argv[++i]);
    } else if (arg === '--title') {
      title = argv[++i];
    } else if (arg.startsWith('--')) {
      throw new Error(`unknown option ${arg}`);
    } else {
      const at = arg.lastIndexOf(':');
      if (at > 1) {
        inputs.push({ path: arg.slice(0, at), label: arg.slice(at + 1) });
      } else {
        inputs.push({ path: arg, label: arg.replace(/.*\//, '').replace(/\.csv$/, '') });
      }
    }
  }
  if (!outPath) {
    throw new Error('missing --out <file>');
  }
  if (inputs.length === 0) {
    throw new Error('no trace CSVs given');
  }
  const job = defaultJob(inputs, outPath);
  job.envelope = envelope;
  job.markGuaranteed = markGuaranteed;
  job.radius = radius;
  job.title = title;
  return job;
}

export function main(argv: string[]): number {
  try {
    const out = render(parseArgs(argv));
    console.error(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
}

if (process.argv[1] && /main\.js$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
