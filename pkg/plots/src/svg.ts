// Hand-rolled SVG assembly: string building only, so identical inputs
// always produce identical bytes.

export interface Box {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function linearScale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (x: number) => r0 + ((x - d0) / span) * (r1 - r0);
}

export function log10Scale(domain: [number, number], range: [number, number]) {
  const lin = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  return (x: number) => lin(Math.log10(x));
}

export function decadeTicks(min: number, max: number): number[] {
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const ticks: number[] = [];
  const step = hi - lo > 12 ? 2 : 1;
  for (let e = lo; e <= hi; e += step) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function expLabel(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

export function px(x: number): string {
  return x.toFixed(2);
}

export function polyline(points: Array<[number, number]>, attrs: string): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(' ');
  return `<polyline points="${pts}" ${attrs}/>`;
}

export function text(x: number, y: number, content: string, attrs = ''): string {
  return `<text x="${px(x)}" y="${px(y)}" ${attrs}>${content}</text>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: string): string {
  return `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" ${attrs}/>`;
}

export function circle(cx: number, cy: number, r: number, attrs: string): string {
  return `<circle cx="${px(cx)}" cy="${px(cy)}" r="${r}" ${attrs}/>`;
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
    '</svg>',
    '',
  ].join('\n');
}
