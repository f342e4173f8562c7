/**
 * Tiny deterministic SVG line-chart renderer.
 *
 * No DOM, no timestamps, no randomness: the same panel spec always
 * yields byte-identical SVG, which the tests rely on.  Only what the
 * three plot kinds need: linear/log axes, solid/dashed polylines, a
 * text legend.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  dashed?: boolean;
  color?: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  yLog?: boolean;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const PANEL_W = 420;
const PANEL_H = 320;
const MARGIN = { top: 36, right: 16, bottom: 46, left: 64 };

export function linearScale(d0: number, d1: number, r0: number, r1: number) {
  const span = d1 - d0 || 1; // degenerate domain: map everything to r0
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number) {
  const lo = Math.log10(d0);
  const span = Math.log10(d1) - lo || 1;
  return (v: number) => r0 + ((Math.log10(v) - lo) / span) * (r1 - r0);
}

/** Round-numbered ticks covering [lo, hi], at most n+1 of them. */
export function linearTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / n;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rawStep) ?? 10 * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

/** Decade ticks covering [lo, hi], both > 0. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    // 10 ** -4 misses the literal 1e-4 by an ulp; divide instead
    ticks.push(e >= 0 ? 10 ** e : 1 / 10 ** -e);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return Number(v.toPrecision(4)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function dataBounds(series: Series[], pick: (s: Series) => number[], log: boolean) {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of pick(s)) {
      if (log && !(v > 0)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) {
    return log ? ([1e-3, 1] as const) : ([0, 1] as const);
  }
  if (!log) {
    // anchor linear y-axes at zero when the data sits above it
    if (lo > 0) lo = 0;
    if (hi === lo) hi = lo + 1;
  } else if (hi === lo) {
    hi = lo * 10;
  }
  return [lo, hi] as const;
}

function renderPanel(panel: PanelSpec, xOffset: number): string {
  const x0 = xOffset + MARGIN.left;
  const x1 = xOffset + PANEL_W - MARGIN.right;
  const y0 = PANEL_H - MARGIN.bottom; // svg y grows downward
  const y1 = MARGIN.top;

  const [xLo, xHi] = dataBounds(panel.series, (s) => s.x, false);
  const [yLo, yHi] = dataBounds(panel.series, (s) => s.y, panel.yLog ?? false);
  const sx = linearScale(xLo, xHi, x0, x1);
  const sy = panel.yLog ? logScale(yLo, yHi, y0, y1) : linearScale(yLo, yHi, y0, y1);

  const parts: string[] = [];
  parts.push(
    `<text x="${xOffset + PANEL_W / 2}" y="18" text-anchor="middle" font-size="14" font-weight="bold">${esc(panel.title)}</text>`,
  );

  // axes + ticks
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333"/>`);
  for (const t of linearTicks(xLo, xHi)) {
    const px = sx(t).toFixed(1);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 16}" text-anchor="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  const yTicks = panel.yLog ? logTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const t of yTicks) {
    const py = sy(t).toFixed(1);
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="10">${fmt(t)}</text>`,
    );
    parts.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#eee"/>`);
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${PANEL_H - 8}" text-anchor="middle" font-size="11">${esc(panel.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${xOffset + 14}" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="11" transform="rotate(-90 ${xOffset + 14} ${(y0 + y1) / 2})">${esc(panel.yLabel)}</text>`,
  );

  // data polylines, clipped to positive values on log axes
  panel.series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length]!;
    const pts: string[] = [];
    for (let k = 0; k < s.x.length; k++) {
      const xv = s.x[k]!;
      const yv = s.y[k]!;
      if (panel.yLog && !(yv > 0)) continue;
      pts.push(`${(k === 0 ? "M" : "L")}${sx(xv).toFixed(2)},${sy(yv).toFixed(2)}`);
    }
    if (pts.length === 0) return;
    const dash = s.dashed ? ' stroke-dasharray="6 4"' : "";
    parts.push(
      `<path d="${pts.join("")}" fill="none" stroke="${color}" stroke-width="1.5"${dash}/>`,
    );
  });

  // legend, top-right inside the plot area
  panel.series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length]!;
    const ly = y1 + 12 + i * 14;
    const dash = s.dashed ? ' stroke-dasharray="6 4"' : "";
    parts.push(
      `<line x1="${x1 - 120}" y1="${ly - 4}" x2="${x1 - 96}" y2="${ly - 4}" stroke="${color}" stroke-width="1.5"${dash}/>`,
    );
    parts.push(`<text x="${x1 - 90}" y="${ly}" font-size="10">${esc(s.label)}</text>`);
  });

  return parts.join("\n");
}

/** Render panels side by side into one standalone SVG document. */
export function renderPanels(panels: PanelSpec[]): string {
  const width = PANEL_W * panels.length;
  const body = panels.map((p, i) => renderPanel(p, i * PANEL_W)).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_H}" ` +
    `viewBox="0 0 ${width} ${PANEL_H}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${PANEL_H}" fill="white"/>\n${body}\n</svg>\n`
  );
}
