import { describe, expect, it } from "vitest";

import { linearScale, linearTicks, logScale, logTicks, renderPanels } from "../src/chart.js";

describe("scales", () => {
  it("linear scale maps domain endpoints to range endpoints", () => {
    const s = linearScale(0, 10, 100, 500);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(500);
    expect(s(5)).toBe(300);
  });

  it("linear scale survives a degenerate domain", () => {
    const s = linearScale(3, 3, 0, 100);
    expect(Number.isFinite(s(3))).toBe(true);
  });

  it("log scale maps decades evenly", () => {
    const s = logScale(1e-4, 1e-1, 0, 300);
    expect(s(1e-4)).toBeCloseTo(0, 9);
    expect(s(1e-3)).toBeCloseTo(100, 9);
    expect(s(1e-1)).toBeCloseTo(300, 9);
  });
});

describe("ticks", () => {
  it("linear ticks are round numbers covering the domain", () => {
    const t = linearTicks(0, 103);
    expect(t[0]).toBe(0);
    expect(t).toContain(100);
    expect(t.length).toBeLessThanOrEqual(7);
  });

  it("log ticks are the decades", () => {
    expect(logTicks(2e-4, 0.05)).toEqual([1e-4, 1e-3, 1e-2, 1e-1]);
  });
});

describe("renderPanels", () => {
  const panel = {
    title: "t",
    xLabel: "x",
    yLabel: "y",
    series: [{ label: "a", x: [0, 1, 2], y: [0, 1, 4] }],
  };

  it("emits a standalone svg document", () => {
    const svg = renderPanels([panel]);
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    expect(svg).toContain("<path");
  });

  it("is deterministic", () => {
    expect(renderPanels([panel])).toBe(renderPanels([panel]));
  });

  it("escapes markup in labels", () => {
    const svg = renderPanels([{ ...panel, title: "a < b & c" }]);
    expect(svg).toContain("a &lt; b &amp; c");
    expect(svg).not.toContain("a < b");
  });

  it("drops non-positive values from log-axis paths instead of breaking", () => {
    const svg = renderPanels([
      { ...panel, yLog: true, series: [{ label: "a", x: [0, 1, 2], y: [0, 0.1, 0.4] }] },
    ]);
    expect(svg).toContain("<path");
    expect(svg).not.toContain("NaN");
    expect(svg).not.toContain("Infinity");
  });
});
