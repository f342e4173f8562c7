import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { runCli } from "../src/cli.js";

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "aqmsim-plot-"));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeCurve(name: string): string {
  const lines = ["x,target_from_pprime_s,target_from_p_s"];
  for (let k = 0; k <= 10; k++) {
    const x = k / 10;
    lines.push(`${x},${0.005 + 0.095 * x},${0.005 + 0.095 * Math.sqrt(x)}`);
  }
  const p = path.join(dir, name);
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

describe("plot cli", () => {
  it("renders a target curve and exits 0", async () => {
    const input = writeCurve("curve.csv");
    const out = path.join(dir, "curve.svg");
    expect(await runCli(["plot", "target-curve", "--in", input, "--out", out])).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain("</svg>");
  });

  it("rejects an unknown plot kind with exit 1", async () => {
    const input = writeCurve("curve2.csv");
    const out = path.join(dir, "x.svg");
    expect(await runCli(["plot", "piechart", "--in", input, "--out", out])).toBe(1);
  });

  it("rejects a schema mismatch with exit 1 and no output file", async () => {
    const bad = path.join(dir, "bad.csv");
    fs.writeFileSync(bad, "x,wrong_column,target_from_p_s\n0,0.005,0.005\n");
    const out = path.join(dir, "bad.svg");
    expect(await runCli(["plot", "target-curve", "--in", bad, "--out", out])).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("reports a missing input file as a runtime failure (exit 2)", async () => {
    const out = path.join(dir, "missing.svg");
    expect(
      await runCli(["plot", "target-curve", "--in", path.join(dir, "nope.csv"), "--out", out]),
    ).toBe(2);
  });

  it("requires --out", async () => {
    const input = writeCurve("curve3.csv");
    expect(await runCli(["plot", "target-curve", "--in", input])).toBe(1);
  });

  it("accepts several --in files for a sweep comparison", async () => {
    const header =
      "scenario,controller,n_flows,seed,mean_delay_s,p99_delay_s,mean_p,drop_rate," +
      "mark_rate,goodput_bytes_per_s,recovery_rate,axis,axis_value,oracle_p,oracle_q_s,error";
    const a = path.join(dir, "a.csv");
    const b = path.join(dir, "b.csv");
    fs.writeFileSync(
      a,
      `${header}\ns,pi2_fixed,10,1,0.02,0.03,0.004,0.004,0,7e6,0.2,n_flows,10,0.0024,0.02,\n`,
    );
    fs.writeFileSync(
      b,
      `${header}\ns,curvy_pi2,10,1,0.022,0.03,0.002,0.002,0,7e6,0.2,n_flows,10,0.0018,0.024,\n`,
    );
    const out = path.join(dir, "sweep.svg");
    expect(
      await runCli(["plot", "sweep-comparison", "--in", a, b, "--out", out]),
    ).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg).toContain("pi2_fixed");
    expect(svg).toContain("curvy_pi2");
  });
});
