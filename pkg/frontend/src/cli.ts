#!/usr/bin/env node
/**
 * aqmsim-plot plot <kind> --in FILE... --out FILE
 *
 * Exit codes mirror the simulator CLI: 0 ok, 1 invalid input (bad kind,
 * schema mismatch, malformed CSV), 2 I/O failure.
 */

import { realpathSync } from "fs";
import { pathToFileURL } from "url";

import yargs from "yargs";

import { CsvSchemaError } from "./csv.js";
import { PLOT_KINDS, PlotKind, render } from "./plots.js";

export async function runCli(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = await yargs(argv)
      .scriptName("aqmsim-plot")
      .command("plot <kind>", "render one SVG from simulator CSV output", (y) =>
        y
          .positional("kind", {
            describe: "what to draw",
            choices: PLOT_KINDS,
            demandOption: true,
          })
          .option("in", {
            describe: "input CSV file(s)",
            type: "string",
            array: true,
            demandOption: true,
          })
          .option("out", {
            describe: "output SVG file",
            type: "string",
            demandOption: true,
          }),
      )
      .demandCommand(1)
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw err ?? new CsvSchemaError(msg);
      })
      .parse();
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }

  const job = {
    kind: parsed.kind as PlotKind,
    inputs: parsed.in as string[],
    output: parsed.out as string,
  };
  try {
    render(job);
  } catch (err) {
    if (err instanceof CsvSchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
  console.log(`wrote ${job.output}`);
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
if (isMain) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
