#!/usr/bin/env node
/**
 * Command line for the NetCDF-to-HQGD converter.
 *
 * Exit codes: 0 success; 1 invalid request (flags, baseline, missing
 * variable, empty result); 2 unreadable or malformed files.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { ConversionSpec, DEFAULT_SPEC, convertToFile } from "./convert.js";
import {
  BaselineCoverageError,
  CalendarGapError,
  ConverterError,
  FormatError,
  MissingVariableError,
  NonMonthlyDataError,
} from "./errors.js";
import { STUDY_GRID } from "./grid.js";
import { formatReport, verifyFile } from "./verify.js";

class UsageFailure extends Error {}

function run(argv: string[]): number {
  const parser = yargs(argv)
    .scriptName("hqgd-convert")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) throw err;
      throw new UsageFailure(msg);
    })
    .command(
      "convert",
      "convert monthly NetCDF SST into an HQGD dataset",
      (y) =>
        y
          .option("input", { type: "string", array: true, demandOption: true, describe: "NetCDF file(s), in time order" })
          .option("variable", { type: "string", default: DEFAULT_SPEC.variable })
          .option("baseline-first", { type: "number", demandOption: true, describe: "first climatology year" })
          .option("baseline-last", { type: "number", demandOption: true, describe: "last climatology year" })
          .option("lead", { type: "number", default: DEFAULT_SPEC.leadH })
          .option("window", { type: "number", default: DEFAULT_SPEC.window, describe: "feature months per node" })
          .option("mask", { choices: ["drop", "zero"] as const, default: DEFAULT_SPEC.maskPolicy, describe: "policy for cells with missing months" })
          .option("lat-min", { type: "number", default: STUDY_GRID.latMin })
          .option("lat-max", { type: "number", default: STUDY_GRID.latMax })
          .option("lon-min", { type: "number", default: STUDY_GRID.lonMin })
          .option("lon-max", { type: "number", default: STUDY_GRID.lonMax })
          .option("resolution", { type: "number", default: STUDY_GRID.resolution })
          .option("out", { type: "string", demandOption: true }),
      (args) => {
        const spec: ConversionSpec = {
          inputs: args.input,
          variable: args.variable,
          baselineYears: [args.baselineFirst, args.baselineLast],
          grid: {
            latMin: args.latMin,
            latMax: args.latMax,
            lonMin: args.lonMin,
            lonMax: args.lonMax,
            resolution: args.resolution,
          },
          leadH: args.lead,
          window: args.window,
          maskPolicy: args.mask,
        };
        const result = convertToFile(spec, args.out);
        console.log(
          `wrote ${args.out}: ${result.manifest.n_samples} samples, ` +
            `${result.manifest.n_nodes} nodes x ${result.manifest.d_0} features, ` +
            `lead ${result.manifest.lead_h}, from ${result.months} months ` +
            `(${result.droppedCells} cells dropped)`,
        );
      },
    )
    .command(
      "verify <path>",
      "print manifest, shape checks, NaN scan, and month histogram",
      (y) => y.positional("path", { type: "string", demandOption: true }),
      (args) => {
        console.log(formatReport(verifyFile(args.path)));
      },
    )
    .demandCommand(1, "specify a command: convert or verify");

  try {
    parser.parse();
  } catch (err) {
    if (err instanceof UsageFailure) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (
      err instanceof FormatError ||
      err instanceof CalendarGapError ||
      err instanceof NonMonthlyDataError ||
      (err instanceof Error && "code" in err && typeof (err as NodeJS.ErrnoException).code === "string")
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    if (
      err instanceof MissingVariableError ||
      err instanceof BaselineCoverageError ||
      err instanceof ConverterError
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
  return 0;
}

process.exit(run(hideBin(process.argv)));
