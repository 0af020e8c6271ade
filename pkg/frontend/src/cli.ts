/** Figure generator CLI.
 *
 * Usage: node dist/src/cli.js <kind> --input <artifact> --out <figure.svg>
 * Kinds: series | sweep_map | relax_curve | transport_slope | spectrum
 *
 * transport_slope also prints the fitted slope of log(hgamma2) to stdout.
 */

import * as fs from "fs";
import * as path from "path";

import { FIGURE_KINDS } from "./figures";
import { SchemaError } from "./data";

function usage(): string {
  return `usage: cli.js <${Object.keys(FIGURE_KINDS).join("|")}> --input FILE --out FILE.svg`;
}

export function main(argv: string[]): number {
  const [kind, ...rest] = argv;
  if (!kind || !(kind in FIGURE_KINDS)) {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  let input = "";
  let out = "";
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (flag === "--input") input = value;
    else if (flag === "--out") out = value;
    else {
      process.stderr.write(`unknown flag ${flag}\n${usage()}\n`);
      return 2;
    }
  }
  if (!input || !out) {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  try {
    const result = FIGURE_KINDS[kind](input);
    fs.mkdirSync(path.dirname(path.resolve(out)), { recursive: true });
    fs.writeFileSync(out, result.svg);
    for (const [key, value] of Object.entries(result.report)) {
      process.stdout.write(`${key} = ${value}\n`);
    }
    process.stdout.write(out + "\n");
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${(err as Error).message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
