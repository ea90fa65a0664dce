#!/usr/bin/env node
/**
 * channel-extractor CLI.
 *
 *   build-model  train an n-gram LM from a corpus and save it as JSON
 *   extract      write per-token channels for a corpus using a saved model
 *
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

import { readFileSync, writeFileSync } from "node:fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { extractCorpus, MAX_POSITIONS } from "./extract.js";
import { NgramLM, type NgramLMJson } from "./lm.js";
import { readCorpus, writeChannels } from "./io.js";

function dataError(error: unknown): never {
  const message = error instanceof Error ? error.message : String(error);
  console.error(`error: ${message}`);
  process.exit(2);
}

await yargs(hideBin(process.argv))
  .scriptName("channel-extractor")
  .command(
    "build-model",
    "train an n-gram language model from a corpus",
    (y) =>
      y
        .option("input", { type: "string", demandOption: true, describe: "corpus JSONL" })
        .option("output", { type: "string", demandOption: true, describe: "model JSON path" })
        .option("order", { type: "number", default: 2, describe: "n-gram order" })
        .option("name", { type: "string", default: "ngram", describe: "channel name prefix" })
        .option("lambda", { type: "number", default: 0.75, describe: "interpolation weight" }),
    (argv) => {
      try {
        const docs = readCorpus(argv.input);
        const lm = NgramLM.train(
          docs.map((d) => d.text),
          { order: argv.order, name: argv.name, lambda: argv.lambda },
        );
        writeFileSync(argv.output, JSON.stringify(lm.toJSON()) + "\n", "utf-8");
        console.error(
          `trained order-${argv.order} model on ${docs.length} documents, ` +
            `|V| = ${lm.vocab.length}`,
        );
      } catch (error) {
        dataError(error);
      }
    },
  )
  .command(
    "extract",
    "write per-token channels for a corpus",
    (y) =>
      y
        .option("input", { type: "string", demandOption: true, describe: "corpus JSONL" })
        .option("model", { type: "string", demandOption: true, describe: "model JSON path" })
        .option("output", { type: "string", demandOption: true, describe: "channels JSONL path" })
        .option("max-positions", {
          type: "number",
          default: MAX_POSITIONS,
          describe: `token cap per document (<= ${MAX_POSITIONS})`,
        }),
    (argv) => {
      try {
        const lm = NgramLM.fromJSON(
          JSON.parse(readFileSync(argv.model, "utf-8")) as NgramLMJson,
        );
        const docs = readCorpus(argv.input);
        const records = extractCorpus(lm, docs, argv.maxPositions);
        writeChannels(argv.output, records);
        console.error(
          `wrote ${records.length} documents x 3 channels to ${argv.output}`,
        );
      } catch (error) {
        dataError(error);
      }
    },
  )
  .demandCommand(1, "specify a command: build-model or extract")
  .strict()
  .help()
  .parseAsync();
