#!/usr/bin/env node
/** Command line entry: extract descriptor files from image folders. */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { extract } from './extract';
import { BackboneName } from './backbone';

yargs(hideBin(process.argv))
  .command(
    'extract',
    'Run a frozen backbone over an image folder and write a descriptor file',
    (y) =>
      y
        .option('root', { type: 'string', demandOption: true, describe: 'Dataset root directory' })
        .option('split', { type: 'string', default: 'train', describe: 'Split subdirectory' })
        .option('backbone', {
          choices: ['conv4', 'resnet12'] as const,
          default: 'conv4' as BackboneName,
        })
        .option('size', { type: 'number', default: 84, describe: 'Input resolution (bilinear resize)' })
        .option('out', { type: 'string', demandOption: true, describe: 'Output descriptor file' })
        .option('cn-params-out', {
          type: 'string',
          describe: 'Also write an identity normalization parameter file here',
        }),
    (argv) => {
      const summary = extract({
        root: argv.root,
        split: argv.split,
        backbone: argv.backbone as BackboneName,
        out: argv.out,
        size: argv.size,
        cnParamsOut: argv['cn-params-out'],
        log: (line) => console.error(line),
      });
      console.log(
        `wrote ${argv.out}: ${summary.samples} samples, ${summary.classes.length} classes, ` +
        `${summary.channels}x${summary.height}x${summary.width} descriptors` +
        (summary.skipped.length > 0 ? `, ${summary.skipped.length} skipped` : ''),
      );
    },
  )
  .demandCommand(1)
  .strict()
  .parse();
