/** Extraction pipeline: image folder in, descriptor file out. */

import { buildBackbone, BackboneName } from './backbone';
import { writeCnParams } from './cn-params';
import { SampleRecord, toChannelMajor, writeDescriptorFile } from './descriptor-file';
import { listImages } from './dataset';
import { readPng } from './png-io';

export interface ExtractOptions {
  root: string;
  split: string;
  backbone: BackboneName;
  out: string;
  /** Images are resized (bilinear) to size x size before the forward pass. */
  size: number;
  cnParamsOut?: string;
  log?: (line: string) => void;
}

export interface ExtractSummary {
  classes: string[];
  samples: number;
  /** Relative ids (class/file) of images that failed to decode. */
  skipped: string[];
  channels: number;
  height: number;
  width: number;
}

export function extract(opts: ExtractOptions): ExtractSummary {
  const log = opts.log ?? (() => undefined);
  const dataset = listImages(opts.root, opts.split);
  const net = buildBackbone(opts.backbone);

  const samples: SampleRecord[] = [];
  const skipped: string[] = [];
  let height = 0;
  let width = 0;
  try {
    for (const entry of dataset.images) {
      let image;
      try {
        image = readPng(entry.path);
      } catch (e) {
        skipped.push(entry.sampleId);
        log(`skipping unreadable image ${entry.path}: ${(e as Error).message}`);
        continue;
      }
      const grid = net.forward(image, opts.size);
      if (samples.length === 0) {
        height = grid.height;
        width = grid.width;
      } else if (grid.height !== height || grid.width !== width) {
        throw new Error(
          `inconsistent feature grid for ${entry.path}: ` +
          `${grid.height}x${grid.width} vs ${height}x${width}`,
        );
      }
      samples.push({
        classIndex: entry.classIndex,
        sampleId: entry.sampleId,
        values: toChannelMajor(grid.values, grid.height, grid.width, net.channels),
      });
    }
  } finally {
    net.dispose();
  }
  if (samples.length === 0) throw new Error('every image failed to load');

  writeDescriptorFile(
    {
      channels: net.channels,
      height,
      width,
      classNames: dataset.classNames,
      samples,
    },
    opts.out,
  );
  if (opts.cnParamsOut) writeCnParams(net.channels, opts.cnParamsOut);
  if (skipped.length > 0) log(`skipped ${skipped.length} image(s)`);
  return {
    classes: dataset.classNames,
    samples: samples.length,
    skipped,
    channels: net.channels,
    height,
    width,
  };
}
