/** PNG reading for the extractor: every input image becomes an RGB float
 * array in [0, 1], shape [height, width, 3]. */

import { readFileSync } from 'fs';
import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major [h][w][rgb], values in [0, 1]. */
  data: Float32Array;
}

export function readPng(path: string): RgbImage {
  const png = PNG.sync.read(readFileSync(path));
  const { width, height } = png;
  const out = new Float32Array(width * height * 3);
  // pngjs always decodes to RGBA8.
  for (let i = 0; i < width * height; i++) {
    out[i * 3] = png.data[i * 4] / 255;
    out[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    out[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return { width, height, data: out };
}
