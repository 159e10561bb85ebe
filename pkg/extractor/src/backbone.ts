/** Frozen convolutional backbones producing local descriptor grids.
 *
 * Weights come from a seeded PRNG, so every run of the tool builds the
 * identical network: extraction is deterministic down to the byte. The
 * random weights are a stand-in for trained checkpoint dumps; the file
 * format and the engine do not care where the floats came from.
 *
 * Both backbones downsample by 4 (pooling after the first two blocks only),
 * keeping the descriptor grid fine-grained: an 84x84 input yields 21x21
 * positions.
 */

import * as tf from '@tensorflow/tfjs';
import { heWeights, seeded } from './prng';
import type { RgbImage } from './png-io';

export type BackboneName = 'conv4' | 'resnet12';

export interface Backbone {
  name: BackboneName;
  channels: number;
  /** Forward pass: RGB image in, [height, width, channels] feature grid out. */
  forward(image: RgbImage, size: number): { height: number; width: number; values: Float32Array };
  dispose(): void;
}

const LEAKY_SLOPE = 0.2;
const WEIGHT_SEED = 0x00424242;

function convKernel(
  rand: () => number, kh: number, kw: number, cin: number, cout: number,
): tf.Tensor4D {
  const w = heWeights(kh * kw * cin * cout, kh * kw * cin, rand);
  return tf.tensor4d(w, [kh, kw, cin, cout]);
}

function toInputTensor(image: RgbImage, size: number): tf.Tensor4D {
  let x = tf.tensor4d(image.data, [1, image.height, image.width, 3]);
  if (image.height !== size || image.width !== size) {
    x = tf.image.resizeBilinear(x, [size, size]);
  }
  // Center to [-1, 1]; frozen preprocessing shared by both backbones.
  return tf.sub(tf.mul(x, 2), 1) as tf.Tensor4D;
}

export function buildBackbone(name: BackboneName): Backbone {
  return name === 'conv4' ? buildConv4() : buildResnet12();
}

/** Four 3x3 conv blocks of 64 filters, pooling after the first two. */
function buildConv4(): Backbone {
  const rand = seeded(WEIGHT_SEED);
  const kernels: tf.Tensor4D[] = [];
  let cin = 3;
  for (let block = 0; block < 4; block++) {
    kernels.push(convKernel(rand, 3, 3, cin, 64));
    cin = 64;
  }

  return {
    name: 'conv4',
    channels: 64,
    forward(image, size) {
      return runForward(image, size, (x) => {
        for (let block = 0; block < 4; block++) {
          x = tf.leakyRelu(tf.conv2d(x as tf.Tensor4D, kernels[block], 1, 'same'), LEAKY_SLOPE);
          if (block < 2) x = tf.maxPool(x as tf.Tensor4D, 2, 2, 'valid');
        }
        return x;
      });
    },
    dispose() {
      kernels.forEach((k) => k.dispose());
    },
  };
}

/** Four residual stages (two 3x3 convs plus a projection shortcut each),
 * pooling after the first two stages. */
function buildResnet12(): Backbone {
  const rand = seeded(WEIGHT_SEED ^ 0x5f3759df);
  const stageChannels = [64, 96, 128, 128];
  const main: tf.Tensor4D[][] = [];
  const shortcut: (tf.Tensor4D | null)[] = [];
  let cin = 3;
  for (const cout of stageChannels) {
    main.push([convKernel(rand, 3, 3, cin, cout), convKernel(rand, 3, 3, cout, cout)]);
    shortcut.push(cin === cout ? null : convKernel(rand, 1, 1, cin, cout));
    cin = cout;
  }

  return {
    name: 'resnet12',
    channels: stageChannels[stageChannels.length - 1],
    forward(image, size) {
      return runForward(image, size, (x) => {
        for (let stage = 0; stage < stageChannels.length; stage++) {
          const [k1, k2] = main[stage];
          const sc = shortcut[stage];
          const identity = sc === null ? x : tf.conv2d(x as tf.Tensor4D, sc, 1, 'same');
          let y = tf.leakyRelu(tf.conv2d(x as tf.Tensor4D, k1, 1, 'same'), LEAKY_SLOPE);
          y = tf.conv2d(y as tf.Tensor4D, k2, 1, 'same');
          x = tf.leakyRelu(tf.add(y, identity), LEAKY_SLOPE);
          if (stage < 2) x = tf.maxPool(x as tf.Tensor4D, 2, 2, 'valid');
        }
        return x;
      });
    },
    dispose() {
      main.flat().forEach((k) => k.dispose());
      shortcut.forEach((k) => k?.dispose());
    },
  };
}

function runForward(
  image: RgbImage, size: number, body: (x: tf.Tensor) => tf.Tensor,
): { height: number; width: number; values: Float32Array } {
  const out = tf.tidy(() => body(toInputTensor(image, size)));
  const [, height, width] = out.shape as number[];
  const values = out.dataSync() as Float32Array;
  out.dispose();
  return { height, width, values };
}
