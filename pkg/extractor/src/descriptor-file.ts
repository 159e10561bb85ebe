/** Writer for the engine's binary descriptor format (see ../FORMAT.md).
 *
 * Layout, all integers little-endian, no padding:
 *   "LDWR" | version u32 | C u32 | H u32 | W u32 | classes u32 | samples u32
 *   | classes x (u16 length + UTF-8 name)
 *   | samples x (class_index u32, u16 length + UTF-8 id, C*H*W float32)
 * Values are channel-major: all H*W floats of channel 0 first.
 */

import { writeFileSync } from 'fs';

export const MAGIC = 'LDWR';
export const VERSION = 1;

export interface SampleRecord {
  classIndex: number;
  sampleId: string;
  /** Channel-major C*H*W values. */
  values: Float32Array;
}

export interface DescriptorFile {
  channels: number;
  height: number;
  width: number;
  classNames: string[];
  samples: SampleRecord[];
}

function encodeString(value: string, what: string): Buffer {
  const raw = Buffer.from(value, 'utf-8');
  if (raw.length > 0xffff) throw new Error(`${what} is longer than 65535 bytes`);
  const len = Buffer.alloc(2);
  len.writeUInt16LE(raw.length);
  return Buffer.concat([len, raw]);
}

export function encodeDescriptorFile(file: DescriptorFile): Buffer {
  const { channels, height, width, classNames, samples } = file;
  if (classNames.length === 0) throw new Error('refusing to write an empty class table');
  if (new Set(classNames).size !== classNames.length) {
    throw new Error('class table contains duplicate names');
  }
  const perSample = channels * height * width;

  const header = Buffer.alloc(28);
  header.write(MAGIC, 0, 'ascii');
  header.writeUInt32LE(VERSION, 4);
  header.writeUInt32LE(channels, 8);
  header.writeUInt32LE(height, 12);
  header.writeUInt32LE(width, 16);
  header.writeUInt32LE(classNames.length, 20);
  header.writeUInt32LE(samples.length, 24);

  const parts: Buffer[] = [header];
  for (const name of classNames) parts.push(encodeString(name, `class name ${name}`));
  for (const s of samples) {
    if (s.classIndex < 0 || s.classIndex >= classNames.length) {
      throw new Error(`sample ${s.sampleId} has class index ${s.classIndex} out of range`);
    }
    if (s.values.length !== perSample) {
      throw new Error(
        `sample ${s.sampleId} has ${s.values.length} values, expected ${perSample}`,
      );
    }
    for (let i = 0; i < s.values.length; i++) {
      if (!Number.isFinite(s.values[i])) {
        throw new Error(`sample ${s.sampleId} has a non-finite value at index ${i}`);
      }
    }
    const head = Buffer.alloc(4);
    head.writeUInt32LE(s.classIndex);
    const values = Buffer.alloc(4 * s.values.length);
    for (let i = 0; i < s.values.length; i++) values.writeFloatLE(s.values[i], 4 * i);
    parts.push(head, encodeString(s.sampleId, `sample id ${s.sampleId}`), values);
  }
  return Buffer.concat(parts);
}

export function writeDescriptorFile(file: DescriptorFile, path: string): void {
  writeFileSync(path, encodeDescriptorFile(file));
}

/** [height, width, channels] activations to the file's channel-major order. */
export function toChannelMajor(
  values: Float32Array, height: number, width: number, channels: number,
): Float32Array {
  const out = new Float32Array(values.length);
  const positions = height * width;
  for (let p = 0; p < positions; p++) {
    for (let c = 0; c < channels; c++) {
      out[c * positions + p] = values[p * channels + c];
    }
  }
  return out;
}
