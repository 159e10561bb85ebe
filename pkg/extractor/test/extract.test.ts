import { mkdtempSync, mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { PNG } from 'pngjs';
import { describe, expect, it } from 'vitest';
import { extract } from '../src/extract';

function writePng(path: string, size: number, seed: number): void {
  const png = new PNG({ width: size, height: size });
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const i = (y * size + x) * 4;
      png.data[i] = (x * 7 + seed * 13) % 256;
      png.data[i + 1] = (y * 11 + seed * 29) % 256;
      png.data[i + 2] = (x * y + seed) % 256;
      png.data[i + 3] = 255;
    }
  }
  writeFileSync(path, PNG.sync.write(png));
}

function makeTree(classes: string[], perClass: number, size: number): string {
  const root = mkdtempSync(join(tmpdir(), 'extract-'));
  const split = join(root, 'train');
  mkdirSync(split);
  classes.forEach((name, c) => {
    const dir = join(split, name);
    mkdirSync(dir);
    for (let i = 0; i < perClass; i++) {
      writePng(join(dir, `img_${i}.png`), size, c * perClass + i);
    }
  });
  return root;
}

describe('extract', () => {
  it('walks a split, encodes every image, and reports the grid', () => {
    const root = makeTree(['beta', 'alpha'], 2, 28);
    const out = join(root, 'train.ldwr');
    const summary = extract({ root, split: 'train', backbone: 'conv4', out, size: 28 });
    expect(summary.classes).toEqual(['alpha', 'beta']); // sorted, not listing order
    expect(summary.samples).toBe(4);
    expect(summary.skipped).toEqual([]);
    expect(summary.channels).toBe(64);
    expect(summary.height).toBe(7);
    expect(summary.width).toBe(7);
    const buf = readFileSync(out);
    expect(buf.subarray(0, 4).toString('ascii')).toBe('LDWR');
    expect(buf.readUInt32LE(20)).toBe(2);
    expect(buf.readUInt32LE(24)).toBe(4);
  });

  it('produces byte-identical output on repeated runs', () => {
    const root = makeTree(['a', 'b'], 1, 28);
    const out1 = join(root, 'one.ldwr');
    const out2 = join(root, 'two.ldwr');
    extract({ root, split: 'train', backbone: 'conv4', out: out1, size: 28 });
    extract({ root, split: 'train', backbone: 'conv4', out: out2, size: 28 });
    expect(readFileSync(out1).equals(readFileSync(out2))).toBe(true);
  });

  it('skips unreadable images instead of failing the run', () => {
    const root = makeTree(['a'], 2, 28);
    writeFileSync(join(root, 'train', 'a', 'broken.png'), 'not a png');
    const out = join(root, 'train.ldwr');
    const summary = extract({ root, split: 'train', backbone: 'conv4', out, size: 28, log: () => {} });
    expect(summary.samples).toBe(2);
    expect(summary.skipped).toEqual(['a/broken.png']);
  });

  it('writes normalization parameters sized to the backbone when asked', () => {
    const root = makeTree(['a'], 1, 28);
    const out = join(root, 'train.ldwr');
    const paramsOut = join(root, 'cn.json');
    extract({ root, split: 'train', backbone: 'conv4', out, size: 28, cnParamsOut: paramsOut });
    const params = JSON.parse(readFileSync(paramsOut, 'utf-8'));
    expect(params.gamma).toHaveLength(64);
    expect(params.beta).toHaveLength(64);
    expect(params.epsilon).toBeCloseTo(1e-5);
  });
});
