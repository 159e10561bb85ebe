import { describe, expect, it } from 'vitest';
import { buildBackbone } from '../src/backbone';
import { RgbImage } from '../src/png-io';

function flatImage(width: number, height: number, fill = 0.5): RgbImage {
  const data = new Float32Array(width * height * 3).fill(fill);
  return { width, height, data };
}

function rampImage(width: number, height: number): RgbImage {
  const data = new Float32Array(width * height * 3);
  for (let i = 0; i < data.length; i++) data[i] = (i % 97) / 96;
  return { width, height, data };
}

describe('conv4 backbone', () => {
  it('maps an 84px input to a 21x21 grid of 64-channel descriptors', () => {
    const net = buildBackbone('conv4');
    try {
      const out = net.forward(flatImage(84, 84), 84);
      expect(net.channels).toBe(64);
      expect(out.height).toBe(21);
      expect(out.width).toBe(21);
      expect(out.values.length).toBe(21 * 21 * 64);
    } finally {
      net.dispose();
    }
  });

  it('maps a 28px input to a 7x7 grid and stays finite', () => {
    const net = buildBackbone('conv4');
    try {
      const out = net.forward(rampImage(28, 28), 28);
      expect(out.height).toBe(7);
      expect(out.width).toBe(7);
      for (const v of out.values) expect(Number.isFinite(v)).toBe(true);
    } finally {
      net.dispose();
    }
  });

  it('is deterministic across independent constructions', () => {
    const img = rampImage(28, 28);
    const a = buildBackbone('conv4');
    const b = buildBackbone('conv4');
    try {
      const oa = a.forward(img, 28);
      const ob = b.forward(img, 28);
      expect(Array.from(oa.values)).toEqual(Array.from(ob.values));
    } finally {
      a.dispose();
      b.dispose();
    }
  });

  it('resizes odd-sized inputs to the requested resolution', () => {
    const net = buildBackbone('conv4');
    try {
      const out = net.forward(rampImage(37, 51), 28);
      expect(out.height).toBe(7);
      expect(out.width).toBe(7);
    } finally {
      net.dispose();
    }
  });
});

describe('resnet12 backbone', () => {
  it('emits 128-channel descriptors on a 21x21 grid at 84px', () => {
    const net = buildBackbone('resnet12');
    try {
      const out = net.forward(flatImage(84, 84), 84);
      expect(net.channels).toBe(128);
      expect(out.height).toBe(21);
      expect(out.width).toBe(21);
      expect(out.values.length).toBe(21 * 21 * 128);
      for (const v of out.values) expect(Number.isFinite(v)).toBe(true);
    } finally {
      net.dispose();
    }
  });
});
