/** Seeded PRNG so backbone weights are frozen: the same seed always yields
 * the same network, making extraction byte-reproducible. */

/** sfc32: small fast counter PRNG, 32-bit state, good enough for weight init. */
export function sfc32(a: number, b: number, c: number, d: number): () => number {
  return () => {
    a |= 0; b |= 0; c |= 0; d |= 0;
    const t = (((a + b) | 0) + d) | 0;
    d = (d + 1) | 0;
    a = b ^ (b >>> 9);
    b = (c + (c << 3)) | 0;
    c = (c << 21) | (c >>> 11);
    c = (c + t) | 0;
    return (t >>> 0) / 4294967296;
  };
}

export function seeded(seed: number): () => number {
  // Splash the single seed across the four state words.
  const rand = sfc32(seed ^ 0x9e3779b9, seed ^ 0x243f6a88, seed ^ 0xb7e15162, seed | 1);
  for (let i = 0; i < 12; i++) rand(); // discard warm-up values
  return rand;
}

/** Standard gaussian samples via Box-Muller over the uniform source. */
export function gaussian(rand: () => number): () => number {
  let spare: number | null = null;
  return () => {
    if (spare !== null) {
      const v = spare;
      spare = null;
      return v;
    }
    let u = 0;
    let v = 0;
    while (u === 0) u = rand();
    while (v === 0) v = rand();
    const r = Math.sqrt(-2.0 * Math.log(u));
    spare = r * Math.sin(2.0 * Math.PI * v);
    return r * Math.cos(2.0 * Math.PI * v);
  };
}

/** He-scaled gaussian weights for a conv kernel with the given fan-in. */
export function heWeights(count: number, fanIn: number, rand: () => number): Float32Array {
  const g = gaussian(rand);
  const std = Math.sqrt(2.0 / fanIn);
  const out = new Float32Array(count);
  for (let i = 0; i < count; i++) out[i] = Math.fround(g() * std);
  return out;
}
