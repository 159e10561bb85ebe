/** Identity-initialized normalization parameter file for the engine's
 * --cn-params option, sized to the backbone's channel count. */

import { writeFileSync } from 'fs';

export function cnParamsJson(channels: number): string {
  const doc = {
    a1: 1.0, b1: 0.0,
    a2: 1.0, b2: 0.0,
    gamma: Array(channels).fill(1.0),
    beta: Array(channels).fill(0.0),
    omega1: 1.0, omega2: 1.0,
    epsilon: 1e-5,
  };
  return JSON.stringify(doc, null, 2) + '\n';
}

export function writeCnParams(channels: number, path: string): void {
  writeFileSync(path, cnParamsJson(channels), 'utf-8');
}
