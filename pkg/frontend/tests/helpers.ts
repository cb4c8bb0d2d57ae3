import type { ClientTapSample, WireTap } from "../src/types.js";

/** Deterministic pseudo-random stream (mulberry32). */
export function prng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface Melody {
  downs: number[];
  ups: number[];
}

export function randomMelody(rand: () => number, length: number): Melody {
  return {
    downs: Array.from({ length }, () => 80 + 220 * rand()),
    ups: Array.from({ length: length - 1 }, () => 80 + 400 * rand()),
  };
}

/** One tight rendition of a melody as wire taps starting at t=0. */
export function renderTaps(melody: Melody, rand: () => number, jitter = 0.02): WireTap[] {
  const taps: WireTap[] = [];
  let t = 0;
  for (let i = 0; i < melody.downs.length; i++) {
    const down = t;
    const up = down + melody.downs[i]! * (1 + jitter * (rand() - 0.5));
    taps.push({
      down_ts: down,
      up_ts: up,
      pressure: Math.min(1, Math.max(0, 0.6 + 0.02 * (rand() - 0.5))),
      size: Math.min(1, Math.max(0, 0.5 + 0.02 * (rand() - 0.5))),
    });
    t = up + (i < melody.ups.length ? melody.ups[i]! * (1 + jitter * (rand() - 0.5)) : 0);
  }
  return taps;
}

export function asSample(taps: WireTap[]): ClientTapSample {
  return { taps, degraded: false, notices: [] };
}
