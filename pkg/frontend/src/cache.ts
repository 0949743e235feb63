/**
 * LRU texture cache with neighbor prefetch.
 *
 * Decoding is asynchronous and injected, so tests can drive the cache with
 * plain promises instead of real images.
 */

import type { MosaicManifest } from "./manifest.js";

export const PREFETCH_NEIGHBORS = 8;

export class TextureCache<T> {
  private entries = new Map<string, T>();
  private pending = new Map<string, Promise<T>>();

  constructor(
    private readonly decode: (url: string) => Promise<T>,
    private readonly capacity = 32,
  ) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
  }

  has(url: string): boolean {
    return this.entries.has(url);
  }

  get(url: string): T | undefined {
    const value = this.entries.get(url);
    if (value !== undefined) {
      // Refresh recency: Map preserves insertion order.
      this.entries.delete(url);
      this.entries.set(url, value);
    }
    return value;
  }

  async load(url: string): Promise<T> {
    const cached = this.get(url);
    if (cached !== undefined) return cached;
    let inflight = this.pending.get(url);
    if (inflight === undefined) {
      inflight = this.decode(url).then((value) => {
        this.pending.delete(url);
        this.entries.set(url, value);
        while (this.entries.size > this.capacity) {
          const oldest = this.entries.keys().next().value as string;
          this.entries.delete(oldest);
        }
        return value;
      });
      this.pending.set(url, inflight);
    }
    return inflight;
  }

  get size(): number {
    return this.entries.size;
  }
}

/**
 * Image URLs of the PREFETCH_NEIGHBORS frames nearest to `current` in
 * layout space, nearest first — the prefetch order after a navigation.
 */
export function prefetchOrder(
  manifest: MosaicManifest,
  current: number,
): string[] {
  const origin = manifest.frames[current];
  const others = manifest.frames
    .map((f, i) => ({
      index: i,
      dist: Math.hypot(f.x - origin.x, f.y - origin.y),
    }))
    .filter((e) => e.index !== current)
    .sort((a, b) => a.dist - b.dist || a.index - b.index);
  return others
    .slice(0, PREFETCH_NEIGHBORS)
    .map((e) => manifest.frames[e.index].image);
}
