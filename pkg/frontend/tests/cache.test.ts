import { describe, expect, it } from "vitest";

import { prefetchOrder, PREFETCH_NEIGHBORS, TextureCache } from "../src/cache.js";
import { gridManifest, gridWithOutlier } from "./helpers.js";

describe("TextureCache", () => {
  it("decodes each URL once and serves repeats from the cache", async () => {
    const decoded: string[] = [];
    const cache = new TextureCache(async (url) => {
      decoded.push(url);
      return url.toUpperCase();
    });
    expect(await cache.load("a.png")).toBe("A.PNG");
    expect(await cache.load("a.png")).toBe("A.PNG");
    expect(decoded).toEqual(["a.png"]);
    expect(cache.has("a.png")).toBe(true);
  });

  it("coalesces concurrent loads of the same URL", async () => {
    let calls = 0;
    const cache = new TextureCache(async (url) => {
      calls += 1;
      return url;
    });
    await Promise.all([cache.load("x"), cache.load("x"), cache.load("x")]);
    expect(calls).toBe(1);
  });

  it("evicts least-recently-used entries past capacity", async () => {
    const cache = new TextureCache(async (url) => url, 2);
    await cache.load("a");
    await cache.load("b");
    cache.get("a");            // refresh "a": "b" becomes the LRU entry
    await cache.load("c");
    expect(cache.has("a")).toBe(true);
    expect(cache.has("b")).toBe(false);
    expect(cache.has("c")).toBe(true);
    expect(cache.size).toBe(2);
  });

  it("rejects nonsensical capacities", () => {
    expect(() => new TextureCache(async (u) => u, 0)).toThrow(/capacity/);
  });
});

describe("prefetchOrder", () => {
  it("lists the 8 nearest neighbors, nearest first", () => {
    const manifest = gridManifest(5);
    const order = prefetchOrder(manifest, 12);   // centre of the 5x5 grid
    expect(order).toHaveLength(PREFETCH_NEIGHBORS);
    // The four axis neighbors (distance 1) come before the four diagonal
    // neighbors (distance sqrt 2).
    const axis = new Set([7, 11, 13, 17].map(
      (i) => manifest.frames[i].image));
    const diagonal = new Set([6, 8, 16, 18].map(
      (i) => manifest.frames[i].image));
    expect(order.slice(0, 4).every((u) => axis.has(u))).toBe(true);
    expect(order.slice(4).every((u) => diagonal.has(u))).toBe(true);
  });

  it("handles manifests smaller than the prefetch count", () => {
    const manifest = gridManifest(2);
    expect(prefetchOrder(manifest, 0)).toHaveLength(3);
  });

  it("still orders by distance with an outlier present", () => {
    const manifest = gridWithOutlier(3);
    const order = prefetchOrder(manifest, 4);
    expect(order).not.toContain("images/outlier.png");
  });
});
