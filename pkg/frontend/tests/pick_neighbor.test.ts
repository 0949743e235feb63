import { describe, expect, it } from "vitest";

import { medianNeighborDistance, pickNeighbor } from "../src/geometry.js";
import { gridManifest, gridWithOutlier } from "./helpers.js";

// 3x3 grid, row-major: frame 4 is the centre.  Swiping drags the content,
// so a swipe left lands on the right-hand neighbor (+x), etc.
const CENTRE = 4;
const DIRECTIONS: [string, { x: number; y: number }, number][] = [
  ["left", { x: -1, y: 0 }, 5],
  ["right", { x: 1, y: 0 }, 3],
  ["up", { x: 0, y: -1 }, 7],
  ["down", { x: 0, y: 1 }, 1],
  ["up-left", { x: -1, y: -1 }, 8],
  ["down-right", { x: 1, y: 1 }, 0],
  ["up-right", { x: 1, y: -1 }, 6],
  ["down-left", { x: -1, y: 1 }, 2],
];

describe("pickNeighbor on a 3x3 grid", () => {
  const manifest = gridManifest(3);

  it.each(DIRECTIONS)("swipe %s picks the opposite neighbor",
    (_name, swipe, expected) => {
      expect(pickNeighbor(CENTRE, swipe, manifest)).toBe(expected);
    });

  it("is deterministic for repeated identical swipes", () => {
    const first = pickNeighbor(CENTRE, { x: -40, y: 3 }, manifest);
    for (let i = 0; i < 5; i++) {
      expect(pickNeighbor(CENTRE, { x: -40, y: 3 }, manifest)).toBe(first);
    }
  });

  it("round-trips: a swipe then its inverse returns home", () => {
    for (const [, swipe] of DIRECTIONS) {
      const there = pickNeighbor(CENTRE, swipe, manifest);
      expect(there).not.toBeNull();
      const back = pickNeighbor(there as number,
                                { x: -swipe.x, y: -swipe.y }, manifest);
      expect(back).toBe(CENTRE);
    }
  });
});

describe("pickNeighbor edge cases", () => {
  it("returns null for an isolated frame", () => {
    const manifest = gridWithOutlier(3);
    const outlier = manifest.frames.length - 1;
    for (const [, swipe] of DIRECTIONS) {
      expect(pickNeighbor(outlier, swipe, manifest)).toBeNull();
    }
  });

  it("returns null when no candidate clears the cosine threshold", () => {
    const manifest = gridManifest(2);
    // From frame 0, an up-swipe lands on the frame below (+y), but a
    // down-swipe asks for a frame above (-y): all neighbors sit at +x/+y,
    // so the best cosine is at most 0.
    expect(pickNeighbor(0, { x: 0, y: -1 }, manifest)).not.toBeNull();
    expect(pickNeighbor(0, { x: 0, y: 1 }, manifest)).toBeNull();
  });

  it("returns null for zero-magnitude swipes and single frames", () => {
    const manifest = gridManifest(3);
    expect(pickNeighbor(CENTRE, { x: 0, y: 0 }, manifest)).toBeNull();
    const single = gridManifest(1);
    expect(pickNeighbor(0, { x: -1, y: 0 }, single)).toBeNull();
  });
});

describe("medianNeighborDistance", () => {
  it("equals the grid spacing on a uniform grid", () => {
    expect(medianNeighborDistance(gridManifest(3, 0.25))).toBeCloseTo(0.25, 12);
  });

  it("is zero for fewer than two frames", () => {
    expect(medianNeighborDistance(gridManifest(1))).toBe(0);
  });
});
