import { describe, expect, it } from "vitest";

import {
  ACTIVATION_FRACTION,
  applyDrag,
  createViewer,
  frameFromHash,
  minimapDots,
  navigateTo,
  release,
  stateToHash,
  toggleMode,
} from "../src/viewer.js";
import { gridManifest } from "./helpers.js";

const VIEWPORT = 1000;

describe("drag gesture lifecycle", () => {
  it("short drags snap back on release", () => {
    let state = createViewer(gridManifest(3), VIEWPORT, 4);
    const below = ACTIVATION_FRACTION * VIEWPORT - 1;
    state = applyDrag(state, { x: -below, y: 0 });
    expect(state.target).toBeNull();
    expect(state.progress).toBe(0);
    state = release(state);
    expect(state.current).toBe(4);
    expect(state.drag).toEqual({ x: 0, y: 0 });
  });

  it("a committed drag transitions to the picked neighbor", () => {
    let state = createViewer(gridManifest(3), VIEWPORT, 4);
    state = applyDrag(state, { x: -ACTIVATION_FRACTION * VIEWPORT, y: 0 });
    expect(state.target).toBe(5);
    expect(state.progress).toBeGreaterThan(0);
    state = release(state);
    expect(state.current).toBe(5);
    expect(state.progress).toBe(0);
  });

  it("progress grows monotonically within one gesture", () => {
    let state = createViewer(gridManifest(3), VIEWPORT, 4);
    let previous = 0;
    for (let i = 0; i < 8; i++) {
      state = applyDrag(state, { x: -60, y: 0 });
      expect(state.progress).toBeGreaterThanOrEqual(previous);
      previous = state.progress;
    }
    expect(previous).toBeLessThanOrEqual(1);
  });
});

describe("navigation and modes", () => {
  it("navigateTo jumps directly and validates the index", () => {
    let state = createViewer(gridManifest(3), VIEWPORT);
    state = navigateTo(state, 7);
    expect(state.current).toBe(7);
    expect(() => navigateTo(state, 9)).toThrow(/range/);
    expect(() => navigateTo(state, -1)).toThrow(/range/);
  });

  it("toggleMode flips between normal and picasso", () => {
    let state = createViewer(gridManifest(3), VIEWPORT);
    state = toggleMode(state);
    expect(state.mode).toBe("picasso");
    state = toggleMode(state);
    expect(state.mode).toBe("normal");
  });

  it("selecting a frame from picasso view centers it in normal mode", () => {
    let state = toggleMode(createViewer(gridManifest(3), VIEWPORT));
    state = navigateTo(state, 8);
    expect(state.current).toBe(8);
    expect(state.mode).toBe("normal");
  });
});

describe("minimap", () => {
  it("one-frame manifest yields a single active dot", () => {
    const state = createViewer(gridManifest(1), VIEWPORT);
    const dots = minimapDots(state);
    expect(dots).toHaveLength(1);
    expect(dots[0].active).toBe(true);
  });

  it("the highlighted dot follows the current frame", () => {
    let state = createViewer(gridManifest(3), VIEWPORT, 0);
    expect(minimapDots(state)[0].active).toBe(true);
    state = navigateTo(state, 6);
    const dots = minimapDots(state);
    expect(dots[0].active).toBe(false);
    expect(dots[6].active).toBe(true);
    // Dots live in the unit square of the bounding box.
    for (const dot of dots) {
      expect(dot.x).toBeGreaterThanOrEqual(0);
      expect(dot.x).toBeLessThanOrEqual(1);
      expect(dot.y).toBeGreaterThanOrEqual(0);
      expect(dot.y).toBeLessThanOrEqual(1);
    }
  });
});

describe("URL hash deep links", () => {
  it("round-trips the current frame", () => {
    const state = navigateTo(createViewer(gridManifest(3), VIEWPORT), 5);
    expect(stateToHash(state)).toBe("#frame=5");
    expect(frameFromHash(stateToHash(state))).toBe(5);
  });

  it("rejects malformed hashes", () => {
    expect(frameFromHash("")).toBeNull();
    expect(frameFromHash("#frame=")).toBeNull();
    expect(frameFromHash("#frame=abc")).toBeNull();
    expect(frameFromHash("#other=3")).toBeNull();
  });
});

describe("construction", () => {
  it("rejects empty manifests and out-of-range initial frames", () => {
    expect(() => createViewer({ ...gridManifest(1), frames: [] }, VIEWPORT))
      .toThrow(/no frames/);
    expect(() => createViewer(gridManifest(2), VIEWPORT, 4)).toThrow(/range/);
  });
});
