import { describe, expect, it } from "vitest";

import { renderTransition } from "../src/transition.js";
import { gridManifest } from "./helpers.js";

describe("renderTransition", () => {
  const manifest = gridManifest(3);

  it("progress 0 renders exactly the source frame", () => {
    const commands = renderTransition(manifest, 4, 5, 0);
    const source = commands.find((c) => c.frameIndex === 4)!;
    const target = commands.find((c) => c.frameIndex === 5)!;
    expect(source.alpha).toBe(1);
    expect(source.position).toEqual({ x: 0, y: 0 });
    expect(target.alpha).toBe(0);
  });

  it("progress 1 renders exactly the target frame", () => {
    const commands = renderTransition(manifest, 4, 5, 1);
    const source = commands.find((c) => c.frameIndex === 4)!;
    const target = commands.find((c) => c.frameIndex === 5)!;
    expect(target.alpha).toBe(1);
    expect(target.position).toEqual({ x: 0, y: 0 });
    expect(source.alpha).toBe(0);
  });

  it("interpolates positions and alphas at progress 0.5", () => {
    const commands = renderTransition(manifest, 4, 5, 0.5);
    const source = commands.find((c) => c.frameIndex === 4)!;
    const target = commands.find((c) => c.frameIndex === 5)!;
    expect(source.alpha).toBeCloseTo(0.5, 12);
    expect(target.alpha).toBeCloseTo(0.5, 12);
    // Frames 4 and 5 are one layout unit apart in x; at midpoint the view
    // centre sits between them.
    expect(source.position.x).toBeCloseTo(-0.5, 12);
    expect(target.position.x).toBeCloseTo(0.5, 12);
    expect(source.position.y).toBeCloseTo(0, 12);
  });

  it("applies the negated manifest rotation so content aligns", () => {
    const rotated = gridManifest(2);
    rotated.frames[1] = { ...rotated.frames[1], rotation_deg: 3 };
    const commands = renderTransition(rotated, 0, 1, 1);
    const target = commands.find((c) => c.frameIndex === 1)!;
    expect(target.rotationDeg).toBe(-3);
  });

  it("flags missing textures as placeholders", () => {
    const commands = renderTransition(manifest, 4, 5, 0.5,
                                      (url) => url.includes("00004"));
    const source = commands.find((c) => c.frameIndex === 4)!;
    const target = commands.find((c) => c.frameIndex === 5)!;
    expect(source.placeholder).toBe(false);
    expect(target.placeholder).toBe(true);
  });

  it("rejects progress outside [0, 1]", () => {
    expect(() => renderTransition(manifest, 4, 5, -0.01)).toThrow(/progress/);
    expect(() => renderTransition(manifest, 4, 5, 1.01)).toThrow(/progress/);
  });

  it("never mutates the manifest", () => {
    const snapshot = JSON.stringify(manifest);
    renderTransition(manifest, 0, 8, 0.7);
    expect(JSON.stringify(manifest)).toBe(snapshot);
  });
});
