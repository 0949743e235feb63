import { describe, expect, it } from "vitest";

import { parseManifest, serializeManifest } from "../src/manifest.js";
import { gridManifest } from "./helpers.js";

describe("manifest parsing", () => {
  it("round-trips through serialize and parse", () => {
    const manifest = gridManifest(3);
    const clone = parseManifest(serializeManifest(manifest));
    expect(clone).toEqual(manifest);
  });

  it("parses the pipeline's key-sorted output shape", () => {
    const text = JSON.stringify({
      bounding_box: [0, -0.1, 2.5, 0.1],
      frames: [
        { image: "images/frame_00000.png", rotation_deg: 0.0,
          timestamp: 0.0, x: 0.0, y: 0.0 },
      ],
      thumbnail: "minimap.png",
      version: 1,
    });
    const manifest = parseManifest(text);
    expect(manifest.frames).toHaveLength(1);
    expect(manifest.frames[0].image).toBe("images/frame_00000.png");
    expect(manifest.bounding_box).toEqual([0, -0.1, 2.5, 0.1]);
  });

  it("rejects unknown versions", () => {
    const bad = JSON.stringify({
      version: 99, frames: [], bounding_box: [0, 0, 0, 0], thumbnail: "",
    });
    expect(() => parseManifest(bad)).toThrow(/version/);
  });

  it("rejects malformed frames and non-JSON input", () => {
    expect(() => parseManifest("not json")).toThrow(/JSON/);
    const bad = JSON.stringify({
      version: 1,
      frames: [{ image: 5, x: 0, y: 0, rotation_deg: 0, timestamp: 0 }],
      bounding_box: [0, 0, 0, 0],
      thumbnail: "",
    });
    expect(() => parseManifest(bad)).toThrow(/frame 0/);
  });
});
