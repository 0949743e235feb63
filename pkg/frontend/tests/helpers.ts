import type { FrameRecord, MosaicManifest } from "../src/manifest.js";

/** size x size grid manifest with unit spacing, row-major frame order. */
export function gridManifest(size: number, spacing = 1): MosaicManifest {
  const frames: FrameRecord[] = [];
  for (let row = 0; row < size; row++) {
    for (let col = 0; col < size; col++) {
      frames.push({
        image: `images/frame_${String(frames.length).padStart(5, "0")}.png`,
        x: col * spacing,
        y: row * spacing,
        rotation_deg: 0,
        timestamp: frames.length,
      });
    }
  }
  return {
    version: 1,
    frames,
    bounding_box: [0, 0, (size - 1) * spacing, (size - 1) * spacing],
    thumbnail: "minimap.png",
  };
}

/** Grid plus one frame far outside everyone's neighbor radius. */
export function gridWithOutlier(size: number): MosaicManifest {
  const manifest = gridManifest(size);
  manifest.frames.push({
    image: "images/outlier.png",
    x: 100,
    y: 100,
    rotation_deg: 0,
    timestamp: manifest.frames.length,
  });
  manifest.bounding_box = [0, 0, 100, 100];
  return manifest;
}
