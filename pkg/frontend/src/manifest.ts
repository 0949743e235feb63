/**
 * Mosaic manifest: the read-only layout description produced by the
 * pipeline (positions in image-width units, rotations in degrees).
 */

export interface FrameRecord {
  image: string;
  x: number;
  y: number;
  rotation_deg: number;
  timestamp: number;
}

export interface MosaicManifest {
  version: number;
  frames: FrameRecord[];
  bounding_box: [number, number, number, number];
  thumbnail: string;
}

export const MANIFEST_VERSION = 1;

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

export function parseManifest(text: string): MosaicManifest {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new Error(`manifest is not valid JSON: ${String(err)}`);
  }
  const obj = data as Record<string, unknown>;
  if (obj.version !== MANIFEST_VERSION) {
    throw new Error(`unsupported manifest version ${String(obj.version)}`);
  }
  if (!Array.isArray(obj.frames)) {
    throw new Error("manifest.frames must be an array");
  }
  const frames: FrameRecord[] = obj.frames.map((raw, i) => {
    const f = raw as Record<string, unknown>;
    if (typeof f.image !== "string" || !isNumber(f.x) || !isNumber(f.y) ||
        !isNumber(f.rotation_deg) || !isNumber(f.timestamp)) {
      throw new Error(`manifest frame ${i} is malformed`);
    }
    return {
      image: f.image,
      x: f.x,
      y: f.y,
      rotation_deg: f.rotation_deg,
      timestamp: f.timestamp,
    };
  });
  const bbox = obj.bounding_box;
  if (!Array.isArray(bbox) || bbox.length !== 4 || !bbox.every(isNumber)) {
    throw new Error("manifest.bounding_box must be four numbers");
  }
  if (typeof obj.thumbnail !== "string") {
    throw new Error("manifest.thumbnail must be a string");
  }
  return {
    version: MANIFEST_VERSION,
    frames,
    bounding_box: [bbox[0], bbox[1], bbox[2], bbox[3]],
    thumbnail: obj.thumbnail,
  };
}

export function serializeManifest(manifest: MosaicManifest): string {
  // Stable key order, matching the pipeline's writer.
  return JSON.stringify(
    {
      bounding_box: manifest.bounding_box,
      frames: manifest.frames,
      thumbnail: manifest.thumbnail,
      version: manifest.version,
    },
    null,
    2,
  );
}
