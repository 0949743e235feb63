/**
 * Layout-space geometry: neighbor picking for swipe navigation and the
 * layout-to-screen scale.
 */

import type { MosaicManifest } from "./manifest.js";

export interface Vec2 {
  x: number;
  y: number;
}

/** Cosine similarity a swipe candidate must reach to count as a match. */
export const MIN_COSINE = 0.5;

/** Candidates beyond 2x the median neighbor distance are ignored. */
export const RADIUS_FACTOR = 2;

function distance(a: Vec2, b: Vec2): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

function framePos(manifest: MosaicManifest, index: number): Vec2 {
  const f = manifest.frames[index];
  return { x: f.x, y: f.y };
}

/**
 * Median distance from each frame to its nearest other frame.  This is the
 * characteristic spacing of the mosaic: one swipe should travel about one
 * frame, whatever units the layout happens to use.
 */
export function medianNeighborDistance(manifest: MosaicManifest): number {
  const n = manifest.frames.length;
  if (n < 2) return 0;
  const nearest: number[] = [];
  for (let i = 0; i < n; i++) {
    let best = Infinity;
    for (let j = 0; j < n; j++) {
      if (j === i) continue;
      const d = distance(framePos(manifest, i), framePos(manifest, j));
      if (d < best) best = d;
    }
    nearest.push(best);
  }
  nearest.sort((a, b) => a - b);
  const mid = Math.floor(nearest.length / 2);
  return nearest.length % 2 === 1
    ? nearest[mid]
    : (nearest[mid - 1] + nearest[mid]) / 2;
}

/**
 * The frame the viewer should transition to for a swipe gesture.
 *
 * Swiping drags the content, so the camera moves opposite the swipe: the
 * best candidate maximizes cosine similarity between its layout offset and
 * the negated swipe vector.  Candidates farther than RADIUS_FACTOR x the
 * median neighbor distance, or below MIN_COSINE, yield null.
 */
export function pickNeighbor(
  current: number,
  swipe: Vec2,
  manifest: MosaicManifest,
): number | null {
  const mag = Math.hypot(swipe.x, swipe.y);
  if (mag === 0 || manifest.frames.length < 2) return null;
  const dir = { x: -swipe.x / mag, y: -swipe.y / mag };
  const radius = RADIUS_FACTOR * medianNeighborDistance(manifest);
  const origin = framePos(manifest, current);

  let best: number | null = null;
  let bestCos = MIN_COSINE;
  let bestDist = Infinity;
  for (let i = 0; i < manifest.frames.length; i++) {
    if (i === current) continue;
    const offset = {
      x: manifest.frames[i].x - origin.x,
      y: manifest.frames[i].y - origin.y,
    };
    const d = Math.hypot(offset.x, offset.y);
    if (d === 0 || d > radius) continue;
    const cos = (offset.x * dir.x + offset.y * dir.y) / d;
    // Prefer higher alignment; break near-ties toward the closer frame.
    if (cos > bestCos + 1e-12 ||
        (Math.abs(cos - bestCos) <= 1e-12 && d < bestDist)) {
      best = i;
      bestCos = cos;
      bestDist = d;
    }
  }
  return best;
}
