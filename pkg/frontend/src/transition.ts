/**
 * Crossfade transition between two frames.
 *
 * The renderer itself is a thin canvas loop; everything testable lives
 * here as a pure function from (manifest, from, to, progress) to a list
 * of draw commands.
 */

import type { MosaicManifest } from "./manifest.js";
import type { Vec2 } from "./geometry.js";

export interface DrawCommand {
  frameIndex: number;
  image: string;
  /** Screen-space offset of the frame centre, in layout units. */
  position: Vec2;
  alpha: number;
  /** Rotation about the frame centre, degrees. Content alignment undoes
   *  the manifest rotation, hence the negated sign. */
  rotationDeg: number;
  /** True when the image is not yet decoded; draw a placeholder. */
  placeholder: boolean;
}

export function renderTransition(
  manifest: MosaicManifest,
  from: number,
  to: number,
  progress: number,
  loaded: (image: string) => boolean = () => true,
): DrawCommand[] {
  if (progress < 0 || progress > 1) {
    throw new Error(`progress ${progress} outside [0, 1]`);
  }
  const a = manifest.frames[from];
  const b = manifest.frames[to];
  // The view tracks the camera: at progress p the viewport centre sits at
  // the interpolated layout position, so frame contents stay put on screen
  // while the focus crossfades.
  const centre = {
    x: a.x + (b.x - a.x) * progress,
    y: a.y + (b.y - a.y) * progress,
  };
  const commands: DrawCommand[] = [
    {
      frameIndex: from,
      image: a.image,
      position: { x: a.x - centre.x, y: a.y - centre.y },
      alpha: 1 - progress,
      rotationDeg: -a.rotation_deg,
      placeholder: !loaded(a.image),
    },
    {
      frameIndex: to,
      image: b.image,
      position: { x: b.x - centre.x, y: b.y - centre.y },
      alpha: progress,
      rotationDeg: -b.rotation_deg,
      placeholder: !loaded(b.image),
    },
  ];
  // Draw the incoming frame on top as it fades in.
  return progress < 0.5 ? [commands[1], commands[0]] : commands;
}
