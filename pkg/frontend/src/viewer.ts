/**
 * Viewer state machine: drag accumulation, transition commitment, minimap
 * and Picasso modes, and URL-hash deep links.  Pure logic, no DOM.
 */

import type { MosaicManifest } from "./manifest.js";
import { medianNeighborDistance, pickNeighbor, type Vec2 } from "./geometry.js";

/** Fraction of the viewport width a drag must cover to commit. */
export const ACTIVATION_FRACTION = 0.15;

/** Median neighbor spacing maps to this fraction of the viewport width. */
export const LAYOUT_SCREEN_FRACTION = 0.6;

export type ViewerMode = "normal" | "picasso";

export interface ViewerState {
  current: number;
  drag: Vec2;
  /** Transition progress in [0, 1]; 0 when idle. */
  progress: number;
  /** Transition target while a gesture or animation is active. */
  target: number | null;
  mode: ViewerMode;
  manifest: MosaicManifest;
  viewportWidth: number;
}

export function createViewer(
  manifest: MosaicManifest,
  viewportWidth: number,
  initialFrame = 0,
): ViewerState {
  if (manifest.frames.length === 0) {
    throw new Error("manifest has no frames");
  }
  if (initialFrame < 0 || initialFrame >= manifest.frames.length) {
    throw new Error(`initial frame ${initialFrame} out of range`);
  }
  return {
    current: initialFrame,
    drag: { x: 0, y: 0 },
    progress: 0,
    target: null,
    mode: "normal",
    manifest,
    viewportWidth,
  };
}

/** Screen pixels per layout unit for this manifest and viewport. */
export function layoutToScreenScale(state: ViewerState): number {
  const spacing = medianNeighborDistance(state.manifest);
  if (spacing === 0) return 1;
  return (LAYOUT_SCREEN_FRACTION * state.viewportWidth) / spacing;
}

/**
 * Accumulate a drag.  Once the drag passes the activation threshold and a
 * neighbor matches, the state carries that target with progress tracking
 * the drag length; releasing before the threshold snaps back.
 */
export function applyDrag(state: ViewerState, delta: Vec2): ViewerState {
  const drag = { x: state.drag.x + delta.x, y: state.drag.y + delta.y };
  const mag = Math.hypot(drag.x, drag.y);
  const threshold = ACTIVATION_FRACTION * state.viewportWidth;
  const target = mag >= threshold
    ? pickNeighbor(state.current, drag, state.manifest)
    : null;
  const span = LAYOUT_SCREEN_FRACTION * state.viewportWidth;
  const progress = target === null ? 0 : Math.min(1, mag / span);
  return { ...state, drag, target, progress };
}

/** Gesture end: commit when a target is active, otherwise snap back. */
export function release(state: ViewerState): ViewerState {
  if (state.target !== null) {
    return {
      ...state,
      current: state.target,
      target: null,
      drag: { x: 0, y: 0 },
      progress: 0,
    };
  }
  return { ...state, drag: { x: 0, y: 0 }, progress: 0 };
}

/** Direct navigation (minimap or Picasso click, hash change). */
export function navigateTo(state: ViewerState, index: number): ViewerState {
  if (index < 0 || index >= state.manifest.frames.length) {
    throw new Error(`frame ${index} out of range`);
  }
  return {
    ...state,
    current: index,
    target: null,
    drag: { x: 0, y: 0 },
    progress: 0,
    mode: "normal",
  };
}

export function toggleMode(state: ViewerState): ViewerState {
  return { ...state, mode: state.mode === "normal" ? "picasso" : "normal" };
}

/** Minimap dots in unit coordinates relative to the layout bounding box. */
export function minimapDots(
  state: ViewerState,
): { x: number; y: number; active: boolean }[] {
  const [minX, minY, maxX, maxY] = state.manifest.bounding_box;
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  return state.manifest.frames.map((f, i) => ({
    x: (f.x - minX) / spanX,
    y: (f.y - minY) / spanY,
    active: i === state.current,
  }));
}

/** URL hash for deep links, e.g. "#frame=12". */
export function stateToHash(state: ViewerState): string {
  return `#frame=${state.current}`;
}

export function frameFromHash(hash: string): number | null {
  const match = /^#frame=(\d+)$/.exec(hash);
  return match ? parseInt(match[1], 10) : null;
}
