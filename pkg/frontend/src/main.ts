/**
 * Browser entry point: canvas rendering and event wiring around the pure
 * state machine in viewer.ts.  Serve the mosaic bundle (manifest.json +
 * images/) and this app from the same static directory.
 */

import { parseManifest, type MosaicManifest } from "./manifest.js";
import { renderTransition } from "./transition.js";
import { prefetchOrder, TextureCache } from "./cache.js";
import {
  applyDrag,
  createViewer,
  frameFromHash,
  layoutToScreenScale,
  minimapDots,
  navigateTo,
  release,
  stateToHash,
  toggleMode,
  type ViewerState,
} from "./viewer.js";

const MANIFEST_URL = "manifest.json";

function decodeImage(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`failed to load ${url}`));
    img.src = url;
  });
}

function drawPlaceholder(ctx: CanvasRenderingContext2D, w: number, h: number) {
  ctx.fillStyle = "#333";
  ctx.fillRect(-w / 2, -h / 2, w, h);
  ctx.fillStyle = "#c66";
  ctx.font = "24px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText("⚠ loading", 0, 0);
}

async function boot(): Promise<void> {
  const canvas = document.getElementById("mosaic") as HTMLCanvasElement;
  const minimap = document.getElementById("minimap") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const mctx = minimap.getContext("2d")!;

  const response = await fetch(MANIFEST_URL);
  const manifest: MosaicManifest = parseManifest(await response.text());
  const cache = new TextureCache(decodeImage, 32);

  const fromHash = frameFromHash(window.location.hash);
  let state: ViewerState = createViewer(
    manifest,
    canvas.clientWidth,
    fromHash !== null && fromHash < manifest.frames.length ? fromHash : 0,
  );

  function prefetch() {
    for (const url of prefetchOrder(manifest, state.current)) {
      void cache.load(url).then(draw, () => undefined);
    }
  }

  function setState(next: ViewerState) {
    const navigated = next.current !== state.current;
    state = next;
    if (navigated) {
      history.replaceState(null, "", stateToHash(state));
      prefetch();
    }
    draw();
  }

  function draw() {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    const scale = layoutToScreenScale(state);
    const target = state.target ?? state.current;
    const commands = state.mode === "picasso"
      ? manifest.frames.map((f, i) => ({
          frameIndex: i,
          image: f.image,
          position: { x: f.x, y: f.y },
          alpha: i === state.current ? 1 : 0.45,
          rotationDeg: -f.rotation_deg,
          placeholder: !cache.has(f.image),
        }))
      : renderTransition(manifest, state.current, target, state.progress,
                         (url) => cache.has(url));

    const picassoScale = state.mode === "picasso" ? 0.22 : 1;
    for (const cmd of commands) {
      const img = cache.get(cmd.image);
      ctx.save();
      ctx.globalAlpha = cmd.alpha;
      ctx.translate(
        canvas.width / 2 + cmd.position.x * scale * picassoScale,
        canvas.height / 2 + cmd.position.y * scale * picassoScale,
      );
      ctx.rotate((cmd.rotationDeg * Math.PI) / 180);
      if (img === undefined || cmd.placeholder) {
        void cache.load(cmd.image).then(draw, () => undefined);
        drawPlaceholder(ctx, canvas.width * picassoScale,
                        canvas.height * picassoScale);
      } else {
        const w = canvas.width * picassoScale;
        const h = (w * img.height) / img.width;
        ctx.drawImage(img, -w / 2, -h / 2, w, h);
      }
      ctx.restore();
    }
    drawMinimap();
  }

  function drawMinimap() {
    minimap.width = minimap.clientWidth;
    minimap.height = minimap.clientHeight;
    mctx.fillStyle = "rgba(0, 0, 0, 0.5)";
    mctx.fillRect(0, 0, minimap.width, minimap.height);
    for (const dot of minimapDots(state)) {
      mctx.fillStyle = dot.active ? "#ff5" : "#aaa";
      mctx.beginPath();
      mctx.arc(8 + dot.x * (minimap.width - 16),
               8 + dot.y * (minimap.height - 16),
               dot.active ? 4 : 2.5, 0, 2 * Math.PI);
      mctx.fill();
    }
  }

  let dragging = false;
  let last = { x: 0, y: 0 };
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    last = { x: e.clientX, y: e.clientY };
    canvas.setPointerCapture(e.pointerId);
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    setState(applyDrag(state, { x: e.clientX - last.x, y: e.clientY - last.y }));
    last = { x: e.clientX, y: e.clientY };
  });
  canvas.addEventListener("pointerup", () => {
    dragging = false;
    setState(release(state));
  });
  canvas.addEventListener("dblclick", () => setState(toggleMode(state)));
  canvas.addEventListener("click", (e) => {
    if (state.mode !== "picasso") return;
    // Pick the frame whose Picasso position is nearest the click.
    const scale = layoutToScreenScale(state) * 0.22;
    let best = 0;
    let bestDist = Infinity;
    manifest.frames.forEach((f, i) => {
      const dx = canvas.width / 2 + f.x * scale - e.offsetX;
      const dy = canvas.height / 2 + f.y * scale - e.offsetY;
      const d = Math.hypot(dx, dy);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    });
    setState(navigateTo(state, best));
  });
  minimap.addEventListener("click", (e) => {
    const [minX, minY, maxX, maxY] = manifest.bounding_box;
    const fx = (e.offsetX - 8) / (minimap.width - 16);
    const fy = (e.offsetY - 8) / (minimap.height - 16);
    let best = 0;
    let bestDist = Infinity;
    manifest.frames.forEach((f, i) => {
      const dx = (f.x - minX) / (maxX - minX || 1) - fx;
      const dy = (f.y - minY) / (maxY - minY || 1) - fy;
      const d = Math.hypot(dx, dy);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    });
    setState(navigateTo(state, best));
  });
  window.addEventListener("hashchange", () => {
    const idx = frameFromHash(window.location.hash);
    if (idx !== null && idx < manifest.frames.length) {
      setState(navigateTo(state, idx));
    }
  });

  prefetch();
  await cache.load(manifest.frames[state.current].image).catch(() => undefined);
  draw();
}

void boot();
