"""
End-to-end mosaic from a rendered sweep
=======================================

The whole pipeline in one script: generate training data, train a
translation forest, render a synthetic camera pan to PNG frames on disk,
run the pipeline over the directory, and plot the recovered layout next to
the true camera path.  Equivalent CLI session:

    swipemosaic synth --kind translation --pairs 600 --seed 5 --out ds/
    swipemosaic train --dataset ds/ --trees 8 --out forest.rrf
    swipemosaic layout --in frames/ --out mosaic/ --forest forest.rrf

Takes a few minutes on one core.  The deliberately small forest recovers
the path shape but shrinks its scale somewhat; the shipped training
configuration (2000+ pairs, 10 trees) closes that gap.
"""

import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from PIL import Image

from swipemosaic.forest import ForestConfig, save_forest, train
from swipemosaic.pipeline import PipelineConfig, run_pipeline
from swipemosaic.synth import (LayerSpec, SceneSpec, generate_dataset,
                               render_sequence)

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
work = Path(tempfile.mkdtemp(prefix="swipemosaic_demo_"))

print("generating 600 training pairs...")
dataset = generate_dataset(600, kind="translation", seed=5)
print("training forest...")
forest = train(dataset, ForestConfig(tree_count=8, max_depth=12,
                                     candidate_splits=300, min_leaf=4,
                                     label_dim=2, rng_seed=5))
forest_path = work / "forest.rrf"
save_forest(forest_path, forest)

# Render a 20-frame diagonal pan and write it out as a frame directory, the
# same input shape a real capture would have.
print("rendering sweep...")
spec = SceneSpec(layers=(LayerSpec("noise", seed=0),),
                 texture_family="noise", rng_seed=7)
cameras = [(6.0 * i, 1.5 * i) for i in range(20)]
frames = render_sequence(spec, cameras, noise=0.005, noise_seed=1)
frames_dir = work / "frames"
frames_dir.mkdir()
for i, frame in enumerate(frames):
    Image.fromarray((frame.pixels * 255).astype(np.uint8)).save(
        frames_dir / f"frame_{i:03d}.png")

print("running pipeline...")
config = PipelineConfig(input_path=str(frames_dir),
                        output_dir=str(work / "mosaic"),
                        translation_forest=str(forest_path))
manifest = run_pipeline(config)

est = np.array([[rec["x"], rec["y"]] for rec in manifest.frames])
truth = np.array(cameras) / 128.0
fig, ax = plt.subplots(figsize=(6, 5))
ax.plot(truth[:, 0], truth[:, 1], "k--o", markersize=3, label="true camera path")
ax.plot(est[:, 0], est[:, 1], "-o", markersize=3, label="recovered layout")
ax.set_aspect("equal")
ax.set_xlabel("x (width units)")
ax.set_ylabel("y (width units)")
ax.legend()
ax.set_title("Recovered mosaic layout vs ground truth")
fig.tight_layout()
fig.savefig(out / "end_to_end_mosaic.png", dpi=110)
print(f"mosaic bundle in {work}/mosaic (manifest.json, images/, minimap.png)")
print(f"figure written to {out}/end_to_end_mosaic.png")
