"""
Basic usage example for rsvddpd: a synthetic tampered video, classical vs robust background
"""
import logging

from rsvddpd.eval import SynthSpec, evaluate_mask, generate_synthetic
from rsvddpd.video import extract_foreground, model_background

logging.basicConfig(level = logging.INFO)

video = generate_synthetic(SynthSpec(
    height = 64,
    width = 64,
    frames = 40,
    illumination = 0.1,
    object_size = 7,
    object_start = (5, 20),
    velocity = (1, 0),
    contamination = 'salt_pepper',
    contamination_frames = (15, 16, 17, 18),
    density = 0.1,
    seed = 0,
))

for alpha in (0.0, 0.75):
    background = model_background(video.sequence, alpha = alpha, rank = 1)
    _, mask = extract_foreground(video.sequence, background, k_sigma = 3.0)
    metrics = evaluate_mask(mask, video.truth)
    print(f"alpha={alpha}: sigma2={background.model.sigma2:.3g} "
          f"precision={metrics.aggregate.precision:.3f} recall={metrics.aggregate.recall:.3f} f1={metrics.aggregate.f1:.3f}")
