import math

import numpy as np

from maintlm import cli, dataset, ingest, mlp, synth
from maintlm.ingest import SamplePair


def linear_samples(seed, n=20, slope=2.0):
    xs = np.random.default_rng(seed).uniform(-1, 1, n)
    return [SamplePair(float(x), float(slope * x)) for x in xs]


def tanh_line_samples(n=15, w=3.0, b=1.0, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    xs = np.linspace(-2, 2, n)
    ys = w * np.tanh(xs) + b + noise * rng.normal(size=n)
    return [SamplePair(float(x), float(y)) for x, y in zip(xs, ys)]


def synth_splits(seed, n=56):
    """Normalized (train, val, test) sample lists from a default synthetic log."""
    recs = synth.generate(synth.SynthSpec(n=n, seed=seed))
    samples = ingest.build_samples(recs, ingest.InputVariant.SUM)
    split = dataset.split_indices(len(samples), seed)
    norm = dataset.fit_normalization(dataset.take(samples, split.train_idx))
    parts = tuple(dataset.normalize_samples(dataset.take(samples, idx), norm)
                  for idx in (split.train_idx, split.val_idx, split.test_idx))
    return parts, norm


def params_bytes(model):
    return model.flatten().tobytes()
