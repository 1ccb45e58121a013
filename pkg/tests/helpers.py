"""Shared oracles and deterministic test images.

Oracles here are written independently of the package internals (plain
loops, Counter histograms, the literal transform definition) so the
library and the test can only agree when both are right.
"""

import math
from collections import Counter

import numpy as np

from qwio.image_io import resize_bilinear

# ---------------------------------------------------------------------------
# Oracles


def dct_oracle_matrix() -> np.ndarray:
    """64x64 matrix form of the transform definition, built by explicit
    loops over (u, v, x, y): out[(u,v)] = alpha(u) alpha(v) *
    sum_xy B[x,y] cos((2x+1)u pi/16) cos((2y+1)v pi/16)."""
    mat = np.zeros((64, 64))
    for u in range(8):
        for v in range(8):
            au = math.sqrt(1.0 / 8.0) if u == 0 else math.sqrt(2.0 / 8.0)
            av = math.sqrt(1.0 / 8.0) if v == 0 else math.sqrt(2.0 / 8.0)
            for x in range(8):
                for y in range(8):
                    mat[u * 8 + v, x * 8 + y] = (
                        au
                        * av
                        * math.cos((2 * x + 1) * u * math.pi / 16.0)
                        * math.cos((2 * y + 1) * v * math.pi / 16.0)
                    )
    return mat


def dct2_oracle(blocks: np.ndarray) -> np.ndarray:
    """Apply the double-sum definition via the 64x64 oracle matrix."""
    mat = dct_oracle_matrix()
    stack = np.asarray(blocks, dtype=np.float64)
    single = stack.ndim == 2
    if single:
        stack = stack[None]
    out = (stack.reshape(-1, 64) @ mat.T).reshape(-1, 8, 8)
    return out[0] if single else out


def entropy_oracle(values) -> float:
    """Shannon entropy in bits from a plain Counter histogram."""
    flat = [int(v) for v in np.asarray(values).ravel()]
    counts = Counter(flat)
    total = len(flat)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def bpp_oracle(blocks, width: int, height: int) -> float:
    stack = np.asarray(blocks)
    return entropy_oracle(stack) * (64 * stack.shape[0]) / (width * height)


def ssim_oracle(x: np.ndarray, y: np.ndarray) -> float:
    """Windowed structural similarity with explicit per-window loops."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    offsets = np.arange(11) - 5.0
    g = np.exp(-(offsets**2) / (2.0 * 1.5**2))
    g = g / g.sum()
    kernel = np.outer(g, g)
    c1 = (0.01 * 255.0) ** 2
    c2 = (0.03 * 255.0) ** 2
    h, w = x.shape
    vals = []
    for i in range(h - 10):
        for j in range(w - 10):
            wx = x[i : i + 11, j : j + 11]
            wy = y[i : i + 11, j : j + 11]
            mx = float((kernel * wx).sum())
            my = float((kernel * wy).sum())
            vx = float((kernel * wx * wx).sum()) - mx * mx
            vy = float((kernel * wy * wy).sum()) - my * my
            cxy = float((kernel * wx * wy).sum()) - mx * my
            vals.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# Deterministic test images (8-bit valued, stored as float planes)


def to_uint8_plane(x: np.ndarray) -> np.ndarray:
    return np.clip(np.round(x), 0, 255).astype(np.float64)


def weave_image(size: int = 128, seed: int = 11) -> np.ndarray:
    """Plain-weave cloth: two crossed fine gratings under a slow
    illumination sweep, plus light sensor grain."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    img = 128 + 48 * np.sin(2 * np.pi * x / 4.7) * np.sin(2 * np.pi * y / 5.3)
    img += 22 * np.sin(2 * np.pi * (x + y) / 6.1) + 18 * np.cos(2 * np.pi * y / 30)
    img += rng.normal(0, 4, (size, size))
    return to_uint8_plane(img)


def chevron_image(size: int = 128, seed: int = 12) -> np.ndarray:
    """Chevron texture: a fine grating whose orientation sweeps back and
    forth with a triangle wave."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    tri = 2 * np.abs(((x / 24) % 2) - 1) - 1
    img = 128 + 46 * np.sin(2 * np.pi * (y + 10 * tri) / 5.1)
    img += 14 * np.cos(2 * np.pi * x / 37) + rng.normal(0, 4, (size, size))
    return to_uint8_plane(img)


def dot_screen_image(size: int = 128, seed: int = 13) -> np.ndarray:
    """Print-style halftone dot screen modulated by a slow shading field."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    carrier = np.cos(2 * np.pi * x / 4.2) + np.cos(2 * np.pi * y / 4.2)
    shade = 0.9 * np.sin(2 * np.pi * x / 97) * np.cos(2 * np.pi * y / 83)
    img = 128 + 44 * np.tanh(1.8 * (carrier / 2 - shade))
    img += rng.normal(0, 4, (size, size))
    return to_uint8_plane(img)


def smooth_image(size: int = 64, seed: int = 0, grid: int = 5) -> np.ndarray:
    """Coarse uniform noise bilinearly upsampled into a smooth field."""
    rng = np.random.default_rng(seed)
    return resize_bilinear(rng.uniform(0, 255, (grid, grid)), size, size)


def noise_image(size: int = 64, seed: int = 0) -> np.ndarray:
    """Dense iid 8-bit noise."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, (size, size)).astype(np.float64)
