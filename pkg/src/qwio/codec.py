"""8x8 block transform core: level shift, orthonormal DCT, quantization.

The 2-D DCT is applied separably through one 8x8 orthonormal basis
matrix, so a stack of blocks is two batched matmuls. Quantization is
round-half-away division; clamping to [0, 255] happens only when blocks
are merged back into a plane.
"""

import numpy as np

from .image_io import PaddedPlane, pad_to_blocks
from .tables import QuantTable
from .util import round_half_away

BLOCK = 8
LEVEL_SHIFT = 128.0


def _basis() -> np.ndarray:
    # row u, column x: alpha(u) * cos((2x + 1) u pi / 16)
    u = np.arange(BLOCK)[:, None]
    x = np.arange(BLOCK)[None, :]
    mat = np.cos((2 * x + 1) * u * np.pi / (2 * BLOCK))
    alpha = np.full(BLOCK, np.sqrt(2.0 / BLOCK))
    alpha[0] = np.sqrt(1.0 / BLOCK)
    return alpha[:, None] * mat


_BASIS = _basis()


def _check_blocks(blocks, name: str) -> np.ndarray:
    blocks = np.asarray(blocks)
    if blocks.shape[-2:] != (BLOCK, BLOCK):
        raise ValueError(f"{name} must end in 8x8, got shape {blocks.shape}")
    return blocks


def dct2(block) -> np.ndarray:
    """Orthonormal forward 2-D DCT of one block or a (..., 8, 8) stack."""
    block = _check_blocks(block, "block").astype(np.float64, copy=False)
    return _BASIS @ block @ _BASIS.T


def idct2(coeffs) -> np.ndarray:
    """Inverse of dct2; exact up to float rounding."""
    coeffs = _check_blocks(coeffs, "coeffs").astype(np.float64, copy=False)
    return _BASIS.T @ coeffs @ _BASIS


def quantize(coeffs, table: QuantTable) -> np.ndarray:
    """Z = round(C / Q), ties away from zero; integer output."""
    coeffs = _check_blocks(coeffs, "coeffs")
    q = table.entries.astype(np.float64)
    return round_half_away(coeffs / q).astype(np.int64)


def dequantize(quantized, table: QuantTable) -> np.ndarray:
    """C_hat = Z * Q. |C_hat - C| <= Q/2 elementwise by construction."""
    quantized = _check_blocks(quantized, "quantized")
    return quantized.astype(np.float64) * table.entries.astype(np.float64)


def split_blocks(padded) -> np.ndarray:
    """Cut a padded plane into level-shifted blocks, row-major order.

    Returns a (n_blocks, 8, 8) float array with samples shifted by -128.
    """
    plane = padded.plane if isinstance(padded, PaddedPlane) else np.asarray(padded)
    height, width = plane.shape
    if height % BLOCK or width % BLOCK:
        raise ValueError(f"plane dimensions {height}x{width} are not block multiples")
    blocks = (
        plane.reshape(height // BLOCK, BLOCK, width // BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
        .reshape(-1, BLOCK, BLOCK)
    )
    return blocks.astype(np.float64) - LEVEL_SHIFT


def merge_blocks(blocks, width: int, height: int) -> np.ndarray:
    """Invert split_blocks: shift back by +128 and clamp into [0, 255].

    This is the single clamping point of the pipeline.
    """
    blocks = _check_blocks(blocks, "blocks").astype(np.float64, copy=False)
    if width % BLOCK or height % BLOCK:
        raise ValueError(f"target dimensions {height}x{width} are not block multiples")
    expected = (height // BLOCK) * (width // BLOCK)
    if blocks.ndim != 3 or blocks.shape[0] != expected:
        raise ValueError(
            f"block count mismatch: got {blocks.shape[0] if blocks.ndim == 3 else '?'}"
            f", expected {expected} for {height}x{width}"
        )
    plane = (
        blocks.reshape(height // BLOCK, width // BLOCK, BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
        .reshape(height, width)
    )
    return np.clip(plane + LEVEL_SHIFT, 0.0, 255.0)


def codec_roundtrip(plane, table: QuantTable):
    """Full encode/decode pass with the given table.

    Returns (reconstruction cropped to the original size, quantized
    blocks including any padding blocks).
    """
    padded = pad_to_blocks(plane)
    coeffs = dct2(split_blocks(padded))
    z = quantize(coeffs, table)
    rec_blocks = idct2(dequantize(z, table))
    height, width = padded.plane.shape
    rec = merge_blocks(rec_blocks, width, height)
    return rec[: padded.original_height, : padded.original_width], z
