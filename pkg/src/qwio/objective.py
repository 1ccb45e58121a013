"""Distortion, entropy rate, and the combined rate-distortion cost.

The bit rate is an entropy proxy: one shared first-order histogram over
every quantized coefficient (DC and AC pooled), converted to bits per
pixel of the ORIGINAL image. Padding blocks contribute symbols but no
denominator pixels, so padded images honestly pay for their padding.
"""

from dataclasses import dataclass

import numpy as np

from .codec import codec_roundtrip, dct2, dequantize, idct2, merge_blocks, quantize, split_blocks
from .image_io import as_plane, pad_to_blocks
from .tables import QuantTable, build_table

DEFAULT_LAMBDA = 50.0


def mse(a, b) -> float:
    """Mean squared error between two equally sized planes."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("planes are empty")
    diff = a - b
    return float(np.mean(diff * diff))


def _stack_blocks(blocks) -> np.ndarray:
    stack = np.asarray(blocks)
    if stack.ndim == 2:
        stack = stack[None, :, :]
    if stack.ndim != 3 or stack.shape[-2:] != (8, 8) or stack.shape[0] == 0:
        raise ValueError("expected at least one 8x8 quantized block")
    if not np.issubdtype(stack.dtype, np.integer):
        raise ValueError(f"quantized blocks must be integers, got dtype {stack.dtype}")
    return stack


def _entropy_bits(values: np.ndarray) -> float:
    flat = values.ravel()
    vmin = int(flat.min())
    vmax = int(flat.max())
    # bincount needs a dense range; fall back to unique for wild inputs.
    if vmax - vmin < (1 << 22):
        counts = np.bincount(flat - vmin)
        counts = counts[counts > 0]
    else:
        _, counts = np.unique(flat, return_counts=True)
    p = counts / flat.size
    return float(-(p * np.log2(p)).sum())


def symbol_entropy(blocks) -> float:
    """Shannon entropy in bits/symbol of the pooled coefficient values."""
    return _entropy_bits(_stack_blocks(blocks))


def bpp_estimate(blocks, width: int, height: int) -> float:
    """Entropy rate in bits per original pixel.

    H * (64 * block_count) / (width * height); width and height are the
    pre-padding image dimensions.
    """
    stack = _stack_blocks(blocks)
    if width <= 0 or height <= 0:
        raise ValueError(f"bad original dimensions {width}x{height}")
    h_bits = _entropy_bits(stack)
    return h_bits * (64 * stack.shape[0]) / (width * height)


@dataclass(frozen=True)
class RDReport:
    """All per-image numbers one evaluation produces."""

    mse: float
    psnr: float
    ssim: float
    bpp: float
    cost_j: float
    lam: float

    def to_dict(self) -> dict:
        return {
            "mse": self.mse,
            "psnr_db": self.psnr,
            "ssim": self.ssim,
            "bpp": self.bpp,
            "cost_j": self.cost_j,
            "lambda": self.lam,
        }


def rd_cost(plane, table: QuantTable, lam: float = DEFAULT_LAMBDA):
    """Run the codec and score it: J = MSE + lambda * BPP.

    Returns (J, RDReport). SSIM is NaN when the plane is smaller than
    the 11x11 metric window.
    """
    from .metrics import psnr as _psnr, ssim as _ssim  # avoid an import cycle

    plane = as_plane(plane)
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    rec, z = codec_roundtrip(plane, table)
    height, width = plane.shape
    distortion = mse(plane, rec)
    rate = bpp_estimate(z, width, height)
    cost = distortion + lam * rate
    ssim_val = _ssim(plane, rec) if min(height, width) >= 11 else float("nan")
    return cost, RDReport(
        mse=distortion,
        psnr=_psnr(plane, rec),
        ssim=ssim_val,
        bpp=rate,
        cost_j=cost,
        lam=lam,
    )


def rd_objective(planes, base: QuantTable, lam: float = DEFAULT_LAMBDA):
    """Build the search objective: mean J over the training planes.

    The forward DCT of each plane is computed once here; candidates only
    differ downstream of it, so each evaluation reuses the coefficients
    and stays bitwise identical to calling rd_cost per candidate.
    """
    if isinstance(planes, np.ndarray) and planes.ndim == 2:
        planes = [planes]
    planes = [as_plane(p) for p in planes]
    if not planes:
        raise ValueError("need at least one training plane")
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")

    prepared = []
    for plane in planes:
        padded = pad_to_blocks(plane)
        coeffs = dct2(split_blocks(padded))
        prepared.append((plane, padded, coeffs))

    def objective(vec) -> float:
        from .tables import BandParams

        table = build_table(BandParams.from_vector(vec), base)
        total = 0.0
        for plane, padded, coeffs in prepared:
            z = quantize(coeffs, table)
            rec_blocks = idct2(dequantize(z, table))
            height, width = padded.plane.shape
            rec = merge_blocks(rec_blocks, width, height)
            rec = rec[: padded.original_height, : padded.original_width]
            total += mse(plane, rec) + lam * bpp_estimate(
                z, padded.original_width, padded.original_height
            )
        return total / len(prepared)

    return objective
