"""Full-resolution quality metrics and error heatmaps."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image_io import write_grayscale
from .objective import bpp_estimate

PEAK = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * PEAK) ** 2
SSIM_C2 = (0.03 * PEAK) ** 2


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected non-empty 2-D planes, got shape {a.shape}")
    return a, b


def psnr(reference, test) -> float:
    """10 log10(255^2 / MSE); +inf when the planes are identical."""
    reference, test = _pair(reference, test)
    diff = reference - test
    err = float(np.mean(diff * diff))
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(PEAK * PEAK / err))


def _ssim_kernel() -> np.ndarray:
    offsets = np.arange(SSIM_WINDOW) - (SSIM_WINDOW - 1) / 2
    g = np.exp(-(offsets**2) / (2.0 * SSIM_SIGMA**2))
    return g / g.sum()


_KERNEL_1D = _ssim_kernel()


def _window_means(plane: np.ndarray) -> np.ndarray:
    # The 2-D window is the outer product of a normalized 1-D Gaussian,
    # so valid-mode filtering separates into two sliding dots.
    rows = sliding_window_view(plane, SSIM_WINDOW, axis=1) @ _KERNEL_1D
    return sliding_window_view(rows, SSIM_WINDOW, axis=0) @ _KERNEL_1D


def ssim(reference, test) -> float:
    """Mean structural similarity, Gaussian 11x11 window, sigma 1.5.

    Only fully valid window positions contribute (no padding), so both
    planes must be at least 11x11.
    """
    x, y = _pair(reference, test)
    if min(x.shape) < SSIM_WINDOW:
        raise ValueError(
            f"planes must be at least {SSIM_WINDOW}x{SSIM_WINDOW} for SSIM, "
            f"got {x.shape}"
        )
    mu_x = _window_means(x)
    mu_y = _window_means(y)
    var_x = _window_means(x * x) - mu_x * mu_x
    var_y = _window_means(y * y) - mu_y * mu_y
    cov = _window_means(x * y) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(num / den))


def image_bpp(blocks, width: int, height: int) -> float:
    """Entropy bits per pixel; same definition as the objective's rate
    term, on purpose (single definition, two call sites)."""
    return bpp_estimate(blocks, width, height)


def error_heatmap(reference, test) -> np.ndarray:
    """Per-pixel absolute error |reference - test|."""
    reference, test = _pair(reference, test)
    return np.abs(reference - test)


def export_heatmap(values, path, normalize: bool = False) -> None:
    """Write a heatmap as 8-bit PGM.

    normalize=True stretches the maximum to 255 (callers record this in
    the file name, conventionally a .norm.pgm suffix); otherwise values
    are clamped as-is. An all-zero map stays all zero either way.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise ValueError(f"expected a non-empty 2-D heatmap, got shape {values.shape}")
    if values.min() < 0.0 or not np.all(np.isfinite(values)):
        raise ValueError("heatmap values must be finite and non-negative")
    if normalize:
        peak = values.max()
        if peak > 0.0:
            values = values * (255.0 / peak)
    write_grayscale(values, path)
