"""Adaptive JPEG luminance quantization tables via amplitude-population search.

The package learns image-adapted variants of the standard luminance
table by scaling its anti-diagonal frequency bands, scoring candidates
with a rate-distortion cost (MSE plus entropy bits per pixel), and
searching the 16 scale parameters with a quantum-walk inspired
population of complex amplitudes.
"""

from .codec import codec_roundtrip, dct2, dequantize, idct2, merge_blocks, quantize, split_blocks
from .errors import (
    ConfigError,
    CorruptImageError,
    EntryRangeError,
    QwioError,
    SchemaError,
    UnsupportedFormatError,
)
from .estimator import QwioCompressor
from .image_io import (
    PaddedPlane,
    as_plane,
    crop_to_original,
    load_grayscale,
    pad_to_blocks,
    resize_bilinear,
    resize_to_proxy,
    rgb_to_luma,
    write_grayscale,
)
from .metrics import error_heatmap, export_heatmap, image_bpp, psnr, ssim
from .objective import RDReport, bpp_estimate, mse, rd_cost, rd_objective, symbol_entropy
from .optimizer import (
    AmplitudePopulation,
    Candidate,
    HistoryPoint,
    QwioConfig,
    evaluate_all,
    init_population,
    mixing,
    optimize,
    phase_reinforce,
    sample_next,
)
from .tables import (
    BandParams,
    QuantTable,
    band_index,
    baseline_table,
    build_table,
    load_table,
    save_table,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudePopulation",
    "BandParams",
    "Candidate",
    "ConfigError",
    "CorruptImageError",
    "EntryRangeError",
    "HistoryPoint",
    "PaddedPlane",
    "QuantTable",
    "QwioCompressor",
    "QwioConfig",
    "QwioError",
    "RDReport",
    "SchemaError",
    "UnsupportedFormatError",
    "as_plane",
    "band_index",
    "baseline_table",
    "bpp_estimate",
    "build_table",
    "codec_roundtrip",
    "crop_to_original",
    "dct2",
    "dequantize",
    "error_heatmap",
    "evaluate_all",
    "export_heatmap",
    "idct2",
    "image_bpp",
    "init_population",
    "load_grayscale",
    "load_table",
    "merge_blocks",
    "mixing",
    "mse",
    "optimize",
    "pad_to_blocks",
    "phase_reinforce",
    "psnr",
    "quantize",
    "rd_cost",
    "rd_objective",
    "resize_bilinear",
    "resize_to_proxy",
    "rgb_to_luma",
    "sample_next",
    "save_table",
    "split_blocks",
    "ssim",
    "symbol_entropy",
    "write_grayscale",
]
