"""Quantization tables and their banded continuous parameterization.

A table is searched through 16 continuous knobs: one global scale and one
multiplier per anti-diagonal frequency band (i + j constant, 15 bands on
an 8x8 grid). Entries are rebuilt from the knobs with round-half-away
and clamped into [1, 255], so any parameter point yields a legal table.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EntryRangeError, SchemaError
from .util import atomic_write_text, round_half_away

# Box constraints shared by the scale and every band multiplier.
PARAM_MIN = 0.25
PARAM_MAX = 4.0
NUM_BANDS = 15
NUM_PARAMS = 1 + NUM_BANDS

FORMAT_VERSION = 1

# Standard luminance table (ISO/IEC 10918-1 Annex K), the fixed anchor
# that every optimized table is expressed relative to.
BASELINE_LUMA = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)

# band_index(i, j) for the whole grid, precomputed.
BAND_GRID = np.arange(8)[:, None] + np.arange(8)[None, :]


def band_index(i: int, j: int) -> int:
    """Anti-diagonal band of frequency position (i, j); 0 is DC."""
    if not (0 <= i <= 7 and 0 <= j <= 7):
        raise ValueError(f"frequency position out of range: ({i}, {j})")
    return i + j


@dataclass(frozen=True)
class BandParams:
    """A search point: global scale `s` plus 15 band multipliers `m`."""

    s: float
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "m", tuple(float(v) for v in self.m))
        if len(self.m) != NUM_BANDS:
            raise ValueError(f"expected {NUM_BANDS} band multipliers, got {len(self.m)}")
        for v in (self.s, *self.m):
            if not (PARAM_MIN <= v <= PARAM_MAX):
                raise ValueError(
                    f"parameter {v} outside [{PARAM_MIN}, {PARAM_MAX}]"
                )

    @classmethod
    def identity(cls) -> "BandParams":
        return cls(1.0, (1.0,) * NUM_BANDS)

    @classmethod
    def from_vector(cls, vec) -> "BandParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (NUM_PARAMS,):
            raise ValueError(f"expected a {NUM_PARAMS}-vector, got shape {vec.shape}")
        return cls(float(vec[0]), tuple(float(v) for v in vec[1:]))

    def to_vector(self) -> np.ndarray:
        return np.array([self.s, *self.m], dtype=np.float64)


@dataclass(eq=False)
class QuantTable:
    """An 8x8 integer table plus the provenance needed to reproduce it."""

    entries: np.ndarray
    origin: str = "baseline"
    params: BandParams | None = None
    seed: int | None = None
    lam: float | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.shape != (8, 8):
            raise ValueError(f"table must be 8x8, got shape {entries.shape}")
        if not np.issubdtype(entries.dtype, np.integer):
            if not np.all(entries == np.floor(entries)):
                raise ValueError("table entries must be integers")
        entries = entries.astype(np.int64)
        if entries.min() < 1 or entries.max() > 255:
            raise EntryRangeError(
                f"table entries must lie in [1, 255], got "
                f"[{entries.min()}, {entries.max()}]"
            )
        self.entries = entries
        if self.origin not in ("baseline", "optimized"):
            raise ValueError(f"unknown table origin: {self.origin!r}")


def baseline_table() -> QuantTable:
    """Fresh copy of the standard luminance table."""
    return QuantTable(BASELINE_LUMA.copy(), origin="baseline")


def build_table(params: BandParams, base: QuantTable | None = None) -> QuantTable:
    """Materialize the table for a search point.

    Q[i, j] = clamp(round(s * m[band(i,j)] * base[i, j]), 1, 255) with
    round-half-away ties. Identity parameters reproduce `base` exactly;
    `base` defaults to the standard luminance table.
    """
    if base is None:
        base = baseline_table()
    m = np.asarray(params.m, dtype=np.float64)
    scaled = params.s * m[BAND_GRID] * base.entries.astype(np.float64)
    entries = np.clip(round_half_away(scaled), 1, 255).astype(np.int64)
    return QuantTable(entries, origin="optimized", params=params)


def table_to_dict(table: QuantTable) -> dict:
    return {
        "entries": table.entries.tolist(),
        "origin": table.origin,
        "params": None
        if table.params is None
        else {"s": float(table.params.s), "m": [float(v) for v in table.params.m]},
        "seed": None if table.seed is None else int(table.seed),
        "lambda": None if table.lam is None else float(table.lam),
        "format_version": FORMAT_VERSION,
    }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def table_from_dict(doc) -> QuantTable:
    _require(isinstance(doc, dict), "table file must hold a JSON object")
    for key in ("entries", "origin", "params", "seed", "lambda", "format_version"):
        _require(key in doc, f"table file missing key {key!r}")
    _require(doc["format_version"] == FORMAT_VERSION,
             f"unsupported format_version {doc['format_version']!r}")

    entries = doc["entries"]
    _require(
        isinstance(entries, list)
        and len(entries) == 8
        and all(isinstance(row, list) and len(row) == 8 for row in entries),
        "entries must be an 8x8 array",
    )
    for row in entries:
        for v in row:
            _require(isinstance(v, int) and not isinstance(v, bool),
                     f"table entry {v!r} is not an integer")
            if not (1 <= v <= 255):
                raise EntryRangeError(f"table entry {v} outside [1, 255]")

    _require(doc["origin"] in ("baseline", "optimized"),
             f"unknown origin {doc['origin']!r}")

    params_doc = doc["params"]
    params = None
    if params_doc is not None:
        _require(
            isinstance(params_doc, dict) and "s" in params_doc and "m" in params_doc,
            "params must be null or an object with keys s and m",
        )
        _require(
            isinstance(params_doc["m"], list) and len(params_doc["m"]) == NUM_BANDS,
            f"params.m must hold {NUM_BANDS} numbers",
        )
        try:
            params = BandParams(params_doc["s"], tuple(params_doc["m"]))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad params block: {exc}") from exc

    seed = doc["seed"]
    _require(seed is None or (isinstance(seed, int) and not isinstance(seed, bool)),
             "seed must be null or an integer")
    lam = doc["lambda"]
    _require(lam is None or isinstance(lam, (int, float)),
             "lambda must be null or a number")

    return QuantTable(
        np.array(entries, dtype=np.int64),
        origin=doc["origin"],
        params=params,
        seed=seed,
        lam=None if lam is None else float(lam),
    )


def save_table(table: QuantTable, path) -> None:
    """Serialize to JSON atomically (temp file plus rename)."""
    atomic_write_text(path, json.dumps(table_to_dict(table), indent=2) + "\n")


def load_table(path) -> QuantTable:
    """Parse and validate a table file; schema and range problems raise
    SchemaError / EntryRangeError, I/O problems raise OSError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"table file is not valid JSON: {exc}") from exc
    return table_from_dict(doc)
