"""Embedded invariant checks behind the `selftest` subcommand.

Each check recomputes a property through the public module functions so
that an injected fault (say, a corrupted DCT basis) is actually caught.
"""

import math
from collections import Counter

import numpy as np

from . import codec, metrics, objective, optimizer


def _check_dct_roundtrip() -> None:
    rng = np.random.default_rng(2024)
    blocks = rng.uniform(-128.0, 127.0, (64, 8, 8))
    err = np.abs(codec.idct2(codec.dct2(blocks)) - blocks).max()
    assert err < 1e-9, f"round trip error {err:.3e} exceeds 1e-9"


def _check_dct_orthonormality() -> None:
    rng = np.random.default_rng(2025)
    blocks = rng.uniform(-128.0, 127.0, (64, 8, 8))
    before = np.sqrt(np.sum(blocks**2, axis=(1, 2)))
    after = np.sqrt(np.sum(codec.dct2(blocks) ** 2, axis=(1, 2)))
    err = np.abs(after - before).max()
    assert err < 1e-9, f"energy drift {err:.3e} exceeds 1e-9"


def _check_entropy_oracle() -> None:
    rng = np.random.default_rng(2026)
    blocks = rng.integers(-40, 40, (6, 8, 8))
    got = objective.symbol_entropy(blocks)
    counts = Counter(int(v) for v in blocks.ravel())
    total = blocks.size
    want = -sum((c / total) * math.log2(c / total) for c in counts.values())
    assert abs(got - want) < 1e-12, f"entropy {got} != oracle {want}"
    uniform = np.zeros((1, 8, 8), dtype=np.int64)
    assert objective.symbol_entropy(uniform) == 0.0, "constant symbols must cost 0"
    half = np.zeros((1, 8, 8), dtype=np.int64)
    half.ravel()[: half.size // 2] = 1
    got_half = objective.symbol_entropy(half)
    assert abs(got_half - 1.0) < 1e-12, f"two equiprobable symbols: {got_half} != 1"


def _check_amplitude_normalization() -> None:
    config = optimizer.QwioConfig(population_n=8, max_iters=4, seed=7)
    center = np.full(16, 2.0)

    def sphere(vec):
        return float(np.sum((vec - center) ** 2))

    fails: list[str] = []

    def observer(stage: str, pop) -> None:
        total = float(np.sum(pop.amplitudes.real**2 + pop.amplitudes.imag**2))
        if abs(total - 1.0) > 1e-9:
            fails.append(f"norm {total} after {stage}")

    pop = optimizer.init_population(config)
    observer("init", pop)
    for _ in range(config.max_iters):
        optimizer.evaluate_all(pop, sphere)
        mags = np.abs(pop.amplitudes)
        optimizer.phase_reinforce(pop, config.gamma, config.epsilon)
        drift = np.abs(np.abs(pop.amplitudes) - mags).max()
        if drift > 1e-12:
            fails.append(f"phase changed magnitudes by {drift:.3e}")
        optimizer.mixing(pop, config.kernel_bandwidth)
        observer("mix", pop)
        optimizer.sample_next(pop, config)
        observer("sample", pop)
    assert not fails, "; ".join(fails)


CHECKS = (
    ("dct-roundtrip", _check_dct_roundtrip),
    ("dct-orthonormality", _check_dct_orthonormality),
    ("entropy-oracle", _check_entropy_oracle),
    ("amplitude-normalization", _check_amplitude_normalization),
)


def run_selftest(write=print) -> int:
    """Run every check, print one line per check, return 0 or 3."""
    failed = 0
    for name, check in CHECKS:
        try:
            check()
        except AssertionError as exc:
            failed += 1
            write(f"FAIL {name}: {exc}")
        else:
            write(f"ok   {name}")
    return 3 if failed else 0
