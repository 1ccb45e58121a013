"""Amplitude-population search over the banded table parameters.

Each candidate carries a complex amplitude. One generation is:

  evaluate -> phase reinforcement -> kernel mixing -> resample

Phase reinforcement rotates each amplitude by an angle proportional to
its cost rank within the generation; a pure rotation cannot change any
magnitude, so costs only become selection pressure through the mixing
step, where a Gaussian kernel over parameter distance sums neighboring
amplitudes and coherent (similar-cost) neighborhoods add constructively.
Sampling then draws parents from |amplitude|^2, mutates them, keeps the
best-ever point as an unmutated elite, and resets the amplitudes.

All randomness flows through one generator owned by the population and
is consumed only in init and sampling, never during evaluation, so
parallel cost evaluation cannot perturb the run.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigError
from .objective import DEFAULT_LAMBDA, rd_objective
from .tables import (
    NUM_PARAMS,
    PARAM_MAX,
    PARAM_MIN,
    BandParams,
    QuantTable,
    build_table,
)

# An improvement smaller than this does not reset the stall counter.
CONVERGENCE_TOL = 1e-9


@dataclass
class QwioConfig:
    """Search hyperparameters. Defaults are the tuned operating point."""

    population_n: int = 32
    max_iters: int = 100
    stall_limit: int = 15
    gamma: float = math.pi / 2
    epsilon: float = 1e-12
    kernel_bandwidth: float = 0.5  # in normalized [0, 1] parameter units
    mutation_sigma: float = 0.05  # fraction of each parameter's range
    lam: float = DEFAULT_LAMBDA
    seed: int = 0

    def validate(self) -> None:
        if self.population_n < 2:
            raise ConfigError(f"population_n must be >= 2, got {self.population_n}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.stall_limit < 1:
            raise ConfigError(f"stall_limit must be >= 1, got {self.stall_limit}")
        if not (self.gamma > 0.0):
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if not (self.epsilon > 0.0):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.kernel_bandwidth > 0.0):
            raise ConfigError(
                f"kernel_bandwidth must be positive, got {self.kernel_bandwidth}"
            )
        if self.mutation_sigma < 0.0:
            raise ConfigError(
                f"mutation_sigma must be non-negative, got {self.mutation_sigma}"
            )
        if self.lam < 0.0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}")

    def to_dict(self) -> dict:
        return {
            "population_n": self.population_n,
            "max_iters": self.max_iters,
            "stall_limit": self.stall_limit,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "kernel_bandwidth": self.kernel_bandwidth,
            "mutation_sigma": self.mutation_sigma,
            "lambda": self.lam,
            "seed": self.seed,
        }


class Candidate(NamedTuple):
    """Read-only view of one population slot."""

    params: BandParams
    amplitude: complex
    cost: float


class HistoryPoint(NamedTuple):
    iteration: int
    best_cost: float
    mean_cost: float


@dataclass
class AmplitudePopulation:
    """Vectorized population state: one row per candidate."""

    params: np.ndarray  # (n, 16) float64, inside [PARAM_MIN, PARAM_MAX]
    amplitudes: np.ndarray  # (n,) complex128, sum |a|^2 == 1
    costs: np.ndarray  # (n,) float64, NaN until evaluated
    rng: np.random.Generator
    seed: int
    iteration: int = 0
    best_params: np.ndarray | None = None
    best_cost: float = math.inf

    @property
    def size(self) -> int:
        return self.params.shape[0]

    @property
    def candidates(self) -> list[Candidate]:
        return [
            Candidate(
                BandParams.from_vector(self.params[i]),
                complex(self.amplitudes[i]),
                float(self.costs[i]),
            )
            for i in range(self.size)
        ]


def init_population(config: QwioConfig) -> AmplitudePopulation:
    """Candidate 0 is the identity point (the unmodified base table);
    the rest are uniform in log-space over the box. Amplitudes start
    uniform with zero phase."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    n = config.population_n
    params = np.empty((n, NUM_PARAMS), dtype=np.float64)
    params[0] = BandParams.identity().to_vector()
    params[1:] = np.exp(
        rng.uniform(math.log(PARAM_MIN), math.log(PARAM_MAX), (n - 1, NUM_PARAMS))
    )
    np.clip(params, PARAM_MIN, PARAM_MAX, out=params)
    amplitudes = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
    costs = np.full(n, np.nan, dtype=np.float64)
    return AmplitudePopulation(params, amplitudes, costs, rng, config.seed)


def evaluate_all(
    pop: AmplitudePopulation,
    objective: Callable[[np.ndarray], float],
    max_workers: int = 1,
) -> AmplitudePopulation:
    """Score every candidate and refresh the best-ever snapshot.

    Results land by candidate index, so the worker count cannot change
    the outcome. The best snapshot only moves on a strict improvement,
    which keeps the earliest argmin on ties.
    """
    n = pop.size
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            costs = list(pool.map(objective, pop.params))
    else:
        costs = [objective(pop.params[i]) for i in range(n)]
    pop.costs = np.asarray(costs, dtype=np.float64)
    if np.isnan(pop.costs).any():
        raise ValueError("objective returned NaN for at least one candidate")
    idx = int(np.argmin(pop.costs))
    if pop.costs[idx] < pop.best_cost:
        pop.best_cost = float(pop.costs[idx])
        pop.best_params = pop.params[idx].copy()
    return pop


def phase_reinforce(pop: AmplitudePopulation, gamma: float, epsilon: float) -> None:
    """Rotate each amplitude by -gamma * (J - Jmin) / (Jmax - Jmin + eps).

    Unit-modulus factors: magnitudes are preserved exactly (up to float
    rounding), so this step alone never changes sampling probabilities.
    """
    if np.isnan(pop.costs).any():
        raise ValueError("population has unevaluated candidates")
    jmin = pop.costs.min()
    jmax = pop.costs.max()
    angles = -gamma * (pop.costs - jmin) / (jmax - jmin + epsilon)
    pop.amplitudes = pop.amplitudes * np.exp(1j * angles)


def _mixing_weights(params: np.ndarray, bandwidth: float) -> np.ndarray:
    """Row-normalized Gaussian kernel over normalized parameter distance."""
    norm = (params - PARAM_MIN) / (PARAM_MAX - PARAM_MIN)
    delta = norm[:, None, :] - norm[None, :, :]
    d2 = np.einsum("ikd,ikd->ik", delta, delta)
    weights = np.exp(-d2 / (2.0 * bandwidth * bandwidth))
    return weights / weights.sum(axis=1, keepdims=True)


def mixing(pop: AmplitudePopulation, bandwidth: float) -> None:
    """Interfere neighboring amplitudes: a~ = W a, then renormalize.

    This is where cost information becomes selection pressure; rotated
    (high-cost) neighbors add destructively into the weighted sum.
    """
    weights = _mixing_weights(pop.params, bandwidth)
    mixed = weights @ pop.amplitudes
    norm = np.sqrt(np.sum(mixed.real**2 + mixed.imag**2))
    if not norm > 0.0:
        raise RuntimeError("mixing collapsed every amplitude to zero")
    pop.amplitudes = mixed / norm


def sample_next(pop: AmplitudePopulation, config: QwioConfig) -> None:
    """Draw the next generation from |amplitude|^2.

    Parents are sampled with replacement, children get Gaussian noise
    (sigma = mutation_sigma x parameter range) clamped into the box,
    child 0 is the recorded best unmutated, and amplitudes reset to a
    uniform zero-phase state. The only RNG consumers are the two draws
    here and init, so evaluation order can never shift the stream.
    """
    if pop.best_params is None:
        raise RuntimeError("cannot sample before the first evaluation")
    n = pop.size
    p = pop.amplitudes.real**2 + pop.amplitudes.imag**2
    total = p.sum()
    if not total > 0.0:
        raise RuntimeError("sampling distribution is degenerate (all zero)")
    p = p / total
    parents = pop.rng.choice(n, size=n, replace=True, p=p)
    sigma = config.mutation_sigma * (PARAM_MAX - PARAM_MIN)
    noise = pop.rng.normal(0.0, 1.0, (n, NUM_PARAMS)) * sigma
    children = pop.params[parents] + noise
    np.clip(children, PARAM_MIN, PARAM_MAX, out=children)
    children[0] = pop.best_params
    pop.params = children
    pop.amplitudes = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
    pop.costs = np.full(n, np.nan, dtype=np.float64)
    pop.iteration += 1


def optimize(
    image,
    base: QuantTable,
    config: QwioConfig,
    *,
    objective: Callable[[np.ndarray], float] | None = None,
    observer: Callable[[str, AmplitudePopulation], None] | None = None,
    max_workers: int = 1,
):
    """Run the search and return (best table, per-iteration history).

    `image` is one plane or a list of planes; the objective is the mean
    rate-distortion cost over them unless an `objective` callable is
    substituted (the regression-test hook). `observer(stage, pop)` is
    called after evaluate / reinforce / mix / sample for invariant
    instrumentation.

    Candidate 0 starts at the identity point and the elite child always
    carries the best-ever parameters, so the returned table never scores
    worse than `base` on the training objective.
    """
    config.validate()
    if objective is None:
        objective = rd_objective(image, base, lam=config.lam)

    pop = init_population(config)
    if observer is not None:
        observer("init", pop)

    history: list[HistoryPoint] = []
    stall = 0
    prev_best = math.inf
    for it in range(1, config.max_iters + 1):
        evaluate_all(pop, objective, max_workers=max_workers)
        if observer is not None:
            observer("evaluate", pop)
        history.append(
            HistoryPoint(it, float(pop.best_cost), float(np.mean(pop.costs)))
        )
        if prev_best - pop.best_cost > CONVERGENCE_TOL:
            stall = 0
        else:
            stall += 1
        prev_best = pop.best_cost
        if stall >= config.stall_limit or it == config.max_iters:
            break
        phase_reinforce(pop, config.gamma, config.epsilon)
        if observer is not None:
            observer("reinforce", pop)
        mixing(pop, config.kernel_bandwidth)
        if observer is not None:
            observer("mix", pop)
        sample_next(pop, config)
        if observer is not None:
            observer("sample", pop)

    best = BandParams.from_vector(pop.best_params)
    table = build_table(best, base)
    table.seed = config.seed
    table.lam = config.lam
    return table, history
