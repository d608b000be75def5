"""Monte Carlo validation of the closed-form outage results.

The simulator never materializes channel vectors: |u|^2 and |v|^2 are sums
of n_r (resp. n_t) unit exponentials, so each trial consumes a fixed number
of uniforms. Substreams are assigned by global trial index with a
counter-based generator (Philox), which makes the failure count a pure
function of (seed, trials, config): any partition of the trial range across
lanes, and any batching within a lane, reproduces the same draws.

Philox's ``advance`` unit is one 128-bit counter tick = 4 doubles, so the
per-trial draw budget is padded up to a multiple of 4 and trial i starts at
counter offset i * pad / 4.
"""

from __future__ import annotations

import math
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from numpy.random import Generator, Philox

from .analysis import exact_outage, outage_threshold
from .errors import SimulationInfeasibleError
from .keyhole import SystemConfig

__all__ = [
    "SimulationResult",
    "sample_round_gains",
    "simulate_outage",
    "empirical_diversity_slope",
]

_BATCH = 1 << 16
_MIN_FAILURES = 100  # below this the normal CI is not trustworthy


@dataclass(frozen=True)
class SimulationResult:
    """Failure count and 3-sigma normal-approximation interval.

    ``low_confidence`` flags runs with fewer than 100 observed failures,
    where the interval half-width is itself noisy.
    """

    trials: int
    failures: int
    estimate: float
    ci_halfwidth: float
    seed: int
    low_confidence: bool


def _padded_draws(n_t: int, n_r: int, rounds: int) -> int:
    d = rounds * (n_t + n_r)
    return -4 * (-d // 4)


def sample_round_gains(
    n_t: int,
    n_r: int,
    rounds: int,
    trials: int,
    seed: int,
    first_trial: int = 0,
) -> np.ndarray:
    """Equivalent gains for trials [first_trial, first_trial + trials).

    Returns shape (trials, rounds). Draw order per trial is fixed: rounds in
    sequence, n_r receive exponentials then n_t transmit exponentials each.
    Because the substream of trial i depends only on i and the seed, prefix
    columns of this matrix are the natural common-random-number stream for
    comparing different round budgets.
    """
    pad = _padded_draws(n_t, n_r, rounds)
    bitgen = Philox(key=seed)
    bitgen.advance(first_trial * (pad // 4))
    u = Generator(bitgen).random((trials, pad))
    e = -np.log1p(-u[:, : rounds * (n_t + n_r)].reshape(trials, rounds, n_t + n_r))
    return e[:, :, :n_r].sum(axis=2) * e[:, :, n_r:].sum(axis=2)


def _count_failures(
    config: SystemConfig,
    thresholds: np.ndarray,
    first_trial: int,
    count: int,
    seed: int,
) -> int:
    fails = 0
    done = 0
    while done < count:
        c = min(_BATCH, count - done)
        g = sample_round_gains(
            config.n_t, config.n_r, config.k_rounds, c, seed, first_trial + done
        )
        fails += int(np.count_nonzero(np.all(g < thresholds, axis=1)))
        done += c
    return fails


def simulate_outage(
    config: SystemConfig, trials: int, seed: int = 0, lanes: int = 1
) -> SimulationResult:
    """Estimate the outage probability by direct trial counting.

    A trial is an outage when every round's gain falls below its threshold.
    The result is bitwise reproducible for a given (config, trials, seed)
    regardless of ``lanes``, which only controls how the trial range is
    partitioned for execution.
    """
    trials = operator.index(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seed = operator.index(seed)
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    lanes = operator.index(lanes)
    if lanes < 1:
        raise ValueError(f"lanes must be >= 1, got {lanes}")
    lanes = min(lanes, trials)
    thresholds = np.array(
        [outage_threshold(config, k) for k in range(1, config.k_rounds + 1)]
    )
    base, rem = divmod(trials, lanes)
    ranges = []
    start = 0
    for lane in range(lanes):
        c = base + (1 if lane < rem else 0)
        ranges.append((start, c))
        start += c
    if lanes == 1:
        failures = _count_failures(config, thresholds, 0, trials, seed)
    else:
        with ThreadPoolExecutor(max_workers=lanes) as pool:
            failures = sum(
                pool.map(
                    lambda r: _count_failures(config, thresholds, r[0], r[1], seed),
                    ranges,
                )
            )
    p = failures / trials
    ci = 3.0 * math.sqrt(p * (1.0 - p) / trials)
    return SimulationResult(
        trials=trials,
        failures=failures,
        estimate=p,
        ci_halfwidth=ci,
        seed=seed,
        low_confidence=failures < _MIN_FAILURES,
    )


def empirical_diversity_slope(
    config: SystemConfig,
    snr_grid_db: Sequence[float],
    method: str = "exact",
    trials: int = 10**6,
    seed: int = 0,
    lanes: int = 1,
) -> float:
    """Negated least-squares slope of log10 P versus log10 SNR.

    At high SNR this estimates the diversity order. ``method`` selects the
    per-point probability: "exact" uses the closed form, "simulation" runs
    ``simulate_outage`` per grid point. Simulation requires at least 100
    expected failures at the top of the grid (where outage is rarest);
    otherwise the fit would be driven by counting noise and the call fails
    with the trial count that would fix it.
    """
    grid = [float(db) for db in snr_grid_db]
    if len(grid) < 2:
        raise ValueError("snr_grid_db needs at least two points")
    for a, b in zip(grid, grid[1:]):
        if not b > a:
            raise ValueError("snr_grid_db must be strictly increasing")
    if method not in ("exact", "simulation"):
        raise ValueError(f"method must be 'exact' or 'simulation', got {method!r}")
    configs = [
        replace(config, snr_per_round=(10.0 ** (db / 10.0),) * config.k_rounds)
        for db in grid
    ]
    if method == "exact":
        logs = [exact_outage(c).log_value / math.log(10.0) for c in configs]
        for v in logs:
            if not math.isfinite(v):
                raise ValueError("exact outage is 0 or 1 on the grid; cannot fit")
    else:
        p_top = exact_outage(configs[-1]).value
        expected = trials * p_top
        if expected < _MIN_FAILURES:
            need = -1 if p_top == 0.0 else math.ceil(_MIN_FAILURES / p_top)
            raise SimulationInfeasibleError(
                f"expected only {expected:.1f} failures at "
                f"{grid[-1]:g} dB; need >= {_MIN_FAILURES}, i.e. at least "
                f"{need} trials",
                required_trials=need,
            )
        logs = []
        for c in configs:
            r = simulate_outage(c, trials, seed=seed, lanes=lanes)
            if r.failures == 0:
                raise SimulationInfeasibleError(
                    f"no failures observed at one grid point with {trials} trials",
                    required_trials=-1,
                )
            logs.append(math.log10(r.estimate))
    xs = np.array([db / 10.0 for db in grid])  # log10 of linear SNR
    slope = np.polyfit(xs, np.array(logs), 1)[0]
    return float(-slope)
