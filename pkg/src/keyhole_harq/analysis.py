"""Closed-form outage probability and its high-SNR behaviour.

An outage happens when every round misses the target rate R. Because the
rounds are independent and each per-round mutual information is monotone in
the scalar gain, the outage probability factors exactly:

    P_out = prod_k F_X( n_t (2^R - 1) / snr_k )

with F_X the equivalent-gain CDF from ``specfun``. Everything downstream of
that product (asymptote, diversity order, coding gain) follows the same
per-round threshold.

All probabilities are carried as natural logs; K rounds of ~1e-8 factors are
routine operating points and would underflow a linear carrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import DomainError, UnsupportedConfigError
from .keyhole import SystemConfig
from .specfun import ln_gamma, meijer_g_log_cdf

__all__ = [
    "OutageProbability",
    "AsymptoticModel",
    "RateProbePoint",
    "OutageQuery",
    "OUTAGE_METHODS",
    "outage_threshold",
    "exact_outage",
    "asymptotic_outage",
    "diversity_order",
    "coding_gain",
    "asymptotic_model",
    "rate_monotonicity_probe",
]


@dataclass(frozen=True)
class OutageProbability:
    """A probability carried in the log domain.

    ``value`` is exp(log_value); it underflows to 0.0 silently for
    log_value < ~-745, which is why ``log_value`` is the primary field.
    """

    log_value: float
    value: float

    @classmethod
    def from_log(cls, log_value: float) -> "OutageProbability":
        return cls(log_value=log_value, value=math.exp(log_value))


@dataclass(frozen=True)
class AsymptoticModel:
    """Shape of the high-SNR law P ~ (C gamma)^(-d) (ln gamma)^e.

    ``coding_gain`` is only defined for square arrays (n_t == n_r) and is
    None otherwise; ``log_exponent`` is the power of ln(gamma), nonzero
    exactly when n_t == n_r.
    """

    diversity_order: int
    log_exponent: int
    coding_gain: Optional[float]


@dataclass(frozen=True)
class RateProbePoint:
    """Asymptotic outage at one rate with forward finite differences.

    ``first_difference`` is None at the last grid point and
    ``second_difference`` at the last two.
    """

    rate: float
    probability: float
    first_difference: Optional[float]
    second_difference: Optional[float]


OUTAGE_METHODS = ("exact", "asymptotic", "simulation")


@dataclass(frozen=True)
class OutageQuery:
    """An operating point paired with the evaluation route to use for it.

    Plumbing for callers that batch heterogeneous requests; ``method`` is a
    closed enumeration (``OUTAGE_METHODS``), anything else is rejected.
    """

    config: SystemConfig
    method: str

    def __post_init__(self) -> None:
        if self.method not in OUTAGE_METHODS:
            raise ValueError(
                f"method must be one of {OUTAGE_METHODS}, got {self.method!r}"
            )


def outage_threshold(config: SystemConfig, round_index: int) -> float:
    """Per-round gain threshold n_t (2^R - 1) / snr_k; rounds are 1-based."""
    if not 1 <= round_index <= config.k_rounds:
        raise ValueError(
            f"round_index must be in 1..{config.k_rounds}, got {round_index}"
        )
    snr = config.snr_per_round[round_index - 1]
    return config.n_t * (2.0 ** config.rate - 1.0) / snr


def exact_outage(config: SystemConfig) -> OutageProbability:
    """Exact outage probability at any SNR.

    Product of the per-round CDF values, accumulated as a sum of logs.
    rate = 0 gives zero thresholds and outage probability 0.
    """
    log_p = 0.0
    for k in range(1, config.k_rounds + 1):
        log_p += meijer_g_log_cdf(config.n_t, config.n_r, outage_threshold(config, k))
    return OutageProbability.from_log(log_p)


def asymptotic_outage(config: SystemConfig) -> OutageProbability:
    """Leading high-SNR term of the outage probability.

    With t_k the per-round threshold, m = min(n_t, n_r) and tau = |n_t - n_r|:

      tau > 0:  prod_k Gamma(tau) t_k^m / (Gamma(n_t) Gamma(n_r) m)
      tau = 0:  prod_k t_k^{n_t} ln(snr_k) / (n_t Gamma(n_t)^2)

    The tau = 0 branch needs ln(snr_k) > 0, so every per-round SNR must
    exceed one (0 dB); below that the leading term is meaningless.
    """
    tau = config.tau
    m = min(config.n_t, config.n_r)
    if tau == 0:
        for g in config.snr_per_round:
            if g <= 1.0:
                raise DomainError(
                    "asymptotic outage for n_t == n_r needs every per-round "
                    f"SNR > 1 (0 dB); got {g}"
                )
    if config.rate == 0.0:
        return OutageProbability.from_log(-math.inf)
    log_p = 0.0
    for k in range(1, config.k_rounds + 1):
        t = outage_threshold(config, k)
        if tau == 0:
            log_p += (
                config.n_t * math.log(t)
                + math.log(math.log(config.snr_per_round[k - 1]))
                - math.log(config.n_t)
                - 2.0 * ln_gamma(config.n_t)
            )
        else:
            log_p += (
                ln_gamma(tau)
                - ln_gamma(config.n_t)
                - ln_gamma(config.n_r)
                + m * math.log(t)
                - math.log(m)
            )
    return OutageProbability.from_log(log_p)


def diversity_order(config: SystemConfig) -> int:
    """K * min(n_t, n_r): the slope of the outage curve on a log-log plot."""
    return config.k_rounds * min(config.n_t, config.n_r)


def coding_gain(config: SystemConfig) -> float:
    """SNR scale C(R) of the square-array asymptote P ~ (C gamma)^{-d} (ln gamma)^K.

    C(R) = (n (2^R - 1))^{-1} * (n Gamma(n)^2)^{1/n}  for n = n_t = n_r.

    Only square arrays admit this normalization; the rectangular asymptote
    has no ln term and a different constant structure.
    """
    if config.n_t != config.n_r:
        raise UnsupportedConfigError(
            f"coding gain is defined only for n_t == n_r, got "
            f"({config.n_t}, {config.n_r})"
        )
    if config.rate == 0.0:
        raise DomainError("coding gain is undefined at rate 0")
    n = config.n_t
    return math.exp(
        (math.log(n) + 2.0 * ln_gamma(n)) / n
    ) / (n * (2.0 ** config.rate - 1.0))


def asymptotic_model(config: SystemConfig) -> AsymptoticModel:
    """Parameters of the generalized high-SNR model at equal per-round SNR."""
    snrs = set(config.snr_per_round)
    if len(snrs) != 1:
        raise UnsupportedConfigError(
            "the generalized asymptotic model assumes equal per-round SNRs; "
            f"got {config.snr_per_round}"
        )
    square = config.n_t == config.n_r
    return AsymptoticModel(
        diversity_order=diversity_order(config),
        log_exponent=config.k_rounds if square else 0,
        coding_gain=coding_gain(config) if square else None,
    )


def rate_monotonicity_probe(
    config: SystemConfig, rate_grid: Sequence[float]
) -> list:
    """Asymptotic outage across a rate grid with forward differences.

    The second differences are the caller's convexity evidence; they are
    reported rather than asserted because the convexity of the asymptote in
    R is an observed property, not something this module proves.
    """
    rates = [float(r) for r in rate_grid]
    if len(rates) < 2:
        raise ValueError("rate_grid needs at least two points")
    for a, b in zip(rates, rates[1:]):
        if not b > a:
            raise ValueError("rate_grid must be strictly increasing")
    if rates[0] <= 0.0:
        raise ValueError("rates must be > 0")
    probs = [
        asymptotic_outage(replace(config, rate=r)).value for r in rates
    ]
    n = len(rates)
    points = []
    for i, (r, p) in enumerate(zip(rates, probs)):
        d1 = probs[i + 1] - p if i + 1 < n else None
        d2 = probs[i + 2] - 2.0 * probs[i + 1] + p if i + 2 < n else None
        points.append(
            RateProbePoint(rate=r, probability=p, first_difference=d1,
                           second_difference=d2)
        )
    return points
