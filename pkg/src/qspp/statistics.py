"""Zero-delay second-order coherence of Fock wavepackets under loss."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ScaleError

NONCLASSICAL = "nonclassical"
CLASSICAL = "classical-compatible"

MAX_ORACLE_N = 20
MAX_ORACLE_STAGES = 8


@dataclass(frozen=True)
class CountingMoments:
    mean: float
    factorial_second: float

    @property
    def g2(self) -> float:
        if self.mean <= 0:
            raise DomainError("g2 undefined for zero mean count")
        return self.factorial_second / self.mean / self.mean


@dataclass(frozen=True)
class LossChain:
    etas: tuple[float, ...] = ()

    def __post_init__(self):
        etas = tuple(float(e) for e in self.etas)
        for e in etas:
            if not 0 <= e <= 1:
                raise DomainError(f"stage efficiency {e} outside [0, 1]")
        object.__setattr__(self, "etas", etas)

    @property
    def total(self) -> float:
        return math.prod(self.etas)

    @classmethod
    def parse(cls, text: str) -> "LossChain":
        text = text.strip()
        if not text:
            return cls()
        try:
            etas = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise DomainError(f"cannot parse loss chain {text!r}") from None
        return cls(etas)


def g2_fock(n: int) -> float:
    if n < 1:
        raise DomainError("g2 is undefined for the vacuum")
    return 1 - 1 / n


def apply_loss_chain(n: int, chain: LossChain) -> CountingMoments:
    if n < 0:
        raise DomainError("n must be non-negative")
    eta = chain.total
    return CountingMoments(eta * n, eta * eta * n * (n - 1))


def binomial_channel(n_max: int, eta: float) -> np.ndarray:
    """Column-stochastic matrix P[k, j] = C(j, k) eta^k (1 - eta)^(j - k)."""
    P = np.zeros((n_max + 1, n_max + 1))
    for j in range(n_max + 1):
        for k in range(j + 1):
            P[k, j] = math.comb(j, k) * eta**k * (1 - eta) ** (j - k)
    return P


def fock_loss_distribution(n: int, chain: LossChain) -> np.ndarray:
    """Exact number distribution after passing |n> through each stage."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if n > MAX_ORACLE_N or len(chain.etas) > MAX_ORACLE_STAGES:
        raise ScaleError(f"oracle limited to n <= {MAX_ORACLE_N} and {MAX_ORACLE_STAGES} stages")
    p = np.zeros(n + 1)
    p[n] = 1.0
    for eta in chain.etas:
        p = binomial_channel(n, eta) @ p
    return p


def fock_loss_oracle(n: int, chain: LossChain) -> CountingMoments:
    p = fock_loss_distribution(n, chain)
    k = np.arange(n + 1)
    return CountingMoments(float(k @ p), float((k * (k - 1)) @ p))


def g2_classical_bound_check(value: float) -> str:
    if value < 0:
        raise DomainError("g2 cannot be negative")
    return NONCLASSICAL if value < 1 else CLASSICAL


def windowed_moments(n: int, fraction: float) -> CountingMoments:
    """Moments when the counting window holds only ``fraction`` of the pulse."""
    return apply_loss_chain(n, LossChain((fraction,)))


def chain_for_transfer(beta0: complex, kappa0: float, x: float, mu: float) -> LossChain:
    """Photon-to-SPP transfer, propagation loss and detection as loss stages."""
    return LossChain((abs(beta0) ** 2, math.exp(-2 * kappa0 * x), mu))


def stats_report(n: int, chain: LossChain, oracle: bool = False) -> dict:
    moments = apply_loss_chain(n, chain)
    g2 = g2_fock(n)
    report = {
        "n": n,
        "etas": list(chain.etas),
        "eta_total": chain.total,
        "mean": moments.mean,
        "factorial_second": moments.factorial_second,
        "g2": g2,
        "classification": g2_classical_bound_check(g2),
    }
    if oracle:
        exact = fock_loss_oracle(n, chain)
        report["oracle"] = {
            "mean": exact.mean,
            "factorial_second": exact.factorial_second,
            "g2": exact.g2 if exact.mean > 0 else None,
        }
        report["oracle_agrees"] = bool(
            abs(exact.mean - moments.mean) <= 1e-12 * max(1.0, moments.mean)
            and abs(exact.factorial_second - moments.factorial_second) <= 1e-12 * max(1.0, moments.factorial_second)
            and (exact.mean == 0 or abs(exact.g2 - g2) <= 1e-12)
        )
    return report
