"""Capacities and secret key rates of faded Gaussian sub-channels.

Conventions: classical capacities carry the real-domain 1/2 prefactor,

    C = (1/2) * log2(1 + mod_variance * fade_sq / noise_variance),

while the aggregated secret-key bounds are complex-domain sums without the
1/2 (both per-channel accessors are provided).  ``fade_sq`` always denotes
the squared magnitude |F|^2 of a Fourier-domain transmission coefficient.

The optimal collective attack pushes the usable noise to

    attack_noise = mod_variance / ((mod*fade + input_noise)/(1 + input_noise*mod*fade) - 1)

which only exists while the bracketed term is positive; otherwise the regime
is degenerate and :class:`~mcqkd.errors.DegenerateRegimeError` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, eve_transmittance, total_input_noise
from .errors import DegenerateRegimeError

_LOG2_E = math.log2(math.e)


@dataclass(frozen=True)
class SnrSet:
    """The four signal-to-noise ratios of one sub-channel: plain, gain-boosted
    (eigenchannel-compensated), and both again under optimal-attack noise."""

    snr: float
    snr_svd: float
    snr_private: float
    snr_svd_private: float

    def __post_init__(self):
        for name in ("snr", "snr_svd", "snr_private", "snr_svd_private"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_variances(
        cls,
        mod_variance: float,
        noise_variance: float,
        attack_noise: float,
        gain_c: float = 1.0,
    ) -> "SnrSet":
        if not mod_variance > 0:
            raise ValueError(f"mod_variance must be positive, got {mod_variance}")
        if not noise_variance > 0:
            raise ValueError(f"noise_variance must be positive, got {noise_variance}")
        if not attack_noise > 0:
            raise ValueError(f"attack_noise must be positive, got {attack_noise}")
        if not gain_c >= 0:
            raise ValueError(f"gain_c must be >= 0, got {gain_c}")
        boosted = mod_variance * (1.0 + gain_c)
        return cls(
            snr=mod_variance / noise_variance,
            snr_svd=boosted / noise_variance,
            snr_private=mod_variance / attack_noise,
            snr_svd_private=boosted / attack_noise,
        )


@dataclass(frozen=True)
class KeyRateConfig:
    """Multiplexing configuration: the rate fraction carried per eigenchannel.

    ``multiplex_ratio`` is the fraction of the full capacity placed on the
    scheme, ``n_min`` the number of usable eigenchannels and
    ``private_capacity`` the total private rate being split.
    """

    multiplex_ratio: float
    n_min: int
    private_capacity: float

    def __post_init__(self):
        if not self.multiplex_ratio > 0:
            raise ValueError(f"multiplex_ratio must be > 0, got {self.multiplex_ratio}")
        if self.n_min < 1:
            raise ValueError(f"n_min must be >= 1, got {self.n_min}")
        if not self.private_capacity >= 0:
            raise ValueError(
                f"private_capacity must be >= 0, got {self.private_capacity}"
            )


@dataclass(frozen=True)
class RateReport:
    """Aggregated rates of a channel model: classical and gain-boosted
    capacities (real-domain, with the 1/2), secret-key bounds (complex-domain
    sums) and the per-sub-channel optimal-attack noise."""

    capacity: float
    svd_capacity: float
    private_capacity: float
    svd_private_capacity: float
    attack_noise: tuple

    def __post_init__(self):
        for name in ("capacity", "svd_capacity", "private_capacity", "svd_private_capacity"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        object.__setattr__(self, "attack_noise", tuple(self.attack_noise))


def _check_positive(**kwargs) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def subchannel_capacity(mod_variance: float, fade_sq: float, noise_variance: float) -> float:
    """Classical capacity (1/2) * log2(1 + mod_variance*fade_sq/noise_variance)."""
    _check_positive(mod_variance=mod_variance, noise_variance=noise_variance)
    if not fade_sq >= 0:
        raise ValueError(f"fade_sq must be >= 0, got {fade_sq}")
    return 0.5 * math.log2(1.0 + mod_variance * fade_sq / noise_variance)


def svd_capacity(
    mod_variance: float, gain_c: float, fade_sq: float, noise_variance: float
) -> float:
    """Capacity with the eigenchannel-compensated modulation variance
    mod_variance * (1 + gain_c)."""
    if not gain_c > 0:
        raise ValueError(f"gain_c must be > 0, got {gain_c}")
    return subchannel_capacity(mod_variance * (1.0 + gain_c), fade_sq, noise_variance)


def optimal_attack_noise(mod_variance: float, fade_sq: float, input_noise: float) -> float:
    """Noise variance granted by the optimal collective attack.

    Inverts the bracket (mod*fade + input_noise)/(1 + input_noise*mod*fade) - 1;
    a non-positive bracket means no finite attack noise exists for these
    parameters and raises :class:`DegenerateRegimeError` carrying the value.
    """
    _check_positive(mod_variance=mod_variance, input_noise=input_noise)
    if not fade_sq >= 0:
        raise ValueError(f"fade_sq must be >= 0, got {fade_sq}")
    signal = mod_variance * fade_sq
    bracket = (signal + input_noise) / (1.0 + input_noise * signal) - 1.0
    if bracket <= 0:
        raise DegenerateRegimeError(bracket)
    return mod_variance / bracket


def private_capacity(mod_variance: float, fade_sq: float, attack_noise: float) -> float:
    """Private rate under the optimal attack, real-domain form
    (1/2) * log2(1 + mod_variance*fade_sq/attack_noise)."""
    return subchannel_capacity(mod_variance, fade_sq, attack_noise)


def private_capacity_complex(mod_variance: float, fade_sq: float, attack_noise: float) -> float:
    """Complex-domain private rate log2(1 + mod_variance*fade_sq/attack_noise)
    (no 1/2); these are the terms the aggregate secret-key bound sums."""
    return 2.0 * subchannel_capacity(mod_variance, fade_sq, attack_noise)


def aggregate_secret_key_bound(terms) -> float:
    """Secret-key rate bound over active sub-channels:
    sum_i log2(1 + mod_i * fade_i / attack_noise_i).

    ``terms`` is an iterable of (mod_variance, fade_sq, attack_noise) triples.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("need at least one sub-channel term")
    total = 0.0
    for mod_variance, fade_sq, attack_noise in terms:
        total += private_capacity_complex(mod_variance, fade_sq, attack_noise)
    return total


def fixed_secret_key_rate(cfg: KeyRateConfig) -> float:
    """Rate assigned per eigenchannel when the private capacity is split at a
    fixed multiplex ratio: (multiplex_ratio / n_min) * private_capacity."""
    return cfg.multiplex_ratio / cfg.n_min * cfg.private_capacity


def snr_regime_approximations(
    mod_variance: float, fades_sq, attack_noise: float
) -> tuple[float, float]:
    """Low- and high-SNR approximations of the private rate.

    Low SNR:  ratio * log2(e) with ratio = mod_variance / attack_noise.
    High SNR: log2(ratio) + log2(max fade_sq).
    """
    _check_positive(mod_variance=mod_variance, attack_noise=attack_noise)
    fades_sq = np.asarray(fades_sq, dtype=float)
    if fades_sq.size < 1 or np.any(fades_sq <= 0):
        raise ValueError("fades_sq must be a non-empty collection of positive values")
    ratio = mod_variance / attack_noise
    low = ratio * _LOG2_E
    high = math.log2(ratio) + math.log2(float(np.max(fades_sq)))
    return low, high


def rate_report(
    channel: ChannelModel,
    mod_variance: float,
    gain_c: float = 1.0,
    fades_sq=None,
) -> RateReport:
    """Aggregate all four rates over the active sub-channels of a model.

    ``fades_sq`` optionally supplies the squared Fourier-domain gains, one per
    active sub-channel; without it the static |T_i|^2 values are used.  The
    eavesdropper tap and excess noise are always derived from the static
    transmittances.
    """
    active = channel.active
    if fades_sq is None:
        fades_sq = [abs(sub.transmittance) ** 2 for sub in active]
    fades_sq = [float(f) for f in fades_sq]
    if len(fades_sq) != len(active):
        raise ValueError(
            f"expected {len(active)} fade values, got {len(fades_sq)}"
        )
    capacity = 0.0
    boosted = 0.0
    private = 0.0
    private_boosted = 0.0
    attack = []
    for sub, fade_sq in zip(active, fades_sq):
        input_noise = total_input_noise(
            sub.eve_epr_variance, eve_transmittance(sub.transmittance), channel.vacuum_variance
        )
        noise_star = optimal_attack_noise(mod_variance, fade_sq, input_noise)
        attack.append(noise_star)
        capacity += subchannel_capacity(mod_variance, fade_sq, sub.noise_variance)
        boosted += svd_capacity(mod_variance, gain_c, fade_sq, sub.noise_variance)
        private += private_capacity_complex(mod_variance, fade_sq, noise_star)
        private_boosted += private_capacity_complex(
            mod_variance * (1.0 + gain_c), fade_sq, noise_star
        )
    return RateReport(capacity, boosted, private, private_boosted, tuple(attack))
