"""Flat AWGN channel superposing UE, jammer and thermal noise."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .waveform import IqFrame

__all__ = ["ChannelConfig", "superpose"]


@dataclass(frozen=True)
class ChannelConfig:
    """Linear gains, UE timing offset and thermal noise level.

    ``noise_sigma`` is the standard deviation per real/imag component, so
    the complex per-sample noise power is ``2 * noise_sigma**2``.
    """

    noise_sigma: float
    ue_gain: float = 1.0
    jammer_gain: float = 1.0
    ue_delay_samples: int = 0

    def __post_init__(self) -> None:
        if self.noise_sigma < 0 or self.ue_gain < 0 or self.jammer_gain < 0:
            raise ConfigError("gains and noise_sigma must be >= 0")
        if self.ue_delay_samples < 0:
            raise ConfigError("ue_delay_samples must be >= 0")


def superpose(
    ue: IqFrame | None,
    jam: IqFrame | None,
    cfg: ChannelConfig,
    rng: np.random.Generator,
    *,
    num_samples: int | None = None,
    sample_rate: float | None = None,
) -> IqFrame:
    """Received frame: delayed/scaled UE plus scaled jammer plus noise.

    Absent inputs contribute zero; when both are absent the output length
    and rate must be given explicitly.
    """
    if ue is not None and jam is not None:
        if ue.sample_rate != jam.sample_rate:
            raise ConfigError(
                f"sample-rate mismatch: {ue.sample_rate} vs {jam.sample_rate}"
            )
        if len(ue.samples) != len(jam.samples):
            raise ConfigError("UE and jammer frames must span the same occasion")
    ref = ue if ue is not None else jam
    if ref is not None:
        n = len(ref.samples)
        rate = ref.sample_rate
    else:
        if num_samples is None or sample_rate is None:
            raise ConfigError(
                "num_samples and sample_rate are required when both inputs are absent"
            )
        n, rate = num_samples, sample_rate

    out = np.zeros(n, dtype=complex)
    if ue is not None:
        d = cfg.ue_delay_samples
        out[d:] += cfg.ue_gain * ue.samples[: n - d]
    if jam is not None:
        out += cfg.jammer_gain * jam.samples
    if cfg.noise_sigma > 0:
        out += cfg.noise_sigma * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
    return IqFrame(samples=out, sample_rate=rate, start_offset=0)
