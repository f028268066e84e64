"""PRACH occasion scheduling and resource occupancy for one cell.

The physical random access channel occupies a small, periodic set of
time/frequency resources that is fully determined by the cell's PRACH
parameter record. This module decides which frames, slots and symbols
carry PRACH occasions, computes the fraction of the resource grid they
occupy, and derives the time/frequency budget an attacker needs to cover
exactly those resources.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

from .errors import ConfigError

__all__ = [
    "PrachConfig",
    "CellConfig",
    "PrachOccasion",
    "is_prach_frame",
    "occasions_in_frame",
    "occupancy_ratio",
    "occupancy_factors",
    "jammer_resource_budget",
    "load_prach_config",
    "load_cell_config",
    "PRESETS",
]

SUBCARRIERS_PER_PRB = 12
SYMBOLS_PER_SLOT = 14
SUBFRAMES_PER_FRAME = 10
FRAME_MS = 10.0
BASE_SCS_HZ = 15_000.0


@dataclass(frozen=True)
class PrachConfig:
    """Expanded PRACH channel parameters (one TS 38.211 configuration row).

    ``sfn_modulus``/``sfn_remainder`` encode the frame rule
    ``sfn mod modulus == remainder``; the remaining fields place the
    occasions inside a PRACH frame.
    """

    preamble_length: int
    prach_prbs: int
    freq_occasions: int
    freq_offset: int
    preamble_format: str
    sfn_modulus: int
    sfn_remainder: int
    subframe_number: int
    slot_in_subframe: int
    start_symbol: int
    slots_per_subframe_with_prach: int
    occasions_per_slot: int
    duration_symbols: int
    prach_subframes_per_frame: int

    def __post_init__(self) -> None:
        if self.preamble_length not in (139, 839):
            raise ConfigError(
                f"preamble_length must be 139 or 839, got {self.preamble_length}"
            )
        if self.preamble_format != "A2":
            raise ConfigError(
                f"preamble_format '{self.preamble_format}' not supported (only A2)"
            )
        if self.duration_symbols != 4:
            raise ConfigError("format A2 requires duration_symbols = 4")
        if self.sfn_modulus < 1:
            raise ConfigError("sfn_modulus must be >= 1")
        if not 0 <= self.sfn_remainder < self.sfn_modulus:
            raise ConfigError("sfn_remainder must be < sfn_modulus")
        if not 0 <= self.subframe_number < SUBFRAMES_PER_FRAME:
            raise ConfigError("subframe_number must be in [0, 10)")
        if not 0 <= self.start_symbol < SYMBOLS_PER_SLOT:
            raise ConfigError("start_symbol must be in [0, 14)")
        if self.occasions_per_slot < 1 or self.duration_symbols < 1:
            raise ConfigError("occasion counts must be >= 1")
        if (
            self.start_symbol + self.occasions_per_slot * self.duration_symbols
            > SYMBOLS_PER_SLOT
        ):
            raise ConfigError("occasions do not fit in the slot")
        if self.freq_occasions < 1:
            raise ConfigError("freq_occasions must be >= 1")
        if self.freq_offset < 0 or self.prach_prbs < 1:
            raise ConfigError("freq_offset/prach_prbs out of range")
        if self.slot_in_subframe < 0:
            raise ConfigError("slot_in_subframe must be >= 0")
        if not 1 <= self.prach_subframes_per_frame <= self.subframe_number + 1:
            raise ConfigError(
                "prach_subframes_per_frame must fit before subframe_number"
            )
        if not 1 <= self.slots_per_subframe_with_prach <= self.slot_in_subframe + 1:
            raise ConfigError(
                "slots_per_subframe_with_prach must fit before slot_in_subframe"
            )


@dataclass(frozen=True)
class CellConfig:
    """Cell numerology, bandwidth and baseband grid parameters."""

    numerology: int
    cell_bandwidth: float
    n_prb: int
    dft_size: int
    sample_rate: float
    prach_root_indices: tuple[int, ...]
    shift_step: int

    def __post_init__(self) -> None:
        if not 0 <= self.numerology <= 2:
            raise ConfigError(f"numerology must be 0..2, got {self.numerology}")
        if self.cell_bandwidth <= 0:
            raise ConfigError("cell_bandwidth must be positive")
        if self.dft_size < self.n_prb * SUBCARRIERS_PER_PRB:
            raise ConfigError("dft_size must cover n_prb * 12 subcarriers")
        if self.dft_size & (self.dft_size - 1) != 0 or self.dft_size <= 0:
            raise ConfigError("dft_size must be a power of two")
        if abs(self.sample_rate - self.dft_size * self.subcarrier_spacing) > 1e-6:
            raise ConfigError("sample_rate must equal dft_size * subcarrier spacing")
        if not self.prach_root_indices:
            raise ConfigError("prach_root_indices must be nonempty")
        if self.shift_step < 1:
            raise ConfigError("shift_step must be >= 1")

    @property
    def subcarrier_spacing(self) -> float:
        return (1 << self.numerology) * BASE_SCS_HZ

    @property
    def slots_per_subframe(self) -> int:
        return 1 << self.numerology


@dataclass(frozen=True)
class PrachOccasion:
    """One time-domain PRACH occasion inside a frame."""

    sfn: int
    subframe: int
    slot: int
    start_symbol: int
    occasion_index: int
    first_subcarrier: int
    num_subcarriers: int


def is_prach_frame(config: PrachConfig, sfn: int) -> bool:
    """True when frame ``sfn`` carries PRACH (``sfn mod x == y``)."""
    if sfn < 0:
        raise ValueError("sfn must be >= 0")
    return sfn % config.sfn_modulus == config.sfn_remainder


def occasions_in_frame(
    config: PrachConfig, cell: CellConfig, sfn: int
) -> list[PrachOccasion]:
    """All PRACH occasions of a frame, empty when the frame carries none.

    PRACH subframes are the consecutive subframes ending at
    ``subframe_number``, and PRACH slots the consecutive slots (within each
    such subframe) ending at ``slot_in_subframe``; the standard single-row
    configurations collapse both to a single subframe/slot.
    """
    if config.slot_in_subframe >= cell.slots_per_subframe:
        raise ConfigError(
            f"slot_in_subframe {config.slot_in_subframe} invalid at numerology "
            f"{cell.numerology}"
        )
    if not is_prach_frame(config, sfn):
        return []
    occasions = []
    first_sc = config.freq_offset * SUBCARRIERS_PER_PRB
    for sf_back in range(config.prach_subframes_per_frame - 1, -1, -1):
        subframe = config.subframe_number - sf_back
        for sl_back in range(config.slots_per_subframe_with_prach - 1, -1, -1):
            slot_in_sf = config.slot_in_subframe - sl_back
            slot = subframe * cell.slots_per_subframe + slot_in_sf
            for occ in range(config.occasions_per_slot):
                occasions.append(
                    PrachOccasion(
                        sfn=sfn,
                        subframe=subframe,
                        slot=slot,
                        start_symbol=config.start_symbol
                        + occ * config.duration_symbols,
                        occasion_index=occ,
                        first_subcarrier=first_sc,
                        num_subcarriers=config.preamble_length,
                    )
                )
    return occasions


def occupancy_factors(config: PrachConfig, cell: CellConfig) -> dict[str, float]:
    """The three factors of the PRACH resource-occupancy ratio.

    ``period`` is the 10 ms frame duration over the PRACH period,
    ``temporal`` the occupied share of a PRACH frame's symbols and
    ``bandwidth`` the occupied share of the cell bandwidth; the occupancy
    ratio is their product.
    """
    if cell.cell_bandwidth <= 0:
        raise ConfigError("cell_bandwidth must be positive")
    period_ms = config.sfn_modulus * FRAME_MS
    symbols_per_occasion_set = (
        config.prach_subframes_per_frame
        * config.slots_per_subframe_with_prach
        * config.occasions_per_slot
        * config.duration_symbols
    )
    period = FRAME_MS / period_ms
    temporal = symbols_per_occasion_set / (
        SUBFRAMES_PER_FRAME * (1 << cell.numerology) * SYMBOLS_PER_SLOT
    )
    bandwidth = (
        cell.subcarrier_spacing
        * config.preamble_length
        * config.freq_occasions
        / cell.cell_bandwidth
    )
    return {
        "period": period,
        "temporal": temporal,
        "bandwidth": bandwidth,
        "ratio": period * temporal * bandwidth,
    }


def occupancy_ratio(config: PrachConfig, cell: CellConfig) -> float:
    """Fraction of the cell's resource elements occupied by PRACH."""
    return occupancy_factors(config, cell)["ratio"]


def jammer_resource_budget(config: PrachConfig, cell: CellConfig) -> dict[str, float]:
    """Bandwidth and duty cycle needed to cover exactly the PRACH resources.

    Returns the occupied bandwidth in Hz, the repetition period of PRACH
    slots in ms and the active transmit span per period in ms.
    """
    symbol_ms = 1.0 / (SYMBOLS_PER_SLOT * (1 << cell.numerology))
    n_symbols = (
        config.prach_subframes_per_frame
        * config.slots_per_subframe_with_prach
        * config.occasions_per_slot
        * config.duration_symbols
    )
    return {
        "bandwidth_hz": config.preamble_length
        * config.freq_occasions
        * cell.subcarrier_spacing,
        "duty_period_ms": config.sfn_modulus * FRAME_MS,
        "active_span_per_period_ms": n_symbols * symbol_ms,
    }


# --- JSON loading ------------------------------------------------------------

def _load_record(cls, data: dict[str, Any], section: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be a JSON object")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown field '{sorted(unknown)[0]}' in {section}")
    missing = allowed - set(data)
    if missing:
        raise ConfigError(f"missing field '{sorted(missing)[0]}' in {section}")
    kwargs = dict(data)
    if "prach_root_indices" in kwargs:
        kwargs["prach_root_indices"] = tuple(kwargs["prach_root_indices"])
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad {section}: {exc}") from exc


def load_prach_config(data: dict[str, Any]) -> PrachConfig:
    """Build a PrachConfig from a JSON object; unknown fields are rejected."""
    return _load_record(PrachConfig, data, "prach config")


def load_cell_config(data: dict[str, Any]) -> CellConfig:
    """Build a CellConfig from a JSON object; unknown fields are rejected."""
    return _load_record(CellConfig, data, "cell config")


# --- Named presets -----------------------------------------------------------

def _index98_prach() -> PrachConfig:
    # TS 38.211 configuration index 98: short preamble, format A2, PRACH in
    # every odd frame, subframe 9, second slot at 30 kHz SCS, three
    # four-symbol occasions starting at symbol 0.
    return PrachConfig(
        preamble_length=139,
        prach_prbs=12,
        freq_occasions=1,
        freq_offset=0,
        preamble_format="A2",
        sfn_modulus=2,
        sfn_remainder=1,
        subframe_number=9,
        slot_in_subframe=1,
        start_symbol=0,
        slots_per_subframe_with_prach=1,
        occasions_per_slot=3,
        duration_symbols=4,
        prach_subframes_per_frame=1,
    )


def _cell_40mhz_full() -> CellConfig:
    # 40 MHz cell at 30 kHz SCS, full 106-PRB grid (61.44 Msps).
    return CellConfig(
        numerology=1,
        cell_bandwidth=40e6,
        n_prb=106,
        dft_size=2048,
        sample_rate=2048 * 30e3,
        prach_root_indices=(1,),
        shift_step=13,
    )


def _cell_40mhz_desk() -> CellConfig:
    # Reduced-rate grid that models only the 12-PRB PRACH subband of the
    # same 40 MHz cell; keeps campaigns cheap without changing per-bin math.
    return CellConfig(
        numerology=1,
        cell_bandwidth=40e6,
        n_prb=12,
        dft_size=256,
        sample_rate=256 * 30e3,
        prach_root_indices=(1,),
        shift_step=13,
    )


PRESETS: dict[str, tuple[PrachConfig, CellConfig]] = {
    "index98_40mhz_full": (_index98_prach(), _cell_40mhz_full()),
    "index98_40mhz_desk": (_index98_prach(), _cell_40mhz_desk()),
}
