"""LeGall 5/3 analysis filter banks.

Two scaling conventions are exposed. Both share the 5-tap low-pass
{-1/8, 1/4, 3/4, 1/4, -1/8}; they differ only in the high-pass gain:

* ``paper``:    {-1/4, 1/2, -1/4} (halved high-pass)
* ``jpeg2000``: {-1/2,   1, -1/2} (standard JPEG2000 analysis scaling)

All taps are exact dyadic rationals, so the float64 tuples below are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

CONVENTIONS = ("paper", "jpeg2000")


@dataclass(frozen=True)
class FilterBank:
    """Analysis taps plus the phase convention used by the 1D transforms.

    ``lowpass_center_index`` / ``highpass_center_index`` give the tap that
    lands on the output's anchor sample. Low-pass outputs are anchored at
    even input indices, high-pass outputs at odd ones.
    """

    lowpass_taps: tuple[float, ...]
    highpass_taps: tuple[float, ...]
    lowpass_center_index: int
    highpass_center_index: int
    scaling_convention: str

    def __post_init__(self) -> None:
        if sum(self.lowpass_taps) != 1.0:
            raise ValueError("low-pass taps must sum to exactly 1 (unit DC gain)")
        if sum(self.highpass_taps) != 0.0:
            raise ValueError("high-pass taps must sum to exactly 0")
        if self.scaling_convention not in CONVENTIONS:
            raise ValueError(f"unknown scaling convention {self.scaling_convention!r}")

    @property
    def highpass_gain(self) -> float:
        """Ratio of this bank's high-pass to the doubled (jpeg2000) taps."""
        return 0.5 if self.scaling_convention == "paper" else 1.0


PAPER_BANK = FilterBank(
    lowpass_taps=(-0.125, 0.25, 0.75, 0.25, -0.125),
    highpass_taps=(-0.25, 0.5, -0.25),
    lowpass_center_index=2,
    highpass_center_index=1,
    scaling_convention="paper",
)

JPEG2000_BANK = FilterBank(
    lowpass_taps=(-0.125, 0.25, 0.75, 0.25, -0.125),
    highpass_taps=(-0.5, 1.0, -0.5),
    lowpass_center_index=2,
    highpass_center_index=1,
    scaling_convention="jpeg2000",
)


def filter_bank(convention: str = "paper") -> FilterBank:
    """Return the analysis bank for a scaling convention name."""
    if convention == "paper":
        return PAPER_BANK
    if convention == "jpeg2000":
        return JPEG2000_BANK
    raise ValueError(f"unknown scaling convention {convention!r}")
