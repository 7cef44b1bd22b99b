"""Epoch-cyclical blend weight xi.

The weight starts at 1, decays linearly to 0 at epoch total/factor, and for
factor > 1 rises linearly back, reaching 1 again at the final epoch. With
factor = 1 it is a pure decay. The denominator of the linear ramps is either
the epoch count or the epoch count minus one; both conventions appear in
practice, so the choice is explicit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class DenominatorConvention(str, enum.Enum):
    EN = "en"
    EN_MINUS_ONE = "en-minus-one"


@dataclass(frozen=True)
class CycleSchedule:
    """Parameters of one xi ramp: epoch count, cycle factor, denominator."""

    total_epochs: int
    cyclical_factor: float = 1.0
    convention: DenominatorConvention = DenominatorConvention.EN

    def __post_init__(self):
        total = int(self.total_epochs)
        if total < 1:
            raise ValueError(f"total_epochs must be >= 1, got {self.total_epochs!r}")
        object.__setattr__(self, "total_epochs", total)
        factor = float(self.cyclical_factor)
        if not math.isfinite(factor) or factor < 1.0:
            raise ValueError(f"cyclical_factor must be finite and >= 1, got {factor!r}")
        object.__setattr__(self, "cyclical_factor", factor)
        object.__setattr__(self, "convention", DenominatorConvention(self.convention))

    @property
    def denominator(self) -> int:
        if self.convention is DenominatorConvention.EN:
            return self.total_epochs
        return self.total_epochs - 1


def xi(schedule: CycleSchedule, epoch: int) -> float:
    """Blend weight for one epoch index, clamped to [0, 1].

    With f the cycle factor, e the epoch and d the denominator:

        f * e <= d:  xi = 1 - f * e / d
        otherwise:   xi = (f * e / d - 1) / (f - 1), or 0 when f == 1
    """
    epoch = int(epoch)
    if epoch < 0 or epoch >= schedule.total_epochs:
        raise ValueError(
            f"epoch must lie in [0, {schedule.total_epochs}), got {epoch}"
        )
    d = schedule.denominator
    if d == 0:
        # Single epoch under the minus-one convention: the ramp has no width,
        # so the starting weight applies.
        return 1.0
    f = schedule.cyclical_factor
    scaled = f * epoch
    if scaled <= d:
        value = 1.0 - scaled / d
    elif f == 1.0:
        value = 0.0
    else:
        value = (scaled / d - 1.0) / (f - 1.0)
    return min(1.0, max(0.0, value))


def xi_table(schedule: CycleSchedule) -> list[float]:
    """xi at every epoch of the schedule, in epoch order."""
    return [xi(schedule, e) for e in range(schedule.total_epochs)]
