"""Dataset model: temperature maps, angiosomes, feet and subjects."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exceptions import ValidationError

BACKGROUND = 0.0
T_MIN = 15.0
T_MAX = 45.0

FOOT_SIDES = ("left", "right")
ANGIOSOMES = ("MPA", "LPA", "MCA", "LCA")
GENDERS = ("male", "female")
GROUPS = ("CG", "DM")


class ThermalMap:
    """A rectangular grid of plantar temperatures in degrees Celsius.

    Cells equal to exactly 0.0 are background. The grid is copied on
    construction and made read-only.
    """

    __slots__ = ("_temps", "foot_side")

    def __init__(self, temps, foot_side, source=None):
        arr = np.array(temps, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"temperature grid must be a non-empty 2-D array, got shape {arr.shape}")
        if foot_side not in FOOT_SIDES:
            raise ValidationError(f"foot_side must be one of {FOOT_SIDES}, got {foot_side!r}")
        where = f" in {source}" if source else ""
        if not np.all(np.isfinite(arr)):
            r, c = np.argwhere(~np.isfinite(arr))[0]
            raise ValidationError(f"non-finite temperature at row {r}, col {c}{where}",
                                  cell=(int(r), int(c)))
        fg = arr != BACKGROUND
        bad = fg & ((arr < T_MIN) | (arr > T_MAX))
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise ValidationError(
                f"temperature {arr[r, c]} outside [{T_MIN}, {T_MAX}] at row {r}, col {c}{where}",
                cell=(int(r), int(c)))
        if not fg.any():
            raise ValidationError(f"temperature map has no foreground cells{where}")
        arr.setflags(write=False)
        self._temps = arr
        self.foot_side = foot_side

    @property
    def temps(self):
        return self._temps

    @property
    def rows(self):
        return self._temps.shape[0]

    @property
    def cols(self):
        return self._temps.shape[1]

    @property
    def cells(self):
        """Row-major flat view of the grid."""
        return self._temps.ravel()

    @property
    def mask(self):
        return self._temps != BACKGROUND

    @property
    def foreground(self):
        """Non-background temperatures in row-major order."""
        return self._temps[self._temps != BACKGROUND]

    @property
    def n_foreground(self):
        return int(np.count_nonzero(self._temps != BACKGROUND))

    def mirrored(self):
        side = "right" if self.foot_side == "left" else "left"
        return ThermalMap(self._temps[:, ::-1], side)

    def __eq__(self, other):
        if not isinstance(other, ThermalMap):
            return NotImplemented
        return (self.foot_side == other.foot_side
                and self._temps.shape == other._temps.shape
                and np.array_equal(self._temps, other._temps))

    def __hash__(self):
        return hash((self.foot_side, self._temps.shape, self._temps.tobytes()))

    def __repr__(self):
        return f"ThermalMap({self.rows}x{self.cols}, {self.foot_side}, n_fg={self.n_foreground})"


@dataclass(frozen=True)
class AngiosomeSet:
    mpa: ThermalMap
    lpa: ThermalMap
    mca: ThermalMap
    lca: ThermalMap

    def __post_init__(self):
        sides = {m.foot_side for m in self.as_dict().values()}
        if len(sides) != 1:
            raise ValidationError(f"angiosome maps disagree on foot side: {sorted(sides)}")

    @property
    def foot_side(self):
        return self.mpa.foot_side

    def as_dict(self):
        return {"MPA": self.mpa, "LPA": self.lpa, "MCA": self.mca, "LCA": self.lca}

    def __getitem__(self, name):
        return self.as_dict()[name.upper()]


@dataclass(frozen=True)
class FootRecord:
    foot_map: ThermalMap
    angiosomes: AngiosomeSet
    subject_id: str

    def __post_init__(self):
        if self.angiosomes.foot_side != self.foot_map.foot_side:
            raise ValidationError(
                f"subject {self.subject_id}: angiosomes are {self.angiosomes.foot_side} "
                f"but foot map is {self.foot_map.foot_side}")

    @property
    def foot_side(self):
        return self.foot_map.foot_side


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    age: int
    gender: str
    group_label: str
    feet: tuple
    height: Optional[float] = None
    weight: Optional[float] = None
    flags: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.age, (int, np.integer)) or isinstance(self.age, bool) \
                or not 1 <= self.age <= 120:
            raise ValidationError(f"subject {self.subject_id}: age must be an integer in [1, 120], got {self.age!r}")
        if self.gender not in GENDERS:
            raise ValidationError(f"subject {self.subject_id}: gender must be one of {GENDERS}, got {self.gender!r}")
        if self.group_label not in GROUPS:
            raise ValidationError(f"subject {self.subject_id}: group must be one of {GROUPS}, got {self.group_label!r}")
        feet = tuple(self.feet)
        if not 1 <= len(feet) <= 2:
            raise ValidationError(f"subject {self.subject_id}: expected one or two feet, got {len(feet)}")
        sides = [f.foot_side for f in feet]
        if len(set(sides)) != len(sides):
            raise ValidationError(f"subject {self.subject_id}: duplicate foot side")
        feet = tuple(sorted(feet, key=lambda f: FOOT_SIDES.index(f.foot_side)))
        object.__setattr__(self, "feet", feet)
        flags = tuple(self.flags)
        if len(feet) == 1 and "single_foot" not in flags:
            flags = flags + ("single_foot",)
        object.__setattr__(self, "flags", flags)

    @property
    def single_foot(self):
        return len(self.feet) == 1

    def foot(self, side):
        for f in self.feet:
            if f.foot_side == side:
                return f
        return None

    @property
    def label(self):
        """1 for the diabetic group, 0 for controls."""
        return int(self.group_label == "DM")
