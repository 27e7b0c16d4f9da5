"""Geometric angiosome split used when no per-angiosome grids are supplied."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import SplitError, ValidationError
from .thermal import BACKGROUND, AngiosomeSet, ThermalMap


@dataclass(frozen=True)
class AngiosomeLayout:
    """Proportional layout of the four plantar angiosomes.

    ``heel_fraction`` is the share of the foreground bounding-box height that
    forms the heel band (calcaneal angiosomes); ``medial_fraction`` is the
    share of the bounding-box width on the medial side. Row 0 is the toe end.
    In the stored image the medial edge of a left foot is the right-hand
    column edge and the medial edge of a right foot the left-hand edge.
    """

    heel_fraction: float = 0.33
    medial_fraction: float = 0.5

    def __post_init__(self):
        for name in ("heel_fraction", "medial_fraction"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}")


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def region_masks(foot, layout=AngiosomeLayout()):
    """Boolean masks ``{name: mask}`` for MPA, LPA, MCA and LCA."""
    mask = foot.mask
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    n_heel = _round_half_up((r1 - r0) * layout.heel_fraction)
    n_medial = _round_half_up((c1 - c0) * layout.medial_fraction)

    rr, cc = np.indices(mask.shape)
    heel = rr >= r1 - n_heel
    if foot.foot_side == "left":
        medial = cc >= c1 - n_medial
    else:
        medial = cc < c0 + n_medial
    regions = {
        "MPA": mask & ~heel & medial,
        "LPA": mask & ~heel & ~medial,
        "MCA": mask & heel & medial,
        "LCA": mask & heel & ~medial,
    }
    empty = [name for name, m in regions.items() if not m.any()]
    if empty:
        raise SplitError(f"foreground too small to split: empty region(s) {', '.join(empty)}")
    return regions


def split_angiosomes(foot, layout=AngiosomeLayout()):
    """Split a foot map into its four angiosome maps.

    Each returned map keeps the parent's shape with every cell outside the
    region set to background.
    """
    maps = {}
    for name, m in region_masks(foot, layout).items():
        maps[name.lower()] = ThermalMap(np.where(m, foot.temps, BACKGROUND), foot.foot_side)
    return AngiosomeSet(**maps)
