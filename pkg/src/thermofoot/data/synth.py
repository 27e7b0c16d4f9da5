"""Desk-scale synthetic plantar thermograms.

Control feet follow a butterfly pattern: angiosome means near published
control values with a cooled central arch. Diabetic feet carry the same base
pattern plus broad, randomly placed hot spots whose foreground mean equals
``separation`` degrees, and spatial texture whose strength grows with
``separation``. Texture strength also varies per subject in both groups.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

from .._seeding import derive_seed
from ..exceptions import ConfigError
from .angiosomes import AngiosomeLayout, region_masks, split_angiosomes
from .thermal import BACKGROUND, T_MAX, T_MIN, FootRecord, SubjectRecord, ThermalMap

# Control angiosome means (degrees C).
CONTROL_MEANS = {"LCA": 26.6, "LPA": 26.4, "MCA": 27.0, "MPA": 26.7}

GRID_SHAPE = (48, 24)
# Per-foot spread of each angiosome around its regional mean.
REGION_SD = 0.8


def foot_outline(shape=GRID_SHAPE):
    """Boolean mask of a stylised left plantar outline (toes at row 0)."""
    rows, cols = shape
    y = (np.arange(rows) + 0.5) / rows
    # half-width profile along the foot: wide forefoot, narrow arch, round heel
    half = 0.44 - 0.12 * np.exp(-((y - 0.62) / 0.12) ** 2)
    half = np.where(y < 0.12, half * np.sqrt(np.clip(1 - ((0.12 - y) / 0.12) ** 2, 0, 1)), half)
    half = np.where(y > 0.85, half * np.sqrt(np.clip(1 - ((y - 0.85) / 0.15) ** 2, 0, 1)), half)
    centre = 0.5 + 0.04 * (0.5 - y)
    x = (np.arange(cols) + 0.5) / cols
    return np.abs(x[None, :] - centre[:, None]) <= half[:, None]


def _arch_field(mask, side):
    rows, cols = mask.shape
    rr, cc = np.indices(mask.shape)
    c_arch = cols * (0.62 if side == "left" else 0.38)
    return np.exp(-(((rr - rows * 0.6) / (rows * 0.12)) ** 2 + ((cc - c_arch) / (cols * 0.22)) ** 2))


def _hot_spots(mask, rng):
    rows, cols = mask.shape
    rr, cc = np.indices(mask.shape)
    cand = np.argwhere(mask)
    field = np.zeros(mask.shape)
    for _ in range(int(rng.integers(1, 4))):
        r, c = cand[rng.integers(len(cand))]
        sigma = rng.uniform(3.0, 7.0)
        field += rng.uniform(0.5, 1.5) * np.exp(-((rr - r) ** 2 + (cc - c) ** 2) / (2 * sigma ** 2))
    field = field / field[mask].mean()
    return 0.85 + 0.15 * field


def _make_foot(rng, side, dm, separation, subject_offset, texture_sd, mask_left, layout):
    mask = mask_left if side == "left" else mask_left[:, ::-1]
    regions = region_masks(ThermalMap(np.where(mask, 30.0, BACKGROUND), side), layout)
    base = np.zeros(mask.shape)
    for name, m in regions.items():
        base[m] = CONTROL_MEANS[name] + rng.normal(0.0, REGION_SD)
    arch = _arch_field(mask, side)
    for m in regions.values():
        arch[m] -= arch[m].mean()
    temps = base - 1.2 * arch
    temps += subject_offset + rng.normal(0.0, 0.3)
    temps += texture_sd * gaussian_filter(rng.normal(0.0, 1.0, mask.shape), 2.0) * 3.0
    temps += rng.normal(0.0, 0.25, mask.shape)
    if dm and separation > 0:
        temps += separation * _hot_spots(mask, rng)
    temps = np.round(np.clip(temps, T_MIN, T_MAX), 2)
    grid = np.where(mask, temps, BACKGROUND)
    foot_map = ThermalMap(grid, side)
    return FootRecord(foot_map, split_angiosomes(foot_map, layout), "")


def synthesize_dataset(n_cg, n_dm, separation=3.0, seed=0, shape=GRID_SHAPE,
                       layout=AngiosomeLayout()):
    """Generate ``n_cg`` control and ``n_dm`` diabetic subjects with two feet each.

    The output is a pure function of the arguments.
    """
    if int(n_cg) < 1 or int(n_dm) < 1:
        raise ConfigError("n_cg and n_dm must both be >= 1")
    if separation < 0:
        raise ConfigError("separation must be >= 0")
    rng = np.random.default_rng(derive_seed(seed, "synth"))
    mask_left = foot_outline(shape)
    subjects = []
    for group, n in (("CG", int(n_cg)), ("DM", int(n_dm))):
        dm = group == "DM"
        for i in range(n):
            sid = f"{group}{i + 1:03d}"
            if dm:
                age = int(np.clip(round(rng.normal(56.0, 10.6)), 23, 84))
                gender = "male" if rng.random() < 0.28 else "female"
                offset = rng.normal(0.0, 1.6)
                texture = rng.uniform(0.3, 1.0) + 0.1 * separation
            else:
                age = int(np.clip(round(rng.normal(28.0, 8.0)), 21, 52))
                gender = "male" if rng.random() < 0.64 else "female"
                offset = rng.normal(0.0, 1.0)
                texture = rng.uniform(0.3, 1.0)
            feet = []
            for side in ("left", "right"):
                foot = _make_foot(rng, side, dm, separation, offset, texture, mask_left, layout)
                feet.append(FootRecord(foot.foot_map, foot.angiosomes, sid))
            subjects.append(SubjectRecord(subject_id=sid, age=age, gender=gender,
                                          group_label=group, feet=tuple(feet)))
    return subjects
