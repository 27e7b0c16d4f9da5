"""Manifest and grid-file I/O.

A dataset is a UTF-8 JSON manifest plus one CSV grid per foot (and
optionally per angiosome). Grid CSVs hold one grid row per line with
dot-decimal degrees Celsius; ``0.0`` marks background.
"""

import csv
import json
import logging
import os

import numpy as np

from ..exceptions import GridParseError, LoadError, ValidationError
from .angiosomes import AngiosomeLayout, split_angiosomes
from .thermal import ANGIOSOMES, FOOT_SIDES, AngiosomeSet, FootRecord, SubjectRecord, ThermalMap

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1


def read_grid(path):
    """Parse a grid CSV into a 2-D float array."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            lines = list(csv.reader(fh))
    except OSError as exc:
        raise LoadError(f"cannot read grid file {path}: {exc.strerror}", path=str(path)) from exc
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        if not line or all(not cell.strip() for cell in line):
            continue
        try:
            values = [float(cell) for cell in line]
        except ValueError as exc:
            raise GridParseError(f"{path}: line {lineno}: non-numeric value ({exc})",
                                 path=str(path), line=lineno) from exc
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise GridParseError(
                f"{path}: line {lineno}: expected {width} values, got {len(values)}",
                path=str(path), line=lineno)
        rows.append(values)
    if not rows:
        raise GridParseError(f"{path}: grid file is empty", path=str(path), line=1)
    return np.array(rows, dtype=float)


def write_grid(path, temps):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(temps, dtype=float):
            writer.writerow([repr(float(v)) for v in row])


def _load_map(root, rel, side):
    path = os.path.join(root, rel)
    if not os.path.isfile(path):
        raise LoadError(f"missing grid file: {path}", path=path)
    grid = read_grid(path)
    return ThermalMap(grid, side, source=path)


def _entry_get(entry, key, index):
    if key not in entry:
        raise ValidationError(f"manifest entry {index} lacks required field {key!r}")
    return entry[key]


def _parse_subject(entry, index, root, layout):
    sid = str(_entry_get(entry, "subject_id", index))
    gender = str(_entry_get(entry, "gender", index)).strip().lower()
    gender = {"m": "male", "f": "female"}.get(gender, gender)
    group = str(_entry_get(entry, "group", index)).strip().upper()
    age = _entry_get(entry, "age", index)
    if isinstance(age, float) and age.is_integer():
        age = int(age)
    angio_paths = entry.get("angiosomes") or {}
    feet = []
    for side in FOOT_SIDES:
        rel = entry.get(f"{side}_foot")
        if not rel:
            continue
        foot_map = _load_map(root, rel, side)
        side_paths = angio_paths.get(side) or {}
        if side_paths:
            maps = {}
            for name in ANGIOSOMES:
                if name not in side_paths:
                    raise ValidationError(f"subject {sid}: {side} angiosome {name} path missing")
                amap = _load_map(root, side_paths[name], side)
                if amap.temps.shape != foot_map.temps.shape:
                    raise ValidationError(
                        f"subject {sid}: {side} {name} grid shape {amap.temps.shape} "
                        f"differs from foot grid {foot_map.temps.shape}")
                maps[name.lower()] = amap
            angiosomes = AngiosomeSet(**maps)
        else:
            angiosomes = split_angiosomes(foot_map, layout)
        feet.append(FootRecord(foot_map, angiosomes, sid))
    if not feet:
        raise ValidationError(f"subject {sid}: neither left_foot nor right_foot given")
    flags = ()
    if len(feet) == 1:
        logger.info("subject %s has a single foot", sid)
        flags = ("single_foot",)
    return SubjectRecord(subject_id=sid, age=age, gender=gender, group_label=group,
                         feet=tuple(feet), height=entry.get("height"),
                         weight=entry.get("weight"), flags=flags)


def load_dataset(manifest_path, layout=AngiosomeLayout()):
    """Load and validate every subject referenced by a manifest.

    Paths inside the manifest are resolved relative to the manifest's
    directory. The manifest is either ``{"version": 1, "subjects": [...]}``
    or a bare list of subject entries.
    """
    manifest_path = str(manifest_path)
    if not os.path.isfile(manifest_path):
        raise LoadError(f"missing manifest: {manifest_path}", path=manifest_path)
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GridParseError(f"{manifest_path}: line {exc.lineno}: invalid JSON ({exc.msg})",
                             path=manifest_path, line=exc.lineno) from exc
    entries = doc["subjects"] if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise ValidationError(f"{manifest_path}: 'subjects' must be a list")
    root = os.path.dirname(os.path.abspath(manifest_path))
    subjects = []
    seen = set()
    for index, entry in enumerate(entries):
        subject = _parse_subject(entry, index, root, layout)
        if subject.subject_id in seen:
            raise ValidationError(f"{manifest_path}: duplicate subject_id {subject.subject_id!r}")
        seen.add(subject.subject_id)
        subjects.append(subject)
    return subjects


def save_dataset(subjects, directory, write_angiosomes=True):
    """Write subjects to ``directory`` as grid CSVs plus ``manifest.json``.

    Returns the manifest path. Loading the result reproduces every field.
    """
    os.makedirs(os.path.join(directory, "grids"), exist_ok=True)
    entries = []
    for s in subjects:
        entry = {"subject_id": s.subject_id, "age": int(s.age), "gender": s.gender,
                 "group": s.group_label, "height": s.height, "weight": s.weight}
        angio = {}
        for foot in s.feet:
            side = foot.foot_side
            rel = f"grids/{s.subject_id}_{side}.csv"
            write_grid(os.path.join(directory, rel), foot.foot_map.temps)
            entry[f"{side}_foot"] = rel
            if write_angiosomes:
                angio[side] = {}
                for name, amap in foot.angiosomes.as_dict().items():
                    arel = f"grids/{s.subject_id}_{side}_{name}.csv"
                    write_grid(os.path.join(directory, arel), amap.temps)
                    angio[side][name] = arel
        if angio:
            entry["angiosomes"] = angio
        entries.append(entry)
    path = os.path.join(directory, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"version": MANIFEST_VERSION, "subjects": entries}, fh, indent=1)
        fh.write("\n")
    return path
