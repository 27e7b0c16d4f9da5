import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermofoot.data import (AngiosomeLayout, FootRecord, SubjectRecord, ThermalMap,
                             load_dataset, read_grid, region_masks, save_dataset,
                             split_angiosomes, synthesize_dataset, write_grid)
from thermofoot.exceptions import (GridParseError, LoadError, SplitError, ValidationError,
                                   EmptyMapError)
from thermofoot.data.synth import foot_outline
from thermofoot.features import build_feature_table
from thermofoot.stats import rank_sum_test


def _foot(values, side="left"):
    m = ThermalMap(values, side)
    return FootRecord(m, split_angiosomes(m), "S1")


class TestThermalMap:
    def test_rejects_out_of_range_cell(self):
        grid = np.full((4, 4), 30.0)
        grid[1, 2] = 99.0
        with pytest.raises(ValidationError) as info:
            ThermalMap(grid, "left")
        assert info.value.cell == (1, 2)

    def test_rejects_all_background(self):
        with pytest.raises((ValidationError, EmptyMapError)):
            ThermalMap(np.zeros((3, 3)), "left")

    def test_rejects_nan_and_bad_side(self):
        grid = np.full((3, 3), 30.0)
        grid[0, 0] = np.nan
        with pytest.raises(ValidationError):
            ThermalMap(grid, "left")
        with pytest.raises(ValidationError):
            ThermalMap(np.full((3, 3), 30.0), "middle")

    def test_cells_row_major_and_readonly(self):
        grid = np.arange(6, dtype=float).reshape(2, 3) + 20
        m = ThermalMap(grid, "right")
        assert m.rows == 2 and m.cols == 3
        assert list(m.cells) == [20, 21, 22, 23, 24, 25]
        with pytest.raises(ValueError):
            m.temps[0, 0] = 30.0

    def test_background_excluded(self):
        grid = np.array([[0.0, 30.0], [31.0, 0.0]])
        m = ThermalMap(grid, "left")
        assert m.n_foreground == 2
        assert sorted(m.foreground) == [30.0, 31.0]


class TestAngiosomes:
    def test_uniform_field_means(self):
        foot = _foot(np.full((10, 10), 30.0))
        for name, region in foot.angiosomes.as_dict().items():
            assert region.foreground.mean() == pytest.approx(30.0)

    def test_rectangular_area_fractions(self):
        m = ThermalMap(np.full((30, 10), 30.0), "left")
        masks = region_masks(m, AngiosomeLayout(heel_fraction=0.33))
        heel = masks["MCA"].sum() + masks["LCA"].sum()
        assert abs(heel / 10 - 0.33 * 30) <= 1
        assert masks["MPA"].sum() == masks["LPA"].sum()

    def test_mirror_symmetry(self):
        mask = foot_outline()
        grid = np.where(mask, 30.0, 0.0)
        left = region_masks(ThermalMap(grid, "left"))
        right = region_masks(ThermalMap(grid[:, ::-1], "right"))
        for name in left:
            assert np.array_equal(left[name][:, ::-1], right[name])

    def test_medial_side_depends_on_foot(self):
        m = ThermalMap(np.full((10, 10), 30.0), "left")
        assert region_masks(m)["MPA"][:, -1].any()
        m = ThermalMap(np.full((10, 10), 30.0), "right")
        assert region_masks(m)["MPA"][:, 0].any()

    def test_too_small_to_split(self):
        with pytest.raises(SplitError):
            split_angiosomes(ThermalMap(np.full((1, 1), 30.0), "left"))

    @settings(max_examples=60, deadline=None)
    @given(rows=st.integers(4, 30), cols=st.integers(2, 20), h=st.floats(0.1, 0.9),
           side=st.sampled_from(["left", "right"]))
    def test_regions_partition_foreground(self, rows, cols, h, side):
        m = ThermalMap(np.full((rows, cols), 30.0), side)
        try:
            masks = region_masks(m, AngiosomeLayout(heel_fraction=h))
        except SplitError:
            return
        stack = np.stack(list(masks.values())).astype(int)
        assert stack.sum(axis=0).max() == 1
        assert np.array_equal(stack.sum(axis=0).astype(bool), m.mask)


class TestSubjectRecord:
    def test_single_foot_flag_and_order(self):
        right = _foot(np.full((10, 10), 30.0), "right")
        s = SubjectRecord("S1", 40, "male", "DM", (right,))
        assert s.single_foot and "single_foot" in s.flags
        left = _foot(np.full((10, 10), 30.0), "left")
        s2 = SubjectRecord("S2", 40, "female", "CG", (right, left))
        assert [f.foot_side for f in s2.feet] == ["left", "right"]
        assert s2.label == 0 and s.label == 1

    @pytest.mark.parametrize("kw", [{"age": 0}, {"age": 121}, {"gender": "x"},
                                    {"group_label": "XX"}])
    def test_field_validation(self, kw):
        foot = _foot(np.full((10, 10), 30.0))
        base = dict(subject_id="S", age=30, gender="male", group_label="CG", feet=(foot,))
        base.update(kw)
        with pytest.raises(ValidationError):
            SubjectRecord(**base)


class TestIO:
    def test_grid_roundtrip(self, tmp_path):
        grid = np.array([[0.0, 30.25], [31.125, 29.0]])
        write_grid(tmp_path / "g.csv", grid)
        assert np.array_equal(read_grid(tmp_path / "g.csv"), grid)

    def test_ragged_row_reports_line(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("30,30,30\n30,30\n")
        with pytest.raises(GridParseError) as info:
            read_grid(p)
        assert info.value.line == 2

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("30,30\n30,abc\n")
        with pytest.raises(GridParseError) as info:
            read_grid(p)
        assert info.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(LoadError) as info:
            read_grid(tmp_path / "nope.csv")
        assert "nope.csv" in str(info.value.path)

    def test_dataset_roundtrip(self, tmp_path, small_subjects):
        path = save_dataset(small_subjects[:3], tmp_path / "ds")
        loaded = load_dataset(path)
        assert len(loaded) == 3
        for a, b in zip(small_subjects[:3], loaded):
            assert a.subject_id == b.subject_id and a.age == b.age and a.gender == b.gender
            assert a.group_label == b.group_label
            for fa, fb in zip(a.feet, b.feet):
                assert fa.foot_map == fb.foot_map
                for name in ("MPA", "LPA", "MCA", "LCA"):
                    assert fa.angiosomes[name] == fb.angiosomes[name]

    def test_manifest_two_subjects_and_bad_cell(self, tmp_path):
        grid = np.full((10, 10), 30.0)
        for name in ("a_l", "a_r", "b_l", "b_r"):
            write_grid(tmp_path / f"{name}.csv", grid)
        entries = [{"subject_id": "A", "age": 30, "gender": "male", "group": "CG",
                    "left_foot": "a_l.csv", "right_foot": "a_r.csv"},
                   {"subject_id": "B", "age": 60, "gender": "female", "group": "DM",
                    "left_foot": "b_l.csv", "right_foot": "b_r.csv"}]
        (tmp_path / "m.json").write_text(json.dumps({"version": 1, "subjects": entries}))
        subjects = load_dataset(tmp_path / "m.json")
        assert len(subjects) == 2 and all(len(s.feet) == 2 for s in subjects)
        bad = grid.copy()
        bad[2, 3] = 99.0
        write_grid(tmp_path / "b_r.csv", bad)
        with pytest.raises(ValidationError) as info:
            load_dataset(tmp_path / "m.json")
        assert info.value.cell == (2, 3)

    def test_missing_foot_is_flagged(self, tmp_path):
        write_grid(tmp_path / "a_l.csv", np.full((10, 10), 30.0))
        entries = [{"subject_id": "A", "age": 30, "gender": "male", "group": "CG",
                    "left_foot": "a_l.csv"}]
        (tmp_path / "m.json").write_text(json.dumps(entries))
        (s,) = load_dataset(tmp_path / "m.json")
        assert s.single_foot and "single_foot" in s.flags

    def test_missing_referenced_file(self, tmp_path):
        entries = [{"subject_id": "A", "age": 30, "gender": "male", "group": "CG",
                    "left_foot": "gone.csv"}]
        (tmp_path / "m.json").write_text(json.dumps(entries))
        with pytest.raises(LoadError) as info:
            load_dataset(tmp_path / "m.json")
        assert "gone.csv" in str(info.value)

    def test_full_cohort_counts(self, tmp_path):
        subjects = synthesize_dataset(45, 122, separation=3.0, seed=1)
        loaded = load_dataset(save_dataset(subjects, tmp_path / "ds", write_angiosomes=False))
        groups = [s.group_label for s in loaded]
        assert len(loaded) == 167
        assert groups.count("CG") == 45 and groups.count("DM") == 122


class TestSynth:
    def test_deterministic(self):
        a = synthesize_dataset(3, 3, 3.0, seed=11)
        b = synthesize_dataset(3, 3, 3.0, seed=11)
        for sa, sb in zip(a, b):
            assert sa == sb or all(fa.foot_map == fb.foot_map for fa, fb in zip(sa.feet, sb.feet))
            assert (sa.age, sa.gender) == (sb.age, sb.gender)

    def _subject_means(self, sep, seed):
        table = build_feature_table(synthesize_dataset(50, 50, separation=sep, seed=seed))
        v = table.column("FullFoot_mean").reshape(-1, 2).mean(axis=1)
        y = table.y[::2]
        return v[y == 1], v[y == 0]

    def test_separation_gap(self):
        dm, cg = self._subject_means(3.0, seed=0)
        assert abs((dm.mean() - cg.mean()) - 3.0) <= 0.5

    def test_no_separation_indistinguishable(self):
        dm, cg = self._subject_means(0.0, seed=0)
        assert rank_sum_test(dm, cg)[1] > 0.01

    def test_control_mean_near_reference(self, small_table):
        v = small_table.column("FullFoot_mean")[small_table.y == 0]
        assert abs(v.mean() - 26.7) < 1.0
