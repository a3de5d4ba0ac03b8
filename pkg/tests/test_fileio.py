import json

import numpy as np
import pytest

from topogroup import (
    EmptyInputError,
    KernelSpec,
    OptimConfig,
    RaggedDimensionsError,
    new_cloud,
    preset_loss,
    run_optimization,
)
from topogroup.fileio import (
    diagram_records,
    labels_path_for,
    read_labels,
    read_points_csv,
    read_trajectory,
    validate_trajectory,
    write_diagram,
    write_labels,
    write_points_csv,
    write_summary,
    write_trajectory,
)
from topogroup.filtration import filtration_from_distances
from topogroup.persistence import compute_persistence
from topogroup.cloud import pairwise_distances


class TestPointsCsv:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        pts = rng.standard_normal((40, 3)) * np.pi
        p = tmp_path / "pts.csv"
        write_points_csv(p, pts)
        back = read_points_csv(p)
        assert back.dtype == np.float64
        assert np.array_equal(back, pts)  # every bit survives %.17g

    def test_awkward_values_round_trip(self, tmp_path):
        pts = np.array([[1e-300, -1e300], [0.1 + 0.2, np.nextafter(1.0, 2.0)]])
        p = tmp_path / "pts.csv"
        write_points_csv(p, pts)
        assert np.array_equal(read_points_csv(p), pts)

    def test_header_row_skipped(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("x,y\n1.0,2.0\n3.0,4.0\n")
        assert np.array_equal(read_points_csv(p), [[1.0, 2.0], [3.0, 4.0]])

    def test_no_header_required(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("1.0,2.0\n")
        assert np.array_equal(read_points_csv(p), [[1.0, 2.0]])

    def test_empty_file(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("")
        with pytest.raises(EmptyInputError):
            read_points_csv(p)

    def test_header_only_is_empty(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("x,y\n")
        with pytest.raises(EmptyInputError):
            read_points_csv(p)

    def test_ragged_rows(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("1,2\n3,4,5\n")
        with pytest.raises(RaggedDimensionsError):
            read_points_csv(p)

    def test_garbage_mid_file_names_line(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("1,2\nfoo,bar\n")
        with pytest.raises(ValueError, match="line 2"):
            read_points_csv(p)

    def test_blank_lines_ignored(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("1,2\n\n3,4\n")
        assert read_points_csv(p).shape == (2, 2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_points_csv(tmp_path / "nope.csv")


class TestLabels:
    def test_sibling_path(self):
        assert str(labels_path_for("d/pts.csv")).endswith("d/pts.labels.csv")

    def test_round_trip(self, tmp_path):
        p = tmp_path / "l.csv"
        write_labels(p, ["A", "B", "A"])
        assert read_labels(p) == ["A", "B", "A"]


class TestTrajectory:
    @pytest.fixture()
    def trajectory(self, rng):
        cloud = new_cloud(rng.standard_normal((8, 2)))
        cfg = OptimConfig(
            loss=preset_loss("rho0"),
            lam=0.5,
            kernel=KernelSpec("gaussian", 1.0),
            steps=6,
            snapshot_interval=3,
            max_dim=0,
        )
        _, traj = run_optimization(cloud, cfg)
        return traj

    def test_round_trip(self, tmp_path, trajectory):
        p = tmp_path / "t.jsonl"
        write_trajectory(p, trajectory)
        back = read_trajectory(p)
        assert len(back) == len(trajectory.records) == 7
        for d, rec in zip(back, trajectory.records):
            assert d["step"] == rec.step
            assert d["loss"] == rec.loss  # json repr round-trips doubles
            assert d["rho"] == rec.rho and d["tau"] == rec.tau
            if rec.points is None:
                assert "points" not in d
            else:
                assert np.array_equal(d["points"], rec.points)

    def test_validate_accepts_real_run(self, tmp_path, trajectory):
        p = tmp_path / "t.jsonl"
        write_trajectory(p, trajectory)
        validate_trajectory(read_trajectory(p), lam=0.5)

    def test_validate_rejects_wrong_lam(self, tmp_path, trajectory):
        p = tmp_path / "t.jsonl"
        write_trajectory(p, trajectory)
        with pytest.raises(ValueError, match="loss"):
            validate_trajectory(read_trajectory(p), lam=0.25)

    def test_validate_rejects_edited_record(self):
        recs = [{"step": 0, "loss": 1.0, "rho": 1.0, "tau": 0.125}]
        validate_trajectory(recs, lam=0.0)
        recs[0]["loss"] = 1.0 + 1e-9
        with pytest.raises(ValueError, match="step 0"):
            validate_trajectory(recs, lam=0.0)


class TestDiagramRecords:
    def test_unit_square(self, tmp_path):
        cloud = new_cloud([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        d = pairwise_distances(cloud)
        diagrams = compute_persistence(filtration_from_distances(d, max_dim=1))
        recs = diagram_records(diagrams)
        dims = sorted(r["dimension"] for r in recs)
        assert dims == [0, 0, 0, 0, 1]
        essentials = [r for r in recs if r["death"] == "inf"]
        assert len(essentials) == 1 and essentials[0]["death_simplex"] is None
        loop = next(r for r in recs if r["dimension"] == 1)
        assert loop["birth"] == 1.0
        assert loop["death"] == pytest.approx(np.sqrt(2.0), rel=1e-15)
        assert len(loop["birth_simplex"]) == 2 and len(loop["death_simplex"]) == 3

        p = tmp_path / "d.jsonl"
        write_diagram(p, diagrams)
        lines = [json.loads(s) for s in p.read_text().splitlines()]
        assert lines == recs


class TestSummary:
    def test_sorted_and_indented(self, tmp_path):
        p = tmp_path / "s.json"
        write_summary(p, {"b": 1, "a": {"z": 2.5}})
        text = p.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.startswith("{\n  ")
        assert json.loads(text) == {"b": 1, "a": {"z": 2.5}}
