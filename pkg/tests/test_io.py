"""Tests for trace ingestion and output writers."""

import json

import numpy as np
import pytest

from spin_photon_toolkit.errors import DomainError, TraceParseError
from spin_photon_toolkit.io import (
    OutputLayout,
    load_trace,
    read_grid_csv,
    to_jsonable,
    write_grid_csv,
    write_report,
    write_sweep,
)
from spin_photon_toolkit.models import AxisKind, Report, ReportBody, ReportMeta, SweepGrid
from spin_photon_toolkit.models.protocol import GRID_CORNER_LABEL


@pytest.fixture
def write(tmp_path):
    def _write(text, name="trace.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


class TestLoadTrace:
    """Tests for load_trace."""

    def test_header_tags_axis(self, write):
        trace = load_trace(write("t_ns,counts\n0.0,5\n0.1,9\n0.2,20\n"))
        assert trace.axis is AxisKind.TIME_NS
        np.testing.assert_array_equal(trace.y, [5, 9, 20])

    def test_two_columns_default_poisson_sigma(self, write):
        trace = load_trace(write("619.0 0.5\n619.1 16\n619.2 0.9\n"))
        assert trace.axis is AxisKind.WAVELENGTH_NM
        np.testing.assert_allclose(trace.sigma, [1.0, 4.0, 1.0])

    def test_three_columns(self, write):
        trace = load_trace(write("x;y;s\n1;2;0.1\n2;3;0.2\n"), axis="detuning_MHz")
        assert trace.axis is AxisKind.DETUNING_MHZ
        np.testing.assert_allclose(trace.sigma, [0.1, 0.2])

    def test_comments_and_blank_lines(self, write):
        trace = load_trace(write("# scan 4\n\n1\t2\n# mid comment\n2\t3\n"))
        assert len(trace) == 2

    def test_axis_hint_overrides_header(self, write):
        trace = load_trace(write("t_ns,y\n0,1\n1,2\n"), axis=AxisKind.DELAY_NS)
        assert trace.axis is AxisKind.DELAY_NS

    def test_non_increasing_names_line(self, write):
        path = write("x,y\n1,1\n2,1\n# note\n1.5,1\n")
        with pytest.raises(TraceParseError) as excinfo:
            load_trace(path)
        assert excinfo.value.line == 5
        assert "non-increasing" in str(excinfo.value)

    def test_duplicate_names_line(self, write):
        with pytest.raises(TraceParseError, match="duplicate") as excinfo:
            load_trace(write("1,1\n2,1\n2,3\n"))
        assert excinfo.value.line == 3

    def test_allow_unsorted(self, write):
        trace = load_trace(write("3,30\n1,10\n2,20\n"), allow_unsorted=True)
        np.testing.assert_array_equal(trace.x, [1, 2, 3])
        np.testing.assert_array_equal(trace.y, [10, 20, 30])

    def test_allow_unsorted_still_rejects_duplicates(self, write):
        with pytest.raises(TraceParseError, match="duplicate"):
            load_trace(write("3,30\n1,10\n3,20\n"), allow_unsorted=True)

    def test_non_finite_value(self, write):
        with pytest.raises(TraceParseError) as excinfo:
            load_trace(write("1,1\n2,nan\n"))
        assert excinfo.value.line == 2

    def test_wrong_column_count(self, write):
        with pytest.raises(TraceParseError, match="2 or 3 columns"):
            load_trace(write("1,2,3,4\n"))

    def test_inconsistent_columns(self, write):
        with pytest.raises(TraceParseError) as excinfo:
            load_trace(write("1,2,0.1\n2,3\n"))
        assert excinfo.value.line == 2

    def test_non_positive_sigma(self, write):
        with pytest.raises(TraceParseError, match="sigma"):
            load_trace(write("1,2,0.1\n2,3,0\n"))

    def test_empty_file(self, write):
        with pytest.raises(TraceParseError, match="no data"):
            load_trace(write("# nothing\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(TraceParseError, match="not found"):
            load_trace(tmp_path / "absent.csv")

    def test_parse_error_is_domain_error(self, write):
        with pytest.raises(DomainError):
            load_trace(write("1,a\n"))


class TestOutputLayout:
    """Tests for OutputLayout."""

    def test_creates_directory(self, tmp_path):
        layout = OutputLayout(tmp_path / "nested" / "out")
        assert layout.out_dir.is_dir()

    @pytest.mark.parametrize("name", ["../escape.json", "a/b.csv", "", "..", ".hidden/x"])
    def test_rejects_unsafe_names(self, tmp_path, name):
        layout = OutputLayout(tmp_path)
        with pytest.raises(DomainError):
            layout.path(name)

    def test_record_tracks_artifacts_once(self, tmp_path):
        layout = OutputLayout(tmp_path)
        layout.record(OutputLayout.FIDELITY)
        layout.record(OutputLayout.FIDELITY)
        assert layout.written == ["fidelity.csv"]


def make_grid():
    return SweepGrid(
        kappa_ratios=np.array([0.001, 0.1, 1.0]),
        gamma_star_MHz=np.array([0.01, 1000.0]),
        fidelity=np.array([[0.5, 0.6, 0.99], [0.5, 0.55, 0.7]]),
        success_probability=np.array([[1e-7, 1e-5, 2e-4], [1e-7, 2e-6, 1e-4]]),
    )


class TestGridCsv:
    """Tests for sweep CSV files."""

    def test_layout(self, tmp_path):
        fidelity, psucc = write_sweep(make_grid(), OutputLayout(tmp_path))
        lines = fidelity.read_text().splitlines()
        assert lines[0] == f"{GRID_CORNER_LABEL},0.001,0.1,1"
        assert lines[1] == "0.01,0.5,0.6,0.99"
        assert lines[2].startswith("1000,")
        assert psucc.name == "psucc.csv"

    def test_read_back(self, tmp_path):
        grid = make_grid()
        path = write_grid_csv(grid.to_frames()[1], tmp_path / "p.csv")
        frame = read_grid_csv(path)
        assert list(frame.columns) == [0.001, 0.1, 1.0]
        np.testing.assert_allclose(frame.to_numpy(), grid.success_probability, rtol=1e-9)

    def test_optimal_locus(self):
        grid = make_grid()
        np.testing.assert_array_equal(grid.optimal_locus, [1.0, 1.0])
        assert grid.cell(0.09, 900.0) == (0.55, 2e-6)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            SweepGrid(np.array([0.1, 1.0]), np.array([1.0]), np.zeros((2, 2)), np.zeros((1, 2)))


class TestReport:
    """Tests for the JSON report."""

    def test_to_jsonable(self):
        data = to_jsonable({"a": np.float64(1.5), "b": np.arange(3), "c": 1 + 2j, "d": AxisKind.TIME_NS})
        assert data == {"a": 1.5, "b": [0, 1, 2], "c": {"real": 1.0, "imag": 2.0}, "d": "time_ns"}

    def test_non_finite_become_null(self):
        data = to_jsonable({"loss": float("inf"), "sigma": np.float64("nan"), "r": complex(np.nan, 1.0)})
        assert data == {"loss": None, "sigma": None, "r": {"real": None, "imag": 1.0}}
        assert json.loads(json.dumps(data, allow_nan=False))["loss"] is None

    def test_write_report(self, tmp_path):
        layout = OutputLayout(tmp_path)
        layout.record(OutputLayout.FIDELITY)
        report = Report(
            deterministic=ReportBody(
                command="sweep",
                argv=["sweep", "--preset", "paper-fig5"],
                inputs={"preset": "paper-fig5"},
                outputs={"fidelity_max_dimless": 0.99},
                tool_version="0.1.0",
            ),
            meta=ReportMeta(generated_at="2024-01-01T00:00:00+00:00"),
        )
        path = write_report(report, layout)
        data = json.loads(path.read_text())
        assert data["meta"]["artifacts"] == ["fidelity.csv", "report.json"]
        assert data["deterministic"]["outputs"]["fidelity_max_dimless"] == 0.99
        assert data["meta"]["generated_at"] == "2024-01-01T00:00:00+00:00"
        assert "generated_at" not in report.deterministic_json()
