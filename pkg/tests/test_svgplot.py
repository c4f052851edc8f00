import pytest

from groupnets.experiments import MetricsRecord, SummaryRow
from groupnets.svgplot import MODALITY_COLORS, plot_metric, render_line_chart


def summaries():
    rows = []
    for modality, base in (("bridge", 5.0), ("edge_bundle", 6.0),
                           ("comembership", 7.0), ("liaison", 4.0)):
        for n in (100, 200, 300):
            rows.append(SummaryRow(
                modality=modality, n=n, metric="avg_degree",
                mean=base + n / 100.0, std_error=0.1, ci95=0.196, count=30,
            ))
    return rows


def test_render_contains_all_series():
    svg = render_line_chart(summaries(), "avg_degree")
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 4
    assert svg.count("<polygon") == 4  # CI bands
    for modality, color in MODALITY_COLORS.items():
        assert color in svg
        assert f">{modality}</text>" in svg
    assert "network size" in svg
    assert "avg_degree" in svg


def test_render_unknown_metric():
    with pytest.raises(ValueError):
        render_line_chart(summaries(), "nope")


def test_render_without_ci_bands():
    rows = [
        SummaryRow("bridge", 100, "rho2", 0.9, None, None, 1),
        SummaryRow("bridge", 200, "rho2", 0.95, None, None, 1),
    ]
    svg = render_line_chart(rows, "rho2")
    assert svg.count("<polyline") == 1
    assert svg.count("<polygon") == 0


def test_plot_metric_writes_file(tmp_path):
    records = [
        MetricsRecord(modality=m, n_requested=n, seed=i, avg_degree=d + i)
        for m, d in (("bridge", 5.0), ("liaison", 4.0))
        for n in (50, 100)
        for i in range(3)
    ]
    out = tmp_path / "chart.svg"
    plot_metric(records, "avg_degree", out)
    text = out.read_text()
    assert text.startswith("<svg")
    assert text.endswith("</svg>\n")


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    records = [
        MetricsRecord(modality="bridge", n_requested=n, seed=i, avg_degree=3.0 + i)
        for n in (50, 100) for i in range(2)
    ]
    plot_metric(records, "avg_degree", a)
    plot_metric(records, "avg_degree", b)
    assert a.read_bytes() == b.read_bytes()


def test_plot_spec_validation_and_plot_file(tmp_path):
    from groupnets.experiments import SweepConfig, run_sweep, write_records_csv
    from groupnets.svgplot import PlotSpec, plot_file

    with pytest.raises(ValueError):
        PlotSpec(metric="nope", input_path="x", output_path="y")
    runs = tmp_path / "runs.csv"
    write_records_csv(run_sweep(SweepConfig(sizes=(20,), replications=2)), runs)
    out = tmp_path / "c.svg"
    plot_file(PlotSpec(metric="clustering", input_path=str(runs), output_path=str(out)))
    assert out.read_text().startswith("<svg")
