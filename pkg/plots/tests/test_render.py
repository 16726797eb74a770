import pytest

from semcom_plots.cli import main
from semcom_plots.render import (
    FIGURES,
    EmptyDataset,
    MissingColumn,
    PlotError,
    default_spec,
    render,
    render_all,
)

HEADERS = {
    "fig5": "attrs,eff_traditional,eff_semantic,eff_parity,seed,n_messages",
    "fig6": "snr_db,ser_traditional,ser_semantic,ser_parity,seed,n_messages",
    "fig7": ("snr_db,semeff_traditional,semeff_semantic,semeff_parity,"
             "seed,n_messages"),
    "fig8": "attrs,len_semantic_kb,len_traditional,len_semantic,seed,n_messages",
    "fig9": ("attrs,len_traditional_low,len_semantic_low,"
             "len_traditional_high,len_semantic_high,seed,n_messages"),
    "fig10": "zipf_a,skb_k2,skb_k3,skb_k4,seed,n_messages",
}


def write_results(results):
    """Small but complete results directory in the harness CSV format."""
    results.mkdir(exist_ok=True)
    for figure_id, header in HEADERS.items():
        n = len(header.split(","))
        lines = [f'# config {{"experiment": "{figure_id}"}}', header]
        for i, x in enumerate((1.0, 2.0, 3.0)):
            for seed in (7, 8):  # two seeds per x exercise averaging
                cells = [x] + [0.1 * (i + 1) * (j + 1)
                               for j in range(n - 3)] + [seed, 0]
                lines.append(",".join(str(c) for c in cells))
        (results / f"{figure_id}.csv").write_text("\n".join(lines) + "\n")


def test_render_all_produces_six_vector_images(tmp_path):
    results = tmp_path / "results"
    out = tmp_path / "figures"
    write_results(results)
    written = render_all(str(results), str(out))
    assert len(written) == 6
    for figure_id, params in FIGURES.items():
        path = out / f"{figure_id}.svg"
        assert path.exists()
        svg = path.read_text()
        assert svg.lstrip().startswith("<?xml")
        assert params["x_label"] in svg
        assert params["y_label"] in svg
        for column in params["series"]:  # legend labels match columns
            assert column in svg


def test_missing_column_fails_loudly(tmp_path):
    csv = tmp_path / "fig5.csv"
    csv.write_text("attrs,eff_traditional,seed,n_messages\n2,0.9,1,0\n")
    with pytest.raises(MissingColumn, match="eff_semantic"):
        render(default_spec("fig5", str(csv), str(tmp_path / "fig5.svg")))
    assert main(["render", "--figure", "fig5", "--csv", str(csv),
                 "--out", str(tmp_path / "a.svg")]) == 1


def test_empty_dataset_writes_nothing(tmp_path):
    csv = tmp_path / "fig10.csv"
    csv.write_text(HEADERS["fig10"] + "\n")
    out = tmp_path / "fig10.svg"
    with pytest.raises(EmptyDataset):
        render(default_spec("fig10", str(csv), str(out)))
    assert not out.exists()


def test_missing_results_file_fails(tmp_path):
    with pytest.raises(PlotError, match="fig5"):
        render_all(str(tmp_path), str(tmp_path / "out"))


def test_rerender_is_byte_stable_and_input_untouched(tmp_path):
    results = tmp_path / "results"
    write_results(results)
    before = (results / "fig6.csv").read_bytes()
    out = tmp_path / "out"
    spec = default_spec("fig6", str(results / "fig6.csv"),
                        str(out / "fig6.svg"))
    render(spec)
    first = (out / "fig6.svg").read_bytes()
    render(spec)
    assert (out / "fig6.svg").read_bytes() == first
    assert (results / "fig6.csv").read_bytes() == before


def test_fig6_uses_log_scale(tmp_path):
    assert FIGURES["fig6"]["log_y"] is True
    assert "log_y" not in FIGURES["fig5"]


def test_cli_render_all(tmp_path):
    results = tmp_path / "results"
    write_results(results)
    out = tmp_path / "out"
    assert main(["render-all", "--results", str(results),
                 "--out", str(out)]) == 0
    assert len(list(out.glob("*.svg"))) == 6
    assert main(["render-all", "--results", str(tmp_path / "nowhere"),
                 "--out", str(out)]) == 1


def test_cli_single_figure_overrides(tmp_path):
    results = tmp_path / "results"
    write_results(results)
    out = tmp_path / "custom.svg"
    assert main(["render", "--figure", "fig10",
                 "--csv", str(results / "fig10.csv"),
                 "--out", str(out),
                 "--series", "skb_k2,skb_k3",
                 "--y-label", "Gain"]) == 0
    svg = out.read_text()
    assert "Gain" in svg
    assert "skb_k4" not in svg
