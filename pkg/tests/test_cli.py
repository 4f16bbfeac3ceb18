"""End-to-end checks of the command line interface.

Everything runs in process through ``main(argv)`` so exit codes and the
stdout/stderr contract are asserted directly, without subprocess overhead.
"""

import datetime

import numpy as np
import pytest

from comove.cli import (
    DEFAULT_SEED,
    PipelineConfig,
    UsageError,
    main,
    read_config_file,
)

START = datetime.date(2020, 1, 1)


def date_str(i):
    return str(START + datetime.timedelta(days=i))


def write_input(path, n=150, p=2, seed=0, offset=50.0):
    """CSV with AR(1) columns, strictly positive, one row per day."""
    rng = np.random.default_rng(seed)
    data = np.zeros((n, p))
    for k in range(p):
        e = rng.normal(size=n)
        for t in range(1, n):
            data[t, k] = 0.6 * data[t - 1, k] + e[t]
    data += offset
    names = [chr(ord("a") + k) for k in range(p)]
    with open(path, "w") as fh:
        fh.write("date," + ",".join(names) + "\n")
        for i in range(n):
            row = ",".join(format(v, ".12g") for v in data[i])
            fh.write(f"{date_str(i)},{row}\n")
    return names


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


# ---------------------------------------------------------------- usage


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 1
    assert "subcommand is required" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["transmogrify"])
    assert exc.value.code == 1


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["coherence", "--bogus-flag", "1"])
    assert exc.value.code == 1


def test_missing_input_flag_is_usage_error(tmp_path, capsys):
    assert main(["coherence", "--out-dir", str(tmp_path / "out")]) == 1
    assert "no input file" in capsys.readouterr().err


def test_missing_input_file_is_data_error(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code = main(["coherence", "--input", str(missing), "--out-dir", str(tmp_path / "out")])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_nonpositive_values_block_log_transform(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=60, offset=0.0)  # AR(1) around zero crosses it
    code = main(
        ["packet", "--input", str(src), "--log", "--out-dir", str(tmp_path / "out")]
    )
    assert code == 2
    assert "nonpositive" in capsys.readouterr().err


# ---------------------------------------------------------------- config


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment line\n"
        "\n"
        "horizon = 7\n"
        "log_transform = yes  # trailing comment\n"
        "scale_factors = 1.0, 2.5\n"
        "value_columns = a , b\n"
    )
    got = read_config_file(str(cfg))
    assert got == {
        "horizon": 7,
        "log_transform": True,
        "scale_factors": (1.0, 2.5),
        "value_columns": ("a", "b"),
    }


def test_config_unknown_key_names_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("horizon = 7\nfrobnicate = 3\n")
    with pytest.raises(UsageError, match=":2: unknown config key 'frobnicate'"):
        read_config_file(str(cfg))


def test_config_bad_integer(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("depth = four\n")
    with pytest.raises(UsageError, match="must be an integer"):
        read_config_file(str(cfg))


def test_config_unknown_key_via_main_exits_1(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frobnicate = 3\n")
    assert main(["packet", "--config", str(cfg)]) == 1
    assert "unknown config key" in capsys.readouterr().err


def test_flags_override_config_file(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=64)
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"input = {src}\nhorizon = 7\nseed = 42\n")
    code = main(
        ["packet", "--config", str(cfg), "--seed", "99", "--out-dir", str(tmp_path / "o")]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "config seed=99" in out  # flag wins
    assert "config horizon=7" in out  # file survives where no flag given


def test_default_seed_is_echoed(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=64)
    assert main(["packet", "--input", str(src), "--out-dir", str(tmp_path / "o")]) == 0
    assert f"config seed={DEFAULT_SEED}" in capsys.readouterr().out
    assert DEFAULT_SEED == 1729


def test_config_echo_is_sorted_and_complete(capsys):
    cfg = PipelineConfig(input="x.csv")
    lines = cfg.echo().splitlines()
    keys = [ln.split(" ", 1)[1].split("=", 1)[0] for ln in lines]
    assert keys == sorted(keys)
    assert all(ln.startswith("config ") for ln in lines)
    assert "config input=x.csv" in lines


# ---------------------------------------------------------------- coherence


@pytest.fixture
def coherence_out(tmp_path):
    src = tmp_path / "in.csv"
    write_input(src, n=96, p=3)
    out = tmp_path / "out"
    code = main(
        ["coherence", "--input", str(src), "--target", "b", "--out-dir", str(out)]
    )
    assert code == 0
    return out


def test_coherence_writes_target_grids(coherence_out):
    names = sorted(p.name for p in coherence_out.iterdir())
    assert names == [
        "mwc_b.csv",
        "phase_b_a.csv",
        "phase_b_c.csv",
        "pwc_b_a.csv",
        "pwc_b_c.csv",
    ]


def test_grid_file_structure(coherence_out):
    lines = read_lines(coherence_out / "mwc_b.csv")
    assert lines[0] == "scale,time_index,value,coi_flag"
    flags = set()
    for ln in lines[1:]:
        scale, t, value, flag = ln.split(",")
        assert flag in ("0", "1")
        flags.add(flag)
        v = float(value)
        assert 0.0 <= v <= 1.0 + 1e-9
        assert int(t) >= 0
    assert flags == {"0", "1"}  # both inside and outside the cone occur


def test_grid_floats_round_trip(coherence_out):
    for ln in read_lines(coherence_out / "pwc_b_a.csv")[1:]:
        scale, _, value, _ = ln.split(",")
        assert format(float(scale), ".17g") == scale
        assert format(float(value), ".17g") == value


def test_coherence_rejects_single_series(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=96, p=2)
    code = main(
        [
            "coherence",
            "--input",
            str(src),
            "--value-columns",
            "a",
            "--out-dir",
            str(tmp_path / "o"),
        ]
    )
    assert code == 2
    assert "at least two series" in capsys.readouterr().err


# ---------------------------------------------------------------- packet


def test_packet_outputs(tmp_path):
    src = tmp_path / "in.csv"
    write_input(src, n=96, p=2)
    out = tmp_path / "out"
    assert main(["packet", "--input", str(src), "--depth", "3", "--out-dir", str(out)]) == 0

    energy = read_lines(out / "energy.csv")
    assert energy[0] == "series,node,frequency_index,fraction"
    rows = [ln.split(",") for ln in energy[1:]]
    assert len(rows) == 2 * 8  # two series, eight depth-3 nodes
    for series in ("a", "b"):
        total = sum(float(r[3]) for r in rows if r[0] == series)
        assert total == pytest.approx(1.0, abs=1e-9)
    by_node = {r[1]: int(r[2]) for r in rows if r[0] == "a"}
    assert by_node["000"] == 0
    assert by_node["100"] == 7  # frequency ordering, not binary value

    trend = read_lines(out / "trend.csv")
    assert trend[0] == "date,a,b"
    assert len(trend) == 97
    assert trend[1].split(",")[0] == date_str(0)
    assert (out / "noise.csv").exists()


# ---------------------------------------------------------------- denoise


def test_denoise_outputs(tmp_path):
    src = tmp_path / "in.csv"
    write_input(src, n=128, p=2)
    out = tmp_path / "out"
    assert main(["denoise", "--input", str(src), "--out-dir", str(out)]) == 0

    sweep = read_lines(out / "sweep_a.csv")
    assert sweep[0].startswith("# ")  # scoring convention comment
    assert sweep[1] == "method,rule,thresholds,snr,psnr,identical"
    assert len(sweep) == 2 + 9  # nine methods scored
    for ln in sweep[2:]:
        parts = ln.split(",")
        assert parts[1] in ("hard", "soft", "garrote")
        assert parts[-1] in ("0", "1")

    denoised = read_lines(out / "denoised.csv")
    assert denoised[0] == "date,a,b"
    assert len(denoised) == 129
    assert (out / "sweep_b.csv").exists()


def test_denoise_unknown_method(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=64)
    code = main(
        ["denoise", "--input", str(src), "--method", "magic", "--out-dir", str(tmp_path / "o")]
    )
    assert code == 2
    assert "magic" in capsys.readouterr().err


# ---------------------------------------------------------------- forecast


def test_forecast_outputs(tmp_path):
    src = tmp_path / "in.csv"
    write_input(src, n=150, p=2, seed=3)
    out = tmp_path / "out"
    code = main(
        [
            "forecast",
            "--input",
            str(src),
            "--end",
            date_str(119),
            "--horizon",
            "5",
            "--out-dir",
            str(out),
        ]
    )
    assert code == 0

    models = read_lines(out / "models.csv")
    assert models[0] == "model,series,parameter,value"
    kinds = {ln.split(",")[0] for ln in models[1:]}
    assert kinds == {"arma", "varma"}
    arma_params = [ln.split(",")[2] for ln in models[1:] if ln.startswith("arma,a,")]
    assert arma_params[:4] == ["mu", "phi", "theta", "sigma2"]

    fcs = read_lines(out / "forecasts.csv")
    assert fcs[0] == "model,series,horizon,point,lower,upper"
    rows = [ln.split(",") for ln in fcs[1:]]
    assert len(rows) == 2 * 2 * 5  # two models, two series, five horizons
    for r in rows:
        point, lower, upper = float(r[3]), float(r[4]), float(r[5])
        assert lower < point < upper

    comp = read_lines(out / "comparison.csv")
    assert comp[0] == "series,horizons,arma_mse,varma_mse,winner"
    assert len(comp) == 3
    for ln in comp[1:]:
        parts = ln.split(",")
        assert parts[1] == "5"
        assert parts[4] in ("ARMA", "VARMA", "tie")


def test_forecast_single_series_skips_comparison(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=150, p=2, seed=3)
    out = tmp_path / "out"
    code = main(
        [
            "forecast",
            "--input",
            str(src),
            "--value-columns",
            "a",
            "--horizon",
            "5",
            "--out-dir",
            str(out),
        ]
    )
    assert code == 0
    assert "VARMA comparison skipped" in capsys.readouterr().out
    models = read_lines(out / "models.csv")
    assert all(ln.startswith("arma,") for ln in models[1:])
    assert read_lines(out / "comparison.csv") == ["series,horizons,arma_mse,varma_mse,winner"]


def test_forecast_bad_horizon(tmp_path, capsys):
    src = tmp_path / "in.csv"
    write_input(src, n=150)
    code = main(
        ["forecast", "--input", str(src), "--horizon", "0", "--out-dir", str(tmp_path / "o")]
    )
    assert code == 1
    assert "horizon must be at least 1" in capsys.readouterr().err


# ---------------------------------------------------------------- pipeline


def run_pipeline(tmp_path, out_name, seed_arg=None):
    src = tmp_path / "in.csv"
    if not src.exists():
        write_input(src, n=150, p=2, seed=5)
    out = tmp_path / out_name
    argv = [
        "pipeline",
        "--input",
        str(src),
        "--end",
        date_str(119),
        "--depth",
        "3",
        "--denoise-level",
        "3",
        "--horizon",
        "5",
        "--out-dir",
        str(out),
    ]
    if seed_arg is not None:
        argv += ["--seed", str(seed_arg)]
    assert main(argv) == 0
    return out


def test_pipeline_manifest_matches_directory(tmp_path):
    out = run_pipeline(tmp_path, "out")
    manifest = read_lines(out / "manifest.txt")
    assert manifest == sorted(manifest)
    assert "manifest.txt" in manifest
    assert set(manifest) == {p.name for p in out.iterdir()}
    # original grids carry partials, variant grids do not
    assert "mwc_original_a.csv" in manifest
    assert "pwc_original_a_b.csv" in manifest
    assert "mwc_trend_a.csv" in manifest
    assert "mwc_noise_a.csv" in manifest
    assert "mwc_denoised_a.csv" in manifest
    assert not any(n.startswith("pwc_trend_") for n in manifest)
    assert "forecasts.csv" in manifest
    assert "denoised.csv" in manifest
    assert "energy.csv" in manifest


def test_pipeline_reruns_byte_identical(tmp_path):
    first = run_pipeline(tmp_path, "out1")
    second = run_pipeline(tmp_path, "out2")
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
