import pytest
from hypothesis import given, settings, strategies as st

from collision_transform.cli import main
from collision_transform.config import ConfigError, ScanConfig, emit_config, parse_config


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(2, 40), min_size=1, max_size=4),
       st.lists(st.integers(1, 3), min_size=1, max_size=2),
       st.lists(st.floats(0.01, 5, allow_nan=False), min_size=1, max_size=4),
       st.integers(1, 10**7), st.integers(0, 1000), st.integers(1, 16), st.booleans())
def test_config_round_trip(bases, lags, s, n, seed, workers, primes_only):
    cfg = ScanConfig(tuple(bases), tuple(lags), tuple(s), n, f"synthetic:{seed}", "o", workers, primes_only)
    assert parse_config(emit_config(cfg, "verify"), "verify") == cfg


def test_file_template():
    cfg = ScanConfig(invariant="file:data/S_{b}_{ell}_{m}.tsv")
    assert str(cfg.invariant_path(10, 1)) == "data/S_10_1_100.tsv"
    assert cfg.seed is None


@pytest.mark.parametrize("text,line", [
    ("[scan]\nbases = 3\nprimes = -4\n", 3),
    ("[scan]\nbases = 3, x\n", 2),
    ("[scan]\n\nbogus = 1\n", 3),
    ("[scan]\ninvariant = magic\n", 2),
])
def test_config_errors_are_line_precise(text, line):
    with pytest.raises(ConfigError, match=f"<config>:{line}:"):
        parse_config(text)


def test_cli_usage_errors(capsys):
    assert main(["scan", "--primes", "0"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["scan", "--invariant", "file:/nonexistent/{b}.tsv", "--primes", "10"]) == 2


def test_cli_smoke(tmp_path):
    out = tmp_path / "o"
    assert main(["scan", "--base", "3", "--lag", "1", "--s", "1.0", "--seed", "1",
                 "--primes", "10000", "--out", str(out)]) == 0
    table = (out / "fcirc_table.csv").read_text().splitlines()
    assert table[1] == "s,b3_l1" and table[2].startswith("1.0,")
    assert (out / "series_b3_l1_s1.0.csv").exists()
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(["scan", "--base", "3", "--s", "1.0", "--seed", "1", "--primes", "10000",
                 "--out", str(out)]) == 0
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first


def test_cli_table1_shape(tmp_path):
    out = tmp_path / "t1"
    assert main(["scan", "--base", "3,7,10,12", "--s", "1.0,0.8,0.6,0.5", "--primes", "2000",
                 "--out", str(out)]) == 0
    rows = [r.split(",") for r in (out / "fcirc_table.csv").read_text().splitlines()[1:]]
    assert rows[0] == ["s", "b3_l1", "b7_l1", "b10_l1", "b12_l1"]
    assert [r[0] for r in rows[1:]] == ["1.0", "0.8", "0.6", "0.5"]
    assert all(len(r) == 5 for r in rows)


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(f"[transform]\nbases = 3, 10\nlags = 1, 2\ninvariant = synthetic:5\nout = {tmp_path / 'tr'}\n")
    assert main(["transform", "--config", str(cfg)]) == 0
    assert len(list((tmp_path / "tr").glob("coefficients_*.csv"))) == 8


def test_cli_neutrality_and_basesum(tmp_path, capsys):
    assert main(["neutrality", "--base", "3,10", "--s", "1.0,0.5", "--primes", "3000",
                 "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "not applicable" in text and "k*=2" in text
    assert "neutrality,not applicable" in (tmp_path / "mod3_b3_l1.csv").read_text()
    assert (tmp_path / "fdoublecirc_b10_l1.csv").exists()
    assert main(["basesum", "--base", "3,5,7", "--s", "0.5", "--primes", "2000",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "basesum.csv").read_text().splitlines()
    assert lines[-2].startswith("F_R,") and lines[-1].startswith("weighted_total,")
    assert abs(float(lines[-2].split(",")[2]) - float(lines[-1].split(",")[2])) < 1e-9


def test_cli_dumps(tmp_path, capsys):
    assert main(["dump-characters", "--base", "3"]) == 0
    assert capsys.readouterr().out.startswith("# characters b=3 ell=1 m=9")
    f = tmp_path / "inv.tsv"
    assert main(["dump-invariant", "--base", "3", "--seed", "2", "--out", str(f)]) == 0
    assert f.read_text().startswith("# collision-invariant b=3 ell=1 m=9")
    # and it round-trips through the file source
    assert main(["dump-invariant", "--base", "3", "--invariant", f"file:{f}"]) == 0
    assert capsys.readouterr().out == f.read_text()


def test_cli_verify_corrupted_file(tmp_path, capsys):
    bad = tmp_path / "S_3_1.tsv"
    bad.write_text("# collision-invariant b=3 ell=1 m=9\n1\t0\n2\t0\n4\t-1\n5\t0\n7\t-1\n8\t0\n")
    rc = main(["verify", "--base", "3", "--lag", "1", "--s", "1.0",
               "--invariant", f"file:{tmp_path}/S_{{b}}_{{ell}}.tsv"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL reflection identity" in out and "a=1" in out
