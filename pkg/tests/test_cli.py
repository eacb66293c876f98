import json
import socket

import pytest

from asrec.cli import main

DATA = [
    {
        "id": "u1",
        "ref": "the cat sat on the mat",
        "nbest": [
            {"text": "the cat sat on the mat", "score": -1.0},
            {"text": "the bat sat on the mat", "score": -2.0},
        ],
    },
    {
        "id": "u2",
        "ref": "hello world",
        "nbest": [
            {"text": "hello word", "score": -0.5},
            {"text": "hello world", "score": -0.9},
        ],
    },
]


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in DATA) + "\n", encoding="utf-8")
    return path


def closed_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_score_exit_zero(dataset, tmp_path, capsys):
    hyps = tmp_path / "hyps.txt"
    hyps.write_text("the cat sat on the mat\nhello world\n", encoding="utf-8")
    out = tmp_path / "report.json"
    code = main(
        ["score", "--refs", str(dataset), "--hyps", str(hyps), "--json", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["corpus"]["wer"] == 0.0
    assert json.loads(out.read_text()) == report
    manifest = json.loads((tmp_path / "report.json.manifest.json").read_text())
    assert str(dataset) in manifest["inputs"]


def test_score_oracle_and_stats(dataset, capsys):
    code = main(
        ["score", "--refs", str(dataset), "--oracle", "2", "--uniq", "--cross-wer", "--json"]
    )
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["oracle_2"]["wer"] == 0.0
    assert report["uniq"] == 2.0
    assert report["cross_wer"]["del"] == report["cross_wer"]["ins"]


def test_unknown_flag_exit_one(capsys):
    assert main(["--bogus"]) == 1


def test_missing_subcommand_exit_one(capsys):
    assert main([]) == 1


def test_data_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "u1"\n', encoding="utf-8")
    assert main(["score", "--refs", str(bad), "--uniq"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_normalize_round_trip(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("The CAT, sat!\nit's  FINE.\n", encoding="utf-8")
    out = tmp_path / "out.txt"
    assert main(["normalize", "--mode", "eval", "--in", str(src), "--out", str(out)]) == 0
    assert out.read_text() == "the cat sat\nit's fine\n"
    assert main(["normalize", "--mode", "stats", "--in", str(src)]) == 0
    assert capsys.readouterr().out == "the cat sat\nits fine\n"


def test_correct_constr_deterministic(dataset, tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["correct", "--strategy", "constr", "--lambda", "0.5", "--n", "2",
            "--in", str(dataset)]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2), "--jobs", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    records = [json.loads(l) for l in out1.read_text().splitlines()]
    assert [r["id"] for r in records] == ["u1", "u2"]
    assert all(r["strategy"] == "constr" for r in records)


def test_correct_all_strategies(dataset, tmp_path):
    for strategy in ("uncon", "constr", "closest", "lattice"):
        out = tmp_path / f"{strategy}.jsonl"
        code = main(
            ["correct", "--strategy", strategy, "--lambda", "1.0", "--n", "2",
             "--in", str(dataset), "--out", str(out)]
        )
        assert code == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(records) == 2
        assert all("text" in r and "flags" in r for r in records)


def test_correct_scorer_unreachable_exit_three(dataset, tmp_path, capsys):
    out = tmp_path / "fail.jsonl"
    url = f"http://127.0.0.1:{closed_port()}"
    code = main(
        ["correct", "--strategy", "constr", "--lambda", "0.5", "--n", "2",
         "--scorer-url", url, "--retries", "2",
         "--in", str(dataset), "--out", str(out)]
    )
    assert code == 3
    assert not out.exists()
    manifest = json.loads((tmp_path / "fail.jsonl.manifest.json").read_text())
    assert manifest["scorer"]["retries_used"] == 2
    assert manifest["status"] == "error"


def test_config_file_merged_under_flags(dataset, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"lambda": 0.0, "n": 2}), encoding="utf-8")
    out = tmp_path / "out.jsonl"
    assert main(["--config", str(config), "correct", "--strategy", "constr",
                 "--in", str(dataset), "--out", str(out)]) == 0
    manifest = json.loads((tmp_path / "out.jsonl.manifest.json").read_text())
    assert manifest["config"]["lambda"] == 0.0
    # flag wins over config
    assert main(["--config", str(config), "correct", "--strategy", "constr",
                 "--lambda", "1.0", "--in", str(dataset), "--out", str(out)]) == 0
    manifest = json.loads((tmp_path / "out.jsonl.manifest.json").read_text())
    assert manifest["config"]["lambda"] == 1.0


def test_combine_rover_cli(tmp_path):
    for name, texts in (("a", ["a b c", "x"]), ("b", ["a x c", "x"]), ("c", ["a b c", "y"])):
        records = [
            {"id": f"u{i}", "ref": None, "nbest": [{"text": t, "score": -1.0}]}
            for i, t in enumerate(texts)
        ]
        (tmp_path / f"{name}.jsonl").write_text(
            "\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8"
        )
    out = tmp_path / "rover.jsonl"
    code = main(
        ["combine", "rover",
         "--inputs", str(tmp_path / "a.jsonl"), str(tmp_path / "b.jsonl"), str(tmp_path / "c.jsonl"),
         "--weights", "1,1,1", "--out", str(out)]
    )
    assert code == 0
    records = {json.loads(l)["id"]: json.loads(l)["text"] for l in out.read_text().splitlines()}
    assert records["u0"] == "a b c"
    assert records["u1"] == "x"


def test_combine_nbest_cli(dataset, tmp_path):
    out = tmp_path / "comb.jsonl"
    code = main(
        ["combine", "nbest", "--pattern", "E1T1", "--a", str(dataset),
         "--b", str(dataset), "--out", str(out)]
    )
    assert code == 0
    record = json.loads(out.read_text().splitlines()[0])
    assert len(record["nbest"]) == 2
    assert record["sources"] == ["E1", "T1"]
    assert "cross-system-scores-not-comparable" in record["flags"]


def test_zeroshot_dry_run(dataset, tmp_path):
    out = tmp_path / "prompts.jsonl"
    code = main(
        ["zeroshot", "--mode", "constr", "--in", str(dataset), "--out", str(out),
         "--n", "2", "--dry-run"]
    )
    assert code == 0
    records = [json.loads(l) for l in out.read_text().splitlines()]
    assert "<option1>" in records[0]["prompt"]


def test_quiz_offline_answers(tmp_path, capsys):
    answers = tmp_path / "answers.jsonl"
    rows = [{"id": f"u{i}", "orig_first": "A", "para_first": "B"} for i in range(3)]
    rows += [{"id": f"v{i}", "orig_first": "C", "para_first": "C"} for i in range(7)]
    answers.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    assert main(["quiz", "--answers", str(answers)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["rate"] == pytest.approx(0.3)


def test_lattice_cli_convert_and_oracle(tmp_path, capsys):
    lattice = {
        "nodes": [
            {"id": 0, "token": ""},
            {"id": 1, "token": "foot@@"},
            {"id": 2, "token": "ball"},
            {"id": 3, "token": ""},
        ],
        "edges": [
            {"from": 0, "to": 1, "score": -1.0},
            {"from": 1, "to": 2, "score": -0.5},
            {"from": 2, "to": 3, "score": -0.25},
        ],
        "start": 0,
        "end": 3,
    }
    src = tmp_path / "lat.json"
    src.write_text(json.dumps(lattice), encoding="utf-8")
    out = tmp_path / "word.json"
    assert main(["lattice", "convert", "--in", str(src), "--to", "word",
                 "--out", str(out)]) == 0
    word = json.loads(out.read_text())
    assert any(n["token"] == "football" for n in word["nodes"])
    assert main(["lattice", "oracle", "--in", str(out), "--ref", "football"]) == 0
    counts = json.loads(capsys.readouterr().out)
    assert counts["errors"] == 0


def test_score_accepts_jsonl_hyps_matched_by_id(dataset, tmp_path, capsys):
    hyps = tmp_path / "hyps.jsonl"
    # deliberately reversed order: matching is by id, not position
    rows = [
        {"id": "u2", "text": "hello world"},
        {"id": "u1", "text": "the cat sat on the mat"},
    ]
    hyps.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    assert main(["score", "--refs", str(dataset), "--hyps", str(hyps), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["corpus"]["wer"] == 0.0


def test_score_jsonl_hyps_missing_id(dataset, tmp_path, capsys):
    hyps = tmp_path / "hyps.jsonl"
    hyps.write_text(json.dumps({"id": "u1", "text": "x"}) + "\n", encoding="utf-8")
    assert main(["score", "--refs", str(dataset), "--hyps", str(hyps)]) == 2
    assert "u2" in capsys.readouterr().err
