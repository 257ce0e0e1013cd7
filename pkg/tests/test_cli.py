import hashlib
import json

import pytest

from lexaug.cli import main

from conftest import write_jsonl


def _lexicon_file(tmp_path, name="panlex.tsv"):
    path = tmp_path / name
    path.write_text(
        "en\tes\tLatn\tcat\tgato\n"
        "en\tfr\tLatn\tcat\tchat\n"
        "en\tes\tLatn\tdog\tperro\n"
        "en\tes\tLatn\tkitten\tgatito\n",
        encoding="utf-8",
    )
    return str(path)


def _mono_file(tmp_path, n=20):
    return write_jsonl(
        tmp_path / "mono.jsonl",
        [
            {"lang": "en", "script": "Latn", "text": f"the cat saw dog number {i}"}
            for i in range(n)
        ],
    )


class TestAugmentCommand:
    def test_two_runs_are_byte_identical(self, tmp_path):
        corpus = _mono_file(tmp_path)
        lexicon = _lexicon_file(tmp_path)
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            code = main(
                [
                    "augment",
                    "--task", "codeswitch-mono",
                    "--corpus", corpus,
                    "--lexicon", lexicon,
                    "--seed", "7",
                    "--out", str(out),
                ]
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_jobs_do_not_change_bytes(self, tmp_path):
        corpus = _mono_file(tmp_path, n=150)
        lexicon = _lexicon_file(tmp_path)
        outputs = {}
        for jobs in ("1", "2"):
            out = tmp_path / f"jobs{jobs}.jsonl"
            code = main(
                [
                    "augment",
                    "--task", "codeswitch-mono",
                    "--corpus", corpus,
                    "--lexicon", lexicon,
                    "--seed", "11",
                    "--jobs", jobs,
                    "--out", str(out),
                ]
            )
            assert code == 0
            outputs[jobs] = out.read_bytes()
        assert outputs["1"] == outputs["2"]

    def test_fraction_routes_records(self, tmp_path):
        corpus = _mono_file(tmp_path, n=50)
        lexicon = _lexicon_file(tmp_path)
        out = tmp_path / "all.jsonl"
        main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", corpus,
                "--lexicon", lexicon,
                "--seed", "3",
                "--fraction", "1.0",
                "--out", str(out),
            ]
        )
        lines = out.read_text().splitlines()
        assert len(lines) == 50
        example = json.loads(lines[0])
        assert example["task"] == "codeswitch_mono"
        assert example["source"].startswith("<2codeswitch> <2en> <2Latn> ")

    def test_manifest_written_with_digests(self, tmp_path):
        corpus = _mono_file(tmp_path)
        lexicon = _lexicon_file(tmp_path)
        out = tmp_path / "out.jsonl"
        main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", corpus,
                "--lexicon", lexicon,
                "--seed", "7",
                "--out", str(out),
            ]
        )
        manifest = json.loads((tmp_path / "out.jsonl.manifest.json").read_text())
        assert manifest["subcommand"] == "augment"
        assert manifest["config"]["seed"] == 7
        assert manifest["config"]["p_tr"] == 0.4
        expected = hashlib.sha256(out.read_bytes()).hexdigest()
        assert manifest["outputs"][str(out)] == expected
        assert corpus in manifest["inputs"]

    def test_explicit_manifest_path(self, tmp_path):
        corpus = _mono_file(tmp_path)
        lexicon = _lexicon_file(tmp_path)
        manifest_path = tmp_path / "run.manifest.json"
        code = main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", corpus,
                "--lexicon", lexicon,
                "--seed", "7",
                "--out", str(tmp_path / "out.jsonl"),
                "--manifest", str(manifest_path),
            ]
        )
        assert code == 0
        assert json.loads(manifest_path.read_text())["subcommand"] == "augment"

    def test_stdout_mode(self, tmp_path, capsys):
        corpus = _mono_file(tmp_path, n=5)
        lexicon = _lexicon_file(tmp_path)
        code = main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", corpus,
                "--lexicon", lexicon,
                "--seed", "7",
                "--fraction", "1.0",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5
        assert json.loads(lines[0])["task"] == "codeswitch_mono"

    def test_missing_seed_fails(self, tmp_path, capsys):
        corpus = _mono_file(tmp_path)
        lexicon = _lexicon_file(tmp_path)
        code = main(
            ["augment", "--task", "codeswitch-mono", "--corpus", corpus, "--lexicon", lexicon]
        )
        assert code == 1
        assert "--seed" in capsys.readouterr().err

    def test_config_file_supplies_values_flags_override(self, tmp_path):
        corpus = _mono_file(tmp_path)
        lexicon = _lexicon_file(tmp_path)
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 7, "p_tr": 0.9, "fraction": 1.0}))
        out = tmp_path / "out.jsonl"
        code = main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", corpus,
                "--lexicon", lexicon,
                "--config", str(config),
                "--p-tr", "0.2",
                "--out", str(out),
            ]
        )
        assert code == 0
        manifest = json.loads((tmp_path / "out.jsonl.manifest.json").read_text())
        assert manifest["config"]["seed"] == 7  # from config file
        assert manifest["config"]["p_tr"] == 0.2  # flag wins
        assert manifest["config"]["fraction"] == 1.0

    def test_abort_mode_fails_on_malformed_line(self, tmp_path, capsys):
        corpus = tmp_path / "bad.jsonl"
        corpus.write_text('{"lang": "en", "script": "Latn", "text": "ok"}\nnot json\n')
        lexicon = _lexicon_file(tmp_path)
        code = main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", str(corpus),
                "--lexicon", lexicon,
                "--seed", "1",
                "--fraction", "1.0",
                "--out", str(tmp_path / "x.jsonl"),
            ]
        )
        assert code == 1
        assert "line 2" in capsys.readouterr().err

    def test_skip_mode_continues_with_warning(self, tmp_path, capsys):
        corpus = tmp_path / "bad.jsonl"
        corpus.write_text(
            '{"lang": "en", "script": "Latn", "text": "ok here"}\n'
            "not json\n"
            '{"lang": "en", "script": "Latn", "text": "also fine"}\n'
        )
        lexicon = _lexicon_file(tmp_path)
        out = tmp_path / "x.jsonl"
        code = main(
            [
                "augment",
                "--task", "codeswitch-mono",
                "--corpus", str(corpus),
                "--lexicon", lexicon,
                "--seed", "1",
                "--fraction", "1.0",
                "--on-error", "skip",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 2
        assert "skipped" in capsys.readouterr().err

    def test_parallel_task_reads_pairs(self, tmp_path, parallel_corpus_file):
        lexicon = _lexicon_file(tmp_path)
        out = tmp_path / "p.jsonl"
        code = main(
            [
                "augment",
                "--task", "glowup-parallel",
                "--corpus", parallel_corpus_file,
                "--lexicon", lexicon,
                "--seed", "5",
                "--fraction", "1.0",
                "--out", str(out),
            ]
        )
        assert code == 0
        examples = [json.loads(line) for line in out.read_text().splitlines()]
        assert all(e["task"] == "glowup_parallel" for e in examples)
        assert all(e["source"].startswith("<2glowup> <2es> <2Latn> ") for e in examples)


class TestTokenPairsCommand:
    def test_renders_all_entries(self, tmp_path, capsys):
        lexicon = _lexicon_file(tmp_path)
        code = main(["token-pairs", "--lexicon", lexicon])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4
        first = json.loads(lines[0])
        assert first["source"] == "<2translation> <2es> <2Latn> cat"
        assert first["target"] == "gato"

    def test_langs_filter(self, tmp_path, capsys):
        lexicon = _lexicon_file(tmp_path)
        code = main(["token-pairs", "--lexicon", lexicon, "--langs", "fr"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["target"] == "chat"


class TestMixCommand:
    def test_schedule_printed(self, capsys):
        code = main(["mix", "--mono-aug", "codeswitch", "--token-pairs"])
        assert code == 0
        schedule = json.loads(capsys.readouterr().out)
        assert schedule == {
            "token_pair": 0.05,
            "translation": 0.38,
            "mass": 0.285,
            "codeswitch_mono": 0.285,
        }

    def test_interleaves_streams(self, tmp_path):
        t_stream = tmp_path / "t.jsonl"
        m_stream = tmp_path / "m.jsonl"
        t_stream.write_text("\n".join(f'{{"id": "t{i}"}}' for i in range(5)) + "\n")
        m_stream.write_text("\n".join(f'{{"id": "m{i}"}}' for i in range(5)) + "\n")
        out = tmp_path / "mixed.jsonl"
        code = main(
            [
                "mix",
                "--streams", f"translation={t_stream}",
                "--streams", f"mass={m_stream}",
                "--seed", "3",
                "--count", "200",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 200
        t_share = sum(1 for line in lines if '"t' in line) / 200
        assert 0.25 < t_share < 0.55

    def test_streams_require_seed(self, tmp_path, capsys):
        stream = tmp_path / "t.jsonl"
        stream.write_text('{"id": 1}\n')
        code = main(["mix", "--streams", f"translation={stream}", "--count", "5"])
        assert code == 1
        assert "--seed" in capsys.readouterr().err


class TestScoreCommand:
    def test_identical_files_score_100(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("the cat sat\na dog barked\n")
        ref.write_text("the cat sat\na dog barked\n")
        code = main(["score", "--hyp", str(hyp), "--ref", str(ref)])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["score"] == 100.0
        assert result["pairs"] == 2

    def test_sentence_scores(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("cat sat\n")
        ref.write_text("cat sit\n")
        code = main(["score", "--hyp", str(hyp), "--ref", str(ref), "--sentence"])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["sentence_scores"] == [pytest.approx(37.7778)]

    def test_length_mismatch(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("one\ntwo\n")
        ref.write_text("one\n")
        assert main(["score", "--hyp", str(hyp), "--ref", str(ref)]) == 1
        assert "differ in length" in capsys.readouterr().err


def _eval_rows_file(tmp_path):
    return write_jsonl(
        tmp_path / "rows.jsonl",
        [
            {
                "lang": "xx",
                "direction": "en_to_xx",
                "source": "The kitten lies",
                "hypothesis": "kitten lie on floor",
                "reference": "The kitten lies",
            },
            {
                "lang": "xx",
                "direction": "en_to_xx",
                "source": "A Puma eats hot chip",
                "hypothesis": "Crocodile charge they phone",
                "reference": "A Puma eats hot chip",
            },
        ],
    )


class TestDiagnoseCommand:
    def test_table_and_json_report(self, tmp_path, capsys):
        rows = _eval_rows_file(tmp_path)
        out = tmp_path / "report.json"
        code = main(["diagnose", "--rows", rows, "--out", str(out)])
        assert code == 0
        assert "repetition" in capsys.readouterr().out
        report = json.loads(out.read_text())
        assert report["total"] == 2


class TestHitRateCommand:
    def test_kitten_puma(self, tmp_path, capsys):
        rows = _eval_rows_file(tmp_path)
        tokens = tmp_path / "tokens.txt"
        tokens.write_text("kitten\npuma\n")
        code = main(["hit-rate", "--rows", rows, "--tokens", str(tokens)])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["rate"] == 0.5
        assert result["rows_with_token"] == 2


class TestRegressCommand:
    def test_report(self, tmp_path, capsys):
        table = tmp_path / "table.csv"
        lines = ["lang,delta_chrf,n_panlex,n_gatitos,n_mono,class"]
        for i in range(10):
            panlex, gatitos, mono = 100 * i, 40 * i * i, 500 * ((i * 7) % 13)
            delta = 0.01 * panlex + 0.03 * gatitos + 0.0001 * mono + 1.0
            lines.append(f"l{i},{delta},{panlex},{gatitos},{mono},URL")
        table.write_text("\n".join(lines) + "\n")
        code = main(["regress", "--table", str(table)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["coefficients"]["n_gatitos"] == pytest.approx(0.03, abs=1e-6)
        assert report["n_rows"] == 10


class TestLexiconStatsCommand:
    def test_counts(self, tmp_path, capsys):
        lexicon = _lexicon_file(tmp_path)
        code = main(["lexicon-stats", "--lexicon", lexicon, "--lang", "es"])
        assert code == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["entries"] == 4
        assert stats["pair_counts"]["en-es"] == 3
        assert stats["per_source"] == {"panlex": 3}

    def test_multiple_lexica_merge(self, tmp_path, capsys):
        first = _lexicon_file(tmp_path, "panlex.tsv")
        second = tmp_path / "gatitos.tsv"
        second.write_text("en\tes\tLatn\tcat\tgato\nen\tes\tLatn\tbird\tpajaro\n")
        code = main(["lexicon-stats", "--lexicon", first, "--lexicon", str(second)])
        assert code == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["entries"] == 5  # one duplicate collapsed


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["frobnicate"])
        assert exc_info.value.code == 2

    def test_missing_file_exits_1(self, tmp_path, capsys):
        code = main(["lexicon-stats", "--lexicon", str(tmp_path / "nope.tsv")])
        assert code == 1
        assert "error" in capsys.readouterr().err
