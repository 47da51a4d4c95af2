import json
import logging

import pytest

from chamber_atlas import cli
from chamber_atlas.errors import InvariantError, ResourceError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv(cli.CACHE_ENV, raising=False)
    monkeypatch.delenv(cli.THREADS_ENV, raising=False)


class TestTrees:
    @pytest.mark.parametrize("argv, count", [(("--n", "5"), 250), (("--n", "4", "--positive"), 7), (("--n", "2"), 2)])
    def test_counts(self, capsys, argv, count):
        code, out, _ = run(capsys, "trees", *argv)
        assert code == 0 and out == f"count {count}\n"

    def test_list_json(self, capsys):
        code, out, _ = run(capsys, "trees", "--n", "3", "--list", "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["count"] == len(data["trees"]) == 6

    @pytest.mark.parametrize("n", ["1", "12"])
    def test_bounds_exit_two(self, capsys, n):
        code, out, err = run(capsys, "trees", "--n", n)
        assert code == 2 and not out and err.startswith("error:")

    def test_bad_format(self, capsys):
        code, _, err = run(capsys, "trees", "--n", "3", "--format", "dot")
        assert code == 2 and "format" in err


class TestChambers:
    @pytest.mark.parametrize(
        "argv, count",
        [
            (("--family", "resonance", "--n", "4"), 370),
            (("--family", "threshold", "--n", "4"), 1882),
            (("--family", "resonance", "--n", "3", "--positive"), 8),
        ],
    )
    def test_counts(self, capsys, argv, count):
        code, out, _ = run(capsys, "chambers", *argv)
        assert code == 0 and out.splitlines()[0] == f"count {count}"

    def test_large_needs_flag(self, capsys):
        code, _, err = run(capsys, "chambers", "--family", "resonance", "--n", "6")
        assert code == 2 and "--allow-large" in err

    def test_threshold_positive_rejected(self, capsys):
        code, _, _ = run(capsys, "chambers", "--family", "threshold", "--n", "2", "--positive")
        assert code == 2

    def test_census_csv(self, capsys):
        code, out, _ = run(capsys, "chambers", "--family", "threshold", "--n", "3", "--census", "--format", "csv")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "n,hyperplane_mask,wall_count"
        # table index 3 is dimension 4: eight hyperplanes, each carrying R_3 walls
        assert len(lines) == 1 + 8 and all(line.endswith(",32") for line in lines[1:])

    def test_census_text(self, capsys):
        _, out, _ = run(capsys, "chambers", "--family", "threshold", "--n", "3", "--census")
        assert out.splitlines()[1] == "walls 256 per-hyperplane [32] average 64/13"

    def test_dump_is_rational(self, capsys):
        _, out, _ = run(capsys, "chambers", "--n", "2", "--dump")
        rows = out.splitlines()[1:]
        assert len(rows) == 6 and all(len(r.split()) == 4 for r in rows)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "c.json"
        code, out, _ = run(capsys, "chambers", "--n", "3", "--format", "json", "--out", str(target))
        assert code == 0 and not out
        assert json.loads(target.read_text())["count"] == 32

    def test_threads_do_not_change_output(self, capsys):
        outs = [run(capsys, "chambers", "--n", "4", "--dump", "--threads", t)[1] for t in ("1", "2")]
        assert outs[0] == outs[1]

    def test_thread_env(self, monkeypatch):
        monkeypatch.setenv(cli.THREADS_ENV, "3")
        assert cli.resolve_threads(None) == 3 and cli.resolve_threads(2) == 2


class TestCache:
    def test_round_trip(self, capsys, tmp_path):
        cold = run(capsys, "chambers", "--n", "3", "--dump", "--cache", str(tmp_path))[1]
        assert len(list(tmp_path.glob("*.json"))) == 1
        warm = run(capsys, "chambers", "--n", "3", "--dump", "--cache", str(tmp_path))[1]
        assert cold == warm

    def test_env_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
        run(capsys, "chambers", "--n", "2")
        assert list(tmp_path.glob("*.json"))

    def test_corrupt_entry_recomputed(self, capsys, tmp_path, caplog):
        cold = run(capsys, "chambers", "--n", "3", "--dump", "--cache", str(tmp_path))[1]
        entry = next(tmp_path.glob("*.json"))
        data = json.loads(entry.read_text())
        data["payload"] = data["payload"][:-1]
        entry.write_text(json.dumps(data))
        with caplog.at_level(logging.WARNING, logger="chamber_atlas"):
            again = run(capsys, "chambers", "--n", "3", "--dump", "--cache", str(tmp_path))[1]
        assert again == cold
        assert any("corrupt" in r.message for r in caplog.records)
        assert len(json.loads(entry.read_text())["payload"]) == 32

    def test_garbage_file(self, tmp_path):
        cache = cli.Cache(tmp_path)
        key = {"kind": "x"}
        cache.store(key, [1, 2])
        cache._path(key).write_text("{not json")
        assert cache.load(key) is None
        assert cache.get_or_compute(key, lambda: [3]) == [3]
        assert cache.load(key) == [3]


class TestGraph:
    def test_stats(self, capsys):
        code, out, _ = run(capsys, "graph", "--n", "5", "--stats", "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert data["vertices"] == 250 and data["component_sizes"] == {"1": 10, "12": 20}
        assert data["maximal_cliques"] == data["indexable"] == 370
        assert data["indexable_by_source_count"] == [1, 19, 36, 19, 1]

    def test_dot(self, capsys):
        code, out, _ = run(capsys, "graph", "--n", "3", "--dot")
        assert code == 0 and out.count("[label=") == 6 and " -- " not in out

    def test_positive(self, capsys):
        data = json.loads(run(capsys, "graph", "--n", "4", "--positive", "--stats", "--format", "json")[1])
        assert data["vertices"] == 7 and "indexable_by_source_count" not in data

    @pytest.mark.slow
    def test_six_reports_both_references(self, capsys):
        data = json.loads(run(capsys, "graph", "--n", "6", "--stats", "--format", "json")[1])
        assert data["maximal_cliques"] == 18552 and data["indexable"] == 11292
        assert data["reference_indexable"] == {"table": 11292, "text": 11296}
        assert data["indexable_by_source_count"] == [1, 149, 490, 490, 149, 1]

    def test_seven_needs_flag(self, capsys):
        assert run(capsys, "graph", "--n", "7")[0] == 2


class TestKostant:
    def test_value(self, capsys):
        assert run(capsys, "kostant", "--value", "1,0,-1") == (0, "2\n", "")

    @pytest.mark.parametrize("value", ["1,1", "1,x,-1"])
    def test_bad_value(self, capsys, value):
        assert run(capsys, "kostant", "--value", value)[0] == 2

    @pytest.mark.parametrize("n, count", [("3", 7), ("4", 48)])
    def test_chambers(self, capsys, n, count):
        code, out, _ = run(capsys, "kostant", "--chambers", "--n", n)
        assert code == 0 and out.splitlines()[0] == f"count {count}"

    def test_fit(self, capsys):
        out = run(capsys, "kostant", "--chambers", "--n", "2", "--fit")[1]
        assert "kappa = 1 + a1\n" in out and "kappa = 1 + a1 + a2\n" in out

    def test_needs_input(self, capsys):
        assert run(capsys, "kostant")[0] == 2

    def test_resource_exit(self, capsys, monkeypatch):
        def boom(a):
            raise ResourceError("too many")

        monkeypatch.setattr(cli.ko, "kostant_value", boom)
        code, _, err = run(capsys, "kostant", "--value", "1,-1")
        assert code == 3 and err.startswith("resource limit")

    def test_invariant_exit(self, capsys, monkeypatch):
        def broken(*args, **kwargs):
            raise InvariantError("bad chamber")

        monkeypatch.setattr(cli.ko, "kostant_chambers", broken)
        code, _, err = run(capsys, "kostant", "--chambers", "--n", "2")
        assert code == 4 and err.startswith("invariant")


class TestReport:
    def test_small(self, capsys):
        code, out, _ = run(capsys, "report", "--max-n", "3", "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert data["rows"][2] == {"n": 3, "lower": 26, "R": 32, "K_next": 48, "T_half": 52}
        assert all(c["holds"] for c in data["checks"])
        assert data["triangle_identity"]["3"] == {"sum": 32, "R": 32}

    def test_gaps_marked(self, capsys):
        out = run(capsys, "report", "--max-n", "1")[1]
        assert out.splitlines()[1] == "1  2  2  2  2"

    @pytest.mark.slow
    def test_row_four(self, capsys, tmp_path):
        out = run(capsys, "report", "--max-n", "4", "--cache", str(tmp_path))[1]
        assert "4  294  370  820  941" in out.splitlines()
        warm = run(capsys, "report", "--max-n", "4", "--cache", str(tmp_path))[1]
        assert warm == out

    def test_max_n_bounds(self, capsys):
        assert run(capsys, "report", "--max-n", "9")[0] == 2
