"""Test the command-line interface end to end."""


import json
from pathlib import Path

import pytest

from noisynet import __version__, cli


def _run(capsys: pytest.CaptureFixture, *argv: str) -> tuple[int, dict, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, (json.loads(captured.out) if captured.out.strip() else {}), captured.err


# -----------------------------------------------------------------------------


def test_00__version(capsys: pytest.CaptureFixture) -> None:
    """Test --version."""
    with pytest.raises(SystemExit) as e:
        cli.main(["--version"])
    assert e.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_10__query(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test observing the effect explains it by its only cause."""
    code, out, _ = _run(capsys, "query", str(demo_path("two_node")), "--evidence", "X=true", "--target", "A")
    assert code == 0
    assert out == {"A": [0.0, 1.0]}

    code, out, _ = _run(capsys, "query", str(demo_path("two_node")))
    assert code == 0
    assert out == {"A": [0.7, 0.3], "X": [0.85, 0.15]}


def test_11__query_by_index(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test states may be given by index."""
    _, by_label, _ = _run(capsys, "query", str(demo_path("weather")), "--evidence", "Rain=heavy")
    _, by_index, _ = _run(capsys, "query", str(demo_path("weather")), "--evidence", "Rain=2")
    assert by_label == by_index
    assert by_label["Rain"] == [0.0, 0.0, 1.0]


def test_12__impossible_evidence(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test zero-probability evidence exits 1."""
    code, out, err = _run(
        capsys, "query", str(demo_path("two_node")), "--evidence", "A=false", "X=true"
    )
    assert code == 1
    assert not out
    assert "impossible evidence" in err


@pytest.mark.parametrize("evidence", ["X", "=true", "X="])
def test_13__malformed_evidence(evidence: str, capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test evidence that is not VAR=state is a usage error."""
    with pytest.raises(SystemExit) as e:
        cli.main(["query", str(demo_path("two_node")), "--evidence", evidence])
    assert e.value.code == 2


@pytest.mark.parametrize(
    "extra",
    [
        ["--evidence", "Z=true"],
        ["--evidence", "X=maybe"],
        ["--evidence", "X=true", "X=false"],
        ["--target", "Z"],
    ],
)
def test_14__unknown_names(extra: list[str], capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test unknown variables and states exit 2."""
    code, _, err = _run(capsys, "query", str(demo_path("two_node")), *extra)
    assert code == 2
    assert err.startswith("error:")


def test_15__bad_documents(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    """Test unreadable, malformed and invalid documents exit 2."""
    code, _, _ = _run(capsys, "query", str(tmp_path / "missing.json"))
    assert code == 2

    (broken := tmp_path / "broken.json").write_text("{")
    code, _, err = _run(capsys, "query", str(broken))
    assert code == 2
    assert "invalid JSON at line 1" in err

    (unnormalized := tmp_path / "unnormalized.json").write_text(
        json.dumps(
            {
                "variables": [{"name": "A", "states": ["f", "t"]}],
                "nodes": [{"variable": "A", "backing": {"cpt": [0.7, 0.2]}}],
            }
        )
    )
    code, _, err = _run(capsys, "query", str(unnormalized))
    assert code == 2
    assert "unnormalized at 'A'" in err


def test_20__compile(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test compiling the two-node demo."""
    code, out, _ = _run(capsys, "compile", str(demo_path("two_node")))
    assert code == 0
    assert out["nodes"][1]["backing"] == {"cpt": [1.0, 0.0, 0.5, 0.5]}


def test_21__budget(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test the enumeration budget, including human-friendly sizes."""
    code, _, err = _run(capsys, "--budget", "2", "compile", str(demo_path("weather")))
    assert code == 1
    assert "error:" in err

    code, _, _ = _run(capsys, "--budget", "1k", "compile", str(demo_path("weather")))
    assert code == 0

    with pytest.raises(SystemExit) as e:
        cli.main(["--budget", "lots", "compile", str(demo_path("weather"))])
    assert e.value.code == 2


def test_30__reliability(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test both reliability modes."""
    code, out, _ = _run(capsys, "reliability", str(demo_path("series")))
    assert code == 0
    assert out == {"source": "A", "target": "C", "mode": "connect", "probability": 0.72}

    code, out, _ = _run(capsys, "reliability", str(demo_path("diamond")), "--mode", "paths")
    assert code == 0
    assert out["distribution"] == [0.5625, 0.375, 0.0625]
    assert out["expected_paths"] == 0.5


def test_31__reliability_unreachable(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    """Test a target the source cannot reach has probability 0."""
    (path := tmp_path / "upstream.json").write_text(
        json.dumps(
            {
                "graph": {
                    "nodes": ["A", "B"],
                    "links": [{"parent": "B", "child": "A", "failure_probability": 0.1}],
                    "source": "A",
                    "target": "B",
                }
            }
        )
    )
    code, out, _ = _run(capsys, "reliability", str(path))
    assert code == 0
    assert out["probability"] == 0.0

    code, _, _ = _run(capsys, "reliability", str(path), "--mode", "paths")
    assert code == 1


def test_40__diagnose(capsys: pytest.CaptureFixture, demo_path) -> None:  # type: ignore[no-untyped-def]
    """Test the inverter must have failed when it passes its input through."""
    code, out, _ = _run(
        capsys, "diagnose", str(demo_path("inverter")), "--evidence", "A=true", "N=true", "--target", "N"
    )
    assert code == 0
    assert out == {"N": [0.0, 1.0], "N_f": [0.0, 1.0]}

    code, out, _ = _run(capsys, "diagnose", str(demo_path("demo_circuit")))
    assert code == 0
    assert set(out) == {"A", "B", "C", "D", "E", "F", "D_f"}
    assert out["D_f"] == [0.95, 0.05]


def test_50__verify_demos(capsys: pytest.CaptureFixture) -> None:
    """Test every shipped demo passes, and reports are reproducible."""
    code, first, _ = _run(capsys, "verify", "--trials", "5", "--seed", "3")
    assert code == 0
    assert first["passed"] is True
    assert first["seed"] == 3 and first["trials"] == 5
    names = {c["name"] for c in first["checks"]}
    assert {"two_node:cpt:X", "weather:marginals", "diamond:path_distribution", "demo_circuit:diagnosis"} <= names
    assert "random:positivity" in names

    _, second, _ = _run(capsys, "verify", "--trials", "5", "--seed", "3")
    assert first == second


def test_51__verify_fails_on_bad_table(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    """Test a corrupted CPT fails verification and names the node."""
    (path := tmp_path / "bad.json").write_text(
        json.dumps(
            {
                "variables": [{"name": "A", "states": ["f", "t"]}],
                "nodes": [{"variable": "A", "backing": {"cpt": [0.7, 0.2]}}],
            }
        )
    )
    code, out, _ = _run(capsys, "verify", str(path), "--trials", "1")
    assert code == 1
    assert out["passed"] is False
    failed = [c for c in out["checks"] if not c["passed"]]
    assert [c["name"] for c in failed] == ["bad:validate:A"]


def test_52__demos_ship_with_the_package() -> None:
    """Test the default verify inputs live inside the installed package."""
    package_dir = Path(cli.__file__).resolve().parent
    assert cli.DEMOS_DIR.is_relative_to(package_dir)
    assert {p.stem for p in cli.DEMOS_DIR.glob("*.json")} >= {
        "two_node",
        "series",
        "diamond",
        "demo_graph",
        "demo_circuit",
        "inverter",
        "weather",
    }


def test_53__verify_without_documents(
    capsys: pytest.CaptureFixture, monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    """Test verify refuses to pass when there is nothing to check."""
    monkeypatch.setattr(cli, "DEMOS_DIR", tmp_path)
    code, out, err = _run(capsys, "verify", "--trials", "1")
    assert code == 2
    assert not out
    assert "no documents to verify" in err
