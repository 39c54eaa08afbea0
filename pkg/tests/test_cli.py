import csv
import io
import json
from dataclasses import replace
from fractions import Fraction

import pytest

from trigsos import certify as C
from trigsos.cli import main
from trigsos.trigpoly import gauss_family, trigpoly_to_json

EXAMPLE_TEXT = "5 + (1+i)*z^-1 + (1-i)*z\n"


@pytest.fixture
def poly_file(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text(EXAMPLE_TEXT)
    return p


class TestCertify:
    def test_roots_example(self, poly_file, tmp_path):
        out = tmp_path / "c.json"
        assert main(["certify", str(poly_file), "--alg", "roots", "--delta", "16", "--root-bits", "2", "--out", str(out)]) == 0
        cert = C.loads(out.read_text())
        assert cert.kind == "roots" and cert.epsilon == 1 and cert.a == Fraction(32, 57) and cert.u0 == 0
        assert [complex(x) for x in cert.u] == [(1 + 1j) / 57]
        assert [complex(x) for x in cert.alphas] == [-1.75 - 1.75j]

    def test_not_positive(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("z + z^-1")
        assert main(["certify", str(p)]) == 2

    def test_parse_error(self, tmp_path, capsys):
        p = tmp_path / "bad.txt"
        p.write_text("1 +\n  @")
        assert main(["certify", str(p)]) == 1
        assert "2:3" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["certify", str(tmp_path / "nope.txt")]) == 1

    def test_project_on_family(self, tmp_path):
        p = tmp_path / "f5.json"
        p.write_text(json.dumps(trigpoly_to_json(gauss_family(5))))
        out = tmp_path / "c.json"
        assert main(["certify", str(p), "--alg", "project", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["kind"] == "projected"

    def test_precision_exhausted(self, poly_file):
        assert main(["--max-bits", "1", "certify", str(poly_file), "--alg", "sdp"]) == 3

    def test_stdout(self, poly_file, capsys):
        assert main(["certify", str(poly_file), "--alg", "sdp"]) == 0
        assert json.loads(capsys.readouterr().out)["kind"] == "sdp-compensated"


class TestWriterFaultInjection:
    def test_bad_certificate_never_written(self, poly_file, tmp_path, monkeypatch):
        real = C.csos1

        def broken(f, **kw):
            cert = real(f, **kw)
            return replace(cert, a=cert.a + Fraction(1, 7))

        monkeypatch.setattr(C, "csos1", broken)
        out = tmp_path / "c.json"
        assert main(["certify", str(poly_file), "--out", str(out)]) == 7
        assert not out.exists()

    @pytest.mark.parametrize("alg", ["sdp", "project"])
    def test_other_algorithms(self, poly_file, tmp_path, monkeypatch, alg):
        name = {"sdp": "csos2", "project": "csos3"}[alg]
        real = C.ALGORITHMS[name]

        def broken(f, **kw):
            cert = real(f, **kw)
            return replace(cert, squares=cert.squares[1:])

        monkeypatch.setitem(C.ALGORITHMS, name, broken)
        out = tmp_path / "c.json"
        assert main(["certify", str(poly_file), "--alg", alg, "--out", str(out)]) == 7
        assert not out.exists()


class TestVerify:
    def _cert(self, poly_file, tmp_path, alg="roots"):
        out = tmp_path / f"{alg}.json"
        assert main(["certify", str(poly_file), "--alg", alg, "--out", str(out)]) == 0
        return out

    @pytest.mark.parametrize("alg", ["roots", "sdp", "project"])
    def test_matching(self, poly_file, tmp_path, capsys, alg):
        cert = self._cert(poly_file, tmp_path, alg)
        capsys.readouterr()
        assert main(["verify", str(poly_file), str(cert)]) == 0
        assert capsys.readouterr().out.strip() == "accept"

    def test_tampered_epsilon(self, poly_file, tmp_path, capsys):
        cert = self._cert(poly_file, tmp_path)
        data = json.loads(cert.read_text())
        data["epsilon"] = "2"
        cert.write_text(json.dumps(data))
        capsys.readouterr()
        assert main(["verify", str(poly_file), str(cert)]) == 2
        assert capsys.readouterr().out.strip() in ("reject(identity-mismatch)", "reject(undecided-sign)")

    def test_unreadable(self, poly_file, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["verify", str(poly_file), str(bad)]) == 1


class TestBenchAndFilter:
    def test_bench_csv(self, tmp_path):
        out = tmp_path / "b.csv"
        assert main(["bench", "--grid", "1,2", "--csv", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert rows[0] == ["d", "algorithm", "t_epsilon", "t_u", "t_total", "verified"]
        assert len(rows) == 7 and all(r[5] == "true" for r in rows[1:])

    def test_bench_bad_alg(self):
        assert main(["bench", "--grid", "1", "--algs", "csos9"]) == 1

    def test_filter_loose(self, tmp_path):
        out = tmp_path / "f.json"
        assert main(["filter", "--d", "5", "--wp", "1/5", "--ws", "1/4", "--gp", "1", "--gs", "1", "--out", str(out)]) == 0
        assert out.exists() and out.with_suffix(".txt").exists()

    def test_filter_inverted(self):
        assert main(["filter", "--d", "5", "--wp", "1/4", "--ws", "1/5", "--gp", "1", "--gs", "1"]) == 1
