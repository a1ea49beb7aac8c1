import json
import os

import pytest

from markoffmodp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestReduce:
    def test_worked_example(self, capsys):
        code, out, _ = run(capsys, "reduce", "--kappa", "0",
                           "--poly", "y^4 - y^2*z^2 + 1/2*x^2*y^2")
        assert code == 0
        assert out.strip() == "x^4 - 3*x^2"

    def test_symbolic(self, capsys):
        code, out, _ = run(capsys, "reduce", "--kappa", "sym", "--poly", "x^4*y^2")
        assert code == 0
        assert out.strip() == "2*x^4 + (-2*k + 24)*x^2 + (-8*k)"

    def test_phi_x_zero(self, capsys):
        code, out, _ = run(capsys, "reduce", "--kappa", "0", "--phi-x",
                           "--poly", "x*y^4 - x*y^2*z^2 + 1/2*x^3*y^2")
        assert code == 0
        assert out.strip() == "0"

    def test_mod_p(self, capsys):
        code, out, _ = run(capsys, "reduce", "--kappa", "0", "--p", "7",
                           "--poly", "y^4 - y^2*z^2 + 1/2*x^2*y^2")
        assert code == 0
        assert out.strip() == "x^4 + 4*x^2"

    def test_bad_poly_is_domain_error(self, capsys):
        code, _, err = run(capsys, "reduce", "--kappa", "0", "--poly", "q^2")
        assert code == 1

    def test_unknown_flag_usage_error(self, capsys):
        assert main(["reduce", "--nope"]) == 64

    def test_no_subcommand_usage_error(self, capsys):
        assert main([]) == 64


class TestOrbits:
    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "orbits", "--p", "7", "--kappa", "0", "--json")
        assert code == 0
        data = json.loads(out)
        assert data["p"] == 7 and len(data["orbits"]) == 2

    def test_kappa_four_domain_error(self, capsys):
        code, _, err = run(capsys, "orbits", "--p", "7", "--kappa", "4")
        assert code == 1

    def test_even_p_rejected(self, capsys):
        code, _, _ = run(capsys, "orbits", "--p", "2", "--kappa", "0")
        assert code == 1


class TestVerify:
    def test_main1_table(self, capsys):
        code, out, _ = run(capsys, "verify-main1", "--p", "7")
        assert code == 0
        assert out.count("ok") == 6

    def test_nielsen(self, capsys):
        code, out, _ = run(capsys, "verify-nielsen", "--p", "5", "--kappa", "0")
        assert code == 0
        assert '"orbit_count": 2' in out

    def test_nielsen_resource_error(self, capsys):
        code, _, err = run(capsys, "verify-nielsen", "--p", "13", "--kappa", "0")
        assert code == 3


class TestSpectral:
    def test_diagnostics(self, capsys):
        code, out, _ = run(capsys, "spectral", "--p", "101", "--kappa", "5")
        assert code == 0
        data = json.loads(out)
        assert all(data["qn_match"].values())
        assert data["det2"] == data["det2_expected"]


class TestCache:
    def test_roundtrip_and_checksum(self, tmp_path, capsys):
        path = tmp_path / "cache.json"
        code, out, _ = run(capsys, "cache", "--build", "2", "2", "--path", str(path))
        assert code == 0 and path.exists()
        code, out, _ = run(capsys, "cache", "--verify", "--path", str(path))
        assert code == 0 and "cache ok" in out
        # bit-exact round trip
        first = path.read_text()
        code, _, _ = run(capsys, "cache", "--build", "2", "2", "--path", str(path))
        assert path.read_text() == first
        # corruption detected
        body = json.loads(first)
        key = next(iter(body["entries"]))
        sub = next(iter(body["entries"][key]))
        body["entries"][key][sub][0] += 1
        path.write_text(json.dumps(body, sort_keys=True, separators=(",", ":")))
        code, _, err = run(capsys, "cache", "--verify", "--path", str(path))
        assert code == 1

    def test_env_var_path(self, tmp_path, capsys, monkeypatch):
        path = tmp_path / "envcache.json"
        monkeypatch.setenv("MARKOFF_CACHE", str(path))
        code, _, _ = run(capsys, "cache", "--build", "1", "1")
        assert code == 0 and path.exists()


class TestSelftest:
    def test_fast_level(self, capsys):
        code, out, _ = run(capsys, "selftest", "--level", "fast")
        assert code == 0
        assert "FAIL" not in out


class TestCertifyCli:
    def test_degenerate_d2_inconclusive(self, tmp_path, capsys):
        out_path = tmp_path / "cert2.json"
        code, out, _ = run(capsys, "certify", "--d", "2", "--n-d", "8",
                           "--out", str(out_path))
        assert code in (0, 2)
        assert out_path.exists()
        code2, out2, _ = run(capsys, "recheck", "--cert", str(out_path))
        assert code2 == 0

    def test_version_mismatch_rebuilds(self, tmp_path, capsys):
        import hashlib
        from markoffmodp.certify import canonical_json

        path = tmp_path / "cache.json"
        run(capsys, "cache", "--build", "1", "1", "--path", str(path))
        body = json.loads(path.read_text())
        body.pop("checksum")
        body["version"] = 0  # stale
        body["checksum"] = hashlib.sha256(canonical_json(body).encode()).hexdigest()
        ordered = {k: body[k] for k in body if k != "checksum"}
        text = canonical_json({**ordered, "checksum": hashlib.sha256(canonical_json(ordered).encode()).hexdigest()})
        path.write_text(text)
        code, out, err = run(capsys, "cache", "--verify", "--path", str(path))
        assert code == 0 and "rebuilt" in out
        code, out, _ = run(capsys, "cache", "--verify", "--path", str(path))
        assert code == 0 and "cache ok" in out
