from __future__ import annotations

import contextlib
import io
from pathlib import Path

import pytest

from two_transport.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

CASES = {
    "validate_abelian.txt": ["validate", "abelian_torus.cocycle"],
    "validate_mutated.txt": ["validate", "mutated_f.cocycle", "--grid", "4", "--quiet"],
    "transport_path.txt": ["transport-path", "abelian_torus_4patch.cocycle", "line.path"],
    "transport_surface_ode.txt": ["transport-surface", "eg_su2_torus.cocycle",
                                  "smooth.bigon", "--cells", "32", "--method", "ode"],
    "transport_surface_lattice.txt": ["transport-surface", "eg_su2_torus.cocycle",
                                      "smooth.bigon", "--cells", "16"],
    "holonomy_oracle.txt": ["holonomy", "abelian_torus.cocycle", "torus.surface",
                            "--cells", "32", "--check", "oracle"],
    "compare_oracle.txt": ["compare-oracle", "eg_su2_torus.cocycle", "smooth.bigon",
                           "--cells-list", "8,16"],
}


def run_cli(argv):
    resolved = [str(FIXTURES / a) if (FIXTURES / a).exists() else a for a in argv]
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(resolved)
    return f"exit {code}\n" + buf.getvalue()


@pytest.mark.parametrize("golden_name", sorted(CASES))
def test_outputs_match_golden_files(golden_name):
    out = run_cli(CASES[golden_name])
    assert out == (GOLDEN / golden_name).read_text()


def test_outputs_are_byte_reproducible():
    argv = CASES["transport_surface_lattice.txt"]
    assert run_cli(argv) == run_cli(argv)


def test_validate_exit_codes_and_failing_clause():
    good = run_cli(["validate", "abelian_torus.cocycle", "--quiet"])
    assert good.startswith("exit 0")
    bad = run_cli(["validate", "mutated_f.cocycle", "--grid", "4", "--quiet"])
    assert bad.startswith("exit 1")
    assert "triple_g[0,1,2]" in bad  # the failing clause is named


def test_parse_error_is_reported(tmp_path, capsys):
    f = tmp_path / "broken.cocycle"
    f.write_text("[base]\ndimension == 2\n")
    code = main(["validate", str(f)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_expression_name_is_reported(tmp_path, capsys):
    f = tmp_path / "broken.cocycle"
    f.write_text("""
[base]
dimension = 2
lower = 0 0
upper = 1 1
periodic = true true

[crossed_module]
name = BA:U1

[patch 0]
box = -0.1 -0.1 ; 1.1 1.1
B12 = frob(x1)*E1
""")
    code = main(["validate", str(f)])
    assert code == 1
    err = capsys.readouterr().err
    assert "unknown name" in err
