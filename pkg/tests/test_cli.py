import io
import json
import random
import subprocess
import sys
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from eulerop.cli import dispatch
from eulerop.coeff import Field
from eulerop.errors import OperatorSyntaxError, UnknownParameter
from eulerop.opalg import DiffOp
from eulerop.parser import parse_operator, tokenize

GOLDEN = Path(__file__).parent / "golden"


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = dispatch(argv)
    return code, buf.getvalue()


class TestParser:
    def test_euler_product(self):
        field = Field(["E"])
        op = parse_operator("D*(D-1)", field)
        assert op == DiffOp(field, {(2, 2): 1})
        # verify against the action on monomials
        from eulerop.opalg import LaurentPoly

        for k in range(6):
            mono = LaurentPoly.monomial(field, k)
            assert op.apply(mono) == mono * (k * (k - 1))

    def test_laguerre_exponent_string(self):
        field = Field(["alpha"])
        alpha = field.param("alpha")
        d = DiffOp.deriv(field)
        x = DiffOp.x_power(field)
        assert parse_operator("x*d^2 + (alpha+1)*d", field) == x * (d * d) + d * (alpha + 1)

    def test_negative_exponent_on_d_is_syntax_error(self):
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("d^-1", Field([]))
        assert err.value.line == 1 and err.value.column == 3

    def test_error_carries_position_and_expectations(self):
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("x + ", Field([]))
        assert err.value.expected
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("(x", Field([]))
        assert ")" in err.value.expected

    def test_unknown_parameter_position(self):
        with pytest.raises(UnknownParameter) as err:
            parse_operator("x + zeta", Field([]))
        assert err.value.name == "zeta"
        assert err.value.column == 5

    def test_rational_literals(self):
        field = Field([])
        from fractions import Fraction

        assert parse_operator("1/2", field) == DiffOp.scalar(field, Fraction(1, 2))
        with pytest.raises(OperatorSyntaxError):
            parse_operator("1/0", field)

    def test_precedence(self):
        field = Field([])
        x = DiffOp.x_power(field)
        d = DiffOp.deriv(field)
        assert parse_operator("x*d^2", field) == x * (d * d)
        assert parse_operator("2*x + x*d", field) == x * 2 + x * d

    def test_tokenizer_positions(self):
        toks = tokenize("x +\nbeta")
        assert toks[2].line == 2 and toks[2].column == 1

    def test_fuzz_no_crashes(self):
        rng = random.Random(99)
        field = Field(["alpha", "E"])
        vocab = ["x", "d", "D", "0", "7", "alpha", "E", "bad",
                 "+", "-", "*", "^", "(", ")", "/"]
        for _ in range(3000):
            src = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
            try:
                parse_operator(src, field)
            except (OperatorSyntaxError, UnknownParameter):
                pass


class TestGolden:
    @pytest.mark.parametrize(
        "argv,name",
        [
            (["gen", "--family", "hermite", "--n", "3"], "gen_hermite_3.json"),
            (
                ["solve", "--f", "D*(D-1)", "--p", "x^2*(2*E - x^2)",
                 "--params", "E", "--lambda", "0", "--cutoff", "4"],
                "solve_harmonic.json",
            ),
            (["qes", "sextic", "--n", "4", "--gamma", "1"], "qes_sextic_4.json"),
            (["jack", "--partition", "2,0", "--N", "2"], "jack_20.json"),
            (["calogero", "--partition", "2,0", "--N", "2"], "calogero_20.json"),
            (
                ["ladder", "--kind", "laguerre_raise", "--n-max", "6"],
                "ladder_laguerre_raise.json",
            ),
            (
                ["gen", "--family", "laguerre", "--n", "2", "--format", "csv"],
                "gen_laguerre_2.csv",
            ),
            (
                ["gen", "--family", "legendre", "--n", "3", "--format", "latex"],
                "gen_legendre_3.tex",
            ),
        ],
    )
    def test_golden_outputs(self, argv, name):
        code, out = run_cli(argv)
        assert code == 0
        assert out == (GOLDEN / name).read_text()

    def test_json_round_trip_byte_identical(self):
        for path in sorted(GOLDEN.glob("*.json")):
            text = path.read_text().rstrip("\n")
            assert json.dumps(json.loads(text)) == text


class TestDispatch:
    def test_gen_matches_oracle_route(self):
        code, out = run_cli(["gen", "--family", "hermite", "--n", "3"])
        doc = json.loads(out)
        assert doc == {
            "variable": "x",
            "terms": [{"exp": 3, "coeff": "8"}, {"exp": 1, "coeff": "-12"}],
        }

    def test_solve_example_coefficients(self):
        code, out = run_cli(
            ["solve", "--f", "D*(D-1)", "--p", "x^2*(2*E - x^2)",
             "--params", "E", "--lambda", "0", "--cutoff", "4"]
        )
        assert code == 0
        doc = json.loads(out)
        coeffs = {t["exp"]: t["coeff"] for t in doc["terms"]}
        assert coeffs[2] == "-E"
        assert coeffs[4] == "(2*E^2 + 1)/(12)"
        assert doc["lambda"] == 0 and doc["terminated"] is False

    def test_qes_values(self):
        code, out = run_cli(["qes", "sextic", "--n", "4", "--gamma", "1"])
        doc = json.loads(out)
        assert code == 0
        assert doc["alpha"] == "-11"
        assert [e["exact"] for e in doc["energies"]] == ["-8", "0", "8"]

    def test_bindings(self):
        code, out = run_cli(
            ["gen", "--family", "laguerre", "--n", "1", "--bind", "alpha=1"]
        )
        doc = json.loads(out)
        assert {t["exp"]: t["coeff"] for t in doc["terms"]} == {1: "-1", 0: "2"}

    def test_verify_ok(self):
        code, out = run_cli(["verify", "--family", "gegenbauer", "--n", "4"])
        assert code == 0
        assert json.loads(out)["residual_zero"] is True

    def test_out_file(self, tmp_path):
        target = tmp_path / "out.json"
        code, out = run_cli(
            ["gen", "--family", "hermite", "--n", "2", "--out", str(target)]
        )
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["terms"][0]["coeff"] == "4"


class TestExitCodes:
    def test_success(self):
        assert run_cli(["gen", "--family", "hermite", "--n", "1"])[0] == 0

    def test_usage_error_bad_flag(self):
        assert run_cli(["gen", "--family", "nosuch", "--n", "1"])[0] == 2

    def test_usage_error_syntax(self):
        code, _ = run_cli(
            ["solve", "--f", "D", "--p", "d^-1", "--lambda", "0", "--cutoff", "3"]
        )
        assert code == 2

    def test_usage_error_unknown_parameter(self):
        code, _ = run_cli(
            ["solve", "--f", "D", "--p", "zeta*x", "--lambda", "0", "--cutoff", "3"]
        )
        assert code == 2

    def test_math_error_resonance(self):
        code, _ = run_cli(
            ["solve", "--f", "D*(D-1)", "--p", "x", "--params", "E",
             "--lambda", "0", "--cutoff", "4"]
        )
        assert code == 3

    def test_math_error_gamma_not_square_is_usage(self):
        # non-square gamma is a usage error (bad input value), not math
        code, _ = run_cli(["qes", "sextic", "--n", "4", "--gamma", "2"])
        assert code == 2

    def test_installed_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "eulerop.cli", "gen", "--family", "hermite", "--n", "3"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["terms"][0]["coeff"] == "8"


class TestFormats:
    def test_csv(self):
        code, out = run_cli(
            ["gen", "--family", "hermite", "--n", "3", "--format", "csv"]
        )
        assert out == "exp,coeff\n3,8\n1,-12\n"

    def test_latex(self):
        code, out = run_cli(
            ["gen", "--family", "hermite", "--n", "2", "--format", "latex"]
        )
        assert out.strip() == "4 x^{2} -2"

    def test_jack_csv(self):
        code, out = run_cli(
            ["jack", "--partition", "2,0", "--N", "2", "--format", "csv"]
        )
        assert out.splitlines()[0] == "partition,coeff"
        assert "2 0,1" in out

    def test_jack_latex(self):
        code, out = run_cli(
            ["jack", "--partition", "2,0", "--N", "2", "--format", "latex"]
        )
        assert "m_{2,0}" in out and "m_{1,1}" in out
