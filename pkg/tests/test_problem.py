import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qndphase.linalg import frobenius_norm, hermitian_expi
from qndphase.problem import (
    ProblemError,
    QpeProblem,
    TargetSpec,
    UnitarySpec,
    diagnose,
    format_complex,
    parse,
    parse_complex,
    parse_phase,
    phase_mod,
    resolve,
    serialize,
)

FIXTURES = Path(__file__).parent / "fixtures"
VALID = sorted((FIXTURES / "valid").glob("*.qpe"))
INVALID = sorted((FIXTURES / "invalid").glob("*.qpe"))


def expected_line(path):
    return int(path.read_text().splitlines()[0].split(":")[1])


class TestLiterals:
    @pytest.mark.parametrize(
        "text, value",
        [
            ("0.75pi", 0.75 * math.pi),
            ("pi", math.pi),
            ("-pi", -math.pi),
            ("+pi", math.pi),
            ("1.5", 1.5),
            ("-2pi", -2 * math.pi),
            ("1e-3", 1e-3),
            ("0.5PI", 0.5 * math.pi),
            (".25pi", 0.25 * math.pi),
        ],
    )
    def test_phase(self, text, value):
        assert parse_phase(text) == value

    @pytest.mark.parametrize("text", ["", "pie", "1..2", "pi2", "--1"])
    def test_bad_phase(self, text):
        with pytest.raises(ValueError):
            parse_phase(text)

    def test_pi_sum_wraps(self):
        total = parse_phase("1pi") + parse_phase("1pi")
        assert total == parse_phase("2pi")
        assert phase_mod(total) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "text, value",
        [
            ("1", 1),
            ("-0.5", -0.5),
            ("i", 1j),
            ("-i", -1j),
            ("0.5i", 0.5j),
            ("1+2i", 1 + 2j),
            ("1-2i", 1 - 2j),
            ("1e-3+2e-3i", 1e-3 + 2e-3j),
            ("-1j", -1j),
            ("3+i", 3 + 1j),
        ],
    )
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["nan", "inf", "1+2k", "(1+2j)", "1 + 2i", "2ii", ""])
    def test_bad_complex(self, text):
        with pytest.raises(ValueError):
            parse_complex(text)

    @pytest.mark.parametrize("z", [1 + 0j, -0.5 - 0.25j, complex(0.1, -0.0), 1e-300j])
    def test_format_roundtrip(self, z):
        assert parse_complex(format_complex(z)) == z


class TestExamples:
    def test_fig2(self):
        p = parse("index_bits 1\nunitary gate X\ntarget eigen minus\nshots 100\nseed 7\n")
        assert p == QpeProblem(1, UnitarySpec("gate", "X"), TargetSpec("eigen", "minus"), 100, 7)
        u, t = resolve(p)
        np.testing.assert_array_equal(u, [[0, 1], [1, 0]])
        np.testing.assert_allclose(t, np.array([1, -1]) / math.sqrt(2))

    def test_three_quarter_pi(self):
        p = parse("index_bits 3\nunitary diag 0,0.75pi\ntarget basis 1\n")
        u, t = p.resolve()
        assert np.angle(u[1, 1]) == pytest.approx(3 * math.pi / 4, abs=1e-15)
        np.testing.assert_array_equal(t, [0, 1])
        assert p.shots == 1024 and p.seed is None

    def test_empty_source(self):
        with pytest.raises(ProblemError) as err:
            parse("")
        first = err.value.diagnostics[0]
        assert (first.line, first.message) == (1, "missing index_bits")

    def test_named_gates(self):
        z = parse("index_bits 1\nunitary gate Z\ntarget basis 0\n").unitary_matrix()
        np.testing.assert_array_equal(z, [[1, 0], [0, -1]])
        h = parse("index_bits 1\nunitary gate H\ntarget basis 0\n").unitary_matrix()
        np.testing.assert_allclose(h, np.array([[1, 1], [1, -1]]) / math.sqrt(2))

    def test_identity_diag(self):
        u = parse("index_bits 1\nunitary diag 0,0\ntarget basis 0\n").unitary_matrix()
        np.testing.assert_array_equal(u, np.eye(2))

    def test_hamiltonian_is_exponentiated(self):
        p = parse("index_bits 1\nunitary hamiltonian [[0, 1], [1, 0]]\ntarget basis 0\n")
        expected = hermitian_expi(np.array([[0, 1], [1, 0]]))
        np.testing.assert_allclose(p.unitary_matrix(), expected, atol=1e-15)


class TestDiagnostics:
    def test_all_errors_collected(self):
        diags = diagnose("index_bits x\nunitary gate Q\nfrobnicate\ntarget eigen up\n")
        assert [d.line for d in diags] == [1, 2, 3, 4]
        assert all(d.severity == "error" for d in diags)

    def test_columns_point_at_token(self):
        (d,) = diagnose("index_bits 1\nunitary diag 0, 0.5pi, zz, 1\ntarget basis 0\n")
        assert d.line == 2
        assert "unitary diag 0, 0.5pi, zz, 1"[d.column - 1:].startswith("zz")

    def test_non_unitary_reports_norm(self):
        (d,) = diagnose("index_bits 1\nunitary matrix [[1, 0], [0, 2]]\ntarget basis 0\n")
        assert "||U U^dagger - I||_F = 3.000e+00" in d.message

    def test_literal_cap(self):
        rows = ", ".join("[" + ", ".join("1" if i == j else "0" for j in range(32)) + "]" for i in range(32))
        (d,) = diagnose(f"index_bits 1\nunitary matrix [{rows}]\ntarget basis 0\n")
        assert "cap" in d.message

    def test_never_raises(self):
        for junk in ["\x00\x01", "[[[[", "unitary matrix ]", "target amps [,]", "#only\n#comments"]:
            assert isinstance(diagnose(junk), list)

    def test_warning_does_not_fail(self):
        p = parse("index_bits 1\nunitary gate X\ntarget basis 0\n")
        assert [w.severity for w in p.warnings] == ["warning"]


@pytest.mark.parametrize("path", VALID, ids=lambda p: p.stem)
def test_valid_fixture_roundtrip(path):
    p = parse(path.read_text())
    again = parse(serialize(p))
    assert again == p
    assert serialize(again) == serialize(p)


@pytest.mark.parametrize("path", VALID, ids=lambda p: p.stem)
def test_valid_fixture_generator(path):
    p = parse(path.read_text())
    h = p.generator()
    assert frobenius_norm(h - h.conj().T) < 1e-10
    assert frobenius_norm(hermitian_expi(h) - p.unitary_matrix()) < 1e-9


@pytest.mark.parametrize("path", INVALID, ids=lambda p: p.stem)
def test_invalid_fixture_diagnosed(path):
    text = path.read_text()
    errors = [d for d in diagnose(text) if d.severity == "error"]
    assert errors
    assert expected_line(path) in {d.line for d in errors}
    n_lines = max(1, len(text.splitlines()))
    assert all(1 <= d.line <= n_lines and d.column >= 1 for d in errors)
    with pytest.raises(ProblemError):
        parse(text)


def test_corpus_size():
    assert len(VALID) >= 20 and len(INVALID) >= 20


phases = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(1, 6),
    t=st.integers(1, 3),
    data=st.data(),
    shots=st.integers(0, 10**6),
    seed=st.one_of(st.none(), st.integers(0, 2**63)),
)
def test_generated_roundtrip(m, t, data, shots, seed):
    dim = 2**t
    ph = tuple(data.draw(st.lists(phases, min_size=dim, max_size=dim)))
    basis = data.draw(st.integers(0, dim - 1))
    p = QpeProblem(m, UnitarySpec("diag", ph), TargetSpec("basis", basis), shots, seed)
    assert parse(serialize(p)) == p
