"""The ``.qpe`` problem format.

A problem file is UTF-8 text, one directive per line, ``#`` starts a comment::

    index_bits 3
    unitary diag 0, 0.75pi
    target basis 1
    shots 500
    seed 7

Grammar (EBNF)::

    file       = { line } ;
    line       = [ directive ] [ "#" { any } ] newline ;
    directive  = "index_bits" int
               | "unitary" ( "gate" ( "X" | "Z" | "H" )
                           | "diag" phase { "," phase }
                           | "matrix" matrix
                           | "hamiltonian" matrix )
               | "target" ( "basis" int | "amps" vector | "eigen" ( "plus" | "minus" ) )
               | "shots" int
               | "seed" int ;
    matrix     = "[" vector { "," vector } "]" ;
    vector     = "[" complex { "," complex } "]" ;
    phase      = real [ "pi" ] | [ "+" | "-" ] "pi" ;
    complex    = real | [ real ] ( "+" | "-" ) [ unsigned ] "i" | [ sign ] [ unsigned ] "i" ;

``index_bits``, ``unitary`` and ``target`` are required; ``shots`` defaults to
1024 and ``seed`` to the CLI seed. ``j`` is accepted in place of ``i``.
Every problem is checked in full and all diagnostics are reported together.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import config
from .linalg import frobenius_norm, hermitian_expi, is_hermitian
from .registers import HADAMARD, X, Z

DEFAULT_SHOTS = 1024
MAX_LITERAL_DIM = 16
UNITARY_TOL = 1e-8
NORM_TOL = 1e-6
EIGEN_TOL = 1e-6

GATES = {"X": X, "Z": Z, "H": HADAMARD}
EIGENSTATES = {
    "plus": np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0),
    "minus": np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0),
}

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"[+-]?{_NUM}")
_PHASE_RE = re.compile(rf"(?P<num>[+-]?{_NUM})?(?P<pi>pi)?", re.IGNORECASE)
_IMAG_RE = re.compile(rf"(?P<sign>[+-]?)(?P<num>{_NUM})?[ij]")
_CPLX_RE = re.compile(rf"(?P<re>[+-]?{_NUM})(?P<sign>[+-])(?P<num>{_NUM})?[ij]")
_INT_RE = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "line": self.line,
            "column": self.column,
            "severity": self.severity,
            "message": self.message,
        }


class ProblemError(ValueError):
    """Raised by :func:`parse` when the source has at least one error."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__("\n".join(str(d) for d in errors))


@dataclass(frozen=True)
class UnitarySpec:
    kind: str  # gate | diag | matrix | hamiltonian
    value: object  # str, tuple of floats, or tuple of tuples of complex


@dataclass(frozen=True)
class TargetSpec:
    kind: str  # basis | amps | eigen
    value: object  # int, tuple of complex, or "plus"/"minus"


@dataclass(frozen=True)
class QpeProblem:
    index_bits: int
    unitary: UnitarySpec
    target: TargetSpec
    shots: int = DEFAULT_SHOTS
    seed: int | None = None
    warnings: tuple[ParseDiagnostic, ...] = field(default=(), compare=False)

    def unitary_matrix(self) -> np.ndarray:
        return resolve_unitary(self.unitary)

    def target_vector(self) -> np.ndarray:
        return resolve_target(self.target, self.unitary_matrix().shape[0])

    def resolve(self) -> tuple[np.ndarray, np.ndarray]:
        u = self.unitary_matrix()
        return u, resolve_target(self.target, u.shape[0])

    def generator(self) -> np.ndarray:
        """Hermitian ``H_U`` with ``U = exp(i H_U)`` and eigenphases in [0, 2π)."""
        return unitary_generator(self.unitary)

    def to_source(self) -> str:
        return serialize(self)


# -- literal parsing ---------------------------------------------------------


def parse_phase(text: str) -> float:
    """``"0.75pi"`` -> 0.75π, ``"-pi"`` -> -π, ``"1.5"`` -> 1.5 radians."""
    m = _PHASE_RE.fullmatch(text.strip())
    if not m or not (m.group("num") or m.group("pi")):
        # bare sign followed by pi, e.g. "-pi"
        if text.strip().lower() in ("+pi", "-pi"):
            return -math.pi if text.strip().startswith("-") else math.pi
        raise ValueError(f"malformed phase {text!r}")
    num = float(m.group("num")) if m.group("num") else 1.0
    return num * math.pi if m.group("pi") else num


def parse_complex(text: str) -> complex:
    t = text.strip()
    if _REAL_RE.fullmatch(t):
        return complex(float(t), 0.0)
    m = _IMAG_RE.fullmatch(t)
    if m:
        im = float(m.group("num")) if m.group("num") else 1.0
        return complex(0.0, -im if m.group("sign") == "-" else im)
    m = _CPLX_RE.fullmatch(t)
    if m:
        im = float(m.group("num")) if m.group("num") else 1.0
        return complex(float(m.group("re")), -im if m.group("sign") == "-" else im)
    raise ValueError(f"malformed complex number {text!r}")


def format_complex(z: complex) -> str:
    re_part = repr(float(z.real))
    im_part = repr(float(z.imag))
    if not im_part.startswith("-"):
        im_part = "+" + im_part
    return f"{re_part}{im_part}i"


class _LiteralError(Exception):
    def __init__(self, offset: int, message: str):
        super().__init__(message)
        self.offset = offset
        self.message = message


def _tokenize_brackets(text: str, base: int):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "[],":
            tokens.append((ch, base + i))
            i += 1
        else:
            j = i
            while j < len(text) and text[j] not in "[]," and not text[j].isspace():
                j += 1
            tokens.append((text[i:j], base + i))
            i = j
    return tokens


def _parse_nested(text: str, base: int):
    """Parse a bracketed list literal into nested lists of (token, offset)."""
    tokens = _tokenize_brackets(text, base)
    end = base + len(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, end)

    def parse_item():
        nonlocal pos
        tok, off = peek()
        if tok is None:
            raise _LiteralError(off, "unexpected end of literal")
        if tok == "[":
            pos += 1
            items = []
            if peek()[0] == "]":
                raise _LiteralError(peek()[1], "empty list")
            while True:
                items.append(parse_item())
                tok, off = peek()
                if tok == ",":
                    pos += 1
                elif tok == "]":
                    pos += 1
                    return items
                elif tok is None:
                    raise _LiteralError(off, "missing ']'")
                else:
                    raise _LiteralError(off, f"expected ',' or ']', found {tok!r}")
        if tok in ("]", ","):
            raise _LiteralError(off, f"unexpected {tok!r}")
        pos += 1
        return (tok, off)

    tok, off = peek()
    if tok != "[":
        raise _LiteralError(off, "expected '['")
    value = parse_item()
    if pos < len(tokens):
        raise _LiteralError(tokens[pos][1], f"trailing text {tokens[pos][0]!r}")
    return value


def _complex_list(items, what: str, start: int) -> tuple[complex, ...]:
    if not isinstance(items, list):
        raise _LiteralError(items[1], f"{what} must be a list")
    out = []
    for item in items:
        if isinstance(item, list):
            raise _LiteralError(start, f"{what} entries must be numbers, found a nested list")
        tok, off = item
        try:
            out.append(parse_complex(tok))
        except ValueError as exc:
            raise _LiteralError(off, str(exc)) from None
    return tuple(out)


def _matrix_literal(text: str, base: int) -> tuple[tuple[complex, ...], ...]:
    value = _parse_nested(text, base)
    rows = []
    for item in value:
        if not isinstance(item, list):
            raise _LiteralError(item[1], "matrix rows must be bracketed lists")
        rows.append(_complex_list(item, "matrix row", base))
    n = len(rows)
    for r in rows:
        if len(r) != n:
            raise _LiteralError(base, f"matrix must be square: {n} rows but a row of length {len(r)}")
    if n > MAX_LITERAL_DIM:
        raise _LiteralError(base, f"matrix literal of dim {n} exceeds the cap of {MAX_LITERAL_DIM}")
    if n < 2 or n & (n - 1):
        raise _LiteralError(base, f"matrix dimension must be a power of two >= 2, got {n}")
    return tuple(rows)


# -- resolution --------------------------------------------------------------


def _as_array(rows) -> np.ndarray:
    return np.array(rows, dtype=np.complex128)


def resolve_unitary(spec: UnitarySpec) -> np.ndarray:
    if spec.kind == "gate":
        return GATES[spec.value].copy()
    if spec.kind == "diag":
        return np.diag(np.exp(1j * np.asarray(spec.value, dtype=float)))
    if spec.kind == "matrix":
        return _as_array(spec.value)
    if spec.kind == "hamiltonian":
        return hermitian_expi(_as_array(spec.value), 1.0, UNITARY_TOL)
    raise ValueError(f"unknown unitary kind {spec.kind!r}")


def resolve_target(spec: TargetSpec, dim: int) -> np.ndarray:
    if spec.kind == "basis":
        if not 0 <= spec.value < dim:
            raise ValueError(f"basis index {spec.value} out of range for dimension {dim}")
        v = np.zeros(dim, dtype=np.complex128)
        v[spec.value] = 1.0
        return v
    if spec.kind == "amps":
        v = np.array(spec.value, dtype=np.complex128)
        if v.size != dim:
            raise ValueError(f"target has {v.size} amplitudes but the unitary has dimension {dim}")
        return v
    if spec.kind == "eigen":
        if dim != 2:
            raise ValueError(f"named eigenstates need a single-qubit unitary, got dimension {dim}")
        return EIGENSTATES[spec.value].copy()
    raise ValueError(f"unknown target kind {spec.kind!r}")


def _phase_generator(u: np.ndarray) -> np.ndarray:
    # complex Schur form of a normal matrix is diagonal
    from scipy.linalg import schur

    t, zmat = schur(u, output="complex")
    phases = np.mod(np.angle(np.diag(t)), 2.0 * math.pi)
    h = (zmat * phases) @ zmat.conj().T
    return 0.5 * (h + h.conj().T)


def unitary_generator(spec: UnitarySpec) -> np.ndarray:
    if spec.kind == "hamiltonian":
        return _as_array(spec.value)
    if spec.kind == "diag":
        return np.diag(np.asarray(spec.value, dtype=float)).astype(np.complex128)
    if spec.kind == "gate":
        # X, Z and H are Hermitian involutions: U = exp(i π/2 (I - U))
        g = GATES[spec.value]
        return (math.pi / 2.0) * (np.eye(2) - g)
    return _phase_generator(resolve_unitary(spec))


def phase_mod(phi: float) -> float:
    return math.fmod(math.fmod(phi, 2.0 * math.pi) + 2.0 * math.pi, 2.0 * math.pi)


# -- parser --------------------------------------------------------------------


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _words(text: str):
    """Whitespace-separated words with their 0-based offsets."""
    return [(m.group(), m.start()) for m in re.finditer(r"\S+", text)]


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.lines = source.splitlines()
        self.diags: list[ParseDiagnostic] = []
        self.fields: dict[str, tuple[object, int, int]] = {}

    def error(self, line: int, col: int, message: str, severity: str = "error"):
        self.diags.append(ParseDiagnostic(line, col + 1, message, severity))

    def _int(self, lineno, words, key, minimum=None):
        if len(words) != 2:
            col = words[2][1] if len(words) > 2 else words[0][1] + len(words[0][0])
            self.error(lineno, col, f"'{key}' takes exactly one integer")
            return None
        tok, off = words[1]
        if not _INT_RE.fullmatch(tok):
            self.error(lineno, off, f"'{key}' expects an integer, found {tok!r}")
            return None
        value = int(tok)
        if minimum is not None and value < minimum:
            self.error(lineno, off, f"'{key}' must be >= {minimum}, got {value}")
            return None
        return value

    def _unitary(self, lineno, raw, words):
        if len(words) < 2:
            self.error(lineno, words[0][1] + len(words[0][0]), "'unitary' needs a kind: gate, diag, matrix or hamiltonian")
            return None
        kind, koff = words[1]
        rest_off = koff + len(kind)
        rest = raw[rest_off:]
        if kind == "gate":
            if len(words) != 3:
                self.error(lineno, rest_off, "'unitary gate' takes one gate name (X, Z or H)")
                return None
            name, noff = words[2]
            if name not in GATES:
                self.error(lineno, noff, f"unknown gate {name!r}; expected X, Z or H")
                return None
            return UnitarySpec("gate", name)
        if kind == "diag":
            if not rest.strip():
                self.error(lineno, rest_off, "'unitary diag' needs a comma-separated phase list")
                return None
            phases = []
            ok = True
            pos = rest_off
            for piece in rest.split(","):
                stripped = piece.strip()
                col = pos + (len(piece) - len(piece.lstrip()))
                try:
                    phases.append(parse_phase(stripped))
                except ValueError:
                    self.error(lineno, col, f"malformed phase {stripped!r}")
                    ok = False
                pos += len(piece) + 1
            if not ok:
                return None
            n = len(phases)
            if n < 2 or n & (n - 1):
                self.error(lineno, koff, f"diag needs a power-of-two number (>= 2) of phases, got {n}")
                return None
            if n > 2**config.max_qubits():
                self.error(lineno, koff, f"diag of length {n} exceeds the register cap")
                return None
            return UnitarySpec("diag", tuple(phases))
        if kind in ("matrix", "hamiltonian"):
            try:
                rows = _matrix_literal(rest, rest_off)
            except _LiteralError as exc:
                self.error(lineno, exc.offset, exc.message)
                return None
            return UnitarySpec(kind, rows)
        self.error(lineno, koff, f"unknown unitary kind {kind!r}; expected gate, diag, matrix or hamiltonian")
        return None

    def _target(self, lineno, raw, words):
        if len(words) < 2:
            self.error(lineno, words[0][1] + len(words[0][0]), "'target' needs a kind: basis, amps or eigen")
            return None
        kind, koff = words[1]
        rest_off = koff + len(kind)
        if kind == "basis":
            value = self._int(lineno, words[1:], "target basis", minimum=0)
            return None if value is None else TargetSpec("basis", value)
        if kind == "eigen":
            if len(words) != 3 or words[2][0] not in EIGENSTATES:
                col = words[2][1] if len(words) > 2 else rest_off
                self.error(lineno, col, "'target eigen' expects 'plus' or 'minus'")
                return None
            return TargetSpec("eigen", words[2][0])
        if kind == "amps":
            try:
                value = _parse_nested(raw[rest_off:], rest_off)
                amps = _complex_list(value, "amplitude list", rest_off)
            except _LiteralError as exc:
                self.error(lineno, exc.offset, exc.message)
                return None
            return TargetSpec("amps", amps)
        self.error(lineno, koff, f"unknown target kind {kind!r}; expected basis, amps or eigen")
        return None

    def run(self) -> QpeProblem | None:
        for lineno, line in enumerate(self.lines, start=1):
            raw = _strip_comment(line)
            words = _words(raw)
            if not words:
                continue
            key, off = words[0]
            if key in self.fields:
                self.error(lineno, off, f"duplicate '{key}' (first given on line {self.fields[key][1]})")
                continue
            if key == "index_bits":
                value = self._int(lineno, words, key, minimum=1)
            elif key == "shots":
                value = self._int(lineno, words, key, minimum=0)
            elif key == "seed":
                value = self._int(lineno, words, key, minimum=0)
            elif key == "unitary":
                value = self._unitary(lineno, raw, words)
            elif key == "target":
                value = self._target(lineno, raw, words)
            else:
                self.error(lineno, off, f"unknown key {key!r}")
                continue
            # a malformed directive still counts as given, to avoid a spurious "missing"
            self.fields[key] = (value, lineno, off)

        for key in ("index_bits", "unitary", "target"):
            if key not in self.fields:
                self.error(1, 0, f"missing {key}")
        if any(d.severity == "error" for d in self.diags):
            return None
        problem = QpeProblem(
            index_bits=self.fields["index_bits"][0],
            unitary=self.fields["unitary"][0],
            target=self.fields["target"][0],
            shots=self.fields.get("shots", (DEFAULT_SHOTS,))[0],
            seed=self.fields.get("seed", (None,))[0],
        )
        self._validate(problem)
        return problem

    def _validate(self, problem: QpeProblem) -> None:
        _, uline, uoff = self.fields["unitary"]
        _, tline, toff = self.fields["target"]
        _, mline, moff = self.fields["index_bits"]
        spec = problem.unitary
        if spec.kind == "hamiltonian":
            h = _as_array(spec.value)
            if not is_hermitian(h, UNITARY_TOL):
                dev = frobenius_norm(h - h.conj().T)
                self.error(uline, uoff, f"hamiltonian is not Hermitian: ||H - H^dagger||_F = {dev:.3e}")
                return
        u = resolve_unitary(spec)
        dev = frobenius_norm(u @ u.conj().T - np.eye(u.shape[0]))
        if dev > UNITARY_TOL:
            self.error(uline, uoff, f"matrix is not unitary: ||U U^dagger - I||_F = {dev:.3e}")
        try:
            t = resolve_target(problem.target, u.shape[0])
        except ValueError as exc:
            self.error(tline, toff, str(exc))
            return
        norm = float(np.linalg.norm(t))
        if abs(norm - 1.0) > NORM_TOL:
            self.error(tline, toff, f"target is not normalized: norm = {norm:.9g}")
        width = problem.index_bits + u.shape[0].bit_length() - 1
        if width > config.max_qubits():
            self.error(mline, moff, f"{width} qubits exceed the cap of {config.max_qubits()} (set {config.MAX_QUBITS_ENV} to raise it)")
        if any(d.severity == "error" for d in self.diags) or norm == 0.0:
            return
        t = t / norm
        ut = u @ t
        residual = float(np.linalg.norm(ut - np.vdot(t, ut) * t))
        if residual > EIGEN_TOL:
            self.error(
                tline,
                toff,
                f"target is not an eigenstate of the unitary (residual {residual:.3e}); outcomes mix eigenphases",
                severity="warning",
            )


def diagnose(source: str) -> list[ParseDiagnostic]:
    """All diagnostics for ``source``; never raises on malformed input."""
    parser = _Parser(source)
    parser.run()
    return parser.diags


def parse(source: str) -> QpeProblem:
    """Parse and validate a problem; raises :class:`ProblemError` on any error."""
    parser = _Parser(source)
    problem = parser.run()
    if problem is None or any(d.severity == "error" for d in parser.diags):
        raise ProblemError(parser.diags)
    return QpeProblem(
        problem.index_bits,
        problem.unitary,
        problem.target,
        problem.shots,
        problem.seed,
        warnings=tuple(parser.diags),
    )


def load(path) -> QpeProblem:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def resolve(problem: QpeProblem) -> tuple[np.ndarray, np.ndarray]:
    return problem.resolve()


def _format_rows(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(format_complex(z) for z in r) + "]" for r in rows) + "]"


def serialize(problem: QpeProblem) -> str:
    u, t = problem.unitary, problem.target
    lines = [f"index_bits {problem.index_bits}"]
    if u.kind == "gate":
        lines.append(f"unitary gate {u.value}")
    elif u.kind == "diag":
        lines.append("unitary diag " + ", ".join(repr(float(p)) for p in u.value))
    else:
        lines.append(f"unitary {u.kind} {_format_rows(u.value)}")
    if t.kind == "basis":
        lines.append(f"target basis {t.value}")
    elif t.kind == "eigen":
        lines.append(f"target eigen {t.value}")
    else:
        lines.append("target amps [" + ", ".join(format_complex(z) for z in t.value) + "]")
    lines.append(f"shots {problem.shots}")
    if problem.seed is not None:
        lines.append(f"seed {problem.seed}")
    return "\n".join(lines) + "\n"
