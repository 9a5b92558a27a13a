"""Chain models: state names, sojourn times and an embedded jump matrix.

A model file looks like::

    # comment
    states: A B C
    sojourn: 10 1 0.5
    matrix:
    0   1/2 1/2
    1   0   0
    1/3 2/3 0

Numbers are decimals or fractions ``a/b``; fractions are evaluated as
``a / b`` in double precision.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

ROW_SUM_TOL = 1e-9

_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


class ModelError(ValueError):
    """Base class for model problems. Carries an optional file location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", token {column}"
            where += ": "
        super().__init__(where + message)


class ParseError(ModelError):
    """Syntax or dimension error in a model file."""


class InvariantError(ModelError):
    """Model parsed but violates a chain invariant."""

    def __init__(self, issues: list["Issue"]):
        self.issues = issues
        errors = [i for i in issues if i.severity == "error"]
        super().__init__("; ".join(f"{i.locator}: {i.message}" for i in errors))


class TieError(ValueError):
    """A row maximum is attained in more than one column."""

    def __init__(self, row: int, columns: Sequence[int], name: str | None = None):
        self.row = row
        self.columns = tuple(columns)
        label = name if name is not None else str(row)
        super().__init__(
            f"row {label} has its maximum in {len(self.columns)} columns "
            f"{list(self.columns)}; perturb ties first"
        )


@dataclass(frozen=True)
class StateId:
    index: int
    name: str


@dataclass(frozen=True, eq=False)
class ChainModel:
    """An n-state chain with sojourn vector ``sojourn`` and jump matrix ``trans``.

    Arrays are made read-only on construction. ``labels`` keeps the source
    token of every matrix cell when the model came from a file.
    """

    states: tuple[StateId, ...]
    sojourn: np.ndarray
    trans: np.ndarray
    labels: tuple[tuple[str, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        sojourn = np.array(self.sojourn, dtype=float)
        trans = np.array(self.trans, dtype=float)
        sojourn.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "sojourn", sojourn)
        object.__setattr__(self, "trans", trans)

    @classmethod
    def from_arrays(cls, names: Sequence[str], sojourn, trans, labels=None) -> "ChainModel":
        states = tuple(StateId(i, str(nm)) for i, nm in enumerate(names))
        return cls(states, np.asarray(sojourn, dtype=float), np.asarray(trans, dtype=float), labels)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.states]

    def index(self, state: int | str | StateId) -> int:
        """Resolve a name, index or StateId to a 0-based index."""
        if isinstance(state, StateId):
            return state.index
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.n:
                raise KeyError(f"state index {state} out of range")
            return int(state)
        for s in self.states:
            if s.name == state:
                return s.index
        raise KeyError(f"unknown state {state!r}")

    def label(self, i: int, j: int) -> str:
        if self.labels is not None:
            return self.labels[i][j]
        return f"{self.trans[i, j]:.6g}"

    def __eq__(self, other):
        if not isinstance(other, ChainModel):
            return NotImplemented
        return (
            self.states == other.states
            and np.array_equal(self.sojourn, other.sojourn)
            and np.array_equal(self.trans, other.trans)
        )

    __hash__ = None


def _number(token: str, line: int, col: int) -> float:
    if "/" in token:
        num, _, den = token.partition("/")
        if not (_NUM.match(num) and _NUM.match(den)):
            raise ParseError(f"malformed fraction {token!r}", line, col)
        den_f = float(den)
        if den_f == 0:
            raise ParseError(f"zero denominator in {token!r}", line, col)
        return float(Fraction(num) / Fraction(den))
    if not _NUM.match(token):
        raise ParseError(f"not a number: {token!r}", line, col)
    return float(token)


def _significant(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def read_model(text: str) -> ChainModel:
    """Parse a model file without checking chain invariants.

    Syntax and dimension errors raise :class:`ParseError`. Use
    :func:`parse_model` for the checked, renormalized form.
    """
    lines = list(_significant(text))
    if not lines:
        raise ParseError("empty model file")

    def keyword(pos: int, key: str) -> list[str]:
        if pos >= len(lines):
            raise ParseError(f"missing '{key}:' section")
        lineno, body = lines[pos]
        head, sep, rest = body.partition(":")
        if not sep or head.strip() != key:
            raise ParseError(f"expected '{key}:'", lineno, 1)
        return rest.split()

    names = keyword(0, "states")
    if len(names) != len(set(names)):
        dup = next(nm for nm in names if names.count(nm) > 1)
        raise ParseError(f"duplicate state name {dup!r}", lines[0][0])
    n = len(names)
    if n < 2:
        raise ParseError(
            f"need at least 2 states, got {n} (a zero-diagonal row cannot sum to 1)", lines[0][0]
        )

    sojourn_tokens = keyword(1, "sojourn")
    sj_line = lines[1][0]
    if len(sojourn_tokens) != n:
        raise ParseError(f"sojourn has {len(sojourn_tokens)} entries, expected {n}", sj_line)
    sojourn = [_number(tok, sj_line, c) for c, tok in enumerate(sojourn_tokens, start=1)]

    if keyword(2, "matrix"):
        raise ParseError("'matrix:' takes no values on its own line", lines[2][0])
    rows = lines[3:]
    if len(rows) != n:
        where = rows[n][0] if len(rows) > n else None
        raise ParseError(f"matrix has {len(rows)} rows, expected {n}", where)

    trans = []
    labels = []
    for lineno, body in rows:
        tokens = body.split()
        if len(tokens) != n:
            raise ParseError(f"row has {len(tokens)} entries, expected {n}", lineno)
        trans.append([_number(tok, lineno, c) for c, tok in enumerate(tokens, start=1)])
        labels.append(tuple(tokens))
    return ChainModel.from_arrays(names, sojourn, trans, tuple(labels))


def parse_model(text: str) -> ChainModel:
    """Parse, validate and renormalize a model file.

    Raises :class:`ParseError` for syntax/dimension problems and
    :class:`InvariantError` when the parsed chain is not a valid
    zero-diagonal stochastic model. Tie warnings do not raise.
    """
    model = read_model(text)
    report = validate(model)
    if not report.ok:
        raise InvariantError(report.issues)
    trans = model.trans / model.trans.sum(axis=1, keepdims=True)
    return ChainModel(model.states, model.sojourn, trans, model.labels)


def load_model(path) -> ChainModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def serialize(model: ChainModel) -> str:
    """Inverse of :func:`parse_model`; floats are written with full precision."""
    out = [
        "states: " + " ".join(model.names),
        "sojourn: " + " ".join(repr(float(x)) for x in model.sojourn),
        "matrix:",
    ]
    out.extend(" ".join(repr(float(x)) for x in row) for row in model.trans)
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" or "warning"
    locator: str
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue]

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    @property
    def ties(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]


def tied_columns(row) -> list[int]:
    """Columns attaining the row maximum."""
    row = np.asarray(row)
    return np.flatnonzero(row == row.max()).tolist()


def validate(model: ChainModel) -> ValidationReport:
    issues: list[Issue] = []
    n = model.n
    P, T = model.trans, model.sojourn

    def err(loc, msg):
        issues.append(Issue("error", loc, msg))

    if n < 2:
        err("model", f"need at least 2 states, got {n}")
    if len(set(model.names)) != n:
        err("states", "state names are not unique")
    for s in model.states:
        if not s.name or any(ch.isspace() for ch in s.name):
            err(f"state {s.index}", f"invalid state name {s.name!r}")
    if T.shape != (n,):
        err("sojourn", f"expected {n} entries, got shape {T.shape}")
    else:
        for i, t in enumerate(T):
            if not t > 0:
                err(f"sojourn {i}", f"nonpositive sojourn time {t!r} for {model.names[i]}")
    if P.shape != (n, n):
        err("matrix", f"expected {n}x{n}, got shape {P.shape}")
        return ValidationReport(issues)

    for i in range(n):
        row = P[i]
        if row[i] != 0:
            err(f"({i},{i})", f"nonzero diagonal at ({i},{i})")
        for j in range(n):
            if not 0 <= row[j] <= 1:
                err(f"({i},{j})", f"entry {row[j]!r} at ({i},{j}) outside [0, 1]")
        total = row.sum()
        if abs(total - 1) > ROW_SUM_TOL:
            err(f"row {i}", f"row {model.names[i]} sums to {total!r}, not 1")
        cols = tied_columns(row)
        if len(cols) > 1:
            issues.append(
                Issue(
                    "warning",
                    f"row {i}",
                    f"row {model.names[i]} has tied maximum {row[cols[0]]:.6g} "
                    f"in columns {[model.names[j] for j in cols]}",
                )
            )
    return ValidationReport(issues)


def perturb_ties(model: ChainModel, magnitude: float) -> ChainModel:
    """Break tied row maxima deterministically.

    The k-th tied cell of a row (left to right, k from 0) gains
    ``magnitude * (k + 1)`` before the row is renormalized, so the rightmost
    formerly tied cell becomes the strict maximum. Rows without ties are
    left untouched.
    """
    if not 0 < magnitude < 1e-3:
        raise ValueError("magnitude must be in (0, 1e-3)")
    trans = np.array(model.trans)
    changed = False
    for i, row in enumerate(trans):
        cols = tied_columns(row)
        if len(cols) < 2:
            continue
        for k, j in enumerate(cols):
            row[j] += magnitude * (k + 1)
        row /= row.sum()
        changed = True
    if not changed:
        return model
    return ChainModel(model.states, model.sojourn, trans, model.labels)


def row_max_successor(model: ChainModel, s: int | str | StateId) -> int:
    """Index of the strict maximum of row ``s``; raises :class:`TieError` on ties."""
    i = model.index(s)
    cols = tied_columns(model.trans[i])
    if len(cols) > 1:
        raise TieError(i, cols, model.names[i])
    return cols[0]
