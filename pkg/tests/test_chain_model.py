import re
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mclim.chain_model import (
    ChainModel,
    InvariantError,
    ParseError,
    TieError,
    parse_model,
    perturb_ties,
    read_model,
    row_max_successor,
    serialize,
    validate,
)

SWAP = "states: A B\nsojourn: 1 1\nmatrix:\n0 1\n1 0\n"


def model_text(rows, sojourn=None, names=None):
    n = len(rows)
    names = names or [f"s{i}" for i in range(n)]
    sojourn = sojourn or ["1"] * n
    body = "\n".join(" ".join(r) for r in rows)
    return f"states: {' '.join(names)}\nsojourn: {' '.join(sojourn)}\nmatrix:\n{body}\n"


def test_paper_matrix_cell(paper6):
    assert paper6.trans[2, 3] == 0.5
    assert paper6.trans[3, 5] == pytest.approx(8 / 9, abs=1e-15)
    assert paper6.n == 6
    assert paper6.labels[3][5] == "8/9"


def test_smallest_model():
    m = parse_model(SWAP)
    assert m.names == ["A", "B"]
    np.testing.assert_array_equal(m.trans, [[0, 1], [1, 0]])


def test_one_state_is_dimension_error():
    with pytest.raises(ParseError, match="at least 2"):
        parse_model("states: A\nsojourn: 1\nmatrix:\n0\n")


def test_comments_and_blank_lines_ignored():
    text = "# header\n\n" + SWAP.replace("matrix:\n", "matrix:\n# rows follow\n\n")
    assert parse_model(text) == parse_model(SWAP)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("states: A B\nsojourn: 1 x\nmatrix:\n0 1\n1 0\n", 2, 2),
        ("states: A B\nsojourn: 1 1\nmatrix:\n0 1/\n1 0\n", 4, 2),
        ("states: A B\nsojourn: 1 1\nmatrix:\n0 1\n1/0 0\n", 5, 1),
        ("states: A B\nsojourns: 1 1\nmatrix:\n0 1\n1 0\n", 2, 1),
    ],
)
def test_syntax_errors_locate_token(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_model(text)
    assert info.value.line == line
    assert info.value.column == column


@pytest.mark.parametrize(
    "text",
    [
        "states: A B\nsojourn: 1\nmatrix:\n0 1\n1 0\n",
        "states: A B\nsojourn: 1 1\nmatrix:\n0 1 0\n1 0\n",
        "states: A B\nsojourn: 1 1\nmatrix:\n0 1\n",
        "states: A B\nsojourn: 1 1\nmatrix:\n0 1\n1 0\n1 0\n",
        "states: A A\nsojourn: 1 1\nmatrix:\n0 1\n1 0\n",
    ],
)
def test_dimension_errors(text):
    with pytest.raises(ParseError):
        parse_model(text)


@pytest.mark.parametrize(
    "rows, sojourn, fragment",
    [
        ([["0.1", "0.9"], ["1", "0"]], None, "nonzero diagonal at (0,0)"),
        ([["0", "0.9"], ["1", "0"]], None, "sums to"),
        ([["0", "1.5", "-0.5"], ["1", "0", "0"], ["1", "0", "0"]], None, "outside [0, 1]"),
        ([["0", "1"], ["1", "0"]], ["1", "0"], "nonpositive sojourn"),
    ],
)
def test_invariant_violations(rows, sojourn, fragment):
    with pytest.raises(InvariantError, match=re.escape(fragment)):
        parse_model(model_text(rows, sojourn))


def test_parse_renormalizes_rows():
    rows = [
        ["0", "1/3", "1/3", "1/3"],
        ["0.5", "0", "0.25", "0.25"],
        ["1/3", "1/3", "0", "1/3"],
        ["0.1", "0.2", "0.7", "0"],
    ]
    m = parse_model(model_text(rows))
    assert np.all(np.abs(m.trans.sum(axis=1) - 1) <= 1e-15)


def test_validate_paper_matrix_has_no_ties(paper6):
    report = validate(paper6)
    assert report.ok
    assert report.issues == []


def test_validate_tie_warning():
    m = read_model(model_text([["0", "1/2", "1/2"], ["1", "0", "0"], ["1/3", "2/3", "0"]]))
    report = validate(m)
    assert report.ok
    assert len(report.ties) == 1
    assert report.ties[0].locator == "row 0"


def test_validate_reports_every_issue():
    m = ChainModel.from_arrays(["a", "b"], [1, -1], [[0.1, 0.5], [1.0, 0.0]])
    report = validate(m)
    assert not report.ok
    messages = [i.message for i in report.issues]
    assert "nonzero diagonal at (0,0)" in messages
    assert any("sums to" in m for m in messages)
    assert any("nonpositive sojourn" in m for m in messages)


def test_perturb_two_way_tie():
    m = read_model(model_text([["0", "1/2", "1/2"], ["1", "0", "0"], ["1", "0", "0"]]))
    p = perturb_ties(m, 1e-9)
    row = p.trans[0]
    # oracle: [0, 1/2 + 1e-9, 1/2 + 2e-9] / (1 + 3e-9)
    expected = [Fraction(0), Fraction(1, 2) + Fraction(1, 10**9), Fraction(1, 2) + Fraction(2, 10**9)]
    total = sum(expected)
    np.testing.assert_allclose(row, [float(x / total) for x in expected], rtol=0, atol=1e-16)
    assert row[2] > row[1]
    assert row.sum() == pytest.approx(1, abs=1e-15)
    assert validate(p).ties == []


def test_perturb_three_way_tie():
    m = read_model(model_text([["0", "1/3", "1/3", "1/3"], ["1", "0", "0", "0"], ["1", "0", "0", "0"], ["1", "0", "0", "0"]]))
    row = perturb_ties(m, 1e-9).trans[0]
    assert row[1] < row[2] < row[3]
    assert row_max_successor(perturb_ties(m, 1e-9), 0) == 3


def test_perturb_no_ties_is_identity(paper6):
    assert perturb_ties(paper6, 1e-9) is paper6


def test_perturb_rejects_large_magnitude(paper6):
    with pytest.raises(ValueError):
        perturb_ties(paper6, 1e-3)


def test_row_max_successor_examples(paper6, healthcare):
    assert paper6.names[row_max_successor(paper6, "4")] == "6"
    assert healthcare.names[row_max_successor(healthcare, "G4")] == "B1"
    tied = read_model(model_text([["0", "1/2", "1/2"], ["1", "0", "0"], ["1", "0", "0"]]))
    with pytest.raises(TieError):
        row_max_successor(tied, 0)


@st.composite
def chain_models(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    rows = []
    for i in range(n):
        w = draw(st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n))
        w[i] = 0.0
        if sum(w) == 0:
            w[(i + 1) % n] = 1.0
        rows.append([x / sum(w) for x in w])
    sojourn = draw(st.lists(st.floats(0.01, 1e3), min_size=n, max_size=n))
    return ChainModel.from_arrays([f"q{i}" for i in range(n)], sojourn, rows)


@given(chain_models())
@settings(max_examples=200, deadline=None)
def test_serialize_round_trip(model):
    back = parse_model(serialize(model))
    assert back.names == model.names
    np.testing.assert_array_equal(back.sojourn, model.sojourn)
    np.testing.assert_allclose(back.trans, model.trans, rtol=0, atol=1e-15)


@given(chain_models(), st.floats(1e-12, 9e-4))
@settings(max_examples=200, deadline=None)
def test_perturb_properties(model, magnitude):
    model = parse_model(serialize(model))
    p = perturb_ties(model, magnitude)
    assert np.all(np.abs(p.trans.sum(axis=1) - 1) <= 1e-12)
    assert np.all(np.abs(p.trans - model.trans) <= 2 * model.n * magnitude)
    assert np.all(np.diag(p.trans) == 0)
    assert validate(p).ties == []


@given(chain_models())
@settings(max_examples=100, deadline=None)
def test_successor_is_never_self(model):
    model = perturb_ties(parse_model(serialize(model)), 1e-9)
    for s in range(model.n):
        assert row_max_successor(model, s) != s
