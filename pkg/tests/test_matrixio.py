import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from polarfrechet.exceptions import MatrixFormatError
from polarfrechet.matrixio import (
    format_matrix,
    parse_matrices,
    parse_matrix,
    read_matrices,
    read_matrix,
    write_matrices,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_real_block():
    M = parse_matrix("2 2 real\n1 2\n3 4.5\n")
    assert M.dtype == np.float64
    np.testing.assert_array_equal(M, [[1, 2], [3, 4.5]])


def test_complex_block():
    M = parse_matrix("1 2 complex\n1+2j -0.5-1e-3j\n")
    np.testing.assert_array_equal(M, [[1 + 2j, -0.5 - 1e-3j]])


def test_comments_and_blank_lines():
    text = "# header\n\n2 1 real\n# inside\n1\n\n2\n"
    np.testing.assert_array_equal(parse_matrix(text), [[1], [2]])


def test_several_blocks(tmp_path):
    A, B = np.eye(2), np.array([[1j, 2]])
    path = tmp_path / "ab.txt"
    write_matrices(path, A, B)
    got = read_matrices(path)
    assert len(got) == 2
    np.testing.assert_array_equal(got[0], A)
    np.testing.assert_array_equal(got[1], B)
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_stream_output():
    buf = io.StringIO()
    write_matrices(buf, np.ones((1, 1)))
    assert buf.getvalue() == "1 1 real\n1\n"


@pytest.mark.parametrize(
    "text,line",
    [
        ("2 2 real\n1 2\n3\n", 3),
        ("2 2 real\n1 2\n3 x\n", 3),
        ("2 two real\n", 1),
        ("2 2 quaternion\n1 2\n3 4\n", 1),
        ("1 1 real\nnan\n", 2),
        ("1 1 complex\ninf+1j\n", 2),
        ("0 1 real\n", 1),
        ("2 1\n", 1),
    ],
)
def test_line_numbered_errors(text, line):
    with pytest.raises(MatrixFormatError) as info:
        parse_matrices(text)
    assert info.value.lineno == line
    assert str(info.value).startswith(f"line {line}:")


def test_missing_rows():
    with pytest.raises(MatrixFormatError, match="expected 3 rows"):
        parse_matrices("3 1 real\n1\n2\n")


def test_empty_text():
    with pytest.raises(MatrixFormatError):
        parse_matrices("# nothing\n")


def test_real_field_refuses_imaginary():
    with pytest.raises(ValueError):
        format_matrix(np.array([[1j]]), "real")


@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=finite))
def test_real_round_trip_is_bit_exact(M):
    back = parse_matrix(format_matrix(M))
    assert np.array_equal(back.view(np.uint64), (M + 0.0).view(np.uint64)) or np.array_equal(back, M)


@given(
    arrays(np.float64, st.tuples(st.integers(1, 3), st.integers(1, 3)), elements=finite),
    arrays(np.float64, st.tuples(st.just(1), st.just(1)), elements=finite.filter(lambda x: x != 0)),
)
def test_complex_round_trip_is_bit_exact(re, im):
    M = re + 1j * im[0, 0]
    back = parse_matrix(format_matrix(M))
    assert np.array_equal(back.real, M.real) and np.array_equal(back.imag, M.imag)
