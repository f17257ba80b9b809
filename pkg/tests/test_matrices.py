import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqlab.core import SequencePrefix
from seqlab.errors import SpecError, TruncationError
from seqlab.matrices import (SummabilityMatrix, apply_row, make_matrix,
                             regularity_check, transform_prefix)

finite_vals = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)


def alternating(n):
    # x_k = (-1)^k, 1-indexed
    return SequencePrefix(np.asarray([(-1.0) ** k for k in range(1, n + 1)]), label="pm1")


class TestApplyRow:
    def test_identity(self):
        x = SequencePrefix(np.arange(1.0, 11.0))
        assert apply_row(make_matrix("identity"), x, 7) == 7.0

    def test_cesaro_alternating(self):
        assert apply_row(make_matrix("cesaro"), alternating(10), 10) == 0.0

    def test_riesz_unit_weights_is_cesaro(self):
        riesz = SummabilityMatrix("riesz", weights=np.ones(10))
        x = SequencePrefix(np.arange(1.0, 11.0))
        assert apply_row(riesz, x, 4) == pytest.approx(2.5)
        assert apply_row(riesz, x, 4) == apply_row(make_matrix("cesaro"), x, 4)

    def test_row_past_truncation(self):
        x = SequencePrefix(np.ones(5))
        with pytest.raises(TruncationError):
            apply_row(make_matrix("cesaro"), x, 6)

    def test_explicit_row_support_error_names_column(self):
        m = SummabilityMatrix("explicit", entries={1: (np.asarray([1, 9]), np.asarray([1.0, 2.0]))})
        with pytest.raises(TruncationError, match="column 9"):
            apply_row(m, SequencePrefix(np.ones(5)), 1)

    def test_explicit_missing_row(self):
        m = SummabilityMatrix("explicit", entries={2: (np.asarray([1]), np.asarray([1.0]))})
        with pytest.raises(TruncationError):
            apply_row(m, SequencePrefix(np.ones(5)), 1)


class TestTransformPrefix:
    def test_identity_exact(self):
        x = SequencePrefix(np.asarray([0.1, -2.5, 3.75]))
        y = transform_prefix(make_matrix("identity"), x, 3)
        assert np.array_equal(y.values, x.values)

    def test_cesaro_of_ones(self):
        y = transform_prefix(make_matrix("cesaro"), SequencePrefix(np.ones(50)), 50)
        assert np.all(y.values == 1.0)

    def test_cesaro_alternating_bound(self):
        y = transform_prefix(make_matrix("cesaro"), alternating(100), 100)
        bound = 1.0 / np.arange(1, 101)
        assert np.all(np.abs(y.values) <= bound + 1e-12)

    def test_label_records_kind(self):
        y = transform_prefix(make_matrix("cesaro"), SequencePrefix(np.ones(3), label="u"), 3)
        assert y.label == "cesaro:u"

    def test_matches_apply_row(self):
        rng = np.random.default_rng(7)
        x = SequencePrefix(rng.normal(size=60))
        for spec in ("identity", "cesaro"):
            m = make_matrix(spec)
            y = transform_prefix(m, x, 60)
            rows = np.asarray([apply_row(m, x, i) for i in range(1, 61)])
            np.testing.assert_allclose(y.values, rows, rtol=1e-10, atol=1e-12)

    def test_cesaro_tracks_limit(self):
        # x_k = L + 1/k; |A_i(x) - L| <= (1 + ln i)/i
        L = 2.0
        n = 1000
        x = SequencePrefix(L + 1.0 / np.arange(1.0, n + 1))
        y = transform_prefix(make_matrix("cesaro"), x, n)
        i = np.arange(1.0, n + 1)
        assert np.all(np.abs(y.values - L) <= (1.0 + np.log(i)) / i + 1e-12)

    def test_error_propagates_row_index(self):
        m = SummabilityMatrix("explicit", entries={1: (np.asarray([1]), np.asarray([1.0]))})
        with pytest.raises(TruncationError, match="row 2"):
            transform_prefix(m, SequencePrefix(np.ones(5)), 2)


@settings(max_examples=30)
@given(vals=st.lists(finite_vals, min_size=4, max_size=24),
       a=finite_vals, b=finite_vals)
def test_linearity(vals, a, b):
    n = len(vals)
    rng = np.random.default_rng(n)
    x = SequencePrefix(np.asarray(vals))
    y = SequencePrefix(rng.uniform(-50, 50, size=n))
    combo = SequencePrefix(a * x.values + b * y.values)
    m = make_matrix("cesaro")
    i = n // 2 + 1
    lhs = apply_row(m, combo, i)
    rhs = a * apply_row(m, x, i) + b * apply_row(m, y, i)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


class TestMakeMatrix:
    def test_riesz_file(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("1.0\n2.0\n3.0\n")
        m = make_matrix(f"riesz:file={p}")
        x = SequencePrefix(np.asarray([1.0, 1.0, 1.0]))
        assert apply_row(m, x, 3) == pytest.approx(1.0)

    def test_riesz_rejects_nonpositive(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("1.0\n-2.0\n")
        with pytest.raises(SpecError):
            make_matrix(f"riesz:file={p}")

    def test_csv_table(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("i,k,a\n1,1,2.0\n1,2,3.0\n2,1,5.0\n")
        m = make_matrix(f"file:{p}")
        x = SequencePrefix(np.asarray([1.0, 1.0]))
        assert apply_row(m, x, 1) == pytest.approx(5.0)
        assert apply_row(m, x, 2) == pytest.approx(5.0)

    def test_csv_needs_header(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1,1,2.0\n")
        with pytest.raises(SpecError):
            make_matrix(f"file:{p}")

    def test_unknown(self):
        with pytest.raises(SpecError):
            make_matrix("borel")


class TestRegularity:
    def test_cesaro(self):
        rep = regularity_check(make_matrix("cesaro"), 64)
        assert rep.sup_abs_row_sum == 1.0
        assert rep.rows_sum_to_one
        assert rep.columns_vanish
        # column k trend: peak 1/k at i=k, final 1/upto
        assert rep.columns[1] == (1.0, pytest.approx(1.0 / 64))

    def test_identity(self):
        rep = regularity_check(make_matrix("identity"), 64)
        assert rep.sup_abs_row_sum == 1.0
        assert rep.rows_sum_to_one
        assert rep.columns_vanish

    def test_explicit_flagged(self):
        entries = {i: (np.asarray([1]), np.asarray([5.0 if i == 6 else 1.0])) for i in range(1, 7)}
        rep = regularity_check(SummabilityMatrix("explicit", entries=entries), 6)
        assert rep.sup_abs_row_sum >= 5.0
        assert not rep.rows_sum_to_one
        assert 5.0 in rep.row_sums_tail
