import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _synth import make_tensor
from triview import InputValidationError, Mode, Tensor3, fold, standardize, unfold


class TestTensor3:
    def test_rejects_wrong_rank(self):
        with pytest.raises(InputValidationError):
            Tensor3(
                values=np.zeros((2, 2)),
                time_labels=["a", "b"],
                instance_labels=["a", "b"],
                variable_labels=["a", "b"],
            )

    def test_rejects_short_mode(self):
        with pytest.raises(InputValidationError, match=">= 2"):
            Tensor3(
                values=np.zeros((1, 2, 2)),
                time_labels=["a"],
                instance_labels=["a", "b"],
                variable_labels=["a", "b"],
            )

    def test_rejects_label_mismatch(self):
        with pytest.raises(InputValidationError, match="labels"):
            Tensor3(
                values=np.zeros((2, 2, 2)),
                time_labels=["a", "b", "c"],
                instance_labels=["a", "b"],
                variable_labels=["a", "b"],
            )

    def test_rejects_non_finite_naming_cell(self):
        values = np.zeros((2, 2, 2))
        values[1, 0, 1] = np.nan
        with pytest.raises(InputValidationError, match=r"t=1, n=0, d=1"):
            Tensor3(
                values=values,
                time_labels=["a", "b"],
                instance_labels=["a", "b"],
                variable_labels=["a", "b"],
            )

    def test_values_read_only(self, tiny_tensor):
        with pytest.raises(ValueError):
            tiny_tensor.values[0, 0, 0] = 1.0

    def test_mode_from_name(self):
        assert Mode.from_name("time") is Mode.TIME
        assert Mode.from_name(" Variable ") is Mode.VARIABLE
        with pytest.raises(InputValidationError):
            Mode.from_name("rows")


class TestUnfold:
    def test_counting_example_variable(self, tiny_tensor):
        unfolded = unfold(tiny_tensor, Mode.VARIABLE)
        # Rows enumerate (instance, time) pairs, instance outer, time inner.
        expected = np.array([[0, 1], [100, 101], [10, 11], [110, 111]], dtype=float)
        np.testing.assert_array_equal(unfolded.matrix, expected)
        rim = unfolded.row_index_map
        assert rim.outer_mode is Mode.INSTANCE
        assert rim.inner_mode is Mode.TIME
        assert [rim.row_to_pair(r) for r in range(4)] == [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
        ]

    def test_counting_example_time(self, tiny_tensor):
        unfolded = unfold(tiny_tensor, Mode.TIME)
        rim = unfolded.row_index_map
        assert (rim.outer_mode, rim.inner_mode) == (Mode.VARIABLE, Mode.INSTANCE)
        for r in range(unfolded.matrix.shape[0]):
            d, n = rim.row_to_pair(r)
            for t in range(2):
                assert unfolded.matrix[r, t] == tiny_tensor.values[t, n, d]

    def test_air_quality_shape(self, rng):
        t = make_tensor(rng, 53, 55, 5)
        assert unfold(t, Mode.VARIABLE).matrix.shape == (55 * 53, 5)

    def test_row_index_map_bijection(self, small_tensor):
        for mode in Mode:
            rim = unfold(small_tensor, mode).row_index_map
            pairs = {rim.row_to_pair(r) for r in range(rim.n_rows)}
            assert len(pairs) == rim.n_rows
            for r in range(rim.n_rows):
                assert rim.pair_to_row(*rim.row_to_pair(r)) == r

    def test_preserves_value_multiset(self, small_tensor):
        for mode in Mode:
            m = unfold(small_tensor, mode).matrix
            assert sorted(m.reshape(-1)) == sorted(small_tensor.values.reshape(-1))


class TestFold:
    def test_counting_example(self, tiny_tensor):
        unfolded = unfold(tiny_tensor, Mode.VARIABLE)
        folded = fold(np.array([0.0, 100.0, 10.0, 110.0]), unfolded.row_index_map)
        np.testing.assert_array_equal(folded, [[0, 100], [10, 110]])

    def test_air_quality_fold_shape(self, rng):
        t = make_tensor(rng, 53, 55, 5)
        unfolded = unfold(t, Mode.VARIABLE)
        folded = fold(unfolded.matrix[:, 0], unfolded.row_index_map)
        assert folded.shape == (55, 53)

    def test_length_mismatch(self, tiny_tensor):
        rim = unfold(tiny_tensor, Mode.VARIABLE).row_index_map
        with pytest.raises(InputValidationError, match="length"):
            fold(np.zeros(5), rim)

    def test_round_trip_every_mode_and_column(self, small_tensor):
        for mode in Mode:
            unfolded = unfold(small_tensor, mode)
            rim = unfolded.row_index_map
            for k in range(small_tensor.mode_length(mode)):
                folded = fold(unfolded.matrix[:, k], rim)
                expected = np.moveaxis(small_tensor.values, mode.axis, -1)[..., k]
                slab = expected.transpose(
                    (0, 1)
                    if rim.outer_mode.axis < rim.inner_mode.axis
                    else (1, 0)
                )
                np.testing.assert_array_equal(folded, slab)

    @settings(max_examples=40, deadline=None)
    @given(
        dims=st.tuples(*[st.integers(2, 6)] * 3),
        seed=st.integers(0, 2**32 - 1),
        mode=st.sampled_from(list(Mode)),
    )
    def test_round_trip_property(self, dims, seed, mode):
        t = make_tensor(np.random.default_rng(seed), *dims)
        unfolded = unfold(t, mode)
        column = unfolded.matrix[:, 0]
        folded = fold(column, unfolded.row_index_map)
        refolded = unfold(t, mode)
        np.testing.assert_array_equal(folded.reshape(-1), refolded.matrix[:, 0])


class TestStandardize:
    def test_slice_oracle(self):
        # {1,2,3} z-scored with population sigma.
        values = np.zeros((2, 2, 3))
        values[0, 0] = [1.0, 2.0, 3.0]
        values[0, 1] = [1.0, 2.0, 3.0]
        values[1, 0] = [1.0, 2.0, 3.0]
        values[1, 1] = [1.0, 2.0, 3.0]
        t = Tensor3(
            values=values,
            time_labels=["a", "b"],
            instance_labels=["a", "b"],
            variable_labels=["a", "b", "c"],
        )
        out = standardize(t, Mode.TIME)
        expected = np.array([-1.224744871391589, 0.0, 1.224744871391589])
        np.testing.assert_allclose(out.values[0, 0], expected, atol=1e-12)

    def test_constant_slice_zeroed(self, tiny_tensor):
        values = np.array(tiny_tensor.values)
        values[:, :, 0] = 5.0
        t = Tensor3(
            values=values,
            time_labels=tiny_tensor.time_labels,
            instance_labels=tiny_tensor.instance_labels,
            variable_labels=tiny_tensor.variable_labels,
        )
        out = standardize(t, Mode.VARIABLE)
        np.testing.assert_array_equal(out.values[:, :, 0], 0.0)
        assert out.values[:, :, 1].std() > 0

    def test_moments(self, small_tensor):
        for mode in Mode:
            out = standardize(small_tensor, mode)
            for k in range(small_tensor.mode_length(mode)):
                slab = np.moveaxis(out.values, mode.axis, 0)[k]
                assert abs(slab.mean()) < 1e-9
                assert abs(slab.std() - 1.0) < 1e-9

    @settings(max_examples=30, deadline=None)
    @given(
        dims=st.tuples(*[st.integers(2, 5)] * 3),
        seed=st.integers(0, 2**32 - 1),
        mode=st.sampled_from(list(Mode)),
    )
    def test_idempotent_property(self, dims, seed, mode):
        t = make_tensor(np.random.default_rng(seed), *dims)
        once = standardize(t, mode)
        twice = standardize(once, mode)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-9)
