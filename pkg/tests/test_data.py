import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirror_margin.data import Dataset, check_separable, generate_blobs, margin_of
from mirror_margin.exceptions import ContractError, GenerationError


def ds_of(rows):
    rows = np.asarray(rows, dtype=float)
    return Dataset(rows[:, :-1], rows[:, -1])


def test_two_point_separable_witness():
    res = check_separable(ds_of([[1, 0, 1], [-1, 0, -1]]))
    assert res.separable
    np.testing.assert_allclose(res.witness / np.linalg.norm(res.witness), [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("rows", [
    [[1, 1], [2, -1]],
    [[1, 1, 1], [-1, -1, 1], [1, -1, -1], [-1, 1, -1]],
], ids=["1d-conflict", "xor"])
def test_not_separable(rows):
    assert not check_separable(ds_of(rows)).separable


def test_margin_of_examples():
    r = margin_of(ds_of([[1, 0, 1], [-1, 0, -1]]), np.array([2.0, 0.0]))
    assert r.margin == 1.0
    assert list(r.support_indices) == [0, 1]
    r = margin_of(ds_of([[1, 0, 1], [0, 2, 1]]), np.array([1.0, 1.0]) / np.sqrt(2))
    assert r.margin == pytest.approx(1 / np.sqrt(2), rel=1e-15)
    assert list(r.support_indices) == [0]


def test_margin_of_zero_vector():
    with pytest.raises(ContractError):
        margin_of(ds_of([[1, 0, 1]]), np.zeros(2))


def test_margin_of_huge_iterate():
    ds = ds_of([[1, 0, 1], [0, 2, 1]])
    assert margin_of(ds, np.array([1e300, 1e300])).margin == pytest.approx(1 / np.sqrt(2), rel=1e-15)


def test_blobs_deterministic_and_separable():
    a = generate_blobs(40, 40, [(2, 2), (-2, -2)], 0.7, 0)
    b = generate_blobs(40, 40, [(2, 2), (-2, -2)], 0.7, 0)
    assert a.n == 80 and a.d == 2
    np.testing.assert_array_equal(a.X, b.X)
    res = check_separable(a)
    assert res.separable
    assert margin_of(a, res.witness).margin > 0


def test_blobs_zero_spread_gives_centers():
    ds = generate_blobs(1, 1, [(1.0, 2.0), (-3.0, 0.5)], 0.0, 5)
    np.testing.assert_array_equal(ds.X, [[1.0, 2.0], [-3.0, 0.5]])
    np.testing.assert_array_equal(ds.y, [1.0, -1.0])


def test_blobs_generation_error():
    with pytest.raises(GenerationError, match="further apart"):
        generate_blobs(20, 20, [(0.1, 0.0), (-0.1, 0.0)], 2.0, 0, max_retries=3)


@pytest.mark.parametrize("rows", [[[1, 0, 2]], [[1, 0]], [[np.nan, 1]]], ids=["label", "no-features", "nan"])
def test_dataset_contract(rows):
    with pytest.raises(ContractError):
        ds_of(rows)


def test_csv_round_trip(tmp_path):
    ds = generate_blobs(5, 4, [(1, 1), (-1, -1)], 0.3, 2)
    ds.to_csv(tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "x1,x2,y"
    back = Dataset.from_csv(tmp_path / "d.csv")
    np.testing.assert_array_equal(back.X, ds.X)
    np.testing.assert_array_equal(back.y, ds.y)


def test_dataset_is_immutable():
    ds = ds_of([[1, 0, 1]])
    with pytest.raises(ValueError):
        ds.X[0, 0] = 3.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), scale=st.floats(1e-3, 1e3), angle=st.floats(0, 2 * np.pi))
def test_separability_invariant_to_scaling_and_rotation(seed, scale, angle):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(12, 2))
    y = np.where(rng.random(12) < 0.5, 1.0, -1.0)
    if seed % 2:
        y = np.sign(X @ np.array([1.0, -0.3]))
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    base = check_separable(Dataset(X, y)).separable
    assert check_separable(Dataset(scale * X @ R.T, y)).separable == base
