import numpy as np
import pytest

from lewisq.errors import InvalidSpec
from lewisq.synthetic import SyntheticSpec, gen_synthetic


def test_single_column():
    data = gen_synthetic(SyntheticSpec(50, 1, 2.0, seed=1))
    np.testing.assert_array_equal(data.A, np.ones((50, 1)))
    assert data.counts.tolist() == [50]


def test_geometric_multiplicities():
    spec = SyntheticSpec(1000, 5, 2.0, seed=3)
    data = gen_synthetic(spec)
    # 1000 / 31 * (1, 2, 4, 8) rounded, remainder to the last block.
    expected = np.rint(1000 / 31 * np.array([1, 2, 4, 8])).astype(int).tolist()
    expected.append(1000 - sum(expected))
    assert data.counts.tolist() == expected
    np.testing.assert_array_equal(data.A.sum(axis=0), data.counts)
    assert np.all(data.A.sum(axis=1) == 1)
    assert np.all(np.diff(np.argmax(data.A, axis=1)) >= 0)


def test_noise_ratio():
    data = gen_synthetic(SyntheticSpec(1000, 5, 2.0, seed=3, outlier_prob=0.0))
    b_star = data.A @ data.x_true
    nu = data.b - b_star
    assert np.abs(nu).sum() / np.abs(b_star).sum() == pytest.approx(0.2, abs=1e-9)


def test_outlier_count_binomial_band():
    n, p = 10_000, 0.001
    counts = [int(gen_synthetic(SyntheticSpec(n, 4, 1.5, seed=s)).outliers.sum()) for s in range(200)]
    sigma_mean = np.sqrt(n * p * (1 - p) / len(counts))
    assert abs(np.mean(counts) - n * p) <= 3 * sigma_mean


def test_outliers_are_scaled_noise():
    data = gen_synthetic(SyntheticSpec(5000, 3, 1.5, seed=2, outlier_prob=0.01))
    nu = data.b - data.A @ data.x_true
    inl = ~data.outliers
    # Recover the noise scale from the inliers alone: outlier rows hold 500 * nu_i.
    assert data.outliers.sum() > 0
    assert np.median(np.abs(data.b[data.outliers])) > 20 * np.median(np.abs(nu[inl]))


def test_deterministic_and_invalid():
    a = gen_synthetic(SyntheticSpec(300, 4, 1.5, seed=9))
    b = gen_synthetic(SyntheticSpec(300, 4, 1.5, seed=9))
    assert a.b.tobytes() == b.b.tobytes()
    for kwargs in ({"q": 1.0}, {"q": 2.5}, {"d": 0}, {"n": 3}, {"n": 20, "d": 10}):
        args = {"n": 300, "d": 4, "q": 1.5, **kwargs}
        with pytest.raises(InvalidSpec):
            gen_synthetic(SyntheticSpec(**args))
