import math

import numpy as np
import pytest

from sdr.realdata import (RealDataConfig, curves_to_csv, result_to_json,
                          run_real_data, spectrum_to_csv)


@pytest.fixture(scope="module")
def linear_csv(tmp_path_factory):
    """Synthetic regression table: 5 informative features, known response."""
    rng = np.random.default_rng(0)
    n = 240
    x = rng.uniform(0.0, 10.0, size=(n, 5))
    y = x @ np.array([0.5, -0.2, 0.1, 0.0, 0.3]) + 0.1 * rng.standard_normal(n)
    path = tmp_path_factory.mktemp("data") / "toy.csv"
    header = "f1;f2;f3;f4;f5;target"
    rows = [";".join(f"{v:.10f}" for v in row) + f";{t:.10f}"
            for row, t in zip(x, y)]
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path


def test_split_sizes_follow_eighty_twenty(linear_csv):
    config = RealDataConfig(path=str(linear_csv), response="target",
                            delimiter=";", methods=("ols",), k_min=1, k_max=1)
    result = run_real_data(config)
    assert result.n_test == math.floor(0.2 * 240)
    assert result.n_train == 240 - result.n_test


def test_split_rule_on_uci_dataset_sizes():
    # floor(0.2 N) testing rows at the two UCI dataset sizes
    for n, train, test in ((4898, 3919, 979), (5875, 4700, 1175)):
        n_test = math.floor(0.2 * n)
        assert (n - n_test, n_test) == (train, test)


def test_curves_and_spectrum(linear_csv):
    config = RealDataConfig(path=str(linear_csv), response="target",
                            delimiter=";", methods=("ols", "pca", "pls"),
                            k_min=1, k_max=3, seed=1)
    result = run_real_data(config)
    assert len(result.spectrum) == 5
    assert np.all(np.diff(result.spectrum) <= 0)
    assert len(result.points) == 3 * 3
    for pt in result.points:
        assert pt.error is None
        assert pt.train_mse >= 0 and pt.test_mse >= 0

    csv_text = curves_to_csv(result)
    assert csv_text.splitlines()[0] == "method,K,train_mse,test_mse"
    assert spectrum_to_csv(result).splitlines()[0] == "index,eigenvalue"
    assert "uncentered" in result_to_json(result)


def test_full_k_pca_equals_ols(linear_csv):
    config = RealDataConfig(path=str(linear_csv), response="target",
                            delimiter=";", methods=("ols", "pca"),
                            k_min=5, k_max=5, seed=2)
    result = run_real_data(config)
    by_method = {pt.method: pt for pt in result.points}
    assert by_method["pca"].test_mse == pytest.approx(
        by_method["ols"].test_mse, abs=1e-6)


def test_deterministic(linear_csv):
    config = RealDataConfig(path=str(linear_csv), response="target",
                            delimiter=";", methods=("pca",), k_min=2, k_max=2,
                            seed=3)
    assert curves_to_csv(run_real_data(config)) == curves_to_csv(run_real_data(config))


def test_k_range_validation():
    with pytest.raises(ValueError):
        RealDataConfig(path="x.csv", response="y", k_min=0)
    with pytest.raises(ValueError):
        RealDataConfig(path="x.csv", response="y", k_min=3, k_max=2)


def test_supervised_beats_pca_at_low_k(linear_csv):
    # response is a linear combination of raw features, so one supervised
    # direction should explain it far better than the top variance direction
    config = RealDataConfig(path=str(linear_csv), response="target",
                            delimiter=";", methods=("pca", "pls", "lspca"),
                            k_min=1, k_max=1, seed=4)
    result = run_real_data(config)
    by_method = {pt.method: pt for pt in result.points}
    assert by_method["pls"].test_mse < by_method["pca"].test_mse
    assert by_method["lspca"].test_mse < by_method["pca"].test_mse
