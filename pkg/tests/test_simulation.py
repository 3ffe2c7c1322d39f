import numpy as np
import pytest

from sdr.regression import mse
from sdr.simulation import (BenchConfig, SpectrumSpec, SweepConfig, TrialSpec,
                            _haar, gamma_sweep, generate_trial,
                            random_orthogonal, report_to_csv, report_to_json,
                            report_to_table, run_benchmark, sweep_to_csv,
                            trial_seed)


class TestSpectrum:
    def test_fast_decay_ratio(self):
        lam = SpectrumSpec("fast").eigenvalues()
        assert lam[14] / lam[0] <= 0.15

    def test_slow_decay_ratio(self):
        lam = SpectrumSpec("slow").eigenvalues()
        assert lam[14] / lam[0] >= 0.8

    @pytest.mark.parametrize("kind", ["fast", "slow"])
    def test_positive_nonincreasing(self, kind):
        lam = SpectrumSpec(kind).eigenvalues()
        assert np.all(lam > 0)
        assert np.all(np.diff(lam) < 0)
        assert len(lam) == 100

    def test_noise_defaults(self):
        assert SpectrumSpec("fast").noise_sigma == 0.5
        assert SpectrumSpec("slow").noise_sigma == 2.5


class TestRandomOrthogonal:
    def test_p1_is_sign(self):
        q = random_orthogonal(1, 0)
        assert abs(abs(q[0, 0]) - 1.0) <= 1e-15

    @pytest.mark.parametrize("seed", [0, 1, 123])
    def test_orthogonal(self, seed):
        q = random_orthogonal(7, seed)
        assert np.linalg.norm(q.T @ q - np.eye(7)) <= 1e-10

    def test_reproducible_and_seeds_differ(self):
        a = random_orthogonal(6, 5)
        b = random_orthogonal(6, 5)
        c = random_orthogonal(6, 6)
        assert np.array_equal(a, b)
        assert np.linalg.norm(a - c) > 0.1


class TestGenerateTrial:
    def test_shapes_and_split(self):
        spec = TrialSpec(SpectrumSpec("fast"), "well", n_train=150, seed=0)
        trial = generate_trial(spec)
        assert trial.train.X.shape == (120, 100)
        assert trial.validation.X.shape == (30, 100)
        assert trial.test.X.shape == (10000, 100)
        assert trial.phi.shape == (100, 10)

    def test_phi_orthonormal(self):
        for alignment in ("well", "mis", "partial"):
            spec = TrialSpec(SpectrumSpec("slow"), alignment, n_train=150, seed=1)
            phi = generate_trial(spec).phi
            assert np.linalg.norm(phi.T @ phi - np.eye(10)) <= 1e-10

    def test_partial_random_columns_orthogonal_to_selected(self):
        spec = TrialSpec(SpectrumSpec("fast"), "partial", n_train=150, seed=2)
        trial = generate_trial(spec)
        v = _haar(np.random.default_rng(2), 100)  # same stream as the trial
        eig_cols = v[:, range(10, 20, 2)]
        rand_cols = trial.phi[:, 5:]
        assert np.abs(eig_cols.T @ rand_cols).max() <= 1e-10
        assert np.linalg.norm(rand_cols.T @ rand_cols - np.eye(5)) <= 1e-10
        np.testing.assert_array_equal(trial.phi[:, :5], eig_cols)

    def test_noiseless_true_coefficients_fit_exactly(self):
        spec = TrialSpec(SpectrumSpec("fast"), "well", n_train=150, seed=3,
                         noise_sigma=0.0)
        trial = generate_trial(spec)
        assert mse(trial.train.X @ trial.beta, trial.train.y) == 0.0

    def test_well_aligned_projection_keeps_signal(self):
        # regressing on the true top-10 eigenvector scores leaves only noise
        spec = TrialSpec(SpectrumSpec("fast"), "well", n_train=1500, seed=4)
        trial = generate_trial(spec)
        v = _haar(np.random.default_rng(4), 100)
        z = trial.test.X @ v[:, :10]
        coef, *_ = np.linalg.lstsq(z, trial.test.y, rcond=None)
        resid = trial.test.y - z @ coef
        sigma2 = spec.spectrum.noise_sigma ** 2
        assert float(resid @ resid / len(resid)) <= 1.05 * sigma2

    def test_empirical_covariance_matches(self):
        spec = TrialSpec(SpectrumSpec("fast"), "well", n_train=150,
                         n_test=100_000, seed=12)
        trial = generate_trial(spec)
        lam = spec.spectrum.eigenvalues()
        v = _haar(np.random.default_rng(12), 100)
        sigma = (v * lam) @ v.T
        n = trial.test.X.shape[0]
        emp = trial.test.X.T @ trial.test.X / n
        se = np.sqrt((np.outer(np.diag(sigma), np.diag(sigma)) + sigma ** 2) / n)
        dev = np.abs(emp - sigma) / se
        # 10^4 entries: a handful beyond 3 SE is expected, none far beyond
        assert np.mean(dev > 3.0) <= 0.01
        assert dev.max() <= 5.0


class TestRunBenchmark:
    def test_reports_byte_identical_under_same_seed(self):
        cfg = BenchConfig(methods=("pca", "ols"), spectra=("fast",),
                          alignments=("well",), train_sizes=(150,),
                          n_trials=2, seed=7)
        r1, r2 = run_benchmark(cfg), run_benchmark(cfg)
        assert report_to_csv(r1) == report_to_csv(r2)
        assert report_to_json(r1) == report_to_json(r2)

    def test_csv_schema_golden(self):
        cfg = BenchConfig(methods=("pca",), spectra=("fast",),
                          alignments=("well",), train_sizes=(150,),
                          n_trials=1, seed=0)
        lines = report_to_csv(run_benchmark(cfg)).splitlines()
        assert lines[0] == ("spectrum,alignment,n_train,method,"
                            "mean_train_mse,mean_test_mse,n_trials,n_failed")
        assert lines[1].startswith("fast,well,150,pca,")

    def test_noiseless_well_aligned_floors(self):
        # with sigma = 0 the only PCA error is eigenvector estimation leak;
        # PLS recovers the coefficients almost exactly
        cfg = BenchConfig(methods=("pca", "pls"), spectra=("fast",),
                          alignments=("well",), train_sizes=(1500,),
                          n_trials=1, noise_sigma=0.0, seed=1)
        report = run_benchmark(cfg)
        by_method = {m.method: m for m in report.settings[0].methods}
        assert by_method["pca"].mean_test_mse <= 0.05
        assert by_method["pls"].mean_test_mse <= 1e-3

    def test_failures_recorded_not_dropped(self):
        cfg = BenchConfig(methods=("pca",), spectra=("fast",),
                          alignments=("well",), train_sizes=(150,),
                          n_trials=1, seed=0, k=101)  # K > P fails per trial
        report = run_benchmark(cfg)
        summary = report.settings[0].methods[0]
        assert summary.n_failed == 1 and summary.n_ok == 0
        assert summary.trials[0].error is not None
        assert summary.mean_test_mse is None

    def test_table_layout(self):
        cfg = BenchConfig(methods=("pca", "ols"), spectra=("fast",),
                          alignments=("well", "mis"), train_sizes=(150,),
                          n_trials=1, seed=3)
        table = report_to_table(run_benchmark(cfg))
        assert "spectrum: fast" in table
        assert "well/150" in table and "mis/150" in table
        assert "pca" in table and "ols" in table

    def test_trial_seed_stable(self):
        assert trial_seed(0, 1, 2, 3, 4) == trial_seed(0, 1, 2, 3, 4)
        assert trial_seed(0, 1, 2, 3, 4) != trial_seed(0, 1, 2, 3, 5)

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            BenchConfig(n_trials=0)
        with pytest.raises(ValueError):
            BenchConfig(methods=("pca", "nope"))


class TestGammaSweep:
    def test_curves_shape_and_determinism(self):
        cfg = SweepConfig(alignments=("well",), n_trials=2,
                          grid=(1e-2, 1.0, 1e2), seed=5)
        c1, c2 = gamma_sweep(cfg), gamma_sweep(cfg)
        curves_csv, refs_csv = sweep_to_csv(c1)
        assert curves_csv == sweep_to_csv(c2)[0]
        rows = curves_csv.splitlines()
        assert rows[0] == "method,alignment,gamma,test_mse"
        # exactly |grid| rows per method per case
        assert len(rows) - 1 == 3 * 3
        assert len(refs_csv.splitlines()) - 1 == 2
        for series in c1[0].test_mse.values():
            assert len(series) == 3
            assert all(np.isfinite(v) for v in series)
