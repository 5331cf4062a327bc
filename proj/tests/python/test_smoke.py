import math

import pytest

import geovi


def test_version():
    assert geovi.version() == geovi.__version__


def test_example_catalog():
    names = geovi.example_names()
    assert "lognormal1d" in names and "poisson-separation" in names
    with pytest.raises(KeyError):
        geovi.make_example("not-a-model")


def test_model_evaluation_and_derivatives():
    ex = geovi.make_example("lognormal1d")
    assert ex.model.dim == 1
    # H(0) = 0.5 * (1 - 0.5)^2 / 0.3^2 for data 0.5, noise 0.3, signal e^{3*0}
    assert ex.model.hamiltonian([0.0]) == pytest.approx(0.5 * 0.25 / 0.09)
    g = ex.model.grad_hamiltonian([0.2])
    h = 1e-6
    fd = (ex.model.hamiltonian([0.2 + h]) - ex.model.hamiltonian([0.2 - h])) / (2 * h)
    assert g[0] == pytest.approx(fd, rel=1e-5)
    s = ex.model.forward.forward([0.2])
    assert s[0] == pytest.approx(math.exp(0.6))


def test_inference_and_grid_oracle():
    ex = geovi.make_example("lognormal1d")
    cfg = geovi.GeoViConfig()
    cfg.final_samples = 60
    state = geovi.run_geovi(ex.model, cfg, seed=1)
    assert state.converged
    assert len(state.samples()) == 60

    p = geovi.make_grid_1d(ex.oracle_lo, ex.oracle_hi, 1024)
    geovi.fill_posterior_density(ex.model, p)
    geovi.normalize_density(p)
    q = geovi.make_grid_1d(ex.oracle_lo, ex.oracle_hi, 1024)
    geovi.fill_transformed_density(ex.model, state.xi_bar, state.xi_bar, q)
    geovi.normalize_density(q)
    kl_pq, kl_qp = geovi.grid_kl(p, q)
    assert 0 < kl_pq < 0.5 and 0 < kl_qp < 0.5

    mean, cov = geovi.grid_moments(p)
    qlin = geovi.make_grid_1d(ex.oracle_lo, ex.oracle_hi, 1024)
    geovi.fill_gaussian_density(mean, cov, qlin)
    geovi.normalize_density(qlin)
    kl_lin, _ = geovi.grid_kl(p, qlin)
    assert kl_pq < kl_lin  # the curved fit beats the best latent-space normal

    value, std_error, logdet, n, dropped = geovi.elbo(ex.model, state)
    evidence = geovi.grid_log_evidence(p)
    assert value <= evidence and math.isfinite(std_error)


def test_experiment_runner(tmp_path):
    out = tmp_path / "run"
    files = geovi.run_experiment(
        {
            "example": "lognormal1d",
            "method": "geovi",
            "seed": 2,
            "samples": 30,
            "threads": 1,
            "oracle.cells_1d": 512,
            "out": str(out),
        }
    )
    assert "kl_table.csv" in files
    for f in files:
        assert (out / f).exists()
    with pytest.raises(ValueError):
        geovi.run_experiment({"example": "lognormal1d", "no_such": 1})
