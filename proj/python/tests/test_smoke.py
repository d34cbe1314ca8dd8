import math

import numpy as np
import pytest

import boltzspec


@pytest.fixture(scope="module")
def session():
    return boltzspec.Session(dim=3, degree=4)


def test_module_constants():
    assert boltzspec.SCHEMA_VERSION == 1
    assert abs(boltzspec.k_star() - (0.5 + (1 + math.sqrt(73)) / 2)) < 1e-12
    assert abs(boltzspec.b_function(boltzspec.k_star() - 0.5) - 1.0) < 1e-12
    # nu(0) = 8 sqrt(2 pi) in three dimensions.
    assert abs(boltzspec.collision_frequency(3, 0.0) - 8 * math.sqrt(2 * math.pi)) < 1e-9


def test_collision_matrix(session):
    L = session.collision_matrix()
    n = session.basis_size
    assert L.shape == (n, n)
    assert np.iscomplexobj(L)
    H = 0.5 * (L + L.conj().T)
    w = np.linalg.eigvalsh(H)
    assert w.max() < 1e-8
    assert np.sum(np.abs(w) < 1e-8) == 5
    assert session.spectral_gap() > math.pi / (48 * math.sqrt(2 * math.e))


def test_spectrum_report(session):
    rep = session.spectrum([0.1, 0.0, 0.0])
    assert rep["schema_version"] == 1
    assert rep["branch_count"] == 5
    eig = np.array([complex(e["re"], e["im"]) for e in rep["eigenvalues"]])
    ref = np.linalg.eigvals(session.fourier_matrix([0.1, 0.0, 0.0]))
    assert len(eig) == len(ref)
    assert max(np.abs(ref - e).min() for e in eig) < 1e-8
    assert eig.real.max() <= 1e-8


def test_branches_and_coeffs(session):
    rows = session.branches([0.05, 0.1])
    assert len(rows) == 8
    shear = [r for r in rows if r["branch"] == 2]
    assert all(r["multiplicity"] == 2 for r in shear)
    c = session.coeffs()
    speeds = {e["branch"]: e["fit"]["im"] for e in c["lambda1"]}
    assert abs(speeds[1] - math.sqrt(5 / 3)) < 1e-3
    assert abs(speeds[-1] + math.sqrt(5 / 3)) < 1e-3
    assert all(e["formula"] < 0 for e in c["lambda2"])


def test_semigroup_and_projectors(session):
    rep = session.semigroup([0.1, 0.0, 0.0])
    assert rep["regime"] == "small-xi"
    assert abs(rep["gamma_fit"] - rep["spectral_rate"]) < 0.05 * abs(rep["spectral_rate"])
    assert rep["commutation_residual"] < 1e-6
    p = session.projectors(0.1)
    assert p["algebra_residual"] < 1e-7
    assert [b["rank"] for b in p["branches"]] == [1, 1, 1, 2]


def test_errors():
    with pytest.raises(boltzspec.ConfigError):
        boltzspec.Session(dim=5)
    with pytest.raises(boltzspec.ConfigError):
        boltzspec.Session(dimension=3)
    s = boltzspec.Session(dim=3, degree=2)
    with pytest.raises(ValueError, match="dimension"):
        s.spectrum([0.0, 0.0])
