from fractions import Fraction

import numpy as np
import pytest

from hcx.nonexistence.oracle import _Quadratic, lemma_minimum, levenberg_marquardt
from hcx.nonexistence.system import coeff_names, reference_lemma_polynomials
from hcx.scalarpoly import Polynomial, poly_eval


def test_quadratic_model_matches_exact_evaluation():
    polys = reference_lemma_polynomials("j")
    names = coeff_names("j")
    model = _Quadratic(polys, names)
    rng = np.random.default_rng(0)
    x = rng.integers(-3, 4, size=(5, len(names))).astype(float)
    F, Jac = model.values_and_jacobian(x)
    for z in range(5):
        point = {v: Fraction(int(c)) for v, c in zip(names, x[z])}
        assert list(F[z]) == [float(poly_eval(p, point)) for p in polys]
    # central differences are exact for quadratics
    h = 0.5
    for i in range(len(names)):
        e = np.zeros(len(names))
        e[i] = h
        Fp, _ = model.values_and_jacobian(x + e)
        Fm, _ = model.values_and_jacobian(x - e)
        np.testing.assert_allclose((Fp - Fm) / (2 * h), Jac[:, :, i], atol=1e-12)


def test_rejects_higher_degree():
    with pytest.raises(ValueError):
        _Quadratic([Polynomial.parse("x^3")], ["x"])


def test_finds_zeros_of_a_feasible_system():
    # same shape as the lemma system but with a known real solution
    polys = [Polynomial.parse(s) for s in ("x*y - 1", "x - y", "x*z + y*z")]
    model = _Quadratic(polys, ["x", "y", "z"])
    x0 = np.random.default_rng(1).standard_normal((200, 3))
    _, f = levenberg_marquardt(model, x0)
    assert f.min() < 1e-20


def test_small_run_stays_away_from_zero():
    res = lemma_minimum(starts=2000, seed=3)
    assert res.exceeds(1e-3)
    names = coeff_names("j")
    point = {v: Fraction(float(c)) for v, c in zip(names, res.argmin)}
    exact = sum(poly_eval(p, point) ** 2 for p in reference_lemma_polynomials("j"))
    assert float(exact) == pytest.approx(res.minimum, rel=1e-9)
