import math

import numpy as np
import pytest

from ncsim.numerics import (
    EventNotFound,
    IntegrationError,
    SymMatrix,
    VectorField,
    integrate_fixed,
    locate_event,
    spectral_norm,
    sym_eigenvalues,
)

DECAY = VectorField(1, lambda t, x: -x)

# crossing time of the Riccati comparison ODE for gamma=2, L=1, lam=0.5,
# frozen from two independent routes (fine-step integration and the tan
# substitution closed form), both giving 0.219538136543...
RICCATI_T_STAR = 0.21953813654384516


def riccati_field(gamma, L):
    return VectorField(1, lambda t, p: np.array([-2 * L * p[0] - gamma * (p[0] ** 2 + 1)]))


class TestIntegrateFixed:
    def test_constant_field(self):
        f = VectorField(1, lambda t, x: np.zeros(1))
        assert integrate_fixed(f, 0.0, [5.0], 7.3, step=0.1)[0] == 5.0

    def test_exponential_decay(self):
        x1 = integrate_fixed(DECAY, 0.0, [1.0], 1.0, step=1e-4)
        assert x1[0] == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_riccati_reaches_half_at_crossing_time(self):
        x = integrate_fixed(riccati_field(2.0, 1.0), 0.0, [2.0], RICCATI_T_STAR, step=1e-4)
        assert x[0] == pytest.approx(0.5, abs=1e-5)

    def test_fourth_order_convergence(self):
        errs = []
        for h in (0.01, 0.005):
            x = integrate_fixed(DECAY, 0.0, [1.0], 1.0, step=h)
            errs.append(abs(x[0] - math.exp(-1.0)))
        factor = errs[0] / errs[1]
        assert 14.0 <= factor <= 18.0

    def test_nonfinite_rhs_raises(self):
        f = VectorField(1, lambda t, x: x * np.inf)
        with pytest.raises(IntegrationError):
            integrate_fixed(f, 0.0, [1.0], 1.0, step=0.1)

    def test_bad_span_rejected(self):
        with pytest.raises(ValueError):
            integrate_fixed(DECAY, 1.0, [1.0], 0.0)


class TestLocateEvent:
    def test_linear_crossing(self):
        f = VectorField(1, lambda t, x: np.ones(1))
        t_ev, x_ev = locate_event(f, lambda x: x[0] - 1.0, 0.0, [0.0], 5.0, step=0.01)
        assert t_ev == pytest.approx(1.0, abs=1e-9)
        assert x_ev[0] == pytest.approx(1.0, abs=1e-8)

    def test_unreachable_guard(self):
        assert locate_event(DECAY, lambda x: x[0] - 2.0, 0.0, [1.0], 10.0, step=0.01) is None

    def test_log_two_crossing(self):
        t_ev, _ = locate_event(DECAY, lambda x: 0.5 - x[0], 0.0, [1.0], 10.0, step=0.01)
        assert t_ev == pytest.approx(math.log(2.0), abs=1e-8)

    def test_refinement_idempotent(self):
        guard = lambda x: 0.5 - x[0]
        t1, x1 = locate_event(DECAY, guard, 0.0, [1.0], 10.0, step=0.01)
        # restart just before the bracketing step: same event within tolerance
        t0 = t1 - 0.5 * 0.01
        x0 = integrate_fixed(DECAY, 0.0, [1.0], t0, step=1e-5)
        t2, _ = locate_event(DECAY, guard, t0, x0, 10.0, step=0.01)
        assert t2 == pytest.approx(t1, abs=1e-8)

    def test_guard_must_start_negative(self):
        with pytest.raises(ValueError):
            locate_event(DECAY, lambda x: x[0], 0.0, [1.0], 1.0)


class TestSymEigenvalues:
    def test_identity(self):
        ev = sym_eigenvalues(SymMatrix(np.eye(3)))
        assert np.allclose(ev, [1.0, 1.0, 1.0], atol=1e-14)

    def test_diagonal_sorted(self):
        ev = sym_eigenvalues(SymMatrix(np.diag([3.0, 1.0, 2.0])))
        assert np.allclose(ev, [1.0, 2.0, 3.0], atol=1e-14)

    def test_two_by_two_against_characteristic_polynomial(self):
        # trace -2.998, det 0.997001 => eigenvalues (-2.998 +- sqrt(5))/2
        m = SymMatrix(np.array([[-1.999, 1.0], [1.0, -0.999]]))
        ev = sym_eigenvalues(m)
        assert ev[0] == pytest.approx(-2.6170339887498955, abs=1e-9)
        assert ev[1] == pytest.approx(-0.380966011250105, abs=1e-9)
        assert all(v < 0 for v in ev)
        assert ev[0] * ev[1] == pytest.approx(0.997001, abs=1e-9)

    def test_symmetrization_on_construction(self):
        m = SymMatrix([[1.0, 2.0], [0.0, 1.0]])
        assert m.entries[0, 1] == m.entries[1, 0] == 1.0

    def test_trace_and_determinant_properties(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            raw = rng.normal(size=(n, n))
            m = SymMatrix(raw + raw.T)
            ev = sym_eigenvalues(m)
            fro = np.linalg.norm(m.entries)
            assert ev.sum() == pytest.approx(np.trace(m.entries), abs=1e-10 * max(fro, 1.0))
            det = np.linalg.det(m.entries)  # independent oracle
            assert np.prod(ev) == pytest.approx(det, rel=1e-8, abs=1e-12)

    def test_matches_library_solver(self):
        rng = np.random.default_rng(3)
        raw = rng.normal(size=(6, 6))
        m = SymMatrix(raw + raw.T)
        assert np.allclose(sym_eigenvalues(m), np.linalg.eigvalsh(m.entries), atol=1e-10)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            sym_eigenvalues(SymMatrix(np.array([[np.nan, 0.0], [0.0, 1.0]])))


class TestSpectralNorm:
    def test_zero(self):
        assert spectral_norm(np.zeros((3, 2))) == 0.0

    def test_diagonal(self):
        assert spectral_norm(np.diag([2.0, 3.0])) == pytest.approx(3.0, abs=1e-12)

    def test_shear_gives_golden_ratio(self):
        assert spectral_norm([[1.0, 1.0], [0.0, 1.0]]) == pytest.approx(
            1.618033988749895, abs=1e-6
        )

    def test_rectangular(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(3, 5))
        assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-10)
