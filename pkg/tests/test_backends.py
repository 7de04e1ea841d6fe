"""Cross-checks between the compiled core and the NumPy fallback."""

import importlib.util

import numpy as np
import pytest

from coagfrag import RateLaws, TruncatedSystem
from coagfrag import _core_np

HAVE_CYTHON = importlib.util.find_spec("coagfrag._core_cy") is not None
needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled core not built")


@pytest.fixture
def system(kernel_pairs):
    frag, coag = kernel_pairs[1]
    laws = RateLaws(g=0.5, growth_exp=1.0, d=0.3, decay_exp=0.5, s=0.2, sed_exp=1.0, a=1.0, frag_exp=2.0)
    return TruncatedSystem(37, frag, coag, laws)


@needs_cython
class TestBackendAgreement:
    def test_rhs(self, system, rng):
        from coagfrag import _core_cy

        for _ in range(5):
            u = rng.random(system.N) * 20.0
            a, b = np.empty(system.N), np.empty(system.N)
            _core_cy.rhs_core(u, system._g, system._d, system._theta, system.frag_gain, system.k, a)
            _core_np.rhs_core(u, system._g, system._d, system._theta, system.frag_gain, system.k, b)
            assert np.max(np.abs(a - b) / (1.0 + np.abs(a))) < 1e-13

    def test_jacobian(self, system, rng):
        from coagfrag import _core_cy

        u = rng.random(system.N)
        a = np.empty((system.N, system.N))
        b = np.empty((system.N, system.N))
        _core_cy.jacobian_core(u, system.linear_jacobian, system.k, a)
        _core_np.jacobian_core(u, system.linear_jacobian, system.k, b)
        assert np.max(np.abs(a - b) / (1.0 + np.abs(a))) < 1e-13

    def test_mass_flux(self, system, rng):
        from coagfrag import _core_cy

        for _ in range(5):
            u = rng.random(system.N) * 5.0
            a = _core_cy.mass_flux_core(u, system._g, system._d, system._s, system._a, system.mass_defect)
            b = _core_np.mass_flux_core(u, system._g, system._d, system._s, system._a, system.mass_defect)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)
