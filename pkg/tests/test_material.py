import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from neqlifshitz.errors import ConfigError, DomainError, SingularityError
from neqlifshitz.material import (
    BathModel,
    EpsilonTable,
    Material,
    bath_dissipation,
    bath_dissipation_fourier,
    fdr_epsilon_identity,
    load_epsilon_table,
    material_table,
    noise_fourier,
    permittivity,
    permittivity_fourier,
    qbm_green,
)

from conftest import frequencies, lossy_materials


# ---------------------------------------------------------------------------
# oscillator response and permittivity
# ---------------------------------------------------------------------------


def test_static_permittivity_exact():
    # D(0) = 0 for every supported kernel, so eps(0) = 1 + lambda0^2/omega0^2
    for kind, cut in [("none", math.inf), ("ohmic", math.inf), ("ohmic_lorentz_cutoff", 30.0)]:
        gamma = 0.0 if kind == "none" else 0.3
        m = Material(omega0=2.0, lambda0=1.5, bath=BathModel(kind=kind, gamma=gamma, cutoff=cut))
        assert_allclose(permittivity(m, 0.0), 1.0 + 1.5**2 / 2.0**2, rtol=1e-14)


def test_fourier_value_at_resonance(lorentz_ohmic):
    # at omega = omega0 the real part of the denominator cancels and
    # eps_bar = 1 + 1/(i*gamma*omega0) -> 1 + 10j for gamma = 0.1
    assert_allclose(permittivity_fourier(lorentz_ohmic, 1.0), 1.0 + 10.0j, rtol=1e-12)


def test_green_static_value(lorentz_ohmic):
    assert_allclose(qbm_green(lorentz_ohmic, 0.0), 1.0 / lorentz_ohmic.omega0**2, rtol=1e-14)


def test_green_pole_raises():
    m = Material(omega0=1.0, bath=BathModel(kind="ohmic", gamma=0.1))
    pole = -0.05 + 1j * math.sqrt(1.0 - 0.0025)
    with pytest.raises(SingularityError):
        qbm_green(m, pole)


def test_green_array_shape(lorentz_ohmic):
    s = np.array([0.1 + 0.2j, 1.0, -1j * 3.0])
    g = qbm_green(lorentz_ohmic, s)
    assert g.shape == (3,)
    assert_allclose(g[1], qbm_green(lorentz_ohmic, 1.0 + 0j))


def test_hermitian_symmetry(lorentz_ohmic):
    w = np.linspace(0.05, 8.0, 23)
    ep = permittivity_fourier(lorentz_ohmic, w)
    em = permittivity_fourier(lorentz_ohmic, -w)
    assert_allclose(em, np.conj(ep), rtol=1e-13)


def test_marginal_material_eta_prescription():
    # gamma = 0: the retarded prescription must still give Im eps >= 0
    m = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="none", gamma=0.0))
    for w in (0.5, 0.999, 1.3):
        e = permittivity_fourier(m, w)
        assert e.imag >= 0.0


def test_cutoff_kernel_reduces_to_ohmic():
    mo = Material(bath=BathModel(kind="ohmic", gamma=0.2))
    mc = Material(bath=BathModel(kind="ohmic_lorentz_cutoff", gamma=0.2, cutoff=1e7))
    w = np.linspace(0.1, 5.0, 40)
    assert_allclose(permittivity_fourier(mc, w), permittivity_fourier(mo, w), rtol=1e-6)


# ---------------------------------------------------------------------------
# bath kernel and noise
# ---------------------------------------------------------------------------


def test_im_dbar_ohmic():
    b = BathModel(kind="ohmic", gamma=0.4)
    w = np.linspace(-3, 3, 11)
    assert_allclose(np.imag(bath_dissipation_fourier(b, w)), 0.5 * 0.4 * w, atol=1e-15)


def test_im_dbar_cutoff():
    b = BathModel(kind="ohmic_lorentz_cutoff", gamma=0.4, cutoff=7.0)
    w = np.linspace(-3, 3, 11)
    expect = 0.5 * 0.4 * w * 7.0**2 / (7.0**2 + w**2)
    assert_allclose(np.imag(bath_dissipation_fourier(b, w)), expect, rtol=1e-13, atol=1e-16)


def test_dissipation_vanishes_at_origin():
    for b in (BathModel(kind="ohmic", gamma=0.3),
              BathModel(kind="ohmic_lorentz_cutoff", gamma=0.3, cutoff=11.0)):
        assert bath_dissipation(b, 0.0) == 0.0


def test_noise_even_and_plateau():
    m = Material(bath=BathModel(kind="ohmic", gamma=0.3), beta_bath=2.0)
    w = np.linspace(0.01, 5, 60)
    assert_allclose(noise_fourier(m, w), noise_fourier(m, -w), rtol=1e-13)
    # classical plateau N_bar(0) = gamma/beta
    assert_allclose(noise_fourier(m, 0.0), 0.3 / 2.0, rtol=1e-12)
    # T = 0: coth -> sign, so N_bar = |Im D_bar|
    m0 = Material(bath=BathModel(kind="ohmic", gamma=0.3))
    assert_allclose(noise_fourier(m0, 1.7), 0.5 * 0.3 * 1.7, rtol=1e-13)
    assert noise_fourier(m0, 0.0) == 0.0


@settings(max_examples=100, deadline=None)
@given(mat=lossy_materials(), omega=frequencies())
def test_fdr_identity(mat, omega):
    lhs, rhs = fdr_epsilon_identity(mat, omega)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(mat=lossy_materials(), omega=frequencies())
def test_passivity(mat, omega):
    assert np.imag(permittivity_fourier(mat, omega)) > 0.0


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_bath_validation():
    with pytest.raises(DomainError):
        BathModel(kind="squarewell")
    with pytest.raises(DomainError):
        BathModel(kind="ohmic", gamma=-0.1)
    with pytest.raises(DomainError):
        BathModel(kind="ohmic_lorentz_cutoff", gamma=0.1, cutoff=math.inf)
    with pytest.raises(DomainError):
        BathModel(kind="none", gamma=0.2)


def test_material_validation():
    with pytest.raises(DomainError):
        Material(omega0=0.0)
    with pytest.raises(DomainError):
        Material(lambda0=-1.0)
    with pytest.raises(DomainError):
        Material(mass=0.0)
    with pytest.raises(DomainError):
        Material(beta_bath=0.0)
    assert not Material(lambda0=0.0).has_loss
    assert not Material(bath=BathModel(kind="none", gamma=0.0)).has_loss
    assert Material().has_loss


# ---------------------------------------------------------------------------
# tabulated permittivity
# ---------------------------------------------------------------------------

TABLE_TEXT = """\
# omega  re_eps  im_eps
0.1, 2.50, 0.010
1.0, 2.00, 0.100
10 1.20 0.020   # whitespace separation also fine
"""


def test_load_table():
    t = load_epsilon_table(TABLE_TEXT, beta_bath=4.0)
    assert t.omega.shape == (3,)
    assert t.has_loss and not t.is_dispersionless
    assert_allclose(t.eps_fourier(1.0), 2.0 + 0.1j)
    # Hermitian extension
    assert_allclose(t.eps_fourier(-1.0), 2.0 - 0.1j)


def test_load_table_errors():
    with pytest.raises(ConfigError) as e:
        load_epsilon_table("0.1 2.0\n")
    assert "line 1" in str(e.value)
    with pytest.raises(ConfigError) as e:
        load_epsilon_table("0.1 2.0 0.0\nx y z\n")
    assert "line 2" in str(e.value)
    with pytest.raises(ConfigError):
        load_epsilon_table("# only comments\n")
    with pytest.raises(DomainError):
        load_epsilon_table("1 2 -0.5\n")  # active medium rejected
    with pytest.raises(DomainError):
        load_epsilon_table("2 2 0\n1 2 0\n")  # non-monotone grid


def test_table_out_of_range():
    t = load_epsilon_table(TABLE_TEXT)
    with pytest.raises(DomainError):
        t.eps_fourier(50.0)
    with pytest.raises(DomainError):
        t.eps_laplace(1.0 + 1.0j)  # dispersive table has no off-axis extension


def test_dispersionless_table():
    t = EpsilonTable(omega=np.array([1.0]), eps=np.array([1e4 + 0.0j]))
    assert t.is_dispersionless and not t.has_loss
    assert t.eps_fourier(123.0) == 1e4
    assert t.eps_laplace(0.3 + 2j) == 1e4


def test_material_roundtrip(lorentz_ohmic):
    grid = np.geomspace(0.05, 20.0, 400)
    t = material_table(lorentz_ohmic, grid)
    # exact at the nodes
    assert_allclose(t.eps_fourier(grid[::7]), permittivity_fourier(lorentz_ohmic, grid[::7]),
                    rtol=1e-13)
    # between nodes the error is interpolation-limited; use a broad resonance
    broad = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=1.0))
    tb = material_table(broad, grid)
    mid = np.sqrt(grid[:-1] * grid[1:])[::5]
    assert_allclose(tb.eps_fourier(mid), permittivity_fourier(broad, mid), rtol=5e-4, atol=5e-4)
