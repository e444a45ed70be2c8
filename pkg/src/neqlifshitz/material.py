"""Dissipative dielectric model: one internal oscillator per half-space,
linearly damped by a thermal bath.

Everything is expressed through the retarded Laplace-domain response

    G(s) = 1 / (s**2 + omega0**2 - 2*D(s)),        eps(s) = 1 + lambda0**2 * G(s)

with D(s) the bath dissipation kernel.  Fourier-domain quantities follow from
s -> -i*omega (retarded boundary values).  Natural units: hbar = c = kB = 1.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, SingularityError

BATH_KINDS = ("none", "ohmic", "ohmic_lorentz_cutoff")

# Retarded prescription: marginal (gamma = 0) responses are evaluated at
# s + eta with eta relative to the local frequency scale.
ETA_REL = 1e-9


@dataclass(frozen=True)
class BathModel:
    """Dissipation kernel attached to a plate's internal oscillator.

    Parameters
    ----------
    kind : str
        One of ``"none"``, ``"ohmic"`` (2*D(s) = -gamma*s) or
        ``"ohmic_lorentz_cutoff"`` (2*D(s) = -gamma*s*cutoff/(s + cutoff)).
    gamma : float
        Friction coefficient, >= 0.
    cutoff : float
        Lorentz-Drude cutoff of the spectral density (only used by the
        cutoff kind), > 0.
    """

    kind: str = "ohmic"
    gamma: float = 0.1
    cutoff: float = math.inf

    def __post_init__(self):
        if self.kind not in BATH_KINDS:
            raise DomainError(f"unknown bath kind {self.kind!r}; expected one of {BATH_KINDS}")
        if not self.gamma >= 0.0:
            raise DomainError(f"bath gamma must be >= 0, got {self.gamma}")
        if self.kind == "ohmic_lorentz_cutoff" and not (self.cutoff > 0.0 and math.isfinite(self.cutoff)):
            raise DomainError(f"ohmic_lorentz_cutoff needs a finite positive cutoff, got {self.cutoff}")
        if self.kind == "none" and self.gamma != 0.0:
            raise DomainError("bath kind 'none' must have gamma = 0")


@dataclass(frozen=True)
class Material:
    """Half-space material: oscillator (omega0, mass, coupling lambda0)
    plus its bath and the two inverse temperatures.

    ``beta_bath`` weights the steady noise; ``beta_dof`` only enters the
    transient initial-condition integrands.  ``math.inf`` means T = 0.
    The static dissipation shift vanishes for both supported kernels
    (D(0) = 0), so omega0 is the observed resonance and
    eps(0) = 1 + lambda0**2/omega0**2 exactly.
    """

    omega0: float = 1.0
    lambda0: float = 1.0
    mass: float = 1.0
    bath: BathModel = field(default_factory=BathModel)
    beta_bath: float = math.inf
    beta_dof: float = math.inf

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be > 0, got {self.omega0}")
        if not self.lambda0 >= 0:
            raise DomainError(f"lambda0 must be >= 0, got {self.lambda0}")
        if not self.mass > 0:
            raise DomainError(f"mass must be > 0, got {self.mass}")
        for name in ("beta_bath", "beta_dof"):
            b = getattr(self, name)
            if not b > 0:
                raise DomainError(f"{name} must be > 0 (inf allowed), got {b}")

    @property
    def has_loss(self):
        return self.bath.kind != "none" and self.bath.gamma > 0 and self.lambda0 > 0


def bath_dissipation(bath, s):
    """Laplace-domain dissipation kernel D(s).

    Conventions: the oscillator Green function denominator is
    s**2 + omega0**2 - 2*D(s), so the ohmic kernel 2*D(s) = -gamma*s
    yields the familiar s**2 + gamma*s + omega0**2.

    Parameters
    ----------
    bath : BathModel
    s : complex or ndarray

    Returns
    -------
    complex or ndarray
        D(s); vanishes at s = 0 for every supported kind.
    """
    s = np.asarray(s, dtype=complex) if isinstance(s, np.ndarray) else complex(s)
    if bath.kind == "none":
        return 0.0 * s
    if bath.kind == "ohmic":
        return -0.5 * bath.gamma * s
    # ohmic_lorentz_cutoff: 2D(s) = -gamma*s*L/(s+L)
    return -0.5 * bath.gamma * s * bath.cutoff / (s + bath.cutoff)


def qbm_green(mat, s):
    """Retarded oscillator Green function G(s) = 1/(s^2 + omega0^2 - 2 D(s)).

    G(0) = 1/omega0^2 > 0 and dG/dt(0+) = 1 in the time domain.  Raises
    SingularityError when s lands on a pole.
    """
    s_arr = np.asarray(s, dtype=complex)
    den = s_arr * s_arr + mat.omega0**2 - 2.0 * bath_dissipation(mat.bath, s_arr)
    scale = np.abs(s_arr) ** 2 + mat.omega0**2
    bad = np.abs(den) <= 1e-14 * scale
    if np.any(bad):
        pt = s_arr[bad].flat[0] if s_arr.ndim else complex(s_arr)
        raise SingularityError(f"oscillator response pole at s = {pt}", point=pt)
    out = 1.0 / den
    return out if s_arr.ndim else complex(out)


def permittivity(mat, s):
    """eps(s) = 1 + lambda0^2 G(s) on the Laplace domain."""
    return 1.0 + mat.lambda0**2 * qbm_green(mat, s)


def _fourier_s(mat, omega):
    """Laplace point for the retarded Fourier boundary value of ``mat``.

    Lossy materials are evaluated exactly at s = -i*omega; marginal ones
    (gamma = 0) need the eta-prescription to stay retarded.
    """
    omega = np.asarray(omega, dtype=float)
    s = -1j * omega
    if not (mat.bath.gamma > 0):
        s = s + ETA_REL * np.maximum(np.abs(omega), 1.0)
    return s


def permittivity_fourier(mat, omega):
    """Retarded Fourier permittivity eps_bar(omega) = eps(s = -i omega).

    Accepts a Material or an EpsilonTable.  Passive: Im eps_bar(omega) >= 0
    for omega > 0, and eps_bar(-omega) = conj(eps_bar(omega)).
    """
    if isinstance(mat, EpsilonTable):
        return mat.eps_fourier(omega)
    out = permittivity(mat, _fourier_s(mat, omega))
    return out


def bath_dissipation_fourier(bath, omega):
    """D_bar(omega) = D(s = -i omega); Im D_bar(omega) >= 0 for omega > 0."""
    return bath_dissipation(bath, -1j * np.asarray(omega, dtype=float))


def _coth(x):
    """coth(x) elementwise; overflow-safe, +-1 beyond |x| ~ 20."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = np.abs(x) > 20.0
    out[big] = np.sign(x[big])
    out[~big] = 1.0 / np.tanh(x[~big])
    return out


def noise_fourier(mat, omega):
    """Steady bath noise weight N_bar(omega) = coth(beta_bath*omega/2) Im D_bar(omega).

    Even in omega and >= 0.  At omega = 0 the classical plateau
    gamma/beta_bath is returned (its T = 0 limit is 0); at beta = inf the
    coth degenerates to sign(omega).
    """
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    beta = mat.beta_bath
    im_d = np.imag(bath_dissipation_fourier(mat.bath, omega_arr))
    if math.isinf(beta):
        out = np.sign(omega_arr) * im_d
    else:
        out = np.empty_like(omega_arr)
        zero = omega_arr == 0.0
        # lim_{w->0} coth(beta w/2) Im D_bar(w) = (2/beta) * d Im D_bar/dw (0)
        out[zero] = (2.0 / beta) * _im_dbar_slope0(mat.bath)
        nz = ~zero
        out[nz] = _coth(0.5 * beta * omega_arr[nz]) * im_d[nz]
    return out if np.ndim(omega) else float(out[0])


def _im_dbar_slope0(bath):
    """d Im D_bar / d omega at omega = 0 (= gamma/2 for both ohmic kernels)."""
    if bath.kind == "none":
        return 0.0
    return 0.5 * bath.gamma  # cutoff kind: gamma*L^2/(2(L^2+0)) = gamma/2


def fdr_epsilon_identity(mat, omega):
    """Both sides of the permittivity fluctuation-dissipation identity.

    Returns
    -------
    (lhs, rhs) : tuple of float
        lhs = Im eps_bar(omega);
        rhs = 2 * lambda0^2 * Im D_bar(omega) * G(-i omega) * G(+i omega).
        The identity is exact for every dissipative material.
    """
    w = float(omega)
    lhs = float(np.imag(permittivity_fourier(mat, w)))
    gg = qbm_green(mat, _fourier_s(mat, w)) * qbm_green(mat, np.conj(_fourier_s(mat, w)))
    rhs = 2.0 * mat.lambda0**2 * float(np.imag(bath_dissipation_fourier(mat.bath, w))) * float(np.real(gg))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Tabulated permittivities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonTable:
    """Tabulated retarded permittivity on a positive frequency grid.

    Interpolation is log-frequency linear on Re and Im separately;
    negative frequencies use the Hermitian extension
    eps_bar(-w) = conj(eps_bar(w)).  ``beta_bath`` is the temperature
    weight used when the table stands in for a plate.
    """

    omega: np.ndarray
    eps: np.ndarray
    beta_bath: float = math.inf

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        ep = np.asarray(self.eps, dtype=complex)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "eps", ep)
        if om.ndim != 1 or om.size < 1 or ep.shape != om.shape:
            raise DomainError("table needs matching 1-d omega and eps arrays")
        if np.any(om <= 0) or np.any(np.diff(om) <= 0):
            raise DomainError("table frequencies must be positive and strictly increasing")
        if np.any(np.imag(ep) < 0):
            raise DomainError("table permittivity must have Im eps >= 0 (passivity)")
        if not self.beta_bath > 0:
            raise DomainError(f"beta_bath must be > 0, got {self.beta_bath}")

    @property
    def has_loss(self):
        return bool(np.any(np.imag(self.eps) > 0))

    @property
    def is_dispersionless(self):
        return self.omega.size == 1 or bool(np.all(self.eps == self.eps[0]))

    def eps_fourier(self, omega):
        """Interpolated eps_bar(omega); DomainError outside the covered range."""
        w = np.asarray(omega, dtype=float)
        scalar = w.ndim == 0
        w = np.atleast_1d(w)
        out = np.empty(w.shape, dtype=complex)
        aw = np.abs(w)
        if self.is_dispersionless:
            out[:] = self.eps[0]
        else:
            if np.any((aw < self.omega[0]) | (aw > self.omega[-1])):
                bad = aw[(aw < self.omega[0]) | (aw > self.omega[-1])][0]
                raise DomainError(
                    f"frequency {bad:g} outside table range [{self.omega[0]:g}, {self.omega[-1]:g}]")
            lg = np.log(aw)
            lt = np.log(self.omega)
            out.real = np.interp(lg, lt, self.eps.real)
            out.imag = np.interp(lg, lt, self.eps.imag)
        out[w < 0] = np.conj(out[w < 0])
        out[w == 0] = complex(self.eps[0].real, 0.0) if self.is_dispersionless else out[w == 0]
        return complex(out[0]) if scalar else out

    def eps_laplace(self, s):
        """eps(s) off the real-frequency axis; only dispersionless tables
        extend unambiguously (constant), anything else would need a
        Kramers-Kronig transform the table does not determine."""
        if not self.is_dispersionless:
            raise DomainError("only a dispersionless table extends off the Fourier axis")
        return complex(self.eps[0]) + 0.0 * np.asarray(s, dtype=complex)


def load_epsilon_table(text, beta_bath=math.inf):
    """Parse an epsilon table from CSV text.

    Format: three numeric columns ``omega, re_eps, im_eps`` per line;
    blank lines and ``#`` comments ignored.  Raises ConfigError with the
    offending line number on malformed input, DomainError on invalid data.
    """
    if isinstance(text, bytes):
        text = text.decode()
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        if len(parts) != 3:
            raise ConfigError(f"expected 3 columns (omega, re_eps, im_eps), got {len(parts)}", line=lineno)
        try:
            w, re_e, im_e = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"non-numeric field: {exc}", line=lineno) from None
        rows.append((w, re_e, im_e))
    if not rows:
        raise ConfigError("table is empty")
    arr = np.array(rows, dtype=float)
    return EpsilonTable(omega=arr[:, 0], eps=arr[:, 1] + 1j * arr[:, 2], beta_bath=beta_bath)


def material_table(mat, omega_grid):
    """Sample a Material into an EpsilonTable on ``omega_grid`` (round-trip helper)."""
    eps = np.array([permittivity_fourier(mat, w) for w in np.asarray(omega_grid, dtype=float)])
    return EpsilonTable(omega=np.asarray(omega_grid, dtype=float), eps=eps, beta_bath=mat.beta_bath)
