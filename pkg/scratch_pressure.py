import math
import time

import numpy as np

from neqlifshitz.material import Material, BathModel, EpsilonTable
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr

mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0)
geom = Geometry(gap=1.0, left=mat, right=mat, z_field=0.0)

print("== reality & z-independence of bath integrand ==")
for (w, Q) in [(0.7, 0.3), (0.7, 1.9), (2.3, 1.1), (2.3, 5.0)]:
    v0 = pr.bath_integrand(geom, w, Q)
    g2 = Geometry(gap=1.0, left=mat, right=mat, z_field=0.31)
    v1 = pr.bath_integrand(g2, w, Q)
    print(f"  w={w} Q={Q}: v={v0:.6e}  Im/Re={abs(v0.imag)/max(abs(v0.real),1e-300):.2e} "
          f"zshift rel={abs(v1 - v0)/max(abs(v0),1e-300):.2e}")

print("== FDR paths ==")
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(20):
    w = float(rng.uniform(0.05, 6.0))
    Q = float(rng.uniform(0.0, 2.5) * w)
    a = pr.bath_integrand(geom, w, Q, use_fdr=True)
    b = pr.bath_integrand(geom, w, Q, use_fdr=False)
    worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
print("  worst rel:", worst)

print("== survivor structure ==")
ch = pr._bath_channels(geom, 1.3, np.array([0.6, 2.0]), kernel="baseline")
tot_prop = sum(v[0] for k, v in ch.items() if k[2] == "propagating")
tot_evan = sum(v[1] for k, v in ch.items() if k[2] == "evanescent")
print("  baseline prop:", tot_prop, " baseline evan:", tot_evan)

print("== blackbody thermal baseline (sign calibration) ==")
T = 1.0
matT = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
                beta_bath=1.0 / T)
gT = Geometry(gap=1.0, left=matT, right=matT, z_field=0.0)
t0 = time.time()
opts = pr.PressureOptions(rel_tol=1e-4, subtract_infinite_separation=False,
                          thermal_only=True, omega_max=40.0)
res = pr._steady(gT, opts, "baseline")
bb = math.pi ** 2 * T ** 4 / 45.0
print(f"  baseline thermal={res.value:.8e} err={res.err:.1e}  "
      f"target(+bb)={bb:.8e}  ratio={res.value / bb:+.6f}  [{time.time()-t0:.1f}s]")

print("== equal-T difference vs matsubara (l=1, T=1) ==")
t0 = time.time()
eq = pr.equilibrium_matsubara(gT, T)
print(f"  matsubara: {eq:.8e}  [{time.time()-t0:.1f}s]")
t0 = time.time()
res = pr.steady_pressure(gT, pr.PressureOptions(rel_tol=1e-4))
print(f"  steady   : {res.value:.8e} err={res.err:.1e} "
      f"rel diff={abs(res.value - eq)/abs(eq):.2e}  [{time.time()-t0:.1f}s]")
print("  omega_max used:", res.omega_max_used)
for k in pr.BREAKDOWN_KEYS:
    print(f"    {k}: {res.breakdown[k]:+.6e}")
