import math
import time

from neqlifshitz.material import Material, BathModel, EpsilonTable, material_table
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr
import numpy as np

T = 1.0
mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0 / T)
geom = Geometry(gap=1.0, left=mat, right=mat, z_field=0.0)

print("matsubara l=1 T=1:", f"{pr.equilibrium_matsubara(geom, T):.8e}")
print("mat ideal mirror check:")
tab = EpsilonTable(omega=np.array([1e-4, 1e4]), eps=np.array([1e4 + 0j, 1e4 + 0j]))
gm = Geometry(gap=1.0, left=tab, right=tab, z_field=0.0)
pm = pr.equilibrium_matsubara(gm, 0.01)
print(f"  eps=1e4 T=0.01: {pm:.6e} vs -pi^2/240 = {-math.pi**2/240:.6e} "
      f"rel={abs(pm + math.pi**2/240)*240/math.pi**2:.3e}")

for wmax in (20.0, 40.0, 80.0, 160.0):
    t0 = time.time()
    res = pr.steady_pressure(geom, pr.PressureOptions(rel_tol=1e-4, omega_max=wmax))
    print(f"wmax={wmax:6.1f}: value={res.value:.8e} err={res.err:.1e} "
          f"[{time.time()-t0:.1f}s]")
