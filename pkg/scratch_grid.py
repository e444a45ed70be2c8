import time

from neqlifshitz.material import Material, BathModel
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr

for T in (1.0, 0.1):
    mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
                   beta_bath=1.0 / T)
    for l in (0.5, 1.0, 2.0):
        geom = Geometry(gap=l, left=mat, right=mat, z_field=0.0)
        eq = pr.equilibrium_matsubara(geom, T)
        line = f"l={l:3.1f} T={T:3.1f} eq={eq:+.6e} |"
        for wmax in (16.0, 20.0, 25.0):
            t0 = time.time()
            try:
                res = pr.steady_pressure(
                    geom, pr.PressureOptions(rel_tol=1e-4, omega_max=wmax))
                rel = abs(res.value - eq) / abs(eq)
                line += f" w{wmax:.0f}: {rel:.1e} ({time.time()-t0:.0f}s)"
            except Exception as exc:
                line += f" w{wmax:.0f}: FAIL {type(exc).__name__}"
        print(line, flush=True)
