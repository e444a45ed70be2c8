import numpy as np

from neqlifshitz.material import Material, BathModel
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr

mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0)
geom = Geometry(gap=1.0, left=mat, right=mat, z_field=0.0)

print("inner Q-integral of the DIFFERENCE kernel vs omega (per channel, L only):")
hdr = ["omega", "TE.prop", "TE.evan", "TM.prop", "TM.evan", "sum"]
print("  " + "  ".join(f"{h:>11s}" for h in hdr))
for w in (5.0, 10.0, 20.0, 40.0, 80.0, 160.0):
    ch, e = pr._inner_q_integral(geom, w, "difference", True, False, 1e-6, 0.0)
    row = [ch[("L", "TE", "propagating")], ch[("L", "TE", "evanescent")],
           ch[("L", "TM", "propagating")], ch[("L", "TM", "evanescent")]]
    s = sum(ch.values()).real
    print(f"  {w:11.1f}" + "".join(f"  {v.real:+.4e}" for v in row) + f"  {s:+.4e}")

print("same for FULL and BASELINE at omega=80:")
for kern in ("full", "baseline"):
    ch, e = pr._inner_q_integral(geom, 80.0, kern, True, False, 1e-6, 0.0)
    row = [ch[("L", "TE", "propagating")], ch[("L", "TE", "evanescent")],
           ch[("L", "TM", "propagating")], ch[("L", "TM", "evanescent")]]
    print(f"  {kern:10s}" + "".join(f"  {v.real:+.4e}" for v in row))

print("pointwise difference integrand along Q at omega=80:")
w = 80.0
for frac in (0.2, 0.9, 0.999, 0.9999, 0.99999):
    Q = w * np.sqrt(1 - (1 - frac) ** 2) if False else w * frac
    kappa = np.sqrt(w * w - Q * Q)
    d = pr.bath_integrand(geom, w, Q, kernel="full") - \
        sum(pr._bath_channels(geom, w, np.asarray(Q), kernel="baseline").values())
    print(f"  Q/w={frac:.5f} kappa={kappa:9.4f}: diff={complex(d):+.6e}")
