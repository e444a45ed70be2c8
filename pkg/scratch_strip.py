import math

import numpy as np

from neqlifshitz.material import Material, BathModel
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr

mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0)
geom = Geometry(gap=1.0, left=mat, right=mat, z_field=0.0)

w = 80.0
# strip: kappa < ~lambda_eff; take kappa < 1.6 to be safe, i.e. theta > acos(1.6/w)
th0 = math.acos(1.6 / w)
th1 = math.pi / 2

def diff_channel_theta(thetas):
    Qs = w * np.sin(thetas)
    jac = w * np.cos(thetas)
    ch = pr._bath_channels(geom, w, Qs, kernel="difference")
    tot = sum(v for k, v in ch.items() if k[2] == "propagating")
    return tot.real * jac

# brute force trapezoid with ultra-fine uniform grid, chunked
N = 6_000_000
acc = 0.0
edges = np.linspace(th0, th1, N + 1)
for i in range(0, N, 500_000):
    sl = edges[i:i + 500_001]
    v = diff_channel_theta(sl)
    acc += np.trapezoid(v, sl)
print(f"strip brute force (N={N}): {acc:+.6e}")

# same thing again at 2x resolution over the narrowest subrange to sanity check
N2 = 12_000_000
acc2 = 0.0
edges2 = np.linspace(th0, th1, N2 + 1)
for i in range(0, N2, 500_000):
    sl = edges2[i:i + 500_001]
    v = diff_channel_theta(sl)
    acc2 += np.trapezoid(v, sl)
print(f"strip brute force (N={N2}): {acc2:+.6e}")

# adaptive result over the same range for comparison
got, err = pr._adaptive_gk(
    lambda ts: {"x": diff_channel_theta(ts)}, np.linspace(th0, th1, 30),
    1e-8, abs_floor=0.0, max_panels=2000, label="strip")
print(f"adaptive (30 seeds): {got['x'].real:+.6e} (err {err:.1e})")

# non-strip remainder for scale
got2, err2 = pr._adaptive_gk(
    lambda ts: {"x": diff_channel_theta(ts)}, np.linspace(1e-9, th0, 40),
    1e-8, abs_floor=0.0, max_panels=2000, label="rest")
print(f"non-strip [0, th0]: {got2['x'].real:+.6e} (err {err2:.1e})")
