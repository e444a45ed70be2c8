"""Probe spectral.py behaviour before freezing tests."""
import math
import time

import numpy as np

from neqlifshitz.em_green import Geometry
from neqlifshitz.material import BathModel, Material
from neqlifshitz import spectral as sp

def warm_geom(gap=1.0, t_left=1.0, t_right=0.5, z_field=0.0):
    left = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
                    beta_bath=1.0 / t_left)
    right = Material(omega0=1.5, lambda0=0.8, bath=BathModel(kind="ohmic", gamma=0.3),
                     beta_bath=1.0 / t_right)
    return Geometry(gap=gap, left=left, right=right, z_field=z_field)

print("=== find_qbm_poles ===")
m_marg = Material(omega0=1.3, lambda0=1.0, bath=BathModel(kind="none", gamma=0.0))
rep = sp.find_qbm_poles(m_marg)
print("gamma=0:", rep.roots, rep.causal, rep.marginal, rep.method)

m_ohm = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1))
rep = sp.find_qbm_poles(m_ohm)
print("ohmic:", rep.roots, rep.causal, rep.method)
want = complex(-0.05, math.sqrt(1 - 0.0025))
print("  err vs formula:", abs(rep.roots[1][0] - want))

m_crit = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=2.0))
rep = sp.find_qbm_poles(m_crit)
print("critical:", rep.roots, rep.causal)

m_cut = Material(omega0=1.0, lambda0=1.0,
                 bath=BathModel(kind="ohmic_lorentz_cutoff", gamma=0.2, cutoff=50.0))
rep = sp.find_qbm_poles(m_cut)
print("cutoff:", rep.roots)
print("  root sum + Lambda:", abs(sum(s for s, _, _ in rep.roots) + 50.0))
print("  residue sum (should be ~G~1/s^2 coeff 0... sum res = lim s G(s)*s):",
      sum(r for _, _, r in rep.roots))

print("\n=== invert_laplace_qbm ===")
t = np.linspace(0.0, 30.0, 61)
g0 = sp.invert_laplace_qbm(m_marg, t)
ref0 = np.sin(1.3 * t) / 1.3
print("undamped sup err:", np.max(np.abs(g0 - ref0)))
m_d = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.2))
gd = sp.invert_laplace_qbm(m_d, t)
w1 = math.sqrt(1 - 0.01)
refd = np.exp(-0.1 * t) * np.sin(w1 * t) / w1
print("damped sup err:", np.max(np.abs(gd - refd)))
t0 = time.time()
gc = sp.invert_laplace_qbm(m_cut, np.array([250.0, 300.0, 400.0]))
print("cutoff tail:", gc, "time:", time.time() - t0)
# derivative at 0+ via one-sided stencil
h = 0.01
gs = sp.invert_laplace_qbm(m_d, np.array([h, 2 * h, 3 * h, 4 * h]))
gdot = (48 * gs[0] - 36 * gs[1] + 16 * gs[2] - 3 * gs[3]) / (12 * h)
print("Gdot(0+):", gdot, "err:", abs(gdot - 1.0))
t0 = time.time()
_ = sp.invert_laplace_qbm(m_d, np.linspace(0, 30, 40))
print("40-point grid time:", time.time() - t0)

print("\n=== plate_mode_roots / branch_inventory ===")
rep = sp.plate_mode_roots(m_ohm, 0.7)
print("plate roots ohmic Q=0.7:", rep.roots, rep.causal)
rep = sp.plate_mode_roots(m_cut, 0.7)
print("plate roots cutoff Q=0.7:", [(s, o) for s, o, _ in rep.roots], rep.causal)
geom = warm_geom()
inv = sp.branch_inventory(geom, 2.0)
for kind, (a, b) in inv.cuts:
    print(f"  {kind}: {a:.6g} .. {b:.6g}")
print("evenness (plate cuts *2 endpoints each):", len(inv.cuts))
inv0 = sp.branch_inventory(geom, 0.0)
print("Q=0 gap cut:", inv0.cuts[0])

print("\n=== scan_dmu_imaginary_axis ===")
grid = np.linspace(-20, 20, 4001)
for pol in ("TE", "TM"):
    for Q in (0.1, 0.5, 1.0, 2.0, 5.0):
        scan = sp.scan_dmu_imaginary_axis(geom, pol, Q, grid)
        mn, am = scan
        print(f"  {pol} Q={Q}: min={mn:.4g} at {am:.3g} viol={scan.violation}")
mute = Material(omega0=1.0, lambda0=0.0, bath=BathModel(kind="ohmic", gamma=0.1))
gm = Geometry(gap=1.0, left=mute, right=mute)
scan = sp.scan_dmu_imaginary_axis(gm, "TE", 0.5, grid)
print("decoupled:", scan.min_abs, scan.argmin)

print("\n=== modified_mode_check ===")
t0 = time.time()
chk = sp.modified_mode_check(geom, 0.7, 1.1)
print("Q=0.7 kz=1.1:", "num0=%.3g den0=%.3g spread=%.3g removable=%s lim=%s"
      % (chk.num_zero, chk.den_zero, chk.spread, chk.removable,
         chk.lhopital_limit))
print("  time:", time.time() - t0)
chk = sp.modified_mode_check(warm_geom(z_field=0.2), 0.3, 2.0)
print("z=0.2:", chk.num_zero, chk.den_zero, chk.spread, chk.removable)

print("\n=== classify_origin_order on synthetic ===")
for f, name in [(lambda s: 1.0 / s ** 2 + 3.0 / s + 2.0, "1/s^2+3/s+2"),
                (lambda s: 5.0 / s + 1.0, "5/s+1"),
                (lambda s: 2.0 + s, "2+s"),
                (lambda s: s * s, "s^2")]:
    o = sp.classify_origin_order(f)
    print(f"  {name}: order={o.order} coeff={o.coeff:.6g} slope={o.slope:.3f} "
          f"resolved={o.resolved} drift={o.drift:.2g}")

print("\n=== dof_origin_report ===")
t0 = time.time()
rep = sp.dof_origin_report(geom, 0.7)
print("time:", time.time() - t0)
for key, info in rep["parts"].items():
    print(f"  {key}: order={info['order']} want={info['expected']} "
          f"slope=[{info['slope'][0]:.3f},{info['slope'][1]:.3f}] "
          f"match={info['matches']}")
for plate, rec in rep["plates"].items():
    for nm, d in rec.items():
        if nm == "switch_on":
            print(f"  {plate} switch_on residue={d['residue']}")
        else:
            print(f"  {plate} {nm}: rel={d['rel']:.3g} scale={d['parts_scale']:.3g} "
                  f"cancels={d['cancels']}")
print("taxonomy_ok:", rep["taxonomy_ok"])

print("\n=== ic_origin_report ===")
t0 = time.time()
rep = sp.ic_origin_report(geom, np.array([0.4, 0.3, 1.1]))
print("time:", time.time() - t0)
for key, info in rep["parts"].items():
    print(f"  {key}: order={info['order']} want={info['expected']} "
          f"slope=[{info['slope'][0]:.3f},{info['slope'][1]:.3f}] "
          f"match={info['matches']}")
for nm, d in rep["total"].items():
    if nm == "switch_on":
        print(f"  switch_on residue={d['residue']}")
    else:
        print(f"  {nm}: rel={d['rel']:.3g} scale={d['parts_scale']:.3g} "
              f"cancels={d['cancels']}")
print("taxonomy_ok:", rep["taxonomy_ok"])
