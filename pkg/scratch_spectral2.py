"""Second probe round: distributions across random configs."""
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

def rand_mat(rng, kinds=("ohmic", "ohmic_lorentz_cutoff")):
    kind = kinds[rng.integers(len(kinds))]
    w0 = float(rng.uniform(0.5, 2.5))
    g = float(rng.uniform(0.05, 0.8))
    lam0 = float(rng.uniform(0.4, 1.5))
    if kind == "ohmic":
        bath = BathModel(kind="ohmic", gamma=g)
    else:
        bath = BathModel(kind="ohmic_lorentz_cutoff", gamma=g,
                         cutoff=float(rng.uniform(10.0, 80.0)))
    return Material(omega0=w0, lambda0=lam0, mass=1.0, bath=bath,
                    beta_bath=float(rng.uniform(0.5, 5.0)))

print("=== dmu at Q=0.3 exactly (spec example) ===")
geom = warm_geom()
grid = np.linspace(-20, 20, 4001)
for Q in (0.3, 0.377, 0.733, 1.191, 2.413, 4.871):
    worst = None
    for pol in ("TE", "TM"):
        scan = sp.scan_dmu_imaginary_axis(geom, pol, Q, grid)
        if worst is None or scan.min_abs < worst[0]:
            worst = (scan.min_abs, scan.argmin, pol)
    print(f"  Q={Q}: worst min={worst[0]:.6g} at {worst[1]:.4g} ({worst[2]})")

print("\n=== gamma monotonicity of the TE floor at Q=0.733 ===")
prev = None
for g in (0.4, 0.2, 0.1, 0.05):
    left = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=g),
                    beta_bath=1.0)
    gm = Geometry(gap=1.0, left=left, right=left)
    scan = sp.scan_dmu_imaginary_axis(gm, "TE", 0.733, grid)
    print(f"  gamma={g}: min={scan.min_abs:.6g}")
    prev = scan.min_abs

print("\n=== cutoff plate_mode_roots (now unfiltered) ===")
m_cut = Material(omega0=1.0, lambda0=1.0,
                 bath=BathModel(kind="ohmic_lorentz_cutoff", gamma=0.2, cutoff=50.0))
rep = sp.plate_mode_roots(m_cut, 0.7)
for s, o, _ in rep.roots:
    print(f"  {s:.10g} order {o}")
print("causal:", rep.causal)
inv = sp.branch_inventory(Geometry(gap=1.0, left=m_cut, right=m_cut), 0.7)
print("cuts:")
for kind, (a, b) in inv.cuts:
    print(f"  {kind}: {a:.8g} .. {b:.8g}")

print("\n=== 50 random modified-mode checks ===")
rng = np.random.default_rng(42)
spreads, worst_num, worst_den = [], 0.0, 0.0
t0 = time.time()
fails = 0
for i in range(50):
    gm = Geometry(gap=float(rng.uniform(0.4, 2.5)),
                  left=rand_mat(rng), right=rand_mat(rng),
                  z_field=float(rng.uniform(-0.15, 0.15)))
    Q = float(rng.uniform(0.05, 3.0))
    kz = float(rng.uniform(0.1, 3.0)) * (1 if rng.random() < 0.5 else -1)
    chk = sp.modified_mode_check(gm, Q, kz)
    spreads.append(chk.spread)
    worst_num = max(worst_num, chk.num_zero)
    worst_den = max(worst_den, chk.den_zero)
    if not chk.removable:
        fails += 1
        print(f"  FAIL at i={i}: Q={Q} kz={kz} spread={chk.spread:.3g}")
print(f"time: {time.time() - t0:.2f}s fails={fails}")
print(f"spread: max={max(spreads):.3g} median={np.median(spreads):.3g}")
print(f"worst num_zero={worst_num:.3g} den_zero={worst_den:.3g}")

print("\n=== 50 random materials: causality + Talbot + stencil ===")
rng = np.random.default_rng(7)
t0 = time.time()
worst_talbot, worst_gdot, worst_re = 0.0, 0.0, -math.inf
for i in range(50):
    m = rand_mat(rng)
    repp = sp.find_qbm_poles(m)
    worst_re = max(worst_re, repp.max_re)
    assert repp.causal, (i, m)
    tg = np.linspace(0.0, 30.0 / m.omega0, 25)
    got = sp.invert_laplace_qbm(m, tg)
    if m.bath.kind == "ohmic" and repp.roots[0][1] == 1:
        ref = np.zeros_like(tg)
        for s0, _, r0 in repp.roots:
            ref = ref + (r0 * np.exp(s0 * tg)).real
    else:
        ref = np.zeros_like(tg)
        for s0, _, r0 in repp.roots:
            ref = ref + (r0 * np.exp(s0 * tg)).real
    err = np.max(np.abs(got - ref))
    worst_talbot = max(worst_talbot, err)
    h = 0.01 / m.omega0
    gs = sp.invert_laplace_qbm(m, np.array([h, 2 * h, 3 * h, 4 * h]))
    gdot = (48 * gs[0] - 36 * gs[1] + 16 * gs[2] - 3 * gs[3]) / (12 * h)
    worst_gdot = max(worst_gdot, abs(gdot - 1.0))
print(f"time: {time.time() - t0:.2f}s")
print(f"worst pole Re: {worst_re:.4g}")
print(f"worst Talbot err vs residue sum: {worst_talbot:.3g}")
print(f"worst Gdot(0+) err: {worst_gdot:.3g}")

print("\n=== 20 random taxonomy configs ===")
rng = np.random.default_rng(11)
t0 = time.time()
bad = 0
worst_rel_dof, worst_rel_ic = 0.0, 0.0
ic_strengths, dof_strengths = [], []
for i in range(20):
    gm = Geometry(gap=float(rng.uniform(0.5, 2.0)),
                  left=rand_mat(rng), right=rand_mat(rng),
                  z_field=float(rng.uniform(-0.1, 0.1)))
    Q = float(rng.uniform(0.1, 2.0))
    rep = sp.dof_origin_report(gm, Q)
    rels = [d["rel"] for p in rep["plates"].values()
            for nm, d in p.items() if nm != "switch_on"]
    worst_rel_dof = max(worst_rel_dof, max(rels))
    dof_strengths.append(min(p["switch_on"]["strength"]
                             for p in rep["plates"].values()))
    if not rep["taxonomy_ok"]:
        bad += 1
        print(f"  DOF FAIL i={i}:")
        for key, info in rep["parts"].items():
            if not info["matches"]:
                print(f"    {key}: got {info['order']} want {info['expected']}"
                      f" slopes {info['slope']}")
        for pl, prec in rep["plates"].items():
            for nm, d in prec.items():
                if nm != "switch_on" and not d["vanishes"]:
                    print(f"    {pl} {nm} rel={d['rel']:.3g}")
    k = np.array([rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                  rng.uniform(0.2, 1.8) * (1 if rng.random() < 0.5 else -1)])
    rep = sp.ic_origin_report(gm, k)
    rels = [d["rel"] for nm, d in rep["total"].items() if nm != "switch_on"]
    worst_rel_ic = max(worst_rel_ic, max(rels))
    ic_strengths.append(rep["total"]["switch_on"]["strength"])
    if not rep["taxonomy_ok"]:
        bad += 1
        print(f"  IC FAIL i={i}: k={k}")
        for key, info in rep["parts"].items():
            if not info["matches"]:
                print(f"    {key}: got {info['order']} want {info['expected']}"
                      f" slopes {info['slope']}")
        for nm, d in rep["total"].items():
            if nm != "switch_on" and not d["vanishes"]:
                print(f"    {nm} rel={d['rel']:.3g}")
print(f"time: {time.time() - t0:.2f}s bad={bad}")
print(f"worst divergent rel: dof={worst_rel_dof:.3g} ic={worst_rel_ic:.3g}")
print(f"dof switch-on strength min={min(dof_strengths):.3g}")
print(f"ic switch-on strength max={max(ic_strengths):.3g}")
