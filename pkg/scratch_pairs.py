import math

import numpy as np

from neqlifshitz.material import Material, BathModel
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr
from neqlifshitz.em_green import green_gap_from_plate

mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0)
geom = Geometry(gap=1.0, left=mat, right=mat, z_field=0.0)


def pair_probe(w, kappa, pol):
    Q = math.sqrt(w * w - kappa * kappa)
    s1, s2 = -1j * w, +1j * w
    b1 = green_gap_from_plate(geom, "L", s1, np.asarray(Q), phase_sign=+1)
    b2 = green_gap_from_plate(geom, "L", s2, np.asarray(Q), phase_sign=-1)
    c1 = green_gap_from_plate(geom, "L", s1, np.asarray(Q), phase_sign=+1,
                              infinite_separation=True)
    c2 = green_gap_from_plate(geom, "L", s2, np.asarray(Q), phase_sign=-1,
                              infinite_separation=True)
    lock = pr._locked_cavity(geom, s1, s2, np.asarray(Q))[pol]
    out = {}
    for tag1 in ("direct", "reflected"):
        for tag2 in ("direct", "reflected"):
            pw = lambda t1, t2, a=tag1, b=tag2: 1.0 if (t1.tag == a and t2.tag == b) else 0.0
            full = pr.theta_contract(b1.filtered(pol), b2.filtered(pol), s1, s2,
                                     pair_weight=pw)
            base = 0.0
            if tag1 == tag2:
                pwb = lambda t1, t2, a=tag1: lock if (t1.tag == a and t2.tag == a) else 0.0
                base = pr.theta_contract(c1.filtered(pol), c2.filtered(pol), s1, s2,
                                         pair_weight=pwb)
            out[(tag1[0], tag2[0])] = (complex(full), complex(base))
    return out


for w in (40.0, 80.0, 160.0):
    for kappa in (5.0, 0.5 * w, 0.9 * w):
        for pol in ("TE", "TM"):
            res = pair_probe(w, kappa, pol)
            tot_full = sum(v[0] for v in res.values())
            tot_base = sum(v[1] for v in res.values())
            print(f"w={w:5.0f} kap={kappa:6.1f} {pol}: "
                  f"diff={tot_full - tot_base:+.3e}")
            for k, (f, b) in res.items():
                tagd = f - b
                print(f"    {k}: full={f:+.6e}  base={b:+.6e}  d={tagd:+.3e}")
