import numpy as np
from neqlifshitz.material import Material, BathModel
from neqlifshitz.em_green import Geometry
from neqlifshitz import pressure as pr

T, l = 0.1, 2.0
mat = Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1),
               beta_bath=1.0 / T)
geom = Geometry(gap=l, left=mat, right=mat, z_field=0.0)

ws = np.arange(25.0, 33.01, np.pi / (8 * l))   # 16 samples per 2pi/l
hs = []
for w in ws:
    ch, e = pr._inner_q_integral(geom, float(w), "difference", True, False,
                                 1e-5, 0.0)
    hs.append(sum(ch.values()).real)
hs = np.array(hs)
for w, h in zip(ws, hs):
    print(f"w={w:7.4f}  h={h:+.6e}")
# crude period estimate via FFT on the detrended signal
det = hs - hs.mean()
f = np.fft.rfft(det * np.hanning(len(det)))
freqs = np.fft.rfftfreq(len(det), d=np.pi / (8 * l))
k = np.argmax(np.abs(f[1:])) + 1
print(f"dominant period: {1.0/freqs[k]:.4f}  (pi/l={np.pi/l:.4f}, 2pi/l={2*np.pi/l:.4f})")
print(f"osc amplitude ~ {det.std()*np.sqrt(2):.3e}, mean {hs.mean():+.3e}")
