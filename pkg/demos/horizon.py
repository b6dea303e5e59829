"""Crossing of characteristics for a concave initial datum.

With ``U0 = -|x|^2 / 2`` in each coordinate the flow is ``(1 - t) x`` and
collapses at ``t = 1``.
"""

import numpy as np

from svhj import builtin, make_base, tstar_estimate, u_scalar
from svhj.characteristics import horizon_bound

prob = builtin("concave-init")
ax = np.linspace(-2, 2, 9)
grid = np.array([[a, b] for a in ax for b in ax])
base = make_base(prob.cone, prob.z_hat, 5)

for zeta in base.directions:
    rep = tstar_estimate(prob.scalarize(zeta), grid, 10.0, 200)
    print(f"zeta={zeta}  T*={rep.t_star:.8f}  witness={rep.witness_x}")
print("a-priori bound:", horizon_bound(prob, base, grid, grid))

sp = prob.scalarize([0.5, 0.5])
x = np.array([0.5, 0.3])
for t in (0.0, 0.5, 0.9, 0.99):
    print(f"t={t:4.2f}  u={u_scalar(sp, t, x):.6f}")

for ex in ("ex1", "ex2"):
    p = builtin(ex)
    t = min(tstar_estimate(p.scalarize(z), grid, 100.0, 500).t_star for z in base.directions)
    print(f"{ex}: T* = {t}")
