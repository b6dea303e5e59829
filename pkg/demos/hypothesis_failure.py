"""When the per-direction half-spaces do not all touch the intersection.

For ``ex2`` at ``x = p0`` the constraint for the middle direction sits
strictly below the support of the intersection of the other two.
"""

import numpy as np

from svhj import assemble_U, builtin, check_hyp_u, check_hyp_u2, make_base

prob = builtin("ex2")
x = np.array([1.0, 0.0])

for m in (3, 11, 41):
    base = make_base(prob.cone, prob.z_hat, m)
    rep = check_hyp_u(assemble_U(prob, base, 1.0, x), 1e-6)
    print(f"m={m:3d}  verdict={rep.verdict}  worst zeta={rep.directions[rep.worst]}  gap={rep.gap[rep.worst]:.6f}")

# the pairwise test is only sufficient; it fails for both examples
for name, pt in (("ex1", [1.0, 2.0]), ("ex2", [1.0, 0.0])):
    p = builtin(name)
    r2 = check_hyp_u2(p, make_base(p.cone, p.z_hat, 5), 1.0, pt)
    print(f"{name}: pairwise min slack {r2.min_slack:.6f} at {r2.worst_pair}")
