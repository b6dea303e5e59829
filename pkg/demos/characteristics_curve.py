"""Straight characteristics and the assembled solution curve for ``ex1``.

Run with ``python3 demos/characteristics_curve.py``.
"""

import numpy as np

from svhj import assemble_U, builtin, char_closed_form, char_integrate, make_base, solution_point

prob = builtin("ex1")
x0 = np.array([1.0, 2.0])
base = make_base(prob.cone, prob.z_hat, 5)

# characteristics are straight lines, so RK4 agrees with the closed form
sp = prob.scalarize([0.5, 0.5])
exact = char_closed_form(sp, 1.0, x0)
rk4 = char_integrate(sp, 1.0, x0, steps=20)
print("X closed form:", exact.X, " RK4:", rk4.X)
print("V closed form:", exact.V, " RK4:", rk4.V)

# %% the boundary curve of U(1, x0)
print("\nzeta_1   gamma")
for zeta in base.directions:
    print(f"{zeta[0]:6.2f}  ", solution_point(prob, zeta, 1.0, x0))

U = assemble_U(prob, base, 1.0, x0)
print("\noffsets:", U.offsets)
print("vertices of the sampled boundary:\n", U.boundary_polyline())

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fine = make_base(prob.cone, prob.z_hat, 101)
    pts = np.array([solution_point(prob, z, 1.0, x0) for z in fine.directions])
    plt.plot(pts[:, 0], pts[:, 1])
    plt.xlabel("z_1")
    plt.ylabel("z_2")
    plt.title("boundary of U(1, x0)")
    plt.savefig("ex1_curve.png", dpi=120)
    print("\nwrote ex1_curve.png")
