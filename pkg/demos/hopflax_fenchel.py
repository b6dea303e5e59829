"""Hopf-Lax values against characteristics through the conjugate Hamiltonian."""

import numpy as np

from svhj import (
    as_lagrangian,
    assemble_U,
    builtin,
    check_conjugate_identities,
    conjugate_scalar,
    hopflax_value,
    legendre_dual,
    make_base,
    verify_characteristic_link,
)

lag = builtin("quad-lagrangian")
base = make_base(lag.cone, lag.z_hat, 9)
x = np.array([1.0, 2.0])

hl = hopflax_value(lag, base, 1.0, x).offsets
ch = assemble_U(legendre_dual(lag), base, 1.0, x).offsets
print("Hopf-Lax offsets:       ", np.round(hl, 6))
print("characteristics offsets:", np.round(ch, 6))
print("max difference:", np.max(np.abs(hl - ch)))
print("link deviation:", verify_characteristic_link(lag, [0.3, 0.7], 1.0, x, np.linspace(0, 1, 11)))

# %% conjugate of the quartic direction
quartic = as_lagrangian(builtin("ex1")).scalarize([0.0, 1.0])
print("\nL*(1, 0) =", conjugate_scalar(quartic, [1.0, 0.0]).value)
ps = np.random.default_rng(0).uniform(-2, 2, (20, 2))
rep = check_conjugate_identities(quartic, ps, tol=1e-8)
print("identity residuals:", rep.r1.max(), rep.r2.max(), rep.r3.max())
