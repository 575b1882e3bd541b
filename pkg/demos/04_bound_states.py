# %% [markdown]
# # Bound states in the data
#
# A deeper exponential well (depth 6) binds one state. Its pole term
# -i M^2 / (q - i kappa) must be included in Y(q); leaving it out gives a
# kernel that belongs to a different potential.

# %%
import numpy as np

from marchenko import (ScatteringData, build_y_evaluator, exponential_potential,
                       find_bound_states, invert, recover_coefficients, s_matrix_table)

potential = exponential_potential(6.0, 1.5)
states = find_bound_states(potential)
for s in states:
    print(f"bound state: kappa = {s.kappa:.6f}, M = {s.M:.6f}")

table = s_matrix_table(potential, 8.0 * np.arange(1, 41) / 40)
for label, bound in (("with bound state", states), ("without", ())):
    y = build_y_evaluator(ScatteringData.from_table(table, bound))
    _, _, v = invert(recover_coefficients(y, 0.04, 100))
    window = (v.r >= 0.2) & (v.r <= 3.0)
    err = np.max(np.abs(v.values - potential(v.r))[window])
    print(f"{label:>17}: max error on [0.2, 3] = {err:.3f}")
