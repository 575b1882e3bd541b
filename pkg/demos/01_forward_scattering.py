# %% [markdown]
# # Forward problem: phase shifts of an exponential well
#
# The inverse method needs S(q) = exp(2i delta(q)) on (0, q_edge]. Here we
# generate it for V(r) = -3 exp(-3r/2) and look at two sanity checks: the
# square well, where delta is known in closed form, and the large-q
# behaviour that fixes the tail constant A.

# %%
import math
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from marchenko import (asymptotic_constant, exponential_potential, phase_shift,
                       s_matrix_table, square_well)

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

# %% [markdown]
# Square well of depth 2 and radius 1: inside, u = sin(k'r) with
# k'^2 = q^2 + 2, so tan(qa + delta) = (q/k') tan(k'a). The arctangent
# fixes delta only modulo pi, so the analytic value is shifted onto the
# numerical branch before comparing.

# %%
well = square_well(2.0, 1.0)
print(" q      numeric delta      analytic delta    difference")
for q in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0):
    kp = math.sqrt(q * q + 2.0)
    exact = -q + math.atan(q / kp * math.tan(kp))
    delta = phase_shift(well, q)
    exact += math.pi * round((delta - exact) / math.pi)
    print(f"{q:4.1f}  {delta: .12f}  {exact: .12f}  {delta - exact: .1e}")

# %% [markdown]
# The model potential on 40 uniform points up to q = 8.

# %%
q_grid = 8.0 * np.arange(1, 41) / 40
table = s_matrix_table(exponential_potential(3.0, 1.5), q_grid)
A = asymptotic_constant(table, 8.0)
print(f"\ndelta(8) = {table.delta[-1]:.6f}, A = {A:.6f}  (first Born estimate: A = -1)")

fine = np.linspace(8.0, 40.0, 9)
tail = s_matrix_table(exponential_potential(3.0, 1.5), fine)
print("\n q     delta(q)     -A/q")
for q, d in zip(fine, tail.delta):
    print(f"{q:5.1f}  {d: .6f}  {-A / q: .6f}")

# %%
fig, ax = plt.subplots(figsize=(6, 3.5))
ax.plot(table.q, table.s.real, "o-", ms=3, label="Re S")
ax.plot(table.q, table.s.imag, "s-", ms=3, label="Im S")
ax.set_xlabel("q")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "scattering_data.png", dpi=120)
print(f"\nwrote {OUT / 'scattering_data.png'}")
