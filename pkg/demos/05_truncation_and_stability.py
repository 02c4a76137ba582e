"""Convergence: growing truncations of a spectrum, and perturbed coupling constants."""
from couplingkit.coupling import CouplingData, disk_grid, grid_distance, solve, solve_truncated, stability_distances
from couplingkit.instances import geometric_instance, stability_schedule

full = geometric_instance(12)
res = solve_truncated(full, tol=1e-8)
print("stopping rule: radii", [int(r) for r in res.radii], "discrepancies", [float(h) for h in res.history])

# the rule sees no change when a truncation adds a point that leaves the solution alone;
# the whole ladder shows the actual contraction
grid = disk_grid(1)
prev = None
for k in range(1, 13):
    sol = solve(CouplingData.from_pairs(full[:k]))
    if prev is not None:
        print(f"k = {k:2d}: change {float(grid_distance(sol, prev, grid)):.3e}")
    prev = sol

limit, seq = stability_schedule(seed=7)
for k, dist in enumerate(stability_distances(limit, seq), start=1):
    if k % 4 == 0:
        print(f"perturbation 2^-{k}: distance to the limit solution {float(dist):.3e}")
