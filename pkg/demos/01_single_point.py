"""One spectral point: the closed form, the zero and infinite cases, and a data set with no solution."""
from gmpy2 import mpq

from couplingkit import INF, CouplingData, NoSolution, solve, solve_general, verify

for eta in (mpq(0), mpq(1, 2), mpq(1), mpq(2), INF):
    data = CouplingData((mpq(1),), (eta,))
    sol = solve(data)
    print(f"eta = {str(eta):>4}:  phi_minus = {sol.phi_minus!r:24}  phi_plus = {sol.phi_plus!r:24}"
          f"  verified = {verify(data, sol).passed}")

# negative coupling constants at a positive point are not admissible
res = solve_general(CouplingData((mpq(1),), (mpq(-1),)))
print("eta = -1:", "no solution" if isinstance(res, NoSolution) else res)
