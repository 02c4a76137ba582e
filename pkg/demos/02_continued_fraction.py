"""Inside the solver: the auxiliary Herglotz function, its continued fraction and the pivot."""
from gmpy2 import mpq

from couplingkit import CouplingData, solve, verify
from couplingkit.coupling import step1_function

data = CouplingData((mpq(3), mpq(9)), (mpq(1), mpq(-1)))
m = step1_function(data)
print("m(z) = alpha + beta z - c0/z + sum w/(lam - z) with")
print("  c0 =", m.c0, " poles =", [(str(l), str(w)) for l, w in m.poles])

sol = solve(data)
tr = sol.trace
for n, (l, om, up) in enumerate(tr.cf, start=1):
    print(f"  level {n}: l = {l}, omega = {om}, upsilon = {up}")
print("sum of l =", sum(tr.cf.l), " pivot n0 =", tr.n0, " delta =", tr.delta)
print("phi_minus =", sol.phi_minus.to_strings(), " phi_plus =", sol.phi_plus.to_strings())

rep = verify(data, sol)
print("checks:", rep.checks)
print("structural parts of the positivity check:", rep.subchecks)
