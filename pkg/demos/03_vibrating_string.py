"""A string with point masses: spectral data forward, masses back through coupling problems."""
import time

from gmpy2 import mpq

from couplingkit.algebra import precision
from couplingkit.string_app import DiscreteString, direct_moment, string_moment, string_recover, string_spectrum

s = DiscreteString((mpq(1, 5), mpq(1, 2), mpq(4, 5)), (mpq(2), mpq(1, 2), mpq(1)))
d = string_spectrum(s, prec=256)
print("W(z) =", d.wronskian.to_strings())
with precision(60):
    print("eigenvalues:", [f"{float(v):.12f}" for v in d.eigenvalues])
    print("norming constants:", [f"{float(v):.12f}" for v in d.norming])

    # M(x) from coupling problems against the direct double integral
    for x in (mpq(1, 10), mpq(3, 10), mpq(13, 20), mpq(9, 10)):
        print(f"M({x}) = {float(string_moment(x, d)):.15f}   direct {float(direct_moment(s, x)):.15f}")

t = time.perf_counter()
r = string_recover(d)
print(f"recovered in {time.perf_counter() - t:.2f} s")
for x, m in zip(r.positions, r.masses):
    print(f"  mass {float(m):.12f} at {float(x):.12f}")
