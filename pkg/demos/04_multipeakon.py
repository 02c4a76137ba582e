"""Camassa-Holm peakons: spectral data at t = 0, then u(x, t) from coupling problems.

Writes a CSV of the field so it can be plotted with any tool.
"""
from pathlib import Path

import numpy as np
from gmpy2 import mpq

from couplingkit.ch_app import Multipeakon, ch_forward, ch_sample_field
from couplingkit.formats import field_csv

mp = Multipeakon((mpq(-2), mpq(2)), (mpq(1), mpq(1, 4)))
d = ch_forward(mp)
print("eigenvalues:", [f"{float(v):.10f}" for v in d.eigenvalues])
print("asymptotic speeds 1/(2 lambda):", [f"{float(1 / (2 * v)):.10f}" for v in d.eigenvalues])

xs = np.linspace(-10, 60, 141)
ts = np.linspace(0, 20, 5)
u, errors = ch_sample_field(d, xs, ts)
for t, row in zip(ts, u):
    k = int(np.argmax(row))
    print(f"t = {t:5.1f}: max u = {row[k]:.4f} near x = {xs[k]:.1f}")
out = Path(__file__).with_name("peakon_field.csv")
out.write_bytes(field_csv(u, xs, ts))
print("wrote", out.name, "with", len(errors), "failed cells")
