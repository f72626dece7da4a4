"""A sequence where W2 cannot beat a_n^(3/4) although Delta ~ a_n / 4."""
import math

from w2chaos.applications.sweep import lowbound_pair, rate_sweep
from w2chaos.chaos_model import delta

for a in (1e-2, 1e-3, 1e-4):
    c, t = lowbound_pair(a)
    print(f"a={a:.0e}  Delta={delta(c, t):.3e}  a/4={a / 4:.3e}")

table = rate_sweep("lowbound", [1e2, 1e3, 1e4, 1e5])
for r in table.rows:
    print(f"a_n={r['a_n']:.0e}  cf_lower={r['cf_lower']:.3e}  a_n^(3/4)={r['a_n'] ** 0.75:.3e}  "
          f"sqrt(Delta)={math.sqrt(r['delta']):.3e}")
print("slope of cf_lower in n:", round(table.slopes["cf_lower"].slope, 3))
