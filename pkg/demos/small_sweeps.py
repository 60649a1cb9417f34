# Exhaustive sweeps at n = 2, 3 and a small random sweep at n = 5, with verdict tallies.
import json
from fractions import Fraction

from hamlp.harness import sweep_exhaustive, sweep_random, recheck_report

for n in (2, 3):
    rep = sweep_exhaustive(n, seed=0, keep=True)
    print("n =", n, "instances:", rep.generator["count"])
    print(json.dumps(rep.tallies, indent=1))
    print("recheck problems:", sum(len(recheck_report(r.to_json())) for r in rep.reports))

rep = sweep_random(5, 25, Fraction(1, 2), seed=42, keep=True)
print("random n = 5:", json.dumps(rep.tallies))
for inst in rep.violations():
    print(inst["fingerprint"][:16], inst["verdicts"])
