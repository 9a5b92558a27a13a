"""Stationary, limit-cycle and Monte Carlo sojourn-time cycles for the healthcare model."""
from fractions import Fraction

from mclim.catalog import bundled
from mclim.limit_cycle import limit_of
from mclim.sojourn import Partition, cycle_sojourn, monte_carlo_sojourn, stationary_sojourn

model = bundled("healthcare")
part = Partition.of(model, ["G1", "G2", "G3", "G4", "G5"])

st = stationary_sojourn(model, part)
print(f"stationary : s(G)={st.s_good:.12f} (= {Fraction(st.s_good).limit_denominator(10**5)})"
      f"  s(Gc)={st.s_bad:.12f}  STC={st.stc:.12f}")

cyc = limit_of(model, "G1")
lc = cycle_sojourn(model, cyc, part)
print(f"limit cycle: {cyc.format(model, model.index('G1'))}")
print(f"             s(G)={lc.s_good:g}  s(Gc)={lc.s_bad:g}  STC={lc.stc:g}")

for entries in (10_000, 100_000):
    mc = monte_carlo_sojourn(model, part, seed=1, entries=entries)
    print(f"monte carlo: {entries} entries  s(G)={mc.s_good:.4f} +- {mc.detail['se_good']:.4f}"
          f"  s(Gc)={mc.s_bad:.4f}")
