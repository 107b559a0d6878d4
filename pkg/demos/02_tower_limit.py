"""Ext of the Singer tower for F_2 against the direct chart of F_2."""
from singerlab import ext
from singerlab.amodule import trivial_module

F2 = trivial_module(2)
s_max, stem = 2, 4
t_max = s_max + stem
ns, truncs, maps = ext.singer_tower(F2, 0, -24, t_max, 2)
limit, report, Rs, induced = ext.inverse_limit_ext(
    [T.module for T in truncs], maps, ns, s_max, t_max, stems=(0, stem), confirm=8
)
direct = ext.ext_chart(F2, s_max, t_max).restrict(s_max, t_max, stem)
print("limit  :", sorted(limit.dims.items()))
print("direct :", sorted(direct.dims.items()))
print("agree  :", limit.dims == direct.dims)
for line in report.lines()[:6]:
    print(" ", line)
checks = ext.epsilon_comparison(F2, ns, truncs, Rs, induced, report, s_max, t_max)
print("epsilon_* an isomorphism onto the limit:",
      all(c.rank == c.dim == c.limit and c.in_stable_image for c in checks.values()))
