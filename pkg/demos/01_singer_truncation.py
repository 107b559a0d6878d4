"""Truncations of R_+(F_2) and the evaluation map epsilon."""
from singerlab import singer
from singerlab.amodule import trivial_module, validate_action

F2 = trivial_module(2)
T = singer.rplus_truncation(F2, 0, (0, 6))
print("basis of F^0 R_+(F_2) in degrees 0..6:")
for e in T.basis():
    print(f"  {singer.label(e, 2):<16} degree {singer.singer_degree(e, F2)}"
          f"  filtration {singer.filtration(e, F2)}  epsilon {singer.epsilon(e, F2)}")

print("validation defects:", validate_action(T.module) or "none")
e = singer.SingerBasis(0, 3, "a")
for i in (1, 2, 3):
    print(f"Sq^{i} {singer.label(e, 2)} = {singer.singer_action(i, e, F2)}")
