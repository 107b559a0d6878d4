"""Tate groups of C_p-modules, the Tate E^2-page and its representatives."""
from singerlab import tate, tate_ss
from singerlab.amodule import trivial_module
from singerlab.fp import GradedVectorSpace
from singerlab.singer import SingerBasis

M = tate.jordan_cp(3, [1, 2, 3])
print("Jordan blocks 1, 2, 3 at p = 3:",
      [tate.tate_cohomology(M, n).dim() for n in range(-3, 4)])

B = GradedVectorSpace.from_degrees(2, {"a": 0, "b": 5})
page = tate_ss.e2_page(B, (-4, 4), (0, 12))
print("E^2 cells:", sorted(page.dims))
print("collapse:", tate_ss.certify_collapse(B, (-12, 12), (0, 12)).lines())

F2 = trivial_module(2)
for n in range(-2, 3):
    r = tate_ss.representative(SingerBasis(0, n - 1, "a"), F2)
    print(f"representative of x^{n - 1}: bidegree {r.bidegree()} filtration {r.filtration}")
