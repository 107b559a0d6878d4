"""An element of R_+(F_2)_* whose coaction never terminates."""
from singerlab import verify
from singerlab.singer import maximal_algebraic_test

report = maximal_algebraic_test(verify.witness_element(2), 32)
print("finite coaction:", report.finite)
print("nonzero coaction at generator degrees:", report.generator_degrees)
for line in verify.suite_maxalg(2, seed=0, bound=32).lines():
    print(line)
