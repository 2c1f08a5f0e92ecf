"""
A hierarchy attached to a quasi-cyclic element
==============================================

The same recursion runs for the so_7 integrable triple.  Now ``f = f1 + f2``
with ``f2`` nonzero, the splitting uses ``ker ad(f1 + zE)``, and pairing
``f1 + zE`` with ``h(z)`` gives conserved densities in the 15 coordinates of
``V(p)``.
"""

from dshier.grading import so_integrable_triple
from dshier.hierarchy import check_h_closed, densities, flatness_check, residual, solve_recursion

t = so_integrable_triple([3, 2, 2])
run = solve_recursion(t, max_degree=2)
print(len(run.variables), "variables:", ", ".join(run.variables))
print("residual zero:", residual(run) == {}, " flatness:", flatness_check(run).ok)
print("h closed under brackets:", check_h_closed(run.split, [0, 1, 2]))
for zpow, F in densities(run):
    print(f"z^{zpow}:", F)
