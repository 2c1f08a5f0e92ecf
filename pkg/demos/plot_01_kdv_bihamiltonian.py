"""
KdV from a pair of lambda-brackets
==================================

The Virasoro lambda-bracket and the bracket ``{u_L u} = L`` form a compatible
pair.  Starting from ``int u`` the Lenard-Magri recursion walks up the KdV
hierarchy, and every functional it produces commutes with every other one
under both brackets.
"""

from dshier.diffpoly import var
from dshier.pva import (
    gardner_table,
    ham_flow,
    involution_matrix,
    lenard_run,
    poisson_structure_matrix,
    virasoro_table,
)

u = var("u")
vir = virasoro_table()  # central charge kept as the symbol c
d = gardner_table()

print("Poisson structure:", poisson_structure_matrix(vir))
print("flow of int u^2/2:", ham_flow(u * u / 2, u, vir))

# Each step solves d grad h_{n+1} = H grad h_n exactly.
hierarchy = lenard_run(vir, d, u, 5)
for n, F in enumerate(hierarchy):
    print(f"h_{n} =", F)

for T in (vir, d):
    ok = all(all(row) for row in involution_matrix(hierarchy, T))
    print(f"pairwise involution under {T.name}: {ok}")
