"""
No quasi-cyclic element for the short root nilpotent of G2
==========================================================

For ``f = e_{-(a+2b)}`` the space g_1 is a line spanned by ``e_{a+2b}``.  Its
centralizer in g_{1/2} is zero, which is never coisotropic, so no choice of
``E`` in g_1 produces a quasi-cyclic element.  The bundled table records the
same conclusion.
"""

from dshier.grading import HALF, find_integrable_element, grading_from, sl2_from_root
from dshier.liealg import build_g2, centralizer
from dshier.table1 import table1_lookup

G2 = build_g2()
g = grading_from(sl2_from_root(G2, "e(a+2b)", "e(-a-2b)"))
print("depth", g.depth, "dims", {str(k): len(v) for k, v in sorted(g.pieces.items())})

E = G2["e(a+2b)"]
print("centralizer of E in g_1/2:", centralizer(E, g.piece(HALF)))
print("search for an integrable E:", find_integrable_element(g.f, g, "d-1/2"))
print("table:", table1_lookup("G2", "~A1").status)
