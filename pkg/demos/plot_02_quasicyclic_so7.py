"""
A quasi-cyclic element in so_7
==============================

The nilpotent of so_7 with Jordan type (3, 2, 2) has depth 3/2, so all its
cyclic elements are nilpotent.  One degree lower there is room for a
quasi-cyclic element ``f + E`` that is not nilpotent, and ``(f1, f2, E)`` is an
integrable triple.
"""

from dshier.exact import minimal_polynomial
from dshier.grading import (
    HALF,
    classify_perturbation,
    integrable_triple_check,
    is_coisotropic,
    nilpotent_type_test,
    so_integrable_triple,
)
from dshier.liealg import centralizer

t = so_integrable_triple([3, 2, 2])
g = t.grading
print("depth:", g.depth, " nilpotent type:", nilpotent_type_test(g))
print("dims:", {str(k): len(v) for k, v in sorted(g.pieces.items())})

z = centralizer(t.E, g.piece(HALF))
print("centralizer of E in g_1/2 has dim", len(z), "coisotropic:", is_coisotropic(z, g))

cls = classify_perturbation(t.f, t.E, g)
print("f + E is", cls.kind, "of", cls.element_type, "type")

# f1 + E is semisimple and its minimal polynomial has simple roots
print("min poly of f1 + E:", minimal_polynomial(t.alg.matrix_of(t.f1 + t.E)))
print(integrable_triple_check(t))
