"""
Recursions and their generating functions
=========================================

A linear recursion with constant coefficients and its generating function
carry the same information.  Everything here is exact rational arithmetic.
"""

from fractions import Fraction as F

from diffcast.algebra import (
    ForcingTerm,
    annihilating_recursion,
    apply_shift_operator,
    generating_function_to_recursion,
    recursion_to_generating_function,
)

# Fibonacci: x(t+2) = x(t+1) + x(t) with x(0)=0, x(1)=1
X = recursion_to_generating_function([1, 1], [0, 1])
print("Fibonacci generating function:", X)
print("first terms of the expansion:", [int(v) for v in X.series(12)])

# going back recovers the recursion and its initial values
print("recursion recovered:", generating_function_to_recursion(X))

# common factors cancel: (z^2 - z)/(z^2 - 1) is really z/(z + 1)
X = recursion_to_generating_function([0, 1], [1, -1])
print("\n(z^2 - z)/(z^2 - 1) reduces to", X)
print("minimal recursion:", generating_function_to_recursion(X))

# a sinusoid with rational cos(w) and a constant are killed by one operator
terms = [ForcingTerm.poly_exp(1, 0), ForcingTerm.sinusoid(F(1, 2))]
p = annihilating_recursion(terms)
print("\nannihilator of 1 and sin(pi t / 3):", p)
seq = [3 + [0, 1, 1, 0, -1, -1][t % 6] for t in range(30)]
print("applied to 30 terms:", set(apply_shift_operator(p, seq)))
