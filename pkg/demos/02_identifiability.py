"""
Is the order of a recursion identifiable?
=========================================

The Wronskian certificate evaluates a matrix of derivatives of the
generating function at a random rational point and reports its exact rank.
Full rank means the claimed order is the minimal one.
"""

from diffcast.algebra import recursion_to_generating_function, wronskian_certificate

fib = recursion_to_generating_function([1, 1], [0, 1])
for claimed in (1, 2, 3):
    cert = wronskian_certificate(fib, claimed, "full", rng=0)
    print(f"Fibonacci, claimed order {claimed}: rank {cert.rank} (2n = {2 * claimed}), "
          f"identifiable={cert.identifiable}")

# the dynamics-only certificate looks at the coefficients alone
cert = wronskian_certificate(fib, 2, "dynamics", rng=0)
print("dynamics certificate:", cert.to_dict())

# an order-3 recursion whose initial values only excite two modes
X = recursion_to_generating_function([2, 1, -2], [1, 1, 1])
print("\ninitial values (1, 1, 1) give", X)
print("order 3 claimed:", wronskian_certificate(X, 3, rng=1).identifiable)
