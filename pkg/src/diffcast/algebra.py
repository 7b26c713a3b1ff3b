"""Exact rational kernel: polynomials, rational functions, generating functions.

A sequence ``x(0), x(1), ...`` is represented by its generating function
``X(z) = sum_t x(t) z**-t``.  The sequence obeys a linear recursion from
``t = 0`` on exactly when ``X`` is rational, with numerator degree at most
the denominator degree.  Everything here runs on :class:`fractions.Fraction`;
no floating point is involved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .core import DiffcastError, DomainError

Rational = Union[int, Fraction]

MAX_CERTIFIED_ORDER = 6


class EvaluationError(DiffcastError, ArithmeticError):
    """No pole-free evaluation point was found within the retry budget."""


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; pass a Fraction or str")
    return Fraction(value)


class Polynomial:
    """Univariate polynomial over Q, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        c = [_q(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff: Rational = 1) -> "Polynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Iterable[Rational]) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-_q(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            body = "z" if k == 1 else f"z^{k}" if k > 1 else ""
            coef = "" if (mag == 1 and body) else str(mag)
            term = f"{coef}*{body}" if coef and body else coef or body
            sign = "-" if c < 0 else "+"
            terms.append((sign, term))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            out += f" {sign} {term}"
        return out

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result, base = Polynomial([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple["Polynomial", "Polynomial"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            if c == 0:
                continue
            quot[k - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] -= c * b
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def __call__(self, z: Rational) -> Fraction:
        z = _q(z)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.leading
        return Polynomial(c / lead for c in self.coeffs)

    def shift_divisible(self) -> int:
        """Multiplicity of the root at ``z = 0``."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return k


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (Euclid over Q); gcd(0, 0) = 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero() or b.is_zero():
        return Polynomial()
    return ((a * b) // poly_gcd(a, b)).monic()


class RationalFunction:
    """Reduced ratio ``numerator / denominator`` with a monic denominator."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=1):
        num = Polynomial._coerce(numerator)
        den = Polynomial._coerce(denominator)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = Polynomial(), Polynomial([1])
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.leading
            num = Polynomial(c / lead for c in num.coeffs)
            den = den.monic()
        self.numerator: Polynomial = num
        self.denominator: Polynomial = den

    def __repr__(self) -> str:
        return f"RationalFunction(({self.numerator}) / ({self.denominator}))"

    def __str__(self) -> str:
        if self.denominator.degree == 0:
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.numerator == other.numerator
                and self.denominator == other.denominator)

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    @staticmethod
    def _coerce(other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction(other)

    def __add__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        return RationalFunction(
            self.numerator * o.denominator + o.numerator * self.denominator,
            self.denominator * o.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        return RationalFunction(self.numerator * o.numerator,
                                self.denominator * o.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o.numerator.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.numerator * o.denominator,
                                self.denominator * o.numerator)

    def __call__(self, z: Rational) -> Fraction:
        d = self.denominator(z)
        if d == 0:
            raise ZeroDivisionError(f"pole at z = {z}")
        return self.numerator(z) / d

    def is_proper(self) -> bool:
        """True when ``X`` stays bounded as ``z -> oo`` (a causal sequence)."""
        return self.numerator.degree <= self.denominator.degree

    def derivative(self) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def series(self, terms: int) -> list[Fraction]:
        """First ``terms`` coefficients of the expansion in powers of ``1/z``."""
        if not self.is_proper():
            raise DomainError(f"{self} is not proper; it has no expansion in 1/z")
        q = self.denominator.coeffs
        m = len(q) - 1
        num = self.numerator.coeffs
        out: list[Fraction] = []
        for s in range(terms):
            acc = num[m - s] if 0 <= m - s < len(num) else Fraction(0)
            for i in range(1, min(s, m) + 1):
                acc -= q[m - i] * out[s - i]
            out.append(acc)
        return out


def characteristic_polynomial(coefficients: Sequence[Rational]) -> Polynomial:
    """``z**n - a_1 z**(n-1) - ... - a_n``."""
    n = len(coefficients)
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    for i, a in enumerate(coefficients, start=1):
        c[n - i] = -_q(a)
    return Polynomial(c)


def simulate_recursion(coefficients: Sequence[Rational],
                       initials: Sequence[Rational], terms: int) -> list[Fraction]:
    a = [_q(v) for v in coefficients]
    x = [_q(v) for v in initials]
    while len(x) < terms:
        x.append(sum(ai * x[-i] for i, ai in enumerate(a, start=1)))
    return x[:terms]


def recursion_to_generating_function(coefficients: Sequence[Rational],
                                     initials: Sequence[Rational]) -> RationalFunction:
    """Generating function of the sequence produced by a recursion.

    Examples
    --------
    >>> recursion_to_generating_function([1, 1], [0, 1])
    RationalFunction((z) / (z^2 - z - 1))
    """
    n = len(coefficients)
    if n < 1:
        raise DomainError("recursion order must be at least 1")
    if len(initials) != n:
        raise DomainError(f"order {n} needs {n} initial values, got {len(initials)}")
    a = [_q(v) for v in coefficients]
    x = [_q(v) for v in initials]
    # Q X = sum_j c_j z^(n-j) (x(0) + ... + x(n-j-1) z^-(n-j-1)), c_0 = 1, c_j = -a_j
    num = [Fraction(0)] * (n + 1)
    for j in range(n):
        cj = Fraction(1) if j == 0 else -a[j - 1]
        for k in range(n - j):
            num[n - j - k] += cj * x[k]
    return RationalFunction(Polynomial(num), characteristic_polynomial(a))


def generating_function_to_recursion(X: RationalFunction):
    """Minimal recursion reproducing the expansion of ``X`` from ``t = 0``.

    Returns ``(order, coefficients, initials)``.  When the reduced numerator
    does not vanish at ``z = 0`` the denominator alone only governs the
    sequence from ``t = 1`` on, so the recursion picks up one extra order with
    a trailing zero coefficient.
    """
    if not X.is_proper():
        raise DomainError(
            f"{X} is improper (numerator degree {X.numerator.degree} > "
            f"denominator degree {X.denominator.degree})"
        )
    if X.numerator.is_zero():
        return 0, (), ()
    Q = X.denominator
    if X.numerator.shift_divisible() == 0:
        Q = Q * Polynomial.monomial(1)
    n = Q.degree
    coefficients = tuple(-Q.coeffs[n - i] for i in range(1, n + 1))
    initials = tuple(X.series(n))
    return n, coefficients, initials


@dataclass(frozen=True)
class ForcingTerm:
    """A forcing sequence ``p(t) * base**t`` or ``p(t) * sin(omega t + phase)``.

    ``poly_degree`` is the degree of ``p``.  Sinusoids are described by
    ``cos(omega)`` as an exact rational; the phase does not affect the
    annihilator and is dropped.
    """

    kind: str
    poly_degree: int
    base: Fraction

    def __post_init__(self):
        if self.kind not in ("poly_exp", "sinusoidal"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if self.poly_degree < 0:
            raise ValueError("poly_degree must be non-negative")
        object.__setattr__(self, "base", _q(self.base))
        if self.kind == "sinusoidal" and abs(self.base) > 1:
            raise ValueError(f"|cos omega| = {abs(self.base)} > 1")

    @classmethod
    def poly_exp(cls, alpha: Rational = 1, degree: int = 0) -> "ForcingTerm":
        return cls("poly_exp", degree, _q(alpha))

    @classmethod
    def sinusoid(cls, cos_omega: Rational, degree: int = 0,
                 phase: Optional[float] = None) -> "ForcingTerm":
        del phase
        return cls("sinusoidal", degree, _q(cos_omega))

    def characteristic_factor(self) -> Polynomial:
        if self.kind == "poly_exp":
            base = Polynomial([-self.base, 1])
        else:
            base = Polynomial([1, -2 * self.base, 1])
        return base ** (self.poly_degree + 1)


def annihilating_recursion(terms: Sequence[ForcingTerm]) -> Polynomial:
    """Monic lcm of the characteristic factors of every forcing term.

    Applied as a polynomial in the forward shift, the result maps the sum of
    the forcing sequences to zero.
    """
    if not terms:
        raise DomainError("at least one forcing term is required")
    out = Polynomial([1])
    for term in terms:
        out = poly_lcm(out, term.characteristic_factor())
    return out


def apply_shift_operator(p: Polynomial, sequence: Sequence) -> list:
    """``(p(E) x)(t) = sum_k p_k x(t + k)`` for every ``t`` where it is defined."""
    c = p.coeffs
    d = len(c) - 1
    return [sum(ck * sequence[t + k] for k, ck in enumerate(c))
            for t in range(len(sequence) - d)]


# ---------------------------------------------------------------------------
# Wronskian identifiability certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WronskianCertificate:
    matrix_order: int
    rank: int
    evaluation_point: Fraction
    identifiable: bool
    claimed_order: int
    which: str

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "claimed_order": self.claimed_order,
            "matrix_order": self.matrix_order,
            "rank": self.rank,
            "evaluation_point": str(self.evaluation_point),
            "identifiable": self.identifiable,
        }


class DerivativeTower:
    """Successive derivatives of ``f = N / D`` as ``N_k / D**(k+1)``.

    Quotient rule specialised to a fixed denominator:
    ``(N_k / D**j)' = (N_k' D - j N_k D') / D**(j+1)``.  ``N / D`` is reduced
    once up front; the denominator of every order is then a known power of
    ``D`` and no per-order gcd is needed.
    """

    def __init__(self, f: RationalFunction, max_order: int):
        self.base = f.denominator
        d, dd = f.denominator, f.denominator.derivative()
        nums = [f.numerator]
        for j in range(1, max_order + 1):
            nk = nums[-1]
            nums.append(nk.derivative() * d - nk * dd * j)
        self.numerators = nums

    def __getitem__(self, k: int) -> RationalFunction:
        return RationalFunction(self.numerators[k], self.base ** (k + 1))

    def evaluate(self, k: int, z: Fraction, base_value: Optional[Fraction] = None) -> Fraction:
        dz = self.base(z) if base_value is None else base_value
        return self.numerators[k](z) / dz ** (k + 1)


def exact_rank(rows: list[list[Fraction]]) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, nrows):
            if m[r][col] != 0:
                f = m[r][col] / p
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def _random_point(rng: random.Random, bound: int = 997) -> Fraction:
    p = rng.randint(-bound, bound)
    q = rng.randint(1, bound)
    return Fraction(p, q)


def wronskian_columns(X: RationalFunction, n: int, which: str):
    """Column functions and row derivative orders of the Wronskian matrix.

    The columns act on the shifted transform ``X / z`` (the sum of
    ``x(t) z**-(t+1)``), for which the recursion reads
    ``Q(z) X/z = P(z)`` with ``deg P < n``.  The full matrix uses the
    functions ``z**n X/z, ..., X/z, z**(n-1), ..., 1`` at derivative orders
    ``0..2n``; the dynamics matrix keeps the first ``n + 1`` of them at orders
    ``n..2n``, where the polynomial columns have vanished.
    """
    Xs = X * RationalFunction(1, Polynomial.monomial(1))
    x_cols = [RationalFunction(Polynomial.monomial(k)) * Xs for k in range(n, -1, -1)]
    if which == "full":
        cols = x_cols + [RationalFunction(Polynomial.monomial(k))
                         for k in range(n - 1, -1, -1)]
        orders = list(range(0, 2 * n + 1))
    elif which == "dynamics":
        cols = x_cols
        orders = list(range(n, 2 * n + 1))
    else:
        raise ValueError(f"which must be 'full' or 'dynamics', got {which!r}")
    return cols, orders


def wronskian_certificate(X: RationalFunction, n: int, which: str = "full",
                          rng: Union[random.Random, int, None] = None,
                          samples: int = 3, max_draws: int = 64) -> WronskianCertificate:
    """Certify linear identifiability of an order-``n`` recursion from ``X``.

    The Wronskian entries are built exactly, then the matrix is evaluated at
    random rationals ``p/q`` with ``|p|, q <= 997`` avoiding poles.  Rank is
    taken as the maximum over ``samples`` pole-free points (early exit at full
    rank); a point is a lower bound on the generic rank, so the maximum only
    errs on the side of a lucky cancellation that has to repeat every time.

    ``identifiable`` holds when the rank equals ``2n`` (full) or ``n``
    (dynamics).
    """
    if n < 1:
        raise DomainError("claimed order must be at least 1")
    if n > MAX_CERTIFIED_ORDER:
        raise DomainError(f"orders above {MAX_CERTIFIED_ORDER} are not supported")
    if not X.is_proper():
        raise DomainError(f"{X} is improper")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)

    cols, orders = wronskian_columns(X, n, which)
    towers = [DerivativeTower(f, orders[-1]) for f in cols]
    size = len(orders)
    target = 2 * n if which == "full" else n
    denominators = {t.base for t in towers}

    best_rank, best_point = -1, None
    poles: list[Fraction] = []
    used = 0
    for _ in range(max_draws):
        z = _random_point(rng)
        if any(d(z) == 0 for d in denominators):
            poles.append(z)
            continue
        base_values = {id(t): t.base(z) for t in towers}
        rows = [[t.evaluate(k, z, base_values[id(t)]) for t in towers] for k in orders]
        r = exact_rank(rows)
        if r > best_rank:
            best_rank, best_point = r, z
        used += 1
        if used >= samples or best_rank == size:
            break
    if best_point is None:
        raise EvaluationError(
            f"no pole-free evaluation point in {max_draws} draws; poles hit: "
            + ", ".join(str(p) for p in poles)
        )
    return WronskianCertificate(
        matrix_order=size,
        rank=best_rank,
        evaluation_point=best_point,
        identifiable=best_rank == target,
        claimed_order=n,
        which=which,
    )
