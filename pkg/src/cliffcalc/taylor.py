"""Truncated multivariate Taylor arithmetic: forward-mode jets of any order.

A Taylor value represents a smooth function near a point by its Taylor
coefficients up to a fixed total degree. coef maps a multi-index tuple
alpha to (partial^alpha f)/alpha!; exactly-zero entries are dropped.
Binary operations truncate to the smaller of the two orders, so the order
attribute always states how many derivatives of the result are trustworthy.
"""

from __future__ import annotations

import cmath
import numbers


class JetDomainError(ArithmeticError):
    """Evaluation left the domain of an elementary function."""


class JetOrderError(ValueError):
    """A derivative was requested beyond the tracked truncation order."""


def _deg(alpha):
    return sum(alpha)


class Taylor:
    __slots__ = ("n", "order", "coef")

    def __init__(self, n, order, coef=None):
        self.n = n
        self.order = order
        self.coef = {}
        if coef:
            for a, c in coef.items():
                if c != 0 and _deg(a) <= order:
                    self.coef[a] = c

    @classmethod
    def constant(cls, value, n, order):
        return cls(n, order, {(0,) * n: complex(value)})

    @classmethod
    def variable(cls, j, x0, n, order):
        """Seed for the j-th coordinate (0-based) at base value x0."""
        coef = {(0,) * n: complex(x0)}
        if order >= 1:
            unit = tuple(1 if i == j else 0 for i in range(n))
            coef[unit] = 1.0 + 0j
        return cls(n, order, coef)

    def is_zero(self):
        return not self.coef

    # -- coefficient extraction ------------------------------------------

    @property
    def value(self):
        return self.coef.get((0,) * self.n, 0j)

    def grad(self, j):
        unit = tuple(1 if i == j else 0 for i in range(self.n))
        return self.coef.get(unit, 0j)

    def second(self, j, k):
        alpha = tuple((i == j) + (i == k) for i in range(self.n))
        c = self.coef.get(alpha, 0j)
        return 2 * c if j == k else c

    def diff(self, j):
        """Exact partial derivative; costs one order of truncation."""
        if self.order < 1:
            raise JetOrderError("jet order 0 carries no derivative information")
        out = {}
        for a, c in self.coef.items():
            if a[j]:
                b = a[:j] + (a[j] - 1,) + a[j + 1:]
                out[b] = c * a[j]
        return Taylor(self.n, self.order - 1, out)

    # -- ring operations --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Taylor):
            if other.n != self.n:
                raise ValueError("mixing jets with different variable counts")
            return other
        if isinstance(other, numbers.Complex):
            return Taylor.constant(other, self.n, self.order)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        k = min(self.order, other.order)
        out = {a: c for a, c in self.coef.items() if _deg(a) <= k}
        for a, c in other.coef.items():
            if _deg(a) <= k:
                out[a] = out.get(a, 0j) + c
        return Taylor(self.n, k, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Taylor(self.n, self.order, {a: -c for a, c in self.coef.items()})

    def __mul__(self, other):
        if isinstance(other, numbers.Complex):
            return Taylor(self.n, self.order, {a: c * other for a, c in self.coef.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        k = min(self.order, other.order)
        out = {}
        for a, ca in self.coef.items():
            da = _deg(a)
            if da > k:
                continue
            for b, cb in other.coef.items():
                if da + _deg(b) > k:
                    continue
                m = tuple(x + y for x, y in zip(a, b))
                c = ca * cb
                out[m] = out[m] + c if m in out else c
        return Taylor(self.n, k, out)

    def __rmul__(self, other):
        if isinstance(other, numbers.Complex):
            return Taylor(self.n, self.order, {a: other * c for a, c in self.coef.items()})
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Complex):
            if other == 0:
                raise JetDomainError("division by zero")
            return self * (1.0 / other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Complex):
            return self.reciprocal() * other
        return NotImplemented

    def conjugate(self):
        return Taylor(self.n, self.order, {a: c.conjugate() for a, c in self.coef.items()})

    # -- analytic functions via univariate composition ---------------------

    def _compose(self, derivs):
        """Sum of derivs[m]/m! * (self - value)^m, truncated."""
        zero = (0,) * self.n
        hat = Taylor(self.n, self.order, {a: c for a, c in self.coef.items() if a != zero})
        acc = Taylor.constant(derivs[0], self.n, self.order)
        power = Taylor.constant(1.0, self.n, self.order)
        fact = 1.0
        for m in range(1, self.order + 1):
            power = power * hat
            fact *= m
            acc = acc + power * (derivs[m] / fact)
        return acc

    def exp(self):
        e = cmath.exp(self.value)
        return self._compose([e] * (self.order + 1))

    def log(self):
        u0 = self.value
        if u0.imag == 0 and u0.real <= 0:
            raise JetDomainError(f"log of non-positive real value {u0.real!r}")
        derivs = [cmath.log(u0)]
        if self.order >= 1:
            derivs.append(1.0 / u0)
            for m in range(2, self.order + 1):
                derivs.append(derivs[-1] * (-(m - 1)) / u0)
        return self._compose(derivs)

    def sin(self):
        u0 = self.value
        cycle = [cmath.sin(u0), cmath.cos(u0), -cmath.sin(u0), -cmath.cos(u0)]
        return self._compose([cycle[m % 4] for m in range(self.order + 1)])

    def cos(self):
        u0 = self.value
        cycle = [cmath.cos(u0), -cmath.sin(u0), -cmath.cos(u0), cmath.sin(u0)]
        return self._compose([cycle[m % 4] for m in range(self.order + 1)])

    def sqrt(self):
        u0 = self.value
        if u0 == 0:
            raise JetDomainError("sqrt at zero has no derivatives")
        derivs = [cmath.sqrt(u0)]
        for m in range(1, self.order + 1):
            derivs.append(derivs[-1] * (0.5 - (m - 1)) / u0)
        return self._compose(derivs)

    def reciprocal(self):
        u0 = self.value
        if u0 == 0:
            raise JetDomainError("division by a value that is zero at the base point")
        derivs = [1.0 / u0]
        for m in range(1, self.order + 1):
            derivs.append(derivs[-1] * (-m) / u0)
        return self._compose(derivs)

    def intpow(self, k: int):
        if k == 0:
            return Taylor.constant(1.0, self.n, self.order)
        if k < 0:
            return self.reciprocal().intpow(-k)
        acc = None
        base = self
        while k:
            if k & 1:
                acc = base if acc is None else acc * base
            k >>= 1
            if k:
                base = base * base
        return acc
