"""Forward-mode first-order jets.

A :class:`Jet` carries a value together with its partial derivatives with
respect to a fixed set of seed variables. Values and partials may be plain
floats, numpy arrays (for vectorised evaluation over many points) or Jets
themselves, which gives second derivatives by nesting.

The elementary functions at module level (``sin``, ``cos``, ``sqrt``, ...)
dispatch on their argument, so closed-form code written against them runs
unchanged on floats, arrays and jets.
"""
from __future__ import annotations

from typing import Any, Sequence

import numpy as np


class Jet:
    """Value plus gradient, propagated with dual-number semantics."""

    __slots__ = ("value", "grad")
    # make numpy defer to our reflected operators instead of building object arrays
    __array_ufunc__ = None

    def __init__(self, value: Any, grad: Sequence[Any]):
        self.value = value
        self.grad = tuple(grad)

    @property
    def nvars(self) -> int:
        return len(self.grad)

    def __repr__(self) -> str:
        return f"Jet({self.value!r}, {self.grad!r})"

    def _lift(self, other: Any) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet(other, (0.0,) * len(self.grad))

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value + other, self.grad)
        return Jet(self.value + other.value, tuple(a + b for a, b in zip(self.grad, other.grad)))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value - other, self.grad)
        return Jet(self.value - other.value, tuple(a - b for a, b in zip(self.grad, other.grad)))

    def __rsub__(self, other):
        return Jet(other - self.value, tuple(-a for a in self.grad))

    def __neg__(self):
        return Jet(-self.value, tuple(-a for a in self.grad))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value * other, tuple(a * other for a in self.grad))
        u, v = self.value, other.value
        return Jet(u * v, tuple(a * v + u * b for a, b in zip(self.grad, other.grad)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value / other, tuple(a / other for a in self.grad))
        inv = 1.0 / other.value
        q = self.value * inv
        return Jet(q, tuple((a - q * b) * inv for a, b in zip(self.grad, other.grad)))

    def __rtruediv__(self, other):
        inv = 1.0 / self.value
        q = other * inv
        return Jet(q, tuple(-q * inv * a for a in self.grad))

    def __pow__(self, n):
        if isinstance(n, Jet):
            raise TypeError("jet exponents are not supported")
        if n == 0:
            return Jet(self.value ** 0, (0.0,) * len(self.grad))
        if n == 1:
            return self
        if isinstance(n, (int, np.integer)) and n > 0:
            out = self
            for _ in range(int(n) - 1):
                out = out * self
            return out
        dv = n * self.value ** (n - 1)
        return Jet(self.value ** n, tuple(dv * a for a in self.grad))


def primal(x: Any) -> Any:
    """Strip every jet layer and return the underlying float/array."""
    while isinstance(x, Jet):
        x = x.value
    return x


def is_jet(x: Any) -> bool:
    return isinstance(x, Jet)


def variables(*values: Any) -> tuple[Jet, ...]:
    """Seed one jet per value, each with a unit partial in its own slot."""
    n = len(values)
    return tuple(
        Jet(v, tuple(1.0 if j == i else 0.0 for j in range(n))) for i, v in enumerate(values)
    )


def partial(x: Any, i: int) -> Any:
    """Partial of a jet with respect to seed ``i``; constants give zero."""
    if isinstance(x, Jet):
        return x.grad[i]
    return 0.0


def sin(x):
    if isinstance(x, Jet):
        c = cos(x.value)
        return Jet(sin(x.value), tuple(c * a for a in x.grad))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s = sin(x.value)
        return Jet(cos(x.value), tuple(-s * a for a in x.grad))
    return np.cos(x)


def sqrt(x):
    if isinstance(x, Jet):
        s = sqrt(x.value)
        half_inv = 0.5 / s
        return Jet(s, tuple(half_inv * a for a in x.grad))
    return np.sqrt(x)


def exp(x):
    if isinstance(x, Jet):
        e = exp(x.value)
        return Jet(e, tuple(e * a for a in x.grad))
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        return Jet(log(x.value), tuple(a / x.value for a in x.grad))
    return np.log(x)


def atan2(y, x):
    """Two-argument arctangent; derivative (x dy - y dx) / (x^2 + y^2)."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(y, x)
    ref = y if isinstance(y, Jet) else x
    yj, xj = ref._lift(y), ref._lift(x)
    inv = 1.0 / (xj.value * xj.value + yj.value * yj.value)
    return Jet(
        atan2(yj.value, xj.value),
        tuple((xj.value * dy - yj.value * dx) * inv for dy, dx in zip(yj.grad, xj.grad)),
    )


def hypot(x, y):
    if isinstance(x, Jet) or isinstance(y, Jet):
        return sqrt(x * x + y * y)
    return np.hypot(x, y)


def gradient(x: Any, n: int = 3) -> np.ndarray:
    """Partials of a single-layer jet stacked on a trailing axis."""
    if not isinstance(x, Jet):
        return np.zeros(np.shape(x) + (n,))
    shape = np.broadcast_shapes(*(np.shape(g) for g in x.grad), np.shape(x.value))
    return np.stack([np.broadcast_to(np.asarray(g, dtype=float), shape) for g in x.grad], axis=-1)


def jacobian_matrix(components: Sequence[Any], n: int = 3) -> np.ndarray:
    """Stack the gradients of ``components`` into an array of shape (..., m, n)."""
    rows = [gradient(c, n) for c in components]
    shape = np.broadcast_shapes(*(r.shape for r in rows))
    return np.stack([np.broadcast_to(r, shape) for r in rows], axis=-2)


def values(components: Sequence[Any]) -> np.ndarray:
    """Primal values of a sequence of jets stacked on a trailing axis."""
    vals = [np.asarray(primal(c), dtype=float) for c in components]
    shape = np.broadcast_shapes(*(v.shape for v in vals))
    return np.stack([np.broadcast_to(v, shape) for v in vals], axis=-1)


def taylor2(fn, t):
    """Value, first and second derivative of ``fn`` at ``t`` via nested jets.

    ``fn`` maps a scalar parameter to a sequence of components; each output
    is stacked on a trailing axis.
    """
    inner = Jet(t, (1.0,))
    outer = Jet(inner, (Jet(1.0, (0.0,)),))
    out = fn(outer)
    val, d1, d2 = [], [], []
    for comp in out:
        if not isinstance(comp, Jet):
            val.append(np.asarray(comp, dtype=float))
            d1.append(np.zeros_like(val[-1]))
            d2.append(np.zeros_like(val[-1]))
            continue
        v = comp.value
        dv = comp.grad[0]
        val.append(np.asarray(primal(v), dtype=float))
        d1.append(np.asarray(primal(dv), dtype=float))
        d2.append(np.asarray(dv.grad[0] if isinstance(dv, Jet) else 0.0, dtype=float))
    shape = np.broadcast_shapes(*(a.shape for a in val + d1 + d2))

    def stack(xs):
        return np.stack([np.broadcast_to(x, shape) for x in xs], axis=-1)

    return stack(val), stack(d1), stack(d2)
