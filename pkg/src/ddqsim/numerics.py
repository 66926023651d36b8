"""Canonical complex values with tolerance-based interning.

Decision diagrams only stay canonical if edge weights that are "the same
number up to rounding" are literally the same stored value.  A ValueTable
snaps every weight onto a canonical representative before it is stored in
a node, so structural equality of diagrams reduces to identity of nodes
and weights.
"""

from __future__ import annotations

import math


class NumericDomainError(ValueError):
    """Raised when a non-finite component is handed to the value table."""


# Probe order for the quantized-bucket lookup: exact bucket first, then the
# eight neighbours, in a fixed order so collisions resolve deterministically.
_NEIGHBOURS = tuple(
    (dr, di) for dr in (0, -1, 1) for di in (0, -1, 1)
)


class ValueTable:
    """Interning table mapping nearly-equal complex numbers to one object.

    Values are bucketed by their components quantized at the tolerance.  A
    lookup probes the value's own bucket and its neighbours, returning the
    first stored value within tolerance in both components; otherwise the
    value is stored as a new canonical representative (first stored wins).

    One table belongs to exactly one rank and must only be used from that
    rank's thread of control.
    """

    __slots__ = ("tol", "zero", "one", "_buckets")

    def __init__(self, tol: float = 1e-12):
        if not (tol > 0.0 and math.isfinite(tol)):
            raise ValueError(f"tolerance must be positive and finite, got {tol}")
        self.tol = tol
        self._buckets: dict[tuple[int, int], list[complex]] = {}
        # Exact constants; anything within tolerance snaps onto these objects.
        self.zero = complex(0.0, 0.0)
        self.one = complex(1.0, 0.0)
        self._buckets[(0, 0)] = [self.zero]
        self._buckets[(round(1.0 / tol), 0)] = [self.one]

    def intern(self, re: float, im: float) -> complex:
        """Return the canonical stored value for (re, im)."""
        if not (math.isfinite(re) and math.isfinite(im)):
            raise NumericDomainError(f"non-finite component in ({re}, {im})")
        tol = self.tol
        kr = round(re / tol)
        ki = round(im / tol)
        buckets = self._buckets
        for dr, di in _NEIGHBOURS:
            found = buckets.get((kr + dr, ki + di))
            if found:
                for v in found:
                    if abs(v.real - re) < tol and abs(v.imag - im) < tol:
                        return v
        value = complex(re, im)
        own = buckets.get((kr, ki))
        if own is None:
            buckets[(kr, ki)] = [value]
        else:
            own.append(value)
        return value

    def intern_complex(self, z: complex) -> complex:
        return self.intern(z.real, z.imag)

    def approx_equal(self, a: complex, b: complex) -> bool:
        """True iff both component differences are below tolerance."""
        return abs(a.real - b.real) < self.tol and abs(a.imag - b.imag) < self.tol

    def __len__(self) -> int:
        return sum(len(vals) for vals in self._buckets.values())
