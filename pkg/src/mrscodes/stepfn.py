"""Monotone step functions for rate-capacity curves r(c) and code
parameters g(alpha), the rate-sampling law they induce, and the Stieltjes
achievability sum.

Conventions
-----------
Increasing functions are right-continuous: ``values[j]`` holds on
``[breakpoints[j], breakpoints[j+1])`` and the function is 0 left of the
first breakpoint (which therefore plays the role of eta > 0).

Decreasing functions are left-continuous: ``values[j]`` holds on
``(breakpoints[j-1], breakpoints[j]]`` with ``breakpoints[-1] = 0``, and the
function is 0 right of the last breakpoint. A last breakpoint of ``inf``
marks unbounded support.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from . import exact
from .exact import eq, leq


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


class NoCapacityError(ValueError):
    """Requested rate exceeds what the curve reaches at full capacity."""


@dataclass(frozen=True)
class StepFunction:
    direction: Direction
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        d = Direction(self.direction)
        bps = tuple(exact.num(b) for b in self.breakpoints)
        vals = tuple(exact.num(v) for v in self.values)
        if len(bps) != len(vals):
            raise ValueError("need exactly one value per breakpoint")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if bps and not bps[0] > 0:
            raise ValueError("first breakpoint must be positive")
        if any(v < 0 for v in vals):
            raise ValueError("values must be non-negative")
        if any(math.isinf(v) for v in vals if isinstance(v, float)):
            raise ValueError("values must be finite")
        if d is Direction.INCREASING:
            if any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
                raise ValueError("increasing function has a decreasing step")
            if bps and math.isinf(bps[-1]):
                raise ValueError("increasing function needs finite breakpoints")
            # canonical: drop zero prefix and repeated levels
            kb, kv = [], []
            prev = 0
            for b, v in zip(bps, vals):
                if v != prev:
                    kb.append(b)
                    kv.append(v)
                    prev = v
        else:
            if any(v2 > v1 for v1, v2 in zip(vals, vals[1:])):
                raise ValueError("decreasing function has an increasing step")
            kb, kv = [], []
            for j, (b, v) in enumerate(zip(bps, vals)):
                nxt = vals[j + 1] if j + 1 < len(vals) else 0
                if v != nxt:
                    kb.append(b)
                    kv.append(v)
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "breakpoints", tuple(kb))
        object.__setattr__(self, "values", tuple(kv))

    @classmethod
    def increasing(cls, breakpoints, values) -> "StepFunction":
        return cls(Direction.INCREASING, tuple(breakpoints), tuple(values))

    @classmethod
    def decreasing(cls, breakpoints, values) -> "StepFunction":
        return cls(Direction.DECREASING, tuple(breakpoints), tuple(values))

    @classmethod
    def zero(cls, direction=Direction.INCREASING) -> "StepFunction":
        return cls(direction, (), ())

    @property
    def is_increasing(self) -> bool:
        return self.direction is Direction.INCREASING

    def __call__(self, x):
        if self.is_increasing:
            j = bisect_right(self.breakpoints, x)
            return self.values[j - 1] if j else 0
        j = bisect_left(self.breakpoints, x)
        return self.values[j] if j < len(self.values) else 0

    def right_limit(self, x):
        j = bisect_right(self.breakpoints, x)
        if self.is_increasing:
            return self.values[j - 1] if j else 0
        return self.values[j] if j < len(self.values) else 0

    @property
    def bound(self):
        """Sup of the function: first value if decreasing, last if increasing."""
        if not self.values:
            return 0
        return self.values[0] if not self.is_increasing else self.values[-1]

    @property
    def bounded_support(self) -> bool:
        return not self.breakpoints or not math.isinf(self.breakpoints[-1])

    def jumps(self) -> list[tuple]:
        """(location, size) of every jump; sizes are positive."""
        out = []
        if self.is_increasing:
            prev = 0
            for b, v in zip(self.breakpoints, self.values):
                out.append((b, v - prev))
                prev = v
        else:
            n = len(self.values)
            for j, (b, v) in enumerate(zip(self.breakpoints, self.values)):
                nxt = self.values[j + 1] if j + 1 < n else 0
                out.append((b, v - nxt))
        return out

    def integral_to(self, x):
        """Integral over [0, x] of a decreasing function."""
        self._need(Direction.DECREASING)
        total = 0
        prev = 0
        for b, v in zip(self.breakpoints, self.values):
            if x <= prev:
                break
            total += v * (min(b, x) - prev)
            prev = b
        return total

    def integral(self):
        self._need(Direction.DECREASING)
        if not self.bounded_support and self.values[-1] > 0:
            return math.inf
        return self.integral_to(self.breakpoints[-1]) if self.breakpoints else 0

    def _need(self, d: Direction):
        if self.direction is not d:
            raise ValueError(f"operation needs a {d.value} step function")

    def to_json(self) -> dict:
        return {
            "direction": self.direction.value,
            "breakpoints": [exact.to_json(b) for b in self.breakpoints],
            "values": [exact.to_json(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        try:
            return cls(
                Direction(obj["direction"]),
                tuple(exact.from_json(b) for b in obj["breakpoints"]),
                tuple(exact.from_json(v) for v in obj["values"]),
            )
        except KeyError as e:
            raise ValueError(f"step function is missing field {e.args[0]!r}") from None


@dataclass(frozen=True)
class GParameter:
    """One decreasing, unit-mass step function per transmitter."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("need at least one component")
        for k, g in enumerate(comps):
            if g.direction is not Direction.DECREASING:
                raise ValueError(f"component {k} is not decreasing")
            if not g.bounded_support:
                raise ValueError(f"component {k} has unbounded support")
            if not eq(g.integral(), Fraction(1) if exact.is_exact(*g.values, *g.breakpoints) else 1.0):
                raise ValueError(f"component {k} integrates to {g.integral()}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def d(self) -> int:
        return len(self.components)

    def __call__(self, alpha) -> tuple:
        return tuple(g(alpha) for g in self.components)

    def dot(self, capacities, alpha):
        return sum(c * g(alpha) for c, g in zip(capacities, self.components))

    def to_json(self) -> list:
        return [g.to_json() for g in self.components]

    @classmethod
    def from_json(cls, obj) -> "GParameter":
        if isinstance(obj, dict):
            obj = [obj]
        return cls(tuple(StepFunction.from_json(o) for o in obj))


@dataclass(frozen=True)
class SamplingAtoms:
    """Discrete law of the per-symbol rate A: P(A = alpha_j) = p_j."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((a, p) for a, p in self.atoms)
        if not atoms:
            raise ValueError("no atoms")
        if any(p <= 0 for _, p in atoms):
            raise ValueError("atom masses must be positive")
        if any(a2 <= a1 for (a1, _), (a2, _) in zip(atoms, atoms[1:])):
            raise ValueError("atom locations must be strictly increasing")
        total = sum(p for _, p in atoms)
        one = Fraction(1) if exact.is_exact(total) else 1.0
        if not eq(total, one):
            raise ValueError(f"atom masses sum to {total}, not 1")
        object.__setattr__(self, "atoms", atoms)
        # thresholds on a uniform 64-bit word, exact for rational masses
        cum = 0
        th = []
        for _, p in atoms:
            cum += Fraction(p)
            th.append(math.floor(cum * (1 << 64)))
        th[-1] = 1 << 64
        object.__setattr__(self, "_thresholds", tuple(th))
        object.__setattr__(self, "_rates", tuple(Fraction(a) for a, _ in atoms))

    @property
    def rates(self) -> tuple:
        return tuple(a for a, _ in self.atoms)

    @property
    def probabilities(self) -> tuple:
        return tuple(p for _, p in self.atoms)

    def cdf(self, x):
        return sum((p for a, p in self.atoms if a <= x), 0)

    def index_for_word(self, u: int) -> int:
        """Inverse-CDF lookup for a uniform 64-bit integer ``u``."""
        return bisect_right(self._thresholds, u)

    def rate_for_word(self, u: int) -> Fraction:
        return self._rates[self.index_for_word(u)]


def _check_unit_mass(g: StepFunction):
    g._need(Direction.DECREASING)
    if not g.bounded_support:
        raise ValueError("g must have bounded support")
    total = g.integral()
    one = Fraction(1) if exact.is_exact(total) else 1.0
    if not eq(total, one):
        raise ValueError(f"g integrates to {total}, not 1")


def fa_cdf(g: StepFunction, alpha):
    """Right-continuous CDF of the rate law induced by ``g``:
    ``int_0^alpha g - alpha * g(alpha+)``."""
    _check_unit_mass(g)
    if alpha <= 0:
        return 0
    return g.integral_to(alpha) - alpha * g.right_limit(alpha)


def sampling_atoms(g: StepFunction) -> SamplingAtoms:
    """One atom per downward jump of ``g``, mass = location * jump size."""
    _check_unit_mass(g)
    return SamplingAtoms(tuple((a, a * dj) for a, dj in g.jumps()))


def inverse_rate(r: StepFunction, alpha):
    """inf{c : r(c) >= alpha}."""
    r._need(Direction.INCREASING)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    for c, v in zip(r.breakpoints, r.values):
        if v >= alpha:
            return c
    raise NoCapacityError(f"rate {alpha} exceeds the curve maximum {r.bound}")


def integral_check(r: StepFunction):
    """Stieltjes sum of dr(c)/c; the curve is achievable iff this is <= 1."""
    r._need(Direction.INCREASING)
    return sum((dv / c for c, dv in r.jumps()), 0)


def is_achievable(r: StepFunction) -> bool:
    return leq(integral_check(r), 1)


def optimal_g(r: StepFunction) -> StepFunction:
    """g(alpha) = 1 / inverse_rate(r, alpha) below r's maximum, 0 above."""
    r._need(Direction.INCREASING)
    if not is_achievable(r):
        raise ValueError(f"curve is not achievable: integral {integral_check(r)} > 1")
    return StepFunction.decreasing(r.values, tuple(1 / c for c in r.breakpoints))


def rate_from_g(g: StepFunction) -> StepFunction:
    """Largest rate a single-transmitter receiver of capacity c gets from
    parameter ``g``: sup{alpha : c * g(alpha) >= 1}, as an increasing curve."""
    g._need(Direction.DECREASING)
    # g is left-continuous, so rate a_j is served once c >= 1/g(a_j)
    return StepFunction.increasing([1 / v for v in g.values], g.breakpoints)
