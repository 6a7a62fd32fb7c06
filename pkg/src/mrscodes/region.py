"""Closed-form and LP feasibility checks for rate-capacity requirements.

Every check returns a :class:`FeasibilityVerdict`. ``margin`` is the
smallest slack over the checked inequalities (negative when violated).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact
from .exact import geq, leq
from .lp import find_feasible_point
from .stepfn import GParameter, StepFunction


@dataclass(frozen=True)
class RatePair:
    rate: object
    capacities: tuple

    def __post_init__(self):
        rate = exact.num(self.rate)
        caps = tuple(exact.num(c) for c in self.capacities)
        if rate < 0:
            raise ValueError("rate must be non-negative")
        if any(c < 0 or c > 1 for c in caps):
            raise ValueError("capacities must lie in [0, 1]")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "capacities", caps)

    @property
    def d(self) -> int:
        return len(self.capacities)

    @property
    def total(self):
        """Sum of capacities."""
        return sum(self.capacities, 0)

    def to_json(self) -> dict:
        return {"rate": exact.to_json(self.rate),
                "capacities": [exact.to_json(c) for c in self.capacities]}

    @classmethod
    def from_json(cls, obj) -> "RatePair":
        if isinstance(obj, (list, tuple)):
            rate, caps = obj
        else:
            rate, caps = obj["rate"], obj["capacities"]
        return cls(exact.from_json(rate), tuple(exact.from_json(c) for c in caps))


@dataclass(frozen=True)
class OnOffNetwork:
    """Fixed-rate links; receiver ``j`` hears the transmitters in ``receiver_masks[j]``."""

    link_rates: tuple
    receiver_masks: tuple
    target_rates: tuple

    def __post_init__(self):
        w = tuple(exact.num(x) for x in self.link_rates)
        masks = tuple(frozenset(m) for m in self.receiver_masks)
        rates = tuple(exact.num(x) for x in self.target_rates)
        if any(x <= 0 for x in w):
            raise ValueError("link rates must be positive")
        if len(masks) != len(rates):
            raise ValueError("one target rate per receiver")
        for m in masks:
            if not m or not m <= set(range(len(w))):
                raise ValueError(f"bad receiver mask {sorted(m)}")
        if any(r < 0 for r in rates):
            raise ValueError("target rates must be non-negative")
        object.__setattr__(self, "link_rates", w)
        object.__setattr__(self, "receiver_masks", masks)
        object.__setattr__(self, "target_rates", rates)

    @property
    def d(self) -> int:
        return len(self.link_rates)

    def scale(self):
        """Time rescaling that brings every link rate into [0, 1]."""
        m = max(self.link_rates)
        return m if m > 1 else Fraction(1)

    def pairs(self) -> list[RatePair]:
        """Rate-capacity pairs after rescaling time so that links fit in [0, 1].

        Scaling rates and capacities together leaves c . g(r) >= 1 invariant.
        """
        s = self.scale()
        out = []
        for mask, r in zip(self.receiver_masks, self.target_rates):
            caps = tuple(w / s if k in mask else 0 for k, w in enumerate(self.link_rates))
            out.append(RatePair(r / s, caps))
        return out

    @classmethod
    def from_json(cls, obj) -> "OnOffNetwork":
        return cls(
            tuple(exact.from_json(x) for x in obj["link_rates"]),
            tuple(tuple(int(k) - 1 for k in m) for m in obj["receivers"]),
            tuple(exact.from_json(x) for x in obj["target_rates"]),
        )


@dataclass
class FeasibilityVerdict:
    feasible: bool
    witness: GParameter | None = None
    margin: object = None
    violated: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.feasible

    def to_json(self) -> dict:
        out = {
            "feasible": self.feasible,
            "margin": exact.to_json(self.margin) if self.margin is not None else None,
            "violated_constraints": list(self.violated),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.warnings:
            out["warnings"] = list(self.warnings)
        for k, v in self.extra.items():
            out[k] = exact.to_json(v) if not isinstance(v, (bool, dict, list, str)) else v
        return out


def _verdict(checks: list[tuple[str, object, object]]) -> FeasibilityVerdict:
    """Each check is (name, lhs, rhs) meaning lhs >= rhs."""
    violated = [name for name, lhs, rhs in checks if not geq(lhs, rhs)]
    margin = min((lhs - rhs for _, lhs, rhs in checks), default=None)
    return FeasibilityVerdict(not violated, margin=margin, violated=violated)


# ---------------------------------------------------------------- superposition


def _levels(pairs: Sequence[RatePair]) -> list:
    return sorted({p.rate for p in pairs})


def superposition_feasible(pairs: Sequence[RatePair], d: int | None = None, xi=0) -> FeasibilityVerdict:
    """Does a superposition parameter g serve every pair with margin ``xi``?

    Unknowns are the non-negative drops h[k][m] of g_k at the m-th distinct
    rate, so g_k(rho_m) = sum_{m' >= m} h[k][m'] is automatically decreasing
    and int g_k = sum_m h[k][m] * rho_m.
    """
    pairs = [p if isinstance(p, RatePair) else RatePair.from_json(p) for p in pairs]
    xi = exact.num(xi)
    if d is None:
        d = pairs[0].d if pairs else 1
    if any(p.d != d for p in pairs):
        raise ValueError(f"every pair needs {d} capacities")
    if any(p.rate == 0 for p in pairs):
        raise ValueError("rate-0 pairs are trivially served; filter them out")
    if not pairs:
        g = GParameter(tuple(StepFunction.decreasing([1], [1]) for _ in range(d)))
        return FeasibilityVerdict(True, witness=g, margin=None,
                                  warnings=["empty pair list is trivially feasible"])
    if not isinstance(xi, Fraction):
        xi = Fraction(repr(xi))

    rho = _levels(pairs)
    M = len(rho)
    nvar = d * M

    def var(k, m):
        return k * M + m

    a_ub, b_ub = [], []
    for p in pairs:
        m = rho.index(p.rate)
        row = [Fraction(0)] * nvar
        for k, c in enumerate(p.capacities):
            for mm in range(m, M):
                row[var(k, mm)] -= c
        a_ub.append(row)
        b_ub.append(-(1 + xi))
    for k in range(d):
        row = [Fraction(0)] * nvar
        for m in range(M):
            row[var(k, m)] = rho[m]
        a_ub.append(row)
        b_ub.append(Fraction(1))

    x = find_feasible_point(a_ub, b_ub, n=nvar)
    if x is None:
        return FeasibilityVerdict(
            False, violated=["no decreasing unit-mass g meets every pair constraint"])

    comps = []
    for k in range(d):
        vals = []
        acc = Fraction(0)
        for m in reversed(range(M)):
            acc += x[var(k, m)]
            vals.append(acc)
        vals.reverse()
        mass = sum(v * (rho[m] - (rho[m - 1] if m else 0)) for m, v in enumerate(vals))
        # raising every level by the same amount keeps g decreasing and only helps
        lift = (1 - mass) / rho[-1]
        comps.append(StepFunction.decreasing(rho, [v + lift for v in vals]))
    g = GParameter(tuple(comps))
    margin = min(g.dot(p.capacities, p.rate) - 1 - xi for p in pairs)
    return FeasibilityVerdict(True, witness=g, margin=margin)


def verify_witness(g: GParameter, pairs: Sequence[RatePair], xi=0) -> bool:
    """Unit mass per component and c . g(r) >= 1 + xi for every pair."""
    for comp in g.components:
        if not exact.eq(comp.integral(), 1):
            return False
    return all(geq(g.dot(p.capacities, p.rate), 1 + xi) for p in pairs)


def pairs_from_curve(r: StepFunction) -> list[RatePair]:
    """Single-transmitter pairs that pin down an increasing curve: the
    binding capacity for each level is the left end of its step."""
    return [RatePair(v, (c,)) for c, v in zip(r.breakpoints, r.values) if v > 0]


# ---------------------------------------------------------------- one-or-all


def _vec(xs) -> tuple:
    return tuple(exact.num(x) for x in xs)


def one_or_all_check(w, r0, r) -> FeasibilityVerdict:
    """Region of the network where receiver k hears transmitter k only and
    receiver 0 hears all of them."""
    w, r, r0 = _vec(w), _vec(r), exact.num(r0)
    if len(w) != len(r):
        raise ValueError("w and r must have the same length")
    checks: list[tuple[str, object, object]] = [("r0 >= 0", r0, 0)]
    for k, (wk, rk) in enumerate(zip(w, r), start=1):
        checks.append((f"r{k} >= 0", rk, 0))
        checks.append((f"r{k} <= w{k}", wk, rk))
    v = _verdict(checks)
    wmax = max(w)
    if leq(r0, wmax):
        v.extra["branch"] = "r0 <= max(w)"
        return v
    total = sum((wk - rk) / (r0 - rk) for wk, rk in zip(w, r))
    v.extra["branch"] = "sum"
    v.extra["sum"] = total
    if not geq(total, 1):
        v.feasible = False
        v.violated.append("sum_k (w_k - r_k)/(r0 - r_k) >= 1")
    v.margin = min(v.margin, total - 1)
    return v


def one_or_all_pairs(w, r0, r) -> list[RatePair]:
    """Pairs induced by the one-or-all network, rescaled into [0, 1], rate-0 pairs dropped."""
    w, r, r0 = _vec(w), _vec(r), exact.num(r0)
    d = len(w)
    net = OnOffNetwork(w, tuple([k] for k in range(d)) + (tuple(range(d)),), r + (r0,))
    return [p for p in net.pairs() if p.rate > 0]


def one_or_all_g(w, r0, r) -> GParameter:
    """Explicit superposition parameter serving a feasible one-or-all instance."""
    w, r, r0 = _vec(w), _vec(r), exact.num(r0)
    v = one_or_all_check(w, r0, r)
    if not v.feasible:
        raise ValueError(f"instance is infeasible: {', '.join(v.violated)}")
    comps = []
    if leq(r0, max(w)):
        # each transmitter serves its own receiver at full link rate; the
        # fastest link alone already covers receiver 0
        for wk in w:
            comps.append(StepFunction.decreasing([wk], [1 / wk]))
        return GParameter(tuple(comps))
    for wk, rk in zip(w, r):
        tail = (wk - rk) / (wk * (r0 - rk))
        comps.append(StepFunction.decreasing([rk, r0], [1 / wk, tail]) if rk > 0
                     else StepFunction.decreasing([r0], [tail]))
    return GParameter(tuple(comps))


def mdc_one_or_all_check(w, r0, r) -> bool:
    """Membership in the multilevel-diversity-coding region of the same network."""
    w, r, r0 = _vec(w), _vec(r), exact.num(r0)
    if any(not leq(rk, wk) or rk < 0 for wk, rk in zip(w, r)) or r0 < 0:
        return False
    return leq(r0 + sum(r) - max(r), sum(w))


# ---------------------------------------------------------------- three-transmitter example


def _example3_checks(w, r1, r2, superposition: bool):
    w = _vec(w)
    r1, r2 = exact.num(r1), exact.num(r2)
    if len(w) != 3:
        raise ValueError("w must have three link rates")
    if r1 > r2:
        raise ValueError("receiver 1's rate must not exceed r2")
    w1, w2, w3 = w
    frac = (r2 - r1) / r2 if r2 else 0
    checks = [
        ("w1 + w2 >= r1", w1 + w2, r1),
        ("w1 + w3 >= r2", w1 + w3, r2),
        ("w2 + w3 >= r2", w2 + w3, r2),
    ]
    if superposition:
        checks.append(("w1 + w2 + 2*w3*(r2 - r1)/r2 >= 2*r2 - r1",
                       w1 + w2 + 2 * w3 * frac, 2 * r2 - r1))
    else:
        checks.append(("w1 + w2 + w3*(r2 - r1)/r2 >= r2", w1 + w2 + w3 * frac, r2))
    return checks


def example3_check(w, r1, r2) -> FeasibilityVerdict:
    """Achievable region (any code) of the network where receivers hear
    transmitters {1,2}, {1,3}, {2,3} and want rates r1, r2, r2."""
    return _verdict(_example3_checks(w, r1, r2, superposition=False))


def example3_superposition_check(w, r1, r2) -> FeasibilityVerdict:
    """Smaller region reachable by superposition codes on the same network."""
    return _verdict(_example3_checks(w, r1, r2, superposition=True))


def example3_network(w, r1, r2) -> OnOffNetwork:
    return OnOffNetwork(_vec(w), ((0, 1), (0, 2), (1, 2)), (exact.num(r1), exact.num(r2), exact.num(r2)))


# ---------------------------------------------------------------- necessary condition


def two_sum_value(decomposition: Sequence[RatePair], total: RatePair):
    """sum_k (Sigma(c_k) - r(c_k)) / (r(c) - r(c_k)) for a split c = sum_k c_k."""
    if not decomposition:
        raise ValueError("empty decomposition")
    d = total.d
    if any(p.d != d for p in decomposition):
        raise ValueError("dimension mismatch in decomposition")
    sums = [sum((p.capacities[j] for p in decomposition), 0) for j in range(d)]
    if any(not exact.eq(s, c) for s, c in zip(sums, total.capacities)):
        raise ValueError("decomposition does not add up to the total capacity vector")
    if any(not total.rate > p.rate for p in decomposition):
        raise ValueError("every part must have a rate strictly below the total rate")
    return sum((p.total - p.rate) / (total.rate - p.rate) for p in decomposition)


def two_sum_check(decomposition: Sequence[RatePair], total: RatePair) -> bool:
    """Necessary condition for achievability. Passing does not imply achievable."""
    return geq(two_sum_value(decomposition, total), 1)
