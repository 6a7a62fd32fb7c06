"""Phase-one simplex over the rationals.

Rows are kept as integer vectors (each row carries its own positive scale),
so pivots are plain int arithmetic and every decision is exact. Bland's
rule guarantees termination.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def _int_row(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[list[int], int]:
    vals = [Fraction(c) for c in coeffs] + [Fraction(rhs)]
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    return ints[:-1], ints[-1]


def _normalize(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


def find_feasible_point(
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    n: int | None = None,
) -> list[Fraction] | None:
    """A point with ``a_ub x <= b_ub``, ``a_eq x == b_eq``, ``x >= 0``, or None."""
    if n is None:
        n = len(a_ub[0]) if a_ub else len(a_eq[0]) if a_eq else 0
    specs = [(row, b, True) for row, b in zip(a_ub, b_ub)]
    specs += [(row, b, False) for row, b in zip(a_eq, b_eq)]
    m = len(specs)
    if m == 0:
        return [Fraction(0)] * n

    n_slack = len(a_ub)
    # columns: x (n) | slacks (n_slack) | artificials (appended as needed)
    body = []
    basis = []
    art_rows = []
    for i, (row, b, is_ub) in enumerate(specs):
        coeffs, rhs = _int_row(row, b)
        if len(coeffs) != n:
            raise ValueError("constraint row has the wrong width")
        slack = [0] * n_slack
        sign = 1
        if rhs < 0:
            sign = -1
            coeffs = [-c for c in coeffs]
            rhs = -rhs
        if is_ub:
            slack[i] = sign
        body.append((coeffs, slack, rhs))
        if is_ub and sign == 1:
            basis.append(n + i)
        else:
            basis.append(None)
            art_rows.append(i)

    n_art = len(art_rows)
    width = n + n_slack + n_art
    tab = []
    for i, (coeffs, slack, rhs) in enumerate(body):
        art = [0] * n_art
        if basis[i] is None:
            j = art_rows.index(i)
            art[j] = 1
            basis[i] = n + n_slack + j
        tab.append(coeffs + slack + art + [rhs])

    # reduced costs of min sum(artificials); last entry is -objective
    z = [0] * (width + 1)
    for i in art_rows:
        for j in range(n + n_slack):
            z[j] -= tab[i][j]
        z[-1] -= tab[i][-1]

    while True:
        q = next((j for j in range(width) if z[j] < 0), None)
        if q is None:
            break
        p = None
        for i in range(m):
            a = tab[i][q]
            if a > 0:
                if p is None:
                    p = i
                    continue
                # compare rhs_i / a with rhs_p / a_p, ties to lowest basis index
                lhs = tab[i][-1] * tab[p][q]
                rhs = tab[p][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[p]):
                    p = i
        if p is None:
            # unbounded direction; cannot happen for a bounded-below objective
            raise RuntimeError("phase-one objective unbounded")
        prow = tab[p]
        a = prow[q]
        for i in range(m):
            if i != p and tab[i][q]:
                f = tab[i][q]
                tab[i] = _normalize([a * x - f * y for x, y in zip(tab[i], prow)])
        if z[q]:
            f = z[q]
            z = _normalize([a * x - f * y for x, y in zip(z, prow)])
        basis[p] = q

    if z[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = Fraction(tab[i][-1], tab[i][j])
    return x
