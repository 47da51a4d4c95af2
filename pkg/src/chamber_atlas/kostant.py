"""The type-A Kostant partition function and its domains of polynomiality."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Sequence

from .arrangement import (
    Chamber,
    _TreeIndex,
    chamber_tree_set,
    enumerate_chambers,
    mask_indices,
    positive_chambers,
    resonance_arrangement,
)
from .core import AlternatingTree, enumerate_positive_alternating_trees, resonance_sign_vector
from .errors import BoundsError, DomainError, InvariantError, ResourceError
from .flows import is_indexable

DEFAULT_LIMIT = 10**12


@dataclass(frozen=True)
class IncidenceMatrix:
    """Columns ``e_i - e_j`` for ``i < j`` in lexicographic order."""

    n: int

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.n + 2) for j in range(i + 1, self.n + 2)]

    @property
    def rows(self) -> list[list[int]]:
        arcs = self.arcs
        return [[(v == i) - (v == j) for i, j in arcs] for v in range(1, self.n + 2)]

    def apply(self, x: Sequence[int]) -> list[int]:
        return [sum(r * f for r, f in zip(row, x)) for row in self.rows]


def _netflow(a: Sequence[int]) -> tuple[int, ...]:
    a = tuple(a)
    if any(int(v) != v for v in a):
        raise DomainError("netflow entries must be integers")
    if sum(a) != 0:
        raise DomainError("netflow must sum to zero")
    return tuple(int(v) for v in a)


@lru_cache(maxsize=None)
def _count(state: tuple[int, ...]) -> int:
    # state[0] must leave the first remaining vertex towards the later ones
    if len(state) == 1:
        return 1 if state[0] == 0 else 0
    s = state[0]
    rest = state[1:]
    if s < 0:
        return 0
    total = 0
    for parts in _compositions(s, len(rest)):
        nxt = tuple(r + p for r, p in zip(rest, parts))
        # what is left must still be reachable by arcs pointing forward
        prefix = 0
        for v in nxt[:-1]:
            prefix += v
            if prefix < 0:
                break
        else:
            total += _count(nxt)
    return total


def _compositions(s: int, k: int):
    if k == 1:
        yield (s,)
        return
    for first in range(s + 1):
        for tail in _compositions(s - first, k - 1):
            yield (first,) + tail


def kostant_value(a: Sequence[int], limit: int = DEFAULT_LIMIT) -> int:
    """Number of nonnegative integer flows on the complete ascending graph with netflow ``a``."""
    a = _netflow(a)
    prefix = 0
    for v in a:
        prefix += v
        if prefix < 0:
            return 0
    value = _count(a)
    if value > limit:
        raise ResourceError(f"count {value} exceeds the limit {limit}")
    return value


def kostant_brute_force(a: Sequence[int]) -> int:
    """Reference count by scanning every flow bounded by the positive netflow mass."""
    a = _netflow(a)
    M = IncidenceMatrix(len(a) - 1)
    bound = sum(v for v in a if v > 0)
    return sum(1 for x in product(range(bound + 1), repeat=len(M.arcs)) if M.apply(x) == list(a))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

Monomial = tuple[int, ...]


def monomials(nvars: int, degree: int) -> list[Monomial]:
    """Exponent vectors of total degree at most ``degree``, graded lex."""
    out = []
    for d in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            block.append(tuple(e))
        out += sorted(block, reverse=True)
    return out


@dataclass(frozen=True)
class Polynomial:
    coefficients: dict[Monomial, Fraction]

    def __call__(self, point: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for e, c in self.coefficients.items():
            term = c
            for x, k in zip(point, e):
                term *= x**k
            total += term
        return total

    @property
    def degree(self) -> int:
        return max((sum(e) for e, c in self.coefficients.items() if c), default=0)

    def to_json(self) -> dict[str, str]:
        return {_monomial_name(e): str(c) for e, c in self.coefficients.items() if c}

    def __str__(self) -> str:
        out = ""
        for e, c in self.coefficients.items():
            if not c:
                continue
            mag = abs(c)
            body = str(mag) if not any(e) else (_monomial_name(e) if mag == 1 else f"{mag}*{_monomial_name(e)}")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out or "0"


def _monomial_name(e: Monomial) -> str:
    parts = [f"a{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
    return "*".join(parts) or "1"


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows)
    mat = [r[:] + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        p = next(i for i in range(c, n) if mat[i][c] != 0)
        mat[c], mat[p] = mat[p], mat[c]
        pv = mat[c][c]
        mat[c] = [v / pv for v in mat[c]]
        for i in range(n):
            if i != c and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[c])]
    return [mat[i][n] for i in range(n)]


class _Echelon:
    """Incremental rank test for monomial rows."""

    def __init__(self):
        self.rows: list[tuple[int, list[Fraction]]] = []

    def add(self, row: list[Fraction]) -> bool:
        row = row[:]
        for pivot, r in self.rows:
            if row[pivot]:
                f = row[pivot] / r[pivot]
                row = [x - f * y for x, y in zip(row, r)]
        pivot = next((k for k, v in enumerate(row) if v), None)
        if pivot is None:
            return False
        self.rows.append((pivot, row))
        return True


@dataclass(frozen=True)
class PolynomialFit:
    polynomial: Polynomial
    degree: int
    expected_degree: int
    fit_points: tuple[tuple[int, ...], ...]
    holdout_points: tuple[tuple[int, ...], ...]
    holdout_agrees: bool

    @property
    def ok(self) -> bool:
        return self.holdout_agrees and self.degree == self.expected_degree


@dataclass
class KostantChamber:
    positive_tree_set: tuple[int, ...]
    resonance_chambers: tuple[Chamber, ...]
    fit: PolynomialFit | None = field(default=None)

    def to_json(self) -> dict:
        out = {"tree_set": list(self.positive_tree_set), "num_resonance_chambers": len(self.resonance_chambers)}
        if self.fit is not None:
            out["polynomial"] = self.fit.polynomial.to_json()
            out["degree"] = self.fit.degree
        return out


def kostant_chambers(
    n: int,
    chambers: Sequence[Chamber] | None = None,
    check: bool = True,
    cap: int = 5,
) -> list[KostantChamber]:
    """Group positive-cone resonance chambers of rank ``n`` by their positive-tree sets."""
    if not 1 <= n <= cap:
        raise BoundsError(f"Kostant chambers need 1 <= n <= {cap}")
    if chambers is None:
        chambers = enumerate_chambers(resonance_arrangement(n))
    trees = enumerate_positive_alternating_trees(n + 1)
    index = _TreeIndex.of(trees)
    groups: dict[int, list[Chamber]] = {}
    for c in positive_chambers(chambers, n):
        mask = chamber_tree_set(c, index)
        if not mask:
            raise InvariantError("a positive chamber lies in no positive tree cone")
        groups.setdefault(mask, []).append(c)
    out = [KostantChamber(tuple(mask_indices(m)), tuple(cs)) for m, cs in sorted(groups.items())]
    if check:
        for kc in out:
            check_maximal_indexable(trees, kc.positive_tree_set)
    return out


def check_maximal_indexable(trees: Sequence[AlternatingTree], members: Sequence[int]) -> None:
    chosen = [trees[k] for k in members]
    if not is_indexable(chosen):
        raise InvariantError(f"tree set {list(members)} is not indexable")
    inside = set(members)
    for k, t in enumerate(trees):
        if k not in inside and is_indexable(chosen + [t]):
            raise InvariantError(f"tree set {list(members)} extends by tree {k}")


def interior_lattice_points(
    chambers: Sequence[Chamber], count: int, max_scale: int = 64
) -> list[tuple[int, ...]]:
    """Distinct integral points strictly inside the given resonance chambers.

    Points are ``t * witness + delta`` for growing ``t`` and small integral
    ``delta``; membership is confirmed by recomputing the sign vector.
    """
    found: list[tuple[int, ...]] = []
    seen = set()
    t = 1
    while t <= max_scale:
        for c in chambers:
            w = [int(v) for v in c.witness.coords]
            if any(Fraction(v) != int(v) for v in c.witness.coords):
                raise DomainError("witnesses must be integral")
            m = len(w) - 1
            r = max(1, t // 2)
            for delta in product(range(-r, r + 1), repeat=m):
                a = [t * v + d for v, d in zip(w, delta)]
                a.append(-sum(a))
                key = tuple(a)
                if key in seen:
                    continue
                sv = resonance_sign_vector(key)
                if all(int(s) == c.signs[k] for k, s in enumerate(sv.entries)):
                    seen.add(key)
                    found.append(key)
                    if len(found) >= count:
                        return found
        t += 1
    raise ResourceError(f"only {len(found)} interior lattice points up to scale {max_scale}")


def fit_chamber_polynomial(kc: KostantChamber, n: int, holdout: int = 10, max_scale: int = 64) -> PolynomialFit:
    """Interpolate the partition function on one chamber and verify it on held-out points."""
    if not 1 <= n <= 3:
        raise BoundsError("polynomial fitting is limited to n <= 3")
    degree = comb(n + 1, 2) - n
    basis = monomials(n, degree)
    need = len(basis)
    pool = interior_lattice_points(kc.resonance_chambers, 4 * need + holdout, max_scale)
    echelon = _Echelon()
    fit_points: list[tuple[int, ...]] = []
    rest = []
    for a in pool:
        row = [Fraction(_eval_monomial(e, a)) for e in basis]
        if len(fit_points) < need and echelon.add(row):
            fit_points.append(a)
        else:
            rest.append(a)
    if len(fit_points) < need or len(rest) < holdout:
        raise ResourceError("not enough unisolvent interior points")
    rows = [[Fraction(_eval_monomial(e, a)) for e in basis] for a in fit_points]
    values = [Fraction(kostant_value(a)) for a in fit_points]
    coeffs = _solve(rows, values)
    poly = Polynomial(dict(zip(basis, coeffs)))
    holdout_points = tuple(rest[:holdout])
    agrees = all(poly(a[:n]) == kostant_value(a) for a in holdout_points)
    return PolynomialFit(poly, poly.degree, degree, tuple(fit_points), holdout_points, agrees)


def _eval_monomial(e: Monomial, a: Sequence[int]) -> int:
    out = 1
    for x, k in zip(a, e):
        out *= x**k
    return out


@dataclass(frozen=True)
class CyclicReport:
    n: int
    resonance: int
    positive: int
    kostant: int

    @property
    def cyclic_holds(self) -> bool:
        return (self.n + 1) * self.positive == self.resonance

    @property
    def bound_holds(self) -> bool:
        return self.kostant * (self.n + 1) <= self.resonance

    def line(self) -> str:
        return (
            f"n={self.n}: {self.n + 1}*{self.positive} = {(self.n + 1) * self.positive} vs R={self.resonance} "
            f"[{'ok' if self.cyclic_holds else 'FAIL'}]; K={self.kostant} <= {Fraction(self.resonance, self.n + 1)} "
            f"[{'ok' if self.bound_holds else 'FAIL'}]"
        )


def cyclic_cross_check(
    n: int, chambers: Sequence[Chamber] | None = None, kostant: int | None = None
) -> CyclicReport:
    if chambers is None:
        chambers = enumerate_chambers(resonance_arrangement(n))
    positive = len(positive_chambers(chambers, n))
    if kostant is None:
        kostant = len(kostant_chambers(n, chambers, check=False))
    report = CyclicReport(n, len(chambers), positive, kostant)
    if not (report.cyclic_holds and report.bound_holds):
        raise InvariantError(report.line())
    return report
