"""Chambers and walls of central hyperplane arrangements, computed exactly.

Chambers are found by inserting hyperplanes one at a time.  Every chamber
carries an integral witness point whose inner product with each signed normal
is at least 1, so its sign vector is certified by direct evaluation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .core import (
    AlternatingTree,
    Convention,
    RationalPoint,
    Sign,
    SignVector,
    enumerate_alternating_trees,
    enumerate_positive_alternating_trees,
)
from .errors import BoundsError, DomainError, InvariantError
from .flows import positive_root_cone_contains
from .lp import open_cone_point

log = logging.getLogger(__name__)

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class CentralArrangement:
    """Hyperplanes through the origin, optionally inside a subspace and cone.

    ``equality_normals`` cut out the ambient subspace; ``restriction_normals``
    must be strictly positive on the region of interest.  ``labels`` names each
    hyperplane (a subset mask for the two standard families).
    """

    ambient_dim: int
    normals: tuple[IntVec, ...]
    equality_normals: tuple[IntVec, ...] = ()
    restriction_normals: tuple[IntVec, ...] = ()
    labels: tuple[int, ...] = ()
    family: str = ""
    n: int = 0

    def __post_init__(self):
        for v in self.normals + self.equality_normals + self.restriction_normals:
            if len(v) != self.ambient_dim:
                raise DomainError(f"normal {v} has the wrong length")
        for v in self.normals:
            if not any(v):
                raise DomainError("zero normal vector")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.normals))))

    def __len__(self) -> int:
        return len(self.normals)

    @property
    def convention(self) -> Convention | None:
        return {"threshold": Convention.THRESHOLD, "resonance": Convention.RESONANCE}.get(self.family)


@dataclass(frozen=True)
class Chamber:
    """Full sign vector (entries +1/-1 per hyperplane) and interior witness."""

    signs: tuple[int, ...]
    witness: RationalPoint

    @property
    def sign_string(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def sign_vector(self, arrangement: CentralArrangement) -> SignVector:
        if arrangement.convention is None:
            raise DomainError("sign vectors are only defined for the standard families")
        return SignVector(arrangement.n, tuple(Sign(s) for s in self.signs), arrangement.convention)

    def to_json(self) -> dict:
        return {"signs": self.sign_string, "witness": self.witness.serialize()}

    @classmethod
    def from_json(cls, data: dict) -> "Chamber":
        signs = tuple(1 if c == "+" else -1 for c in data["signs"])
        return cls(signs, RationalPoint.of(Fraction(v) for v in data["witness"]))


@dataclass(frozen=True)
class WallCensus:
    per_hyperplane: tuple[int, ...]
    total: int
    chamber_count: int
    rank: int

    @property
    def average_walls(self) -> Fraction:
        return Fraction(2 * self.total, self.chamber_count)

    def check(self) -> None:
        """Each hyperplane carries at most half the chambers; each chamber has rank-many walls."""
        for w in self.per_hyperplane:
            if 2 * w > self.chamber_count:
                raise InvariantError(f"2W(H)={2 * w} exceeds C={self.chamber_count}")
        if self.rank * self.chamber_count > 2 * self.total:
            raise InvariantError("rank * C exceeds 2W")
        if self.average_walls * self.chamber_count != 2 * self.total:
            raise InvariantError("w * C != 2W")


# ---------------------------------------------------------------------------
# the two families
# ---------------------------------------------------------------------------

def threshold_normal(n: int, S: int) -> IntVec:
    return tuple(1 if S >> i & 1 else -1 for i in range(n - 1)) + (-1,)


def threshold_arrangement(n: int, cap: int = 6) -> CentralArrangement:
    """All ``+-1`` normals with last entry ``-1`` in ``R^n``, ascending by mask."""
    if not 2 <= n <= cap:
        raise BoundsError(f"threshold arrangement needs 2 <= n <= {cap}")
    masks = tuple(range(1 << (n - 1)))
    return CentralArrangement(
        n, tuple(threshold_normal(n, S) for S in masks), labels=masks, family="threshold", n=n
    )


def resonance_normal(n: int, S: int) -> IntVec:
    return tuple(1 if S >> i & 1 else 0 for i in range(n + 1))


def resonance_arrangement(n: int, cap: int = 6) -> CentralArrangement:
    """0/1 normals of nonempty ``S`` in ``[n]`` restricted to the sum-zero subspace of ``R^(n+1)``."""
    if not 1 <= n <= cap:
        raise BoundsError(f"resonance arrangement needs 1 <= n <= {cap}")
    masks = tuple(range(1, 1 << n))
    return CentralArrangement(
        n + 1,
        tuple(resonance_normal(n, S) for S in masks),
        equality_normals=((1,) * (n + 1),),
        labels=masks,
        family="resonance",
        n=n + 1,
    )


# ---------------------------------------------------------------------------
# linear algebra helpers
# ---------------------------------------------------------------------------

def _rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    mat = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return len(_rref(vectors, len(vectors[0]))[1])


def integer_kernel_basis(equalities: Sequence[IntVec], dim: int) -> list[IntVec]:
    """Integral basis (as columns) of ``{x : <e, x> = 0 for e in equalities}``."""
    if not equalities:
        return [tuple(1 if i == j else 0 for i in range(dim)) for j in range(dim)]
    mat, pivots = _rref(equalities, dim)
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * dim
        vec[f] = Fraction(1)
        for row, p in zip(mat, pivots):
            vec[p] = -row[f]
        den = lcm(*(v.denominator for v in vec))
        basis.append(tuple(int(v * den) for v in vec))
    return basis


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _integral(x: Sequence[Fraction]) -> IntVec:
    den = lcm(*(Fraction(v).denominator for v in x))
    return tuple(int(v * den) for v in x)


def _primitive(v: Sequence[int]) -> IntVec:
    from math import gcd

    g = 0
    for a in v:
        g = gcd(g, a)
    return tuple(a // g for a in v) if g else tuple(v)


# ---------------------------------------------------------------------------
# chamber enumeration
# ---------------------------------------------------------------------------

@dataclass
class _Region:
    signs: list[int]
    witness: IntVec
    constraints: list[IntVec] = field(default_factory=list)


def _nudge(w: IntVec, g: IntVec, constraints: list[IntVec], s: int) -> IntVec:
    """Integral point strictly inside the region on side ``s`` of ``g``, given ``<g, w> = 0``."""
    k = 1 + max((abs(_dot(c, g)) for c in constraints), default=0)
    return tuple(k * a + s * b for a, b in zip(w, g))


def _split(region: _Region, g: IntVec, neg_g: IntVec) -> list[_Region]:
    val = _dot(g, region.witness)
    cons = region.constraints
    if val == 0:
        return [
            _Region(region.signs + [1], _nudge(region.witness, g, cons, 1), cons + [g]),
            _Region(region.signs + [-1], _nudge(region.witness, g, cons, -1), cons + [neg_g]),
        ]
    s = 1 if val > 0 else -1
    same, other = (g, neg_g) if s > 0 else (neg_g, g)
    point = open_cone_point(cons + [other])
    if point is None:
        region.signs.append(s)
        region.constraints = cons + [same]
        return [region]
    return [
        _Region(region.signs + [s], region.witness, cons + [same]),
        _Region(region.signs + [-s], _integral(point), cons + [other]),
    ]


def _split_batch(args):
    regions, g, neg_g = args
    out = []
    for r in regions:
        out.extend(_split(r, g, neg_g))
    return out


def enumerate_chambers(
    arrangement: CentralArrangement, workers: int = 1, allow_empty: bool = False
) -> list[Chamber]:
    """All chambers, sorted by sign string.

    ``allow_empty`` returns ``[]`` instead of raising when the restriction cone
    has no interior.
    """
    basis = integer_kernel_basis(arrangement.equality_normals, arrangement.ambient_dim)
    r = len(basis)
    if r == 0:
        raise DomainError("the ambient subspace is trivial")

    def project(v: IntVec) -> IntVec:
        return tuple(_dot(b, v) for b in basis)

    proj = [project(v) for v in arrangement.normals]
    restr = [project(v) for v in arrangement.restriction_normals]
    if restr:
        start = open_cone_point(restr)
        if start is None:
            if allow_empty:
                return []
            raise DomainError("the restriction cone has empty interior")
        regions = [_Region([], _integral(start), list(restr))]
    else:
        regions = [_Region([], (0,) * r, [])]

    pool = None
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(workers)
    try:
        for idx, g in enumerate(proj):
            if not any(g):
                raise DomainError(f"hyperplane {idx} contains the ambient subspace")
            neg_g = tuple(-a for a in g)
            if pool is not None and len(regions) > 64:
                size = -(-len(regions) // (4 * workers))
                chunks = [(regions[i:i + size], g, neg_g) for i in range(0, len(regions), size)]
                regions = [reg for part in pool.map(_split_batch, chunks) for reg in part]
            else:
                regions = _split_batch((regions, g, neg_g))
            log.debug("hyperplane %d/%d: %d regions", idx + 1, len(proj), len(regions))
    finally:
        if pool is not None:
            pool.shutdown()

    chambers = []
    for reg in regions:
        ambient = tuple(sum(b[i] * c for b, c in zip(basis, reg.witness)) for i in range(arrangement.ambient_dim))
        chambers.append(Chamber(tuple(reg.signs), RationalPoint(tuple(Fraction(a) for a in ambient))))
    chambers.sort(key=lambda c: c.sign_string)
    return chambers


def verify_chamber(arrangement: CentralArrangement, chamber: Chamber) -> bool:
    """Witness reproduces the sign vector with margin at least 1 and meets all side conditions."""
    w = chamber.witness.coords
    for v in arrangement.equality_normals:
        if _dot(v, w) != 0:
            return False
    for v in arrangement.restriction_normals:
        if _dot(v, w) < 1:
            return False
    return all(s * _dot(v, w) >= 1 for s, v in zip(chamber.signs, arrangement.normals))


# ---------------------------------------------------------------------------
# walls
# ---------------------------------------------------------------------------

def restriction(arrangement: CentralArrangement, index: int) -> CentralArrangement:
    """The arrangement induced inside hyperplane ``index``.

    Hyperplanes that coincide within the new subspace are kept once.
    """
    eq = arrangement.equality_normals + (arrangement.normals[index],)
    basis = integer_kernel_basis(eq, arrangement.ambient_dim)
    seen = set()
    normals = []
    labels = []
    for j, v in enumerate(arrangement.normals):
        if j == index:
            continue
        p = _primitive(tuple(_dot(b, v) for b in basis))
        if not any(p):
            continue
        key = max(p, tuple(-a for a in p))
        if key in seen:
            continue
        seen.add(key)
        normals.append(v)
        labels.append(arrangement.labels[j])
    return CentralArrangement(
        arrangement.ambient_dim,
        tuple(normals),
        eq,
        arrangement.restriction_normals,
        tuple(labels),
        family="",
        n=arrangement.n,
    )


def arrangement_rank(arrangement: CentralArrangement) -> int:
    basis = integer_kernel_basis(arrangement.equality_normals, arrangement.ambient_dim)
    return rank([[_dot(b, v) for b in basis] for v in arrangement.normals])


def _wall_count(restricted: CentralArrangement) -> int:
    # a rank-one arrangement restricts to the origin, which is its single wall
    if not integer_kernel_basis(restricted.equality_normals, restricted.ambient_dim):
        return 1
    return len(enumerate_chambers(restricted, allow_empty=True))


def wall_census(
    arrangement: CentralArrangement, chamber_count: int | None = None, check: bool = True
) -> WallCensus:
    """Count walls hyperplane by hyperplane (each is a chamber of the restriction)."""
    if chamber_count is None:
        chamber_count = len(enumerate_chambers(arrangement))
    per = tuple(_wall_count(restriction(arrangement, i)) for i in range(len(arrangement)))
    census = WallCensus(per, sum(per), chamber_count, arrangement_rank(arrangement))
    if check:
        census.check()
    return census


# ---------------------------------------------------------------------------
# chambers as sets of trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _TreeIndex:
    trees: tuple[AlternatingTree, ...]
    by_sources: dict

    @classmethod
    def of(cls, trees: Sequence[AlternatingTree]) -> "_TreeIndex":
        by: dict[int, list[tuple[int, int, int]]] = {}
        for k, t in enumerate(trees):
            sv = t.sign_vector
            by.setdefault(t.sources, []).append((k, sv.plus, sv.minus))
        return cls(tuple(trees), by)


def _chamber_masks(chamber: Chamber) -> tuple[int, int]:
    plus = minus = 0
    for k, s in enumerate(chamber.signs):
        if s > 0:
            plus |= 1 << k
        else:
            minus |= 1 << k
    return plus, minus


def _chamber_sources(chamber: Chamber) -> int:
    w = chamber.witness.coords
    return sum(1 << i for i, c in enumerate(w) if c > 0)


def chamber_tree_set(chamber: Chamber, trees: Sequence[AlternatingTree] | _TreeIndex) -> int:
    """Bitmask over ``trees`` of the trees whose root cone contains the chamber.

    The chamber must come from a resonance arrangement on the same vertex set.
    """
    index = trees if isinstance(trees, _TreeIndex) else _TreeIndex.of(trees)
    if index.trees and len(chamber.witness) != index.trees[0].n:
        raise DomainError("chamber and trees live on different vertex sets")
    plus, minus = _chamber_masks(chamber)
    if index.trees and len(chamber.signs) != (1 << (index.trees[0].n - 1)) - 1:
        raise DomainError("not a resonance chamber for these trees")
    mask = 0
    for k, tp, tm in index.by_sources.get(_chamber_sources(chamber), ()):
        if not (tp & minus) and not (tm & plus):
            mask |= 1 << k
    return mask


def mask_indices(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def in_positive_cone(chamber: Chamber, n: int) -> bool:
    """Sign filter: every prefix sum ``x_1 + ... + x_k`` (k <= n) is positive."""
    return all(chamber.signs[(1 << k) - 2] > 0 for k in range(1, n + 1))


def positive_chambers(chambers: Iterable[Chamber], n: int, check: bool = True) -> list[Chamber]:
    out = []
    for c in chambers:
        inside = in_positive_cone(c, n)
        if check and inside != positive_root_cone_contains(c.witness, strict=True):
            raise InvariantError("prefix-sign filter disagrees with cone membership")
        if inside:
            out.append(c)
    return out


@dataclass(frozen=True)
class IndexableCollection:
    """A maximal indexable collection and the resonance chambers it labels."""

    tree_mask: int
    chambers: tuple[Chamber, ...]

    @property
    def tree_indices(self) -> list[int]:
        return mask_indices(self.tree_mask)


def maximal_indexable_via_chambers(
    n: int,
    positive_only: bool = False,
    chambers: Sequence[Chamber] | None = None,
    trees: Sequence[AlternatingTree] | None = None,
    cap: int = 5,
) -> list[IndexableCollection]:
    """Group the chambers of ``Res_n`` by their tree sets over ``[n+1]``.

    In the full case distinct chambers must have distinct tree sets; in the
    positive case only chambers inside the positive root cone are used and
    several chambers may share one set.
    """
    if not 1 <= n <= cap:
        raise BoundsError(f"n must lie in [1, {cap}]")
    if chambers is None:
        chambers = enumerate_chambers(resonance_arrangement(n))
    if trees is None:
        trees = (
            enumerate_positive_alternating_trees(n + 1) if positive_only else enumerate_alternating_trees(n + 1)
        )
    index = _TreeIndex.of(trees)
    if positive_only:
        chambers = positive_chambers(chambers, n)
    groups: dict[int, list[Chamber]] = {}
    for c in chambers:
        mask = chamber_tree_set(c, index)
        if not mask:
            raise InvariantError("a chamber lies in no tree cone")
        groups.setdefault(mask, []).append(c)
    if not positive_only and len(groups) != len(chambers):
        raise InvariantError("two resonance chambers share a tree set")
    return [IndexableCollection(m, tuple(cs)) for m, cs in sorted(groups.items())]


# ---------------------------------------------------------------------------
# inequalities on the counts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    name: str
    n: int
    statement: str
    holds: bool
    kind: str = "theorem"

    def line(self) -> str:
        status = "PASS" if self.holds else "FAIL"
        return f"[{status}] {self.name} n={self.n}: {self.statement} ({self.kind})"


def verify_inequalities(
    R: dict[int, int], T: dict[int, int], K: dict[int, int] | None = None
) -> list[InequalityCheck]:
    """Evaluate the count inequalities on every ``n`` with the needed values.

    ``R[n]`` counts chambers of ``Res_n``, ``T[n]`` threshold functions on
    ``n`` variables and ``K[n]`` Kostant chambers of rank ``n``.
    """
    K = K or {}
    out = []
    for n in sorted(R):
        if n >= 2 and n in T:
            lo = Fraction((n + 1) * T[n], 2 ** (n + 1))
            hi = Fraction(T[n], 2)
            out.append(
                InequalityCheck(
                    "bounds", n, f"{lo} < R={R[n]} < {hi}", lo < R[n] < hi
                )
            )
        if n >= 2 and n in K:
            out.append(
                InequalityCheck(
                    "kostant", n, f"K={K[n]} <= R/(n+1)={Fraction(R[n], n + 1)}", K[n] * (n + 1) <= R[n]
                )
            )
        if n >= 3 and n + 1 in K and n in T:
            out.append(
                InequalityCheck(
                    "growth",
                    n,
                    f"R={R[n]} < K_(n+1)={K[n + 1]} < T/2={Fraction(T[n], 2)}",
                    R[n] < K[n + 1] < Fraction(T[n], 2),
                    kind="evidence",
                )
            )
    return out
