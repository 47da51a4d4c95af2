"""Subsets, signs, alternating trees, flows and sign vectors.

Subsets of ``[m]`` are plain ``int`` bitmasks: element ``i`` (1-based) is bit
``i - 1``.  Sign vectors are indexed by subset masks in ascending order.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import BoundsError, DomainError, StructuralError

MAX_GROUND = 20
MAX_TREE_N = 9

Arc = tuple[int, int]


# ---------------------------------------------------------------------------
# subsets
# ---------------------------------------------------------------------------

def subset_mask(elements: Iterable[int], m: int | None = None) -> int:
    """Bitmask of a set of 1-based elements."""
    mask = 0
    for e in elements:
        if e < 1 or (m is not None and e > m):
            raise DomainError(f"element {e} outside [1, {m}]")
        mask |= 1 << (e - 1)
    if m is not None and m > MAX_GROUND:
        raise BoundsError(f"ground size {m} exceeds {MAX_GROUND}")
    return mask


def mask_elements(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def format_subset(mask: int) -> str:
    return "{" + ",".join(map(str, mask_elements(mask))) + "}"


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------

class Sign(enum.IntEnum):
    MINUS = -1
    ZERO = 0
    PLUS = 1

    def __str__(self) -> str:
        return _SIGN_CHARS[self]

    @classmethod
    def of(cls, value) -> "Sign":
        return cls.PLUS if value > 0 else cls.MINUS if value < 0 else cls.ZERO

    @classmethod
    def parse(cls, ch: str) -> "Sign":
        try:
            return _SIGN_FROM_CHAR[ch]
        except KeyError:
            raise StructuralError(f"not a sign: {ch!r}") from None


_SIGN_CHARS = {Sign.PLUS: "+", Sign.MINUS: "-", Sign.ZERO: "0"}
_SIGN_FROM_CHAR = {"+": Sign.PLUS, "-": Sign.MINUS, "−": Sign.MINUS, "0": Sign.ZERO}


class TreeSign(enum.Enum):
    PLUS = "+"
    MINUS = "-"
    UNKNOWN = "?"

    def __str__(self) -> str:
        return self.value


class Convention(enum.Enum):
    RESONANCE = "resonance"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class SignVector:
    """Signs indexed by subset masks over ``[n-1]`` in ascending order.

    RESONANCE vectors skip the empty set; THRESHOLD vectors include it.
    """

    n: int
    entries: tuple[Sign, ...]
    convention: Convention = Convention.RESONANCE

    def __post_init__(self):
        full = 1 << (self.n - 1)
        want = full - 1 if self.convention is Convention.RESONANCE else full
        if len(self.entries) != want:
            raise StructuralError(
                f"{self.convention.value} sign vector for n={self.n} needs {want} entries"
            )

    @property
    def offset(self) -> int:
        return 1 if self.convention is Convention.RESONANCE else 0

    def __getitem__(self, mask: int) -> Sign:
        if mask < self.offset:
            raise DomainError("the empty set is not an index of a resonance sign vector")
        return self.entries[mask - self.offset]

    def masks(self) -> range:
        return range(self.offset, len(self.entries) + self.offset)

    def __str__(self) -> str:
        return ",".join(map(str, self.entries))

    @classmethod
    def parse(cls, text: str, n: int, convention: Convention = Convention.RESONANCE) -> "SignVector":
        parts = [p.strip() for p in text.split(",")] if "," in text else list(text.strip())
        return cls(n, tuple(Sign.parse(p) for p in parts), convention)

    def negated(self) -> "SignVector":
        return SignVector(self.n, tuple(Sign(-s) for s in self.entries), self.convention)


@dataclass(frozen=True)
class TreeSignVector:
    """``+``/``-``/``?`` per nonempty subset of ``[n-1]``, stored as two masks.

    Bit ``S - 1`` of ``plus`` (resp. ``minus``) is set when no arc enters
    (resp. leaves) ``S``.
    """

    n: int
    plus: int
    minus: int

    def __getitem__(self, mask: int) -> TreeSign:
        if mask <= 0 or mask >= 1 << (self.n - 1):
            raise DomainError(f"subset mask {mask} is not a nonempty subset of [{self.n - 1}]")
        bit = 1 << (mask - 1)
        if self.plus & bit:
            return TreeSign.PLUS
        if self.minus & bit:
            return TreeSign.MINUS
        return TreeSign.UNKNOWN

    @property
    def entries(self) -> tuple[TreeSign, ...]:
        return tuple(self[s] for s in range(1, 1 << (self.n - 1)))

    def __len__(self) -> int:
        return (1 << (self.n - 1)) - 1

    def __str__(self) -> str:
        return ",".join(map(str, self.entries))

    def compatible_with(self, other: "TreeSignVector") -> bool:
        return not (self.plus & other.minus) and not (self.minus & other.plus)


# ---------------------------------------------------------------------------
# alternating trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=False)
class AlternatingTree:
    """Directed tree on ``[n]`` whose vertices are pure sources or pure sinks.

    ``arcs`` is kept sorted; construct through :meth:`from_arcs` to validate.
    """

    n: int
    arcs: tuple[Arc, ...]

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Sequence[int]]) -> "AlternatingTree":
        tree = cls(n, tuple(sorted((int(a), int(b)) for a, b in arcs)))
        tree.validate()
        return tree

    def validate(self) -> None:
        n = self.n
        if n < 1:
            raise StructuralError("a tree needs at least one vertex")
        if len(self.arcs) != n - 1:
            raise StructuralError(f"a tree on [{n}] has {n - 1} arcs, got {len(self.arcs)}")
        heads = tails = 0
        parent = list(range(n + 1))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in self.arcs:
            if not (1 <= a <= n and 1 <= b <= n) or a == b:
                raise StructuralError(f"bad arc {(a, b)} on [{n}]")
            tails |= 1 << (a - 1)
            heads |= 1 << (b - 1)
            ra, rb = find(a), find(b)
            if ra == rb:
                raise StructuralError("arcs contain a cycle")
            parent[ra] = rb
        if tails & heads:
            bad = mask_elements(tails & heads)
            raise StructuralError(f"vertices {bad} are neither pure source nor pure sink")

    @cached_property
    def sources(self) -> int:
        """Mask of source vertices (isolated vertex of n=1 counts as a sink)."""
        m = 0
        for a, _ in self.arcs:
            m |= 1 << (a - 1)
        return m

    @property
    def sinks(self) -> int:
        return ((1 << self.n) - 1) & ~self.sources

    @property
    def positive(self) -> bool:
        return all(a < b for a, b in self.arcs)

    def sort_key(self) -> tuple:
        return (self.sources, self.arcs)

    def __lt__(self, other: "AlternatingTree") -> bool:
        return (self.n, *self.sort_key()) < (other.n, *other.sort_key())

    def reversed(self) -> "AlternatingTree":
        return AlternatingTree.from_arcs(self.n, [(b, a) for a, b in self.arcs])

    def relabeled(self, perm: Sequence[int]) -> "AlternatingTree":
        """Apply the vertex map ``i -> perm[i - 1]``."""
        return AlternatingTree.from_arcs(self.n, [(perm[a - 1], perm[b - 1]) for a, b in self.arcs])

    def __str__(self) -> str:
        return format_tree(self)

    @cached_property
    def sign_vector(self) -> TreeSignVector:
        return tree_sign_vector(self)

    def cut_sides(self) -> list[int]:
        """For each arc ``(i, j)``, the vertex mask of the component of ``i`` in ``T - (i, j)``.

        The unique flow inducing ``x`` on this tree assigns ``sum(x[S])`` to the
        arc, where ``S`` is the returned side.
        """
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for a, b in self.arcs:
            adj[a].append(b)
            adj[b].append(a)
        sides = []
        for a, b in self.arcs:
            seen = 1 << (a - 1)
            stack = [a]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if (v, w) in ((a, b), (b, a)):
                        continue
                    bit = 1 << (w - 1)
                    if not seen & bit:
                        seen |= bit
                        stack.append(w)
            sides.append(seen)
        return sides


def format_tree(tree: AlternatingTree) -> str:
    return f"n={tree.n}; arcs=" + ",".join(f"({a},{b})" for a, b in tree.arcs)


def parse_tree(text: str) -> AlternatingTree:
    head, _, rest = text.partition(";")
    head, rest = head.strip(), rest.strip()
    if not head.startswith("n=") or not rest.startswith("arcs="):
        raise StructuralError(f"cannot parse tree line {text!r}")
    n = int(head[2:])
    body = rest[5:].replace(" ", "")
    arcs = []
    if body:
        for chunk in body.strip("()").split("),("):
            a, b = chunk.split(",")
            arcs.append((int(a), int(b)))
    return AlternatingTree.from_arcs(n, arcs)


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Undirected edges of the labeled tree with Prüfer sequence ``seq``."""
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = next(u for u in range(1, n + 1) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (x for x in range(1, n + 1) if degree[x] == 1)
    edges.append((u, w))
    return edges


def _two_colouring(n: int, edges: list[tuple[int, int]]) -> int:
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    colour = {1: 0}
    stack = [1]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in colour:
                colour[w] = 1 - colour[v]
                stack.append(w)
    return sum(1 << (v - 1) for v, c in colour.items() if c == 0)


def _check_tree_n(n: int, cap: int) -> None:
    if not 2 <= n <= cap:
        raise BoundsError(f"n must lie in [2, {cap}], got {n}")


def enumerate_alternating_trees(n: int, cap: int = MAX_TREE_N) -> list[AlternatingTree]:
    """All ``2 n^(n-2)`` alternating trees on ``[n]`` in canonical order."""
    _check_tree_n(n, cap)
    out = []
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        edges = prufer_decode(seq, n)
        side = _two_colouring(n, edges)
        for src in (side, ((1 << n) - 1) ^ side):
            arcs = tuple(sorted((a, b) if src >> (a - 1) & 1 else (b, a) for a, b in edges))
            out.append(AlternatingTree(n, arcs))
    out.sort(key=AlternatingTree.sort_key)
    return out


def enumerate_positive_alternating_trees(n: int, cap: int = MAX_TREE_N) -> list[AlternatingTree]:
    return [t for t in enumerate_alternating_trees(n, cap) if t.positive]


def positive_tree_count(n: int) -> Fraction:
    """Closed-form count of positive alternating trees on ``[n]``."""
    from math import comb

    return Fraction(sum(comb(n, k) * k ** (n - 1) for k in range(1, n + 1)), n * 2 ** (n - 1))


def tree_sign_vector(tree: AlternatingTree) -> TreeSignVector:
    n = tree.n
    plus = minus = 0
    arcs = [(1 << (a - 1), 1 << (b - 1)) for a, b in tree.arcs]
    for s in range(1, 1 << (n - 1)):
        entering = leaving = False
        for ta, hb in arcs:
            if hb & s and not ta & s:
                entering = True
            elif ta & s and not hb & s:
                leaving = True
        # a connected tree always has a crossing arc, so not both are False
        if not entering:
            plus |= 1 << (s - 1)
        elif not leaving:
            minus |= 1 << (s - 1)
    return TreeSignVector(n, plus, minus)


def is_sign_compatible(t1: AlternatingTree, t2: AlternatingTree) -> bool:
    if t1.n != t2.n:
        raise DomainError(f"trees on [{t1.n}] and [{t2.n}] cannot be compared")
    return t1.sign_vector.compatible_with(t2.sign_vector)


# ---------------------------------------------------------------------------
# points and flows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPoint:
    coords: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable) -> "RationalPoint":
        return cls(tuple(Fraction(v) for v in values))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    @property
    def in_root_space(self) -> bool:
        return sum(self.coords) == 0

    def dot(self, v: Sequence) -> Fraction:
        return sum((a * b for a, b in zip(self.coords, v)), Fraction(0))

    def scaled(self, c) -> "RationalPoint":
        return RationalPoint(tuple(a * c for a in self.coords))

    def __neg__(self) -> "RationalPoint":
        return self.scaled(-1)

    def rotated(self, k: int = 1) -> "RationalPoint":
        """``omega^k x`` with ``omega x = (x_2, ..., x_n, x_1)``."""
        k %= len(self.coords)
        return RationalPoint(self.coords[k:] + self.coords[:k])

    def serialize(self) -> list[str]:
        return [str(c) for c in self.coords]


@dataclass(frozen=True)
class FlowAssignment:
    """Nonnegative value per arc, parallel to ``arcs``."""

    arcs: tuple[Arc, ...]
    values: tuple[Fraction, ...]

    @classmethod
    def on(cls, graph, values: Iterable) -> "FlowAssignment":
        arcs = tuple(graph.arcs) if hasattr(graph, "arcs") else tuple(graph)
        vals = tuple(Fraction(v) for v in values)
        if len(vals) != len(arcs):
            raise StructuralError(f"{len(arcs)} arcs but {len(vals)} flow values")
        return cls(arcs, vals)

    def __getitem__(self, arc: Arc) -> Fraction:
        return self.values[self.arcs.index(arc)]

    @property
    def nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    @property
    def strictly_positive(self) -> bool:
        return all(v > 0 for v in self.values)

    def as_dict(self) -> dict[Arc, Fraction]:
        return dict(zip(self.arcs, self.values))


def induce_point(graph, flow: FlowAssignment, n: int | None = None) -> RationalPoint:
    """Net outflow at every vertex: ``x_i = out(i) - in(i)``."""
    if n is None:
        n = graph.n
    if tuple(graph.arcs) != flow.arcs:
        raise StructuralError("flow is not defined on the arcs of this graph")
    if not flow.nonnegative:
        raise DomainError("flows must be nonnegative")
    x = [Fraction(0)] * n
    for (a, b), v in zip(flow.arcs, flow.values):
        x[a - 1] += v
        x[b - 1] -= v
    return RationalPoint(tuple(x))


def tree_flow(tree: AlternatingTree, x: Sequence) -> FlowAssignment:
    """The unique (possibly negative) arc labelling of ``tree`` inducing ``x``.

    No nonnegativity check is made; callers compare the values against zero.
    """
    xs = [Fraction(v) for v in x]
    if sum(xs) != 0:
        raise DomainError("point is not in the root space")
    vals = []
    for side in tree.cut_sides():
        vals.append(sum((xs[i - 1] for i in mask_elements(side)), Fraction(0)))
    return FlowAssignment(tree.arcs, tuple(vals))


def subset_sums(x: Sequence, m: int) -> list:
    """``sums[S] = sum(x_i for i in S)`` for every mask over ``[m]``."""
    sums = [0] * (1 << m)
    for s in range(1, 1 << m):
        low = s & -s
        sums[s] = sums[s ^ low] + x[low.bit_length() - 1]
    return sums


def resonance_sign_vector(x: RationalPoint | Sequence) -> SignVector:
    coords = tuple(x)
    n = len(coords)
    if sum(coords) != 0:
        raise DomainError("resonance sign vectors are defined on sum-zero points")
    sums = subset_sums(coords, n - 1)
    return SignVector(n, tuple(Sign.of(s) for s in sums[1:]), Convention.RESONANCE)


def threshold_sign_vector(x: RationalPoint | Sequence) -> SignVector:
    coords = tuple(x)
    n = len(coords)
    total = sum(coords)
    sums = subset_sums(coords, n - 1)
    return SignVector(n, tuple(Sign.of(2 * s - total) for s in sums), Convention.THRESHOLD)


def reflect(x: RationalPoint | Sequence, J: int) -> RationalPoint:
    """Negate the coordinates indexed by the mask ``J``."""
    coords = tuple(Fraction(c) for c in x)
    return RationalPoint(tuple(-c if J >> i & 1 else c for i, c in enumerate(coords)))
