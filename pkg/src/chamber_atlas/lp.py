"""Exact rational feasibility engine.

Phase-one simplex over integer tableaux (fraction-free pivoting with row gcd
normalisation) and Bland's anticycling rule.  Every public result is exact:
feasible systems come with a witness that satisfies all constraints, and
infeasible systems come with a Farkas certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import StructuralError

Number = int | Fraction


@dataclass(frozen=True)
class LinearSystem:
    """``A x = b`` together with per-variable lower bounds.

    A lower bound of ``None`` marks a free variable.
    """

    variables: tuple[str, ...]
    equalities: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    lower_bounds: tuple[Fraction | None, ...]

    @classmethod
    def build(
        cls,
        variables: Sequence[str],
        equalities: Sequence[tuple[Sequence[Number], Number]],
        lower_bounds: Sequence[Number | None] | Number | None = 0,
    ) -> "LinearSystem":
        names = tuple(variables)
        if isinstance(lower_bounds, (int, Fraction)) or lower_bounds is None:
            lbs = (lower_bounds,) * len(names)
        else:
            lbs = tuple(lower_bounds)
        rows = tuple(
            (tuple(Fraction(c) for c in coeffs), Fraction(rhs)) for coeffs, rhs in equalities
        )
        sys_ = cls(names, rows, tuple(None if lb is None else Fraction(lb) for lb in lbs))
        sys_.validate()
        return sys_

    def validate(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise StructuralError("duplicate variable names")
        if len(self.lower_bounds) != len(self.variables):
            raise StructuralError("one lower bound per variable is required")
        for coeffs, _ in self.equalities:
            if len(coeffs) != len(self.variables):
                raise StructuralError(
                    f"row has {len(coeffs)} coefficients for {len(self.variables)} variables"
                )

    def satisfied_by(self, values: Sequence[Fraction]) -> bool:
        for v, lb in zip(values, self.lower_bounds):
            if lb is not None and v < lb:
                return False
        return all(
            sum(c * v for c, v in zip(coeffs, values)) == rhs for coeffs, rhs in self.equalities
        )

    def dump(self) -> str:
        """One equality per line, ``c1*v1 + c2*v2 ... = rhs``; zero coefficients are skipped."""
        lines = []
        for coeffs, rhs in self.equalities:
            terms = [f"{c}*{v}" for c, v in zip(coeffs, self.variables) if c]
            lines.append(f"{' + '.join(terms) or '0'} = {rhs}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: dict[str, Fraction] | None = None
    # Row multipliers y with y.A_j <= 0 on bounded columns, y.A_j = 0 on free
    # columns and y.(b - A lb) > 0.  Present only when infeasible.
    certificate: tuple[Fraction, ...] | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.feasible


def _row_to_ints(coeffs: Sequence[Fraction], rhs: Fraction) -> list[int]:
    den = lcm(*(c.denominator for c in coeffs), rhs.denominator)
    return [int(c * den) for c in coeffs] + [int(rhs * den)]


def _normalise(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def phase_one(rows: list[list[int]]) -> tuple[list[Fraction] | None, list[Fraction] | None]:
    """Decide ``{y >= 0 : M y = b}`` for integer rows ``[M_i | b_i]``.

    Returns ``(solution, None)`` when feasible and ``(None, certificate)``
    otherwise, where the certificate ``pi`` satisfies ``pi.M <= 0`` and
    ``pi.b > 0``.
    """
    m = len(rows)
    if m == 0:
        return [], None
    ncols = len(rows[0]) - 1
    # Make every right-hand side nonnegative and remember the flips.
    flips = []
    tab = []
    for r in rows:
        if r[-1] < 0:
            flips.append(-1)
            r = [-v for v in r]
        else:
            flips.append(1)
        tab.append(r)
    width = ncols + m
    # Append artificial identity columns; rhs stays last.
    t = []
    for i, r in enumerate(tab):
        art = [0] * m
        art[i] = 1
        t.append(_normalise(r[:-1] + art + [r[-1]]))
    basis = [ncols + i for i in range(m)]
    # Reduced-cost row for min sum(artificials): c_j - sum_i a_ij (basis rows
    # currently have unit denominator after normalisation only if gcd was 1,
    # so rebuild from the unnormalised data).
    obj = [0] * (width + 1)
    for i, r in enumerate(tab):
        for j in range(ncols):
            obj[j] -= r[j]
        obj[-1] -= r[-1]
    obj_den = 1
    # Rows may have been divided by a gcd; the basic entry of row i (artificial
    # column) is t[i][ncols + i] > 0, which acts as that row's denominator.

    while True:
        enter = -1
        for j in range(ncols):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_num = best_den = 0
        for i in range(m):
            a = t[i][enter]
            if a > 0:
                rhs = t[i][-1]
                if leave < 0:
                    leave, best_num, best_den = i, rhs, a
                else:
                    lhs = rhs * best_den
                    rhs_cmp = best_num * a
                    if lhs < rhs_cmp or (lhs == rhs_cmp and basis[i] < basis[leave]):
                        leave, best_num, best_den = i, rhs, a
        if leave < 0:
            # Unbounded phase-one objective cannot happen (bounded below by 0).
            raise AssertionError("phase one unbounded")
        prow = t[leave]
        p = prow[enter]
        for i in range(m):
            if i == leave:
                continue
            row = t[i]
            a = row[enter]
            if a:
                t[i] = _normalise([v * p - a * w for v, w in zip(row, prow)])
        a = obj[enter]
        obj = [v * p - a * w for v, w in zip(obj, prow)]
        obj_den *= p
        g = obj_den
        for v in obj:
            if v:
                g = gcd(g, v)
        if g > 1:
            obj = [v // g for v in obj]
            obj_den //= g
        basis[leave] = enter

    value_num = -obj[-1]
    if value_num == 0:
        sol = [Fraction(0)] * ncols
        for i, b in enumerate(basis):
            if b < ncols:
                sol[b] = Fraction(t[i][-1], t[i][b])
        return sol, None
    # pi_k = 1 - reduced cost of artificial k, undone for flipped rows.
    cert = [
        flips[k] * (1 - Fraction(obj[ncols + k], obj_den)) for k in range(m)
    ]
    return None, cert


def lp_feasible(system: LinearSystem) -> FeasibilityResult:
    """Decide feasibility of ``A x = b, x_v >= lb_v`` exactly."""
    system.validate()
    nvar = len(system.variables)
    # Column map: bounded variable v -> x_v - lb_v >= 0; free v -> x+ - x-.
    cols: list[tuple[int, int]] = []
    for v, lb in enumerate(system.lower_bounds):
        cols.append((v, 1))
        if lb is None:
            cols.append((v, -1))
    rows = []
    for coeffs, rhs in system.equalities:
        shifted = rhs - sum(
            c * lb for c, lb in zip(coeffs, system.lower_bounds) if lb is not None
        )
        expanded = [coeffs[v] * s for v, s in cols]
        rows.append(_row_to_ints(expanded, shifted))
    sol, cert = phase_one(rows)
    if sol is None:
        return FeasibilityResult(False, None, tuple(cert))
    values = [Fraction(0)] * nvar
    for (v, s), val in zip(cols, sol):
        values[v] += s * val
    for v, lb in enumerate(system.lower_bounds):
        if lb is not None:
            values[v] += lb
    if not system.satisfied_by(values):
        raise AssertionError("simplex witness fails its own system")
    return FeasibilityResult(True, dict(zip(system.variables, values)), None)


def check_certificate(system: LinearSystem, cert: Sequence[Fraction]) -> bool:
    """Verify a Farkas certificate of infeasibility exactly."""
    rhs = Fraction(0)
    for y, (coeffs, b) in zip(cert, system.equalities):
        rhs += y * (b - sum(c * lb for c, lb in zip(coeffs, system.lower_bounds) if lb is not None))
    if rhs <= 0:
        return False
    for v, lb in enumerate(system.lower_bounds):
        col = sum(y * coeffs[v] for y, (coeffs, _) in zip(cert, system.equalities))
        if lb is None and col != 0:
            return False
        if lb is not None and col > 0:
            return False
    return True


def open_cone_point(normals: Sequence[Sequence[int]]) -> list[Fraction] | None:
    """Return ``x`` with ``<g, x> >= 1`` for every ``g`` in ``normals``, or None.

    The open cone ``{x : <g, x> > 0}`` is nonempty exactly when the Gordan
    alternative ``{y >= 0 : sum y_g g = 0, sum y_g = 1}`` is infeasible; the
    Farkas certificate of that alternative is the returned point.
    """
    if not normals:
        return None
    d = len(normals[0])
    rows = [[g[k] for g in normals] + [0] for k in range(d)]
    rows.append([1] * len(normals) + [1])
    sol, cert = phase_one(rows)
    if sol is not None:
        return None
    last = cert[d]
    x = [-c / last for c in cert[:d]]
    for g in normals:
        if sum(a * b for a, b in zip(g, x)) < 1:
            raise AssertionError("Gordan certificate does not separate")
    return x
