"""The model's specific objects: triangular q/mu coordinates and their
transforms, the cones they cut out, the dimension functional, and the
piecewise-affine profile functions a coordinate point encodes.

A point of E = R^I (I the triangle {(i,j) : 1 <= i <= j <= d}) is stored
either in q-coordinates (`QPoint`) or mu-coordinates (`MuTriangle`); the
two are exact mutually-inverse linear transforms of one another.  The cone
Q (games I, II, III below) is exactly the image of the valid profile
tuples, and on lattice points the dimension functional computes the
stratum dimension (exactly when h != 0, up to a d(d-1)/2 slack when
h = 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import perm as pm
from .polyhedra import (HPolyhedron, Vec, dot, fmt_frac, frac, parse_frac, vec)


@dataclass(frozen=True)
class KisinInstance:
    """Problem size d, Frobenius exponent base b, and the h = 0 flag that
    switches exact stratum dimensions to intervals of width d(d-1)/2."""

    d: int
    b: int
    h_zero: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.b < 2:
            raise ValueError("b must be >= 2")

    @property
    def b0(self) -> int:
        """Validity threshold 1 + floor((d-1)^2/4) for the extremal-point
        and cone-equality identities."""
        return 1 + (self.d - 1) ** 2 // 4

    @property
    def epsilon_slack(self) -> int:
        """d(d-1)/2 if h = 0, else 0."""
        return self.d * (self.d - 1) // 2 if self.h_zero else 0

    @property
    def cells(self) -> list[tuple[int, int]]:
        return pm.index_set(self.d)

    def cell_index(self, i: int, j: int) -> int:
        if not (1 <= i <= j <= self.d):
            raise KeyError((i, j))
        # row-major position inside the triangle
        return (i - 1) * self.d - (i - 1) * (i - 2) // 2 + (j - i)

    @property
    def dim_E(self) -> int:
        return self.d * (self.d + 1) // 2


class _Triangle:
    """Shared container: one rational per cell of the triangle I."""

    def __init__(self, instance: KisinInstance, values):
        self.instance = instance
        if isinstance(values, dict):
            vals = [frac(values[c]) for c in instance.cells]
        else:
            vals = [frac(v) for v in values]
        if len(vals) != instance.dim_E:
            raise ValueError(f"expected {instance.dim_E} values, got {len(vals)}")
        self.values: Vec = tuple(vals)

    def __getitem__(self, cell):
        i, j = cell
        return self.values[self.instance.cell_index(i, j)]

    def __eq__(self, other):
        return (type(self) is type(other) and self.instance == other.instance
                and self.values == other.values)

    def __hash__(self):
        return hash((type(self).__name__, self.instance, self.values))

    def __repr__(self):
        cells = self.instance.cells
        body = ", ".join(f"{c}: {fmt_frac(v)}" for c, v in zip(cells, self.values))
        return f"{type(self).__name__}({body})"

    def _json_key(self):
        raise NotImplementedError

    def to_json(self) -> str:
        inst = self.instance
        return json.dumps({
            "d": inst.d, "b": inst.b,
            self._json_key(): {f"{i},{j}": fmt_frac(self[(i, j)])
                               for (i, j) in inst.cells},
        }, sort_keys=True)

    @classmethod
    def from_json(cls, s: str, h_zero: bool = False):
        data = json.loads(s)
        inst = KisinInstance(data["d"], data["b"], h_zero)
        key = cls._json_key(cls)  # type: ignore[arg-type]
        vals = {tuple(map(int, k.split(","))): parse_frac(v)
                for k, v in data[key].items()}
        return cls(inst, vals)


class QPoint(_Triangle):
    """A point of E in q-coordinates."""

    def _json_key(self):
        return "q"

    @property
    def q_bottom(self) -> Vec:
        """(q_{1,d}, ..., q_{d,d})... the last-column values q_i = q_{i,d}."""
        return tuple(self[(i, self.instance.d)] for i in range(1, self.instance.d + 1))

    def in_lattice(self) -> bool:
        """q_{i,j} in (1/b)Z for all cells and q_{i,d} in Z."""
        b, d = self.instance.b, self.instance.d
        return (all((v * b).denominator == 1 for v in self.values)
                and all(self[(i, d)].denominator == 1 for i in range(1, d + 1)))


class MuTriangle(_Triangle):
    """A point of E in mu-coordinates; the top row is the elementary-divisor
    exponent vector."""

    def _json_key(self):
        return "mu"

    @property
    def top_row(self) -> Vec:
        return tuple(self[(1, j)] for j in range(1, self.instance.d + 1))

    def in_lattice(self) -> bool:
        """All mu_{i,j} integral and b-1 divides every row sum."""
        b, d = self.instance.b, self.instance.d
        if not all(v.denominator == 1 for v in self.values):
            return False
        for i in range(1, d + 1):
            row = sum(self[(i, j)] for j in range(i, d + 1))
            if row % (b - 1) != 0:
                return False
        return True


# ---------------------------------------------------------------------------
# the linear transforms between the two coordinate systems
# ---------------------------------------------------------------------------

def mu_from_q(q: QPoint) -> MuTriangle:
    """mu_{i,j} = b q_{j,j} - q_{j,d} + b * sum_{s=i}^{j-1} (q_{s,j} - q_{s,j-1})."""
    inst = q.instance
    b, d = inst.b, inst.d
    vals = {}
    for (i, j) in inst.cells:
        v = b * q[(j, j)] - q[(j, d)]
        for s in range(i, j):
            v += b * (q[(s, j)] - q[(s, j - 1)])
        vals[(i, j)] = v
    return MuTriangle(inst, vals)


def q_from_mu(m: MuTriangle) -> QPoint:
    """q_{i,j} = (mu_{i,i} + sum_{s=i+1}^{j}(mu_{i,s}-mu_{i+1,s})
    + sum_{s=j+1}^{d}(mu_{i,s}-mu_{i+1,s})/b) / (b-1)."""
    inst = m.instance
    b, d = inst.b, inst.d
    vals = {}
    for (i, j) in inst.cells:
        v = m[(i, i)]
        for s in range(i + 1, j + 1):
            v += m[(i, s)] - m[(i + 1, s)]
        for s in range(j + 1, d + 1):
            v += Fraction(m[(i, s)] - m[(i + 1, s)], b)
        vals[(i, j)] = v / (b - 1)
    return QPoint(inst, vals)


def mu_cell_vector(inst: KisinInstance, i: int, j: int) -> Vec:
    """The vector v in E with <q, v> = mu_{i,j}(q)."""
    b = inst.b
    coeffs = [Fraction(0)] * inst.dim_E
    coeffs[inst.cell_index(j, j)] += b
    coeffs[inst.cell_index(j, inst.d)] -= 1
    for s in range(i, j):
        coeffs[inst.cell_index(s, j)] += b
        coeffs[inst.cell_index(s, j - 1)] -= b
    return tuple(coeffs)


def mu_vec(inst: KisinInstance, i: int) -> Vec:
    """<q, mu_vec(i)> is the i-th top-row value mu_{1,i}."""
    return mu_cell_vector(inst, 1, i)


def delta_vec(inst: KisinInstance) -> Vec:
    """<q, delta_vec> is dim(phi): coefficient b on every cell plus the
    last-column correction (2i-1-d-bi) on cell (i,d)."""
    b, d = inst.b, inst.d
    coeffs = [Fraction(b)] * inst.dim_E
    for i in range(1, d + 1):
        coeffs[inst.cell_index(i, d)] += 2 * i - 1 - d - b * i
    return tuple(coeffs)


def S_T(x, T, d: int | None = None) -> Fraction:
    """Sum of the coordinates of x over the admissible subset attached to T."""
    if isinstance(x, _Triangle):
        inst = x.instance
        adm = pm.admissible_from_subset(inst.d, T)
        return sum((x[c] for c in adm.cells), Fraction(0))
    if d is None:
        raise ValueError("S_T on a raw vector needs the ambient d")
    inst = KisinInstance(d, 2)
    adm = pm.admissible_from_subset(d, T)
    x = vec(x)
    return sum((x[inst.cell_index(i, j)] for (i, j) in adm.cells), Fraction(0))


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def cone_q(inst: KisinInstance) -> HPolyhedron:
    """The cone Q in E: games I (q_{i,j} >= q_{i,j+1}), II (q_{i,j} <=
    q_{i+1,j+1}) and III (mu_{i,j} >= mu_{i+1,j+1}), over 1 <= i <= j < d."""
    return _cone_from_games(inst, ("I", "II", "III"))


def cone_qmax(inst: KisinInstance) -> HPolyhedron:
    return _cone_from_games(inst, ("I", "II"))


def cone_qmin(inst: KisinInstance) -> HPolyhedron:
    """Game I plus the equalities q_{i,j} = q_{i+1,j+1} (game II')."""
    ineqs = []
    eqs = []
    for a, kind in _game_rows(inst, ("I", "II'")):
        (ineqs if kind == "ineq" else eqs).append((a, Fraction(0)))
    return HPolyhedron.build(inst.dim_E, ineqs, eqs)


def _unit(inst, i, j, c=1):
    v = [Fraction(0)] * inst.dim_E
    v[inst.cell_index(i, j)] = frac(c)
    return tuple(v)


def _game_rows(inst, games):
    d = inst.d
    for i in range(1, d + 1):
        for j in range(i, d):
            if "I" in games:
                a = list(_unit(inst, i, j))
                a[inst.cell_index(i, j + 1)] -= 1
                yield tuple(a), "ineq"
            if "II" in games:
                a = list(_unit(inst, i + 1, j + 1))
                a[inst.cell_index(i, j)] -= 1
                yield tuple(a), "ineq"
            if "II'" in games:
                a = list(_unit(inst, i + 1, j + 1))
                a[inst.cell_index(i, j)] -= 1
                yield tuple(a), "eq"
            if "III" in games:
                u = mu_cell_vector(inst, i, j)
                v = mu_cell_vector(inst, i + 1, j + 1)
                yield tuple(x - y for x, y in zip(u, v)), "ineq"


def _cone_from_games(inst, games):
    ineqs = [(a, Fraction(0)) for a, kind in _game_rows(inst, games)]
    return HPolyhedron.build(inst.dim_E, ineqs)


def cone_chain(d: int) -> HPolyhedron:
    """C = {y in R^d : y_1 >= ... >= y_d}."""
    ineqs = []
    for i in range(d - 1):
        a = [Fraction(0)] * d
        a[i], a[i + 1] = Fraction(1), Fraction(-1)
        ineqs.append((tuple(a), Fraction(0)))
    return HPolyhedron.build(d, ineqs)


def chain_dual_generators(d: int) -> list[Vec]:
    """Generators (0,..,1,-1,..,0) of C* = dual of the chain cone."""
    out = []
    for i in range(d - 1):
        a = [Fraction(0)] * d
        a[i], a[i + 1] = Fraction(1), Fraction(-1)
        out.append(tuple(a))
    return out


def cone_regular(inst: KisinInstance) -> HPolyhedron:
    """Reg = {mu : mu_i - mu_{i+1} <= b (mu_{d-i} - mu_{d-i+1}) for all i}."""
    b, d = inst.b, inst.d
    ineqs = []
    for i in range(1, d):
        a = [Fraction(0)] * d
        a[i - 1] -= 1
        a[i] += 1
        a[d - i - 1] += b
        a[d - i] -= b
        ineqs.append((tuple(a), Fraction(0)))
    return HPolyhedron.build(d, ineqs)


def regular_dual_generators(inst: KisinInstance) -> list[Vec]:
    """Generators b*v_{d-i} - v_i of Reg*, with v_i = e_i - e_{i+1}."""
    b, d = inst.b, inst.d

    def v(i):
        a = [Fraction(0)] * d
        a[i - 1], a[i] = Fraction(1), Fraction(-1)
        return a

    out = []
    for i in range(1, d):
        w = [b * x - y for x, y in zip(v(d - i), v(i))]
        out.append(tuple(w))
    return out


def cone_qw(inst: KisinInstance, w: pm.Permutation) -> HPolyhedron:
    """The graph cone attached to w: q is constant on each level set
    T_s(w) = {w*(1..s)} and nondecreasing along the chain.  Its dual-side
    A-set has apex rho_w; for w = w0 this cone is exactly Q_min."""
    if w.d != inst.d:
        raise ValueError("permutation size must match d")
    tab = pm.ord_tableau(pm.w_star(w))
    ineqs = []
    d = inst.d
    cells = inst.cells
    for x in cells:
        for y in cells:
            if x != y and tab[x] >= tab[y]:
                a = list(_unit(inst, *x))
                a[inst.cell_index(*y)] -= 1
                ineqs.append((tuple(a), Fraction(0)))
    return HPolyhedron.build(inst.dim_E, ineqs)


def build_cones(inst: KisinInstance) -> dict:
    """All the standing cones plus the lattice membership predicates."""
    return {
        "Q": cone_q(inst),
        "Q_max": cone_qmax(inst),
        "Q_min": cone_qmin(inst),
        "C": cone_chain(inst.d),
        "Reg": cone_regular(inst),
        "lattice_q": lambda q: q.in_lattice(),
        "lattice_mu": lambda m: m.in_lattice(),
    }


# ---------------------------------------------------------------------------
# the dimension functional
# ---------------------------------------------------------------------------

def dim_phi(x: QPoint | MuTriangle) -> Fraction:
    """dim(phi) evaluated in both coordinate systems (cross-checked).

    mu-form: sum_j (d+1-j) mu_{1,j} - sum_{(i,j)} mu_{i,j};
    q-form:  b * sum q_{i,j} + sum_i (2i-1-d-bi) q_{i,d}.
    """
    if isinstance(x, QPoint):
        q, m = x, mu_from_q(x)
    else:
        m, q = x, q_from_mu(x)
    inst = q.instance
    d = inst.d
    mu_form = sum(((d + 1 - j) * m[(1, j)] for j in range(1, d + 1)), Fraction(0)) \
        - sum(m.values, Fraction(0))
    q_form = dot(delta_vec(inst), q.values)
    if mu_form != q_form:
        raise AssertionError("dimension functional mismatch between coordinates")
    return mu_form


# ---------------------------------------------------------------------------
# piecewise-affine profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiFunctions:
    """The d-tuple phi (slope b) and companion tuple psi (slope 1/b), stored
    by their breakpoints: phi_pieces[i-1] = [(q_{i,j}, mu_{i,j}) for j = d..i],
    psi_pieces[j-1] = [(mu_{i,j}, q_{i,j}) for i = 1..j]."""

    instance: KisinInstance
    phi_pieces: tuple[tuple[tuple[Fraction, Fraction], ...], ...]
    psi_pieces: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def phi(self, i: int, x) -> Fraction | None:
        """phi_i(x); None encodes -infinity."""
        x = frac(x)
        b = self.instance.b
        pieces = self.phi_pieces[i - 1]
        if x < pieces[0][0]:
            return None
        val = None
        for (brk, level) in pieces:
            if x >= brk:
                val = b * (x - brk) + level
        return val

    def psi(self, j: int, m) -> Fraction | None:
        m = frac(m)
        b = self.instance.b
        pieces = self.psi_pieces[j - 1]
        if m < pieces[0][0]:
            return None
        val = None
        for (brk, level) in pieces:
            if m >= brk:
                val = Fraction(m - brk, b) + level
        return val

    @property
    def q_starts(self) -> Vec:
        """q_i = q_{i,d}: where each phi_i becomes finite."""
        return tuple(p[0][0] for p in self.phi_pieces)

    @property
    def mu_starts(self) -> Vec:
        """mu_j = mu_{1,j}: where each psi_j becomes finite."""
        return tuple(p[0][0] for p in self.psi_pieces)


def phi_from_q(q: QPoint) -> PhiFunctions:
    """The profile tuple encoded by q (q must lie in Q)."""
    inst = q.instance
    if not cone_q(inst).contains(q.values):
        raise ValueError("point is not in the cone Q")
    m = mu_from_q(q)
    d = inst.d
    phi_pieces = tuple(
        tuple(sorted(((q[(i, j)], m[(i, j)]) for j in range(i, d + 1))))
        for i in range(1, d + 1))
    psi_pieces = tuple(
        tuple(sorted(((m[(i, j)], q[(i, j)]) for i in range(1, j + 1))))
        for j in range(1, d + 1))
    return PhiFunctions(inst, phi_pieces, psi_pieces)


def _grid(p: PhiFunctions):
    pts = set()
    for pieces in p.phi_pieces:
        pts.update(brk for brk, _ in pieces)
    pts = sorted(pts)
    # midpoints and flanks exercise the open parts of the pieces
    grid = set(pts)
    for a, b_ in zip(pts, pts[1:]):
        grid.add(Fraction(a + b_, 2))
    if pts:
        grid.add(pts[0] - 1)
        grid.add(pts[-1] + 1)
    return sorted(grid)


def validate_phi(p: PhiFunctions) -> bool:
    """Check the defining conditions of a valid profile tuple: the phi_i are
    sorted decreasingly and strictly increasing where finite, each is
    eventually x -> bx - q_i, and at every (x, mu) the number of i with
    phi_i(x) = mu equals the number of j with psi_j(mu) = x."""
    inst = p.instance
    d, b = inst.d, inst.b
    grid = _grid(p)
    for x, y in zip(grid, grid[1:]):
        for i in range(1, d + 1):
            vx, vy = p.phi(i, x), p.phi(i, y)
            if vx is not None and (vy is None or vy <= vx):
                return False  # not strictly increasing
            if i < d:
                hi, lo = p.phi(i, x), p.phi(i + 1, x)
                if lo is not None and (hi is None or hi < lo):
                    return False  # not sorted decreasingly
    # eventual form bx - q_i and matching multiplicities at breakpoints
    for i in range(1, d + 1):
        pieces = p.phi_pieces[i - 1]
        top_brk, top_level = pieces[-1]
        start = pieces[0][0]
        if top_level != b * top_brk - start:
            return False
    xs = sorted({brk for pieces in p.phi_pieces for brk, _ in pieces})
    for x in xs:
        mus = [p.phi(i, x) for i in range(1, d + 1)]
        for m in {v for v in mus if v is not None}:
            count_phi = sum(1 for v in mus if v == m)
            count_psi = sum(1 for j in range(1, d + 1) if p.psi(j, m) == x)
            if count_phi != count_psi:
                return False
    return True


def read_back_q(p: PhiFunctions) -> QPoint:
    """Recover the coordinates from the functions alone: q_{i,j} is the least
    x with psi_j(phi_i(x)) >= x, evaluated over the (finite) set of critical
    points.  Valid off the multiplicity locus (phi_1 > ... > phi_d)."""
    inst = p.instance
    d = inst.d
    candidates = set()
    for pieces in p.phi_pieces:
        candidates.update(brk for brk, _ in pieces)
    for i in range(1, d + 1):
        # preimages under phi_i of the psi breakpoints
        for pieces in p.psi_pieces:
            for brk, _ in pieces:
                x = _phi_preimage(p, i, brk)
                if x is not None:
                    candidates.add(x)
    xs = sorted(candidates)
    vals = {}
    for i in range(1, d + 1):
        for j in range(i, d + 1):
            found = None
            for x in xs:
                v = p.phi(i, x)
                if v is None:
                    continue
                s = p.psi(j, v)
                if s is not None and s >= x:
                    found = x
                    break
            if found is None:
                raise AssertionError(f"no crossing point for ({i},{j})")
            vals[(i, j)] = found
    return QPoint(inst, vals)


def _phi_preimage(p: PhiFunctions, i: int, value: Fraction):
    """The x with phi_i(x) = value, if any (phi_i is injective where finite)."""
    b = p.instance.b
    pieces = p.phi_pieces[i - 1]
    for k, (brk, level) in enumerate(pieces):
        x = brk + Fraction(value - level, b)
        if x < brk:
            continue
        upper = pieces[k + 1][0] if k + 1 < len(pieces) else None
        if upper is None or x < upper:
            if p.phi(i, x) == value:
                return x
    return None


# ---------------------------------------------------------------------------
# the d = 2 lattice oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class D2LatticeData:
    """Profile data of the rank-2 lattice spanned by (u^alpha, 0) and
    (u^gamma, u^delta), in the regime gamma < delta < alpha."""

    instance: KisinInstance
    alpha: int
    gamma: int
    delta: int
    mu1: int
    mu2: int
    profile: PhiFunctions

    def phi1(self, v):
        return self.profile.phi(1, v)

    def phi2(self, v):
        return self.profile.phi(2, v)

    def psi1(self, m):
        return self.profile.psi(1, m)

    def psi2(self, m):
        return self.profile.psi(2, m)


def d2_lattice_invariants(alpha: int, gamma: int, delta: int, b: int) -> D2LatticeData:
    """Closed-form profile functions and elementary-divisor exponents for the
    d = 2 lattice family with gamma < delta < alpha.

    phi_1 is -inf below gamma, bv - alpha up to alpha + (b-1)(delta-gamma)/b,
    then bv - gamma; phi_2 is -inf below alpha + delta - gamma, then
    bv - alpha + gamma - delta; psi_2 has its middle breakpoint at
    (b-1)(alpha + delta - gamma).
    """
    if not (gamma < delta < alpha):
        raise ValueError("the closed forms require gamma < delta < alpha")
    inst = KisinInstance(2, b)
    mu1 = b * (alpha + delta - gamma) - delta
    mu2 = b * gamma - alpha
    q11 = frac(alpha) + Fraction((b - 1) * (delta - gamma), b)
    q = QPoint(inst, {(1, 1): q11, (1, 2): frac(gamma), (2, 2): frac(alpha + delta - gamma)})
    prof = phi_from_q(q)
    # cross-check the generic pieces against the closed forms
    m = mu_from_q(q)
    assert m[(1, 1)] == mu1 and m[(1, 2)] == mu2
    assert m[(2, 2)] == (b - 1) * (alpha + delta - gamma)
    return D2LatticeData(inst, alpha, gamma, delta, mu1, mu2, prof)
