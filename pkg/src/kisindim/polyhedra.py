"""Exact-rational linear algebra and polyhedral geometry.

Everything here computes over `fractions.Fraction`; there is no floating
point anywhere in this module.  Polyhedra come in two representations:

- `HPolyhedron`: a finite list of halfspaces ``<a, x> >= c`` and equations
  ``<a, x> = c``;
- `VPolyhedron`: vertices, recession-cone rays and (rarely) lines.

Conversion in both directions goes through the double description method
on a homogenizing cone, with the lineality space split off first so that
the incremental step only ever runs on pointed cones.  Output is always
minimal and sorted lexicographically, which makes results deterministic
and directly comparable as exact sets.

The module also carries a max-flow solver on rational capacities (with an
infinity sentinel) and the two dual-membership oracles for graph cones
that it certifies.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]

INF = None  # capacity sentinel: +infinity


# ---------------------------------------------------------------------------
# small exact linear algebra
# ---------------------------------------------------------------------------

def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(xs) -> Vec:
    return tuple(frac(x) for x in xs)


def dot(u: Vec, v: Vec) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in v)


def is_zero(v: Vec) -> bool:
    return all(a == 0 for a in v)


def normalize_ray(v: Vec) -> Vec:
    """Scale by a positive rational so entries are coprime integers."""
    den = 1
    for a in v:
        den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(a // g) for a in ints)


def normalize_line(v: Vec) -> Vec:
    """Like normalize_ray but with a canonical sign (first nonzero > 0)."""
    w = normalize_ray(v)
    for a in w:
        if a != 0:
            return w if a > 0 else tuple(-x for x in w)
    return w


def rref(rows: list[Vec], n: int) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def nullspace(rows: list[Vec], n: int) -> list[Vec]:
    """Basis of {x : <r, x> = 0 for all rows r}."""
    red, pivots = rref(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def rank(rows: list[Vec], n: int) -> int:
    return len(rref(rows, n)[0])


def solve(rows: list[Vec], rhs: list[Fraction], n: int) -> Vec | None:
    """One solution of the linear system, or None if inconsistent."""
    aug = [tuple(list(r) + [b]) for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return tuple(x)


def mat_vec(rows: list[Vec], x: Vec) -> Vec:
    return tuple(dot(r, x) for r in rows)


# ---------------------------------------------------------------------------
# rational formatting ("p/q", lowest terms, q > 0; integers print bare)
# ---------------------------------------------------------------------------

def fmt_frac(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


# ---------------------------------------------------------------------------
# polyhedron types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Halfspace:
    """``<normal, x> >= offset`` (or ``=`` when is_eq)."""

    normal: Vec
    offset: Fraction = Fraction(0)
    is_eq: bool = False

    def __post_init__(self):
        object.__setattr__(self, "normal", vec(self.normal))
        object.__setattr__(self, "offset", frac(self.offset))
        if not self.is_eq and is_zero(self.normal):
            raise ValueError("inequality with zero normal")

    def holds(self, x: Vec) -> bool:
        v = dot(self.normal, x)
        return v == self.offset if self.is_eq else v >= self.offset


@dataclass(frozen=True)
class HPolyhedron:
    dim: int
    halfspaces: tuple[Halfspace, ...]

    @staticmethod
    def build(dim, ineqs=(), eqs=()):
        """ineqs/eqs are (normal, offset) pairs; offset defaults to 0."""
        hs = []
        for item in ineqs:
            a, c = _split(item)
            hs.append(Halfspace(a, c))
        for item in eqs:
            a, c = _split(item)
            hs.append(Halfspace(a, c, is_eq=True))
        return HPolyhedron(dim, tuple(hs))

    @property
    def ineqs(self):
        return [h for h in self.halfspaces if not h.is_eq]

    @property
    def eqs(self):
        return [h for h in self.halfspaces if h.is_eq]

    def contains(self, x: Vec) -> bool:
        x = vec(x)
        if len(x) != self.dim:
            raise ValueError(f"point of dimension {len(x)} in R^{self.dim}")
        return all(h.holds(x) for h in self.halfspaces)

    def contains_ray(self, r: Vec) -> bool:
        """Is r in the recession cone?"""
        r = vec(r)
        for h in self.halfspaces:
            v = dot(h.normal, r)
            if (h.is_eq and v != 0) or (not h.is_eq and v < 0):
                return False
        return True

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return HPolyhedron(self.dim, self.halfspaces + other.halfspaces)

    def translate(self, p: Vec) -> "HPolyhedron":
        """The translate P + p."""
        p = vec(p)
        return HPolyhedron(self.dim, tuple(
            Halfspace(h.normal, h.offset + dot(h.normal, p), h.is_eq)
            for h in self.halfspaces))

    def to_json(self) -> str:
        return json.dumps({
            "dim": self.dim,
            "ineqs": [[fmt_frac(a) for a in h.normal] + [fmt_frac(h.offset)]
                      for h in self.ineqs],
            "eqs": [[fmt_frac(a) for a in h.normal] + [fmt_frac(h.offset)]
                    for h in self.eqs],
        }, sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "HPolyhedron":
        d = json.loads(s)
        ineqs = [(vec(map(parse_frac, row[:-1])), parse_frac(row[-1])) for row in d["ineqs"]]
        eqs = [(vec(map(parse_frac, row[:-1])), parse_frac(row[-1])) for row in d["eqs"]]
        return HPolyhedron.build(d["dim"], ineqs, eqs)


def _split(item):
    if isinstance(item, Halfspace):
        return item.normal, item.offset
    if len(item) == 2 and not isinstance(item[1], (tuple, list)):
        try:
            return vec(item[0]), frac(item[1])
        except TypeError:
            pass
    return vec(item), Fraction(0)


@dataclass(frozen=True)
class VPolyhedron:
    """conv(vertices) + cone(rays) + span(lines); minimal and sorted."""

    dim: int
    vertices: tuple[Vec, ...]
    rays: tuple[Vec, ...]
    lines: tuple[Vec, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def to_json(self) -> str:
        out = {
            "vertices": [[fmt_frac(a) for a in v] for v in self.vertices],
            "rays": [[fmt_frac(a) for a in r] for r in self.rays],
        }
        if self.lines:
            out["lines"] = [[fmt_frac(a) for a in l] for l in self.lines]
        return json.dumps(out, sort_keys=True)

    @staticmethod
    def from_json(s: str, dim: int | None = None) -> "VPolyhedron":
        d = json.loads(s)
        vs = tuple(vec(map(parse_frac, v)) for v in d["vertices"])
        rs = tuple(vec(map(parse_frac, r)) for r in d["rays"])
        ls = tuple(vec(map(parse_frac, l)) for l in d.get("lines", []))
        if dim is None:
            dim = len(vs[0]) if vs else (len(rs[0]) if rs else 0)
        return VPolyhedron(dim, vs, rs, ls)


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------

def _initial_simplicial(rows: list[Vec], n: int) -> tuple[list[int], list[Vec]]:
    """Pick n independent rows and return their indices and the rays of the
    cone they cut out (columns of the inverse matrix)."""
    chosen: list[int] = []
    basis: list[Vec] = []
    for i, r in enumerate(rows):
        if rank(basis + [r], n) > len(basis):
            chosen.append(i)
            basis.append(r)
            if len(basis) == n:
                break
    if len(basis) < n:
        raise ValueError("constraint matrix not full rank (cone not pointed)")
    cols = []
    for j in range(n):
        rhs = [Fraction(1) if k == j else Fraction(0) for k in range(n)]
        cols.append(solve(basis, rhs, n))
    return chosen, [normalize_ray(c) for c in cols]


def _extreme_rays_pointed(rows: list[Vec], n: int) -> list[Vec]:
    """Extreme rays of the pointed full-dimensional cone {x : <r,x> >= 0}.

    Incremental double description with the combinatorial adjacency test.
    """
    if n == 0:
        return []
    chosen, rays = _initial_simplicial(rows, n)
    processed = list(chosen)
    # zero sets over processed constraints, as bitmasks
    zsets = []
    for r in rays:
        m = 0
        for k, idx in enumerate(processed):
            if dot(rows[idx], r) == 0:
                m |= 1 << k
        zsets.append(m)
    for idx in range(len(rows)):
        if idx in chosen:
            continue
        a = rows[idx]
        vals = [dot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            bit = 1 << len(processed)
            zsets = [z | bit if v == 0 else z for z, v in zip(zsets, vals)]
            processed.append(idx)
            rays = rays  # unchanged
            continue
        pos = [i for i, v in enumerate(vals) if v > 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new_rays: list[Vec] = [rays[i] for i in pos + zer]
        new_z: list[int] = [zsets[i] for i in pos + zer]
        for p in pos:
            for m in neg:
                common = zsets[p] & zsets[m]
                # an edge of a pointed n-cone lies on >= n-2 of the
                # processed constraints; cheap necessary test first
                if common.bit_count() < n - 2:
                    continue
                # adjacency: no third ray's zero set contains the common one
                adjacent = True
                for q in range(len(rays)):
                    if q != p and q != m and (zsets[q] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = normalize_ray(vsub(vscale(vals[p], rays[m]), vscale(vals[m], rays[p])))
                new_rays.append(r)
                new_z.append(common)
        bit = 1 << len(processed)
        processed.append(idx)
        zsets = []
        for r, z in zip(new_rays, new_z):
            if dot(a, r) == 0:
                z |= bit
            zsets.append(z)
        rays = new_rays
    return sorted(set(rays))


def cone_generators(ineqs: list[Vec], eqs: list[Vec], n: int) -> tuple[list[Vec], list[Vec]]:
    """Minimal (lines, rays) generating {x : <a,x> >= 0, <e,x> = 0}."""
    ineqs = [vec(a) for a in ineqs]
    eqs = [vec(e) for e in eqs]
    # restrict to the equation subspace: x = N u
    N = nullspace(eqs, n) if eqs else [tuple(Fraction(1 if i == j else 0) for j in range(n))
                                       for i in range(n)]
    if not N:
        return [], []
    k = len(N)
    A = [tuple(dot(a, col) for col in N) for a in ineqs]
    A = [r for r in A if not is_zero(r)]
    # lineality of the restricted cone
    L = nullspace(A, k)
    lines = [normalize_line(_combine(N, u)) for u in L]
    if not A:
        return sorted(set(lines)), []
    # quotient out the lineality: parametrize u = W^T t with W = rowspace(A)
    W, _ = rref(A, k)
    r = len(W)
    if r == 0:
        return sorted(set(lines)), []
    A2 = [tuple(dot(a, w) for w in W) for a in A]
    rays2 = _extreme_rays_pointed(A2, r)
    rays = []
    for t in rays2:
        u = tuple(sum((t[i] * W[i][j] for i in range(r)), Fraction(0)) for j in range(k))
        rays.append(normalize_ray(_combine(N, u)))
    return sorted(set(lines)), sorted(set(rays))


def _combine(basis: list[Vec], coeffs: Vec) -> Vec:
    n = len(basis[0])
    out = [Fraction(0)] * n
    for c, b in zip(coeffs, basis):
        if c != 0:
            for j in range(n):
                out[j] += c * b[j]
    return tuple(out)


def enumerate_vertices(P: HPolyhedron) -> VPolyhedron:
    """Exact minimal V-representation; empty lists when P is empty."""
    n = P.dim
    hom_ineqs = [tuple(list(h.normal) + [-h.offset]) for h in P.ineqs]
    hom_ineqs.append(tuple([Fraction(0)] * n + [Fraction(1)]))  # t >= 0
    hom_eqs = [tuple(list(h.normal) + [-h.offset]) for h in P.eqs]
    lines, rays = cone_generators(hom_ineqs, hom_eqs, n + 1)
    assert all(l[n] == 0 for l in lines)
    verts = []
    vrays = []
    for r in rays:
        if r[n] > 0:
            verts.append(tuple(a / r[n] for a in r[:n]))
        else:
            vrays.append(normalize_ray(r[:n]))
    vlines = [normalize_line(l[:n]) for l in lines]
    if not verts:
        return VPolyhedron(n, (), (), ())
    return VPolyhedron(n, tuple(sorted(verts)), tuple(sorted(vrays)), tuple(sorted(vlines)))


def cone_hull(rays: list[Vec], lines: list[Vec], n: int) -> HPolyhedron:
    """Minimal H-representation of cone(rays) + span(lines)."""
    dlines, drays = cone_generators([vec(r) for r in rays], [vec(l) for l in lines], n)
    ineqs = [(r, Fraction(0)) for r in drays]
    eqs = [(l, Fraction(0)) for l in dlines]
    return HPolyhedron.build(n, ineqs, eqs)


def v_to_h(V: VPolyhedron) -> HPolyhedron:
    """H-representation of a nonempty V-polyhedron."""
    if V.is_empty:
        raise ValueError("cannot convert the empty polyhedron to halfspaces")
    n = V.dim
    gens = [tuple(list(v) + [Fraction(1)]) for v in V.vertices]
    gens += [tuple(list(r) + [Fraction(0)]) for r in V.rays]
    glines = [tuple(list(l) + [Fraction(0)]) for l in V.lines]
    H = cone_hull(gens, glines, n + 1)
    ineqs = []
    eqs = []
    for h in H.ineqs:
        a, a0 = h.normal[:n], h.normal[n]
        if is_zero(a):
            continue  # the trivial t >= 0 facet
        ineqs.append((a, -a0))
    for h in H.eqs:
        a, a0 = h.normal[:n], h.normal[n]
        if is_zero(a):
            if a0 != 0:
                raise AssertionError("inconsistent homogenization")
            continue
        eqs.append((a, -a0))
    return HPolyhedron.build(n, ineqs, eqs)


def dual_cone(generators: list[Vec], dim: int) -> HPolyhedron:
    """{x : <x, g> >= 0 for every generator g}."""
    gens = [vec(g) for g in generators]
    return HPolyhedron.build(dim, [(g, 0) for g in gens if not is_zero(g)])


def dual_cone_h(P: HPolyhedron) -> tuple[list[Vec], list[Vec]]:
    """Generators (lines, rays) of the dual of a cone given by halfspaces
    through the origin: the dual is generated by the inequality normals
    plus +-(equation normals)."""
    for h in P.halfspaces:
        if h.offset != 0:
            raise ValueError("dual_cone_h expects a cone through the origin")
    rays = [h.normal for h in P.ineqs]
    lines = [h.normal for h in P.eqs]
    return lines, rays


def polyhedra_set_equal(P: HPolyhedron, Q: HPolyhedron) -> bool:
    """Exact set equality via mutual containment of V-representations."""
    VP, VQ = enumerate_vertices(P), enumerate_vertices(Q)
    return _v_inside_h(VP, Q) and _v_inside_h(VQ, P)


def _v_inside_h(V: VPolyhedron, H: HPolyhedron) -> bool:
    if V.is_empty:
        return enumerate_vertices(H).is_empty
    return (all(H.contains(v) for v in V.vertices)
            and all(H.contains_ray(r) for r in V.rays)
            and all(H.contains_ray(l) and H.contains_ray(vscale(-1, l)) for l in V.lines))


# ---------------------------------------------------------------------------
# exact LP feasibility (cone membership) and extreme-point filtering
# ---------------------------------------------------------------------------

def _int_rows(vectors: list[Vec]) -> list[list[int]]:
    """Scale each vector by a positive rational to a primitive integer row."""
    out = []
    for v in vectors:
        den = 1
        for a in v:
            den = den * a.denominator // gcd(den, a.denominator)
        ints = [int(a * den) for a in v]
        g = 0
        for a in ints:
            g = gcd(g, abs(a))
        out.append([a // (g or 1) for a in ints])
    return out


def in_cone(generators: list[Vec], target: Vec) -> bool:
    """Is target a nonnegative combination of the generators?

    Phase-1 simplex with Bland's rule.  Rows are kept as integer vectors
    (positive rescaling preserves both feasibility and the Bland order),
    the ratio test cross-multiplies, so no rational arithmetic is needed.
    """
    n = len(target)
    gens = _int_rows([vec(g) for g in generators])
    tgt = _int_rows([vec(target)])[0]
    m = len(gens)
    # flip equation signs so the rhs is nonnegative
    tab = []
    for i in range(n):
        s = -1 if tgt[i] < 0 else 1
        tab.append([s * g[i] for g in gens]
                   + [1 if j == i else 0 for j in range(n)] + [s * tgt[i]])
    basis = [m + i for i in range(n)]
    # reduced-cost row for minimizing the sum of artificials (which start
    # out basic, hence with reduced cost 0)
    cost = [0] * (m + n + 1)
    for i in range(n):
        for j in range(m + n + 1):
            cost[j] += tab[i][j]
    for j in range(m, m + n):
        cost[j] -= 1
    while True:
        enter = next((j for j in range(m + n) if cost[j] > 0), None)
        if enter is None:
            break
        leave = None
        for i in range(n):
            t = tab[i][enter]
            if t <= 0:
                continue
            if leave is None:
                leave = i
                continue
            lhs = tab[i][m + n] * tab[leave][enter]
            rhs = tab[leave][m + n] * t
            if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                leave = i
        if leave is None:
            raise AssertionError("phase-1 unbounded")
        piv = tab[leave][enter]
        for i in range(n):
            if i == leave or tab[i][enter] == 0:
                continue
            f = tab[i][enter]
            row = [piv * x - f * y for x, y in zip(tab[i], tab[leave])]
            g = 0
            for x in row:
                g = gcd(g, abs(x))
            if g > 1:
                row = [x // g for x in row]
            tab[i] = row
        f = cost[enter]
        cost = [piv * x - f * y for x, y in zip(cost, tab[leave])]
        g = 0
        for x in cost:
            g = gcd(g, abs(x))
        if g > 1:
            cost = [x // g for x in cost]
        g = 0
        for x in tab[leave]:
            g = gcd(g, abs(x))
        if g > 1:
            tab[leave] = [x // g for x in tab[leave]]
        basis[leave] = enter
    return cost[m + n] == 0


def extreme_points_of_sum(V: VPolyhedron, extra_rays: list[Vec]) -> list[Vec]:
    """Extreme points of conv(V.vertices) + cone(V.rays + extra_rays).

    A vertex of the sum is always one of V.vertices; each candidate is kept
    iff it is not a convex combination of the others plus the cone.  A cheap
    pairwise domination test (v = u + ray) prunes before the exact LPs.
    """
    if V.lines:
        raise ValueError("summand with lines has no extreme points")
    rays = sorted(set(tuple(normalize_ray(vec(r))) for r in list(V.rays) + list(extra_rays))
                  - {tuple(Fraction(0) for _ in range(V.dim))})
    verts = list(V.vertices)
    n = V.dim
    cone_h = cone_hull(rays, [], n) if rays else None
    # profile of each vertex against the recession cone facets
    if cone_h is not None:
        ins = [h.normal for h in cone_h.ineqs]
        eqs = [h.normal for h in cone_h.eqs]
        prof = [(tuple(dot(a, v) for a in ins), tuple(dot(a, v) for a in eqs)) for v in verts]
    alive = [True] * len(verts)
    if cone_h is not None:
        for i in range(len(verts)):
            if not alive[i]:
                continue
            for j in range(len(verts)):
                if i == j or not alive[j]:
                    continue
                # verts[i] = verts[j] + c with c in the cone kills i
                if (prof[i][1] == prof[j][1]
                        and all(x >= y for x, y in zip(prof[i][0], prof[j][0]))):
                    alive[i] = False
                    break
    hom_rays = [tuple(list(r) + [Fraction(0)]) for r in rays]
    out = []
    for i, v in enumerate(verts):
        if not alive[i]:
            continue
        # pruned vertices are cone-translates of survivors, so the
        # survivors alone generate the same sum
        gens = [tuple(list(u) + [Fraction(1)]) for k, u in enumerate(verts)
                if k != i and alive[k]] + hom_rays
        if not gens or not in_cone(gens, tuple(list(v) + [Fraction(1)])):
            out.append(v)
    return sorted(out)


def minkowski_sum_cone(P: HPolyhedron | VPolyhedron, cone_gens: list[Vec]) -> HPolyhedron:
    """H-representation of P + cone(cone_gens)."""
    V = P if isinstance(P, VPolyhedron) else enumerate_vertices(P)
    if V.is_empty:
        raise ValueError("Minkowski sum with the empty polyhedron")
    gens = [normalize_ray(vec(g)) for g in cone_gens]
    gens = [g for g in gens if not is_zero(g)]
    return v_to_h(VPolyhedron(V.dim, V.vertices, tuple(sorted(set(list(V.rays) + gens))), V.lines))


# ---------------------------------------------------------------------------
# max flow / min cut on rational capacities
# ---------------------------------------------------------------------------

@dataclass
class FlowNetwork:
    """Finite directed graph with a source, a sink and rational capacities.

    Capacities are nonnegative `Fraction`s, or the sentinel `INF` (None) for
    +infinity.  Parallel edges are allowed.
    """

    source: object
    sink: object
    edges: list[tuple[object, object, Fraction | None]] = field(default_factory=list)

    def __post_init__(self):
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        norm = []
        for u, v, c in self.edges:
            if c is not INF:
                c = frac(c)
                if c < 0:
                    raise ValueError("negative capacity")
            norm.append((u, v, c))
        self.edges = norm

    def add_edge(self, u, v, c):
        if c is not INF:
            c = frac(c)
            if c < 0:
                raise ValueError("negative capacity")
        self.edges.append((u, v, c))

    def nodes(self):
        seen = {self.source, self.sink}
        for u, v, _ in self.edges:
            seen.add(u)
            seen.add(v)
        return seen


def maxflow(net: FlowNetwork):
    """Edmonds-Karp.  Returns (value, flow) where flow maps edge index to the
    rational flow on that edge; value may be `math.inf` only when an all-
    infinite augmenting path exists."""
    import math

    m = len(net.edges)
    # residual arcs: 2 per edge (forward i, backward i+m)
    cap = [c for _, _, c in net.edges] + [Fraction(0)] * m
    flow = [Fraction(0)] * (2 * m)
    out: dict[object, list[int]] = {}
    for i, (u, v, _) in enumerate(net.edges):
        out.setdefault(u, []).append(i)
        out.setdefault(v, []).append(i + m)
    head = [v for _, v, _ in net.edges] + [u for u, _, _ in net.edges]

    def residual(i):
        return INF if cap[i] is INF else cap[i] - flow[i]

    total = Fraction(0)
    while True:
        # BFS for a shortest augmenting path
        prev = {net.source: None}
        queue = deque([net.source])
        while queue and net.sink not in prev:
            u = queue.popleft()
            for i in out.get(u, []):
                r = residual(i)
                if (r is INF or r > 0) and head[i] not in prev:
                    prev[head[i]] = i
                    queue.append(head[i])
        if net.sink not in prev:
            break
        # bottleneck
        bottleneck = INF
        v = net.sink
        while prev[v] is not None:
            i = prev[v]
            r = residual(i)
            if r is not INF and (bottleneck is INF or r < bottleneck):
                bottleneck = r
            v = net.edges[i][0] if i < m else net.edges[i - m][1]
        if bottleneck is INF:
            return math.inf, {}
        v = net.sink
        while prev[v] is not None:
            i = prev[v]
            j = i + m if i < m else i - m
            flow[i] += bottleneck
            flow[j] -= bottleneck
            v = net.edges[i][0] if i < m else net.edges[i - m][1]
        total += bottleneck
    return total, {i: flow[i] for i in range(m)}


def min_cut_exhaustive(net: FlowNetwork):
    """Oracle: minimum cut capacity over all 2^|S| cuts (use on tiny graphs).

    Any cut containing an infinite edge counts as infinite.
    """
    import math
    from itertools import combinations

    others = sorted(net.nodes() - {net.source, net.sink}, key=repr)
    best = None
    for k in range(len(others) + 1):
        for sub in combinations(others, k):
            side = set(sub) | {net.source}
            total = Fraction(0)
            infinite = False
            for u, v, c in net.edges:
                if u in side and v not in side:
                    if c is INF:
                        infinite = True
                        break
                    total += c
            val = math.inf if infinite else total
            if best is None or val < best:
                best = val
    return best


# ---------------------------------------------------------------------------
# graph cones and their dual-membership oracles
# ---------------------------------------------------------------------------

def admissible_vertex_subsets(nodes: list, arcs: list[tuple]) -> list[frozenset]:
    """Subsets S' closed under outgoing arcs (every arc from S' stays in S')."""
    from itertools import combinations

    nodes = list(nodes)
    out = []
    for k in range(len(nodes) + 1):
        for sub in combinations(nodes, k):
            s = frozenset(sub)
            if all(not (u in s and v not in s) for u, v in arcs):
                out.append(s)
    return out


def graph_cone_dual_membership(nodes: list, arcs: list[tuple], x: dict,
                               method: str = "both") -> bool:
    """Membership of x in the dual of the cone {y : y_v <= y_u per arc u->v}.

    method: "subsets" enumerates admissible vertex subsets, "flow" runs the
    max-flow construction, "both" runs the two and insists they agree.
    """
    nodes = list(nodes)
    xs = {s: frac(x[s]) for s in nodes}
    if sum(xs.values()) != 0:
        return False

    def by_subsets():
        return all(sum((xs[s] for s in sub), Fraction(0)) <= 0
                   for sub in admissible_vertex_subsets(nodes, arcs))

    def by_flow():
        big = max((abs(v) for v in xs.values()), default=Fraction(0)) + 1
        src, snk = ("__D__",), ("__A__",)
        net = FlowNetwork(src, snk)
        for u, v in arcs:
            net.add_edge(u, v, INF)
        for s in nodes:
            net.add_edge(src, s, xs[s] + big)
            net.add_edge(s, snk, big)
        value, _ = maxflow(net)
        return value == big * len(nodes)

    if method == "subsets":
        return by_subsets()
    if method == "flow":
        return by_flow()
    a, b = by_subsets(), by_flow()
    if a != b:
        raise AssertionError(f"dual membership oracles disagree: subsets={a} flow={b}")
    return a
