"""Permutation combinatorics for the cone machinery.

Permutations act on {1, ..., d} and are stored in one-line notation
(1-indexed throughout).  Besides the usual group operations this module
carries the pieces the dimension bounds are built from: records, the
losers' permutation, the triangular ord tableau and its admissible level
sets, the twisted half-sum vectors rho_w, and the partial order on S_d
defined by lexicographic comparison of iterated prefix sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _itertools_permutations
from math import gcd

from .polyhedra import Vec, frac


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..d} in one-line notation: images[i-1] = w(i).

    >>> w = Permutation((3, 2, 4, 5, 1))
    >>> w(1), w(5)
    (3, 1)
    >>> w.inverse()(3)
    1
    """

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        d = len(self.images)
        if sorted(self.images) != list(range(1, d + 1)):
            raise ValueError(f"not a permutation of 1..{d}: {self.images}")

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __iter__(self):
        return iter(self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.d
        for i, y in enumerate(self.images, start=1):
            inv[y - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.d + 1)))

    def power(self, n: int) -> "Permutation":
        out = identity(self.d)
        base = self
        while n:
            if n & 1:
                out = out.compose(base)
            base = base.compose(base)
            n >>= 1
        return out

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.d
        out = []
        for start in range(1, self.d + 1):
            if seen[start - 1]:
                continue
            cyc = []
            i = start
            while not seen[i - 1]:
                seen[i - 1] = True
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        out = 1
        for c in self.cycles():
            out = out * len(c) // gcd(out, len(c))
        return out

    def label(self) -> str:
        return "".join(str(x) for x in self.images)


def identity(d: int) -> Permutation:
    return Permutation(tuple(range(1, d + 1)))


def w0(d: int) -> Permutation:
    """The order-reversing permutation i -> d+1-i."""
    return Permutation(tuple(d + 1 - i for i in range(1, d + 1)))


def w_star(w: Permutation) -> Permutation:
    """i -> d+1 - w^{-1}(i)."""
    inv = w.inverse()
    return Permutation(tuple(w.d + 1 - inv(i) for i in range(1, w.d + 1)))


def all_permutations(d: int):
    for images in _itertools_permutations(range(1, d + 1)):
        yield Permutation(images)


# ---------------------------------------------------------------------------
# records and the losers' permutation
# ---------------------------------------------------------------------------

def records(w: Permutation) -> list[tuple[int, int]]:
    """The left-to-right maxima of w as (value, position) pairs.

    >>> [v for v, _ in records(Permutation((3, 2, 4, 5, 1)))]
    [3, 4, 5]
    """
    out = []
    best = 0
    for i, v in enumerate(w, start=1):
        if v > best:
            out.append((v, i))
            best = v
    return out


def losers_permutation(w: Permutation) -> Permutation:
    """The permutation of {1..d-1} listing, round by round, the displaced
    non-record entry: w'(i) = min({w(1..i+1)} minus {w'(1..i-1)}).

    >>> losers_permutation(Permutation((3, 2, 4, 5, 1))).images
    (2, 3, 4, 1)
    """
    if w.d < 2:
        raise ValueError("losers' permutation needs d >= 2")
    taken: set[int] = set()
    out = []
    for i in range(1, w.d):
        pool = {w(j) for j in range(1, i + 2)} - taken
        v = min(pool)
        out.append(v)
        taken.add(v)
    return Permutation(tuple(out))


def losers_chain(w: Permutation) -> list[Permutation]:
    """[w, w', w'', ...] down to the unique permutation of size 1."""
    chain = [w]
    while chain[-1].d > 1:
        chain.append(losers_permutation(chain[-1]))
    return chain


# ---------------------------------------------------------------------------
# triangular index set, admissible subsets, ord tableaux
# ---------------------------------------------------------------------------

def index_set(d: int) -> list[tuple[int, int]]:
    """I = {(i,j) : 1 <= i <= j <= d} in row-major order."""
    return [(i, j) for i in range(1, d + 1) for j in range(i, d + 1)]


@dataclass(frozen=True)
class AdmissibleSubset:
    """A subset J of the triangle I closed under (i,j) -> (i,j+1) and
    (i,j) -> (i-1,j-1), together with the subset T of {1..d} it encodes."""

    d: int
    cells: frozenset[tuple[int, int]]
    t_set: frozenset[int]

    def __post_init__(self):
        for (i, j) in self.cells:
            if not (1 <= i <= j <= self.d):
                raise ValueError(f"cell {(i, j)} outside the triangle")
            if j + 1 <= self.d and (i, j + 1) not in self.cells:
                raise ValueError(f"not admissible: {(i, j)} in, {(i, j + 1)} out")
            if i >= 2 and j - 1 >= i - 1 and (i - 1, j - 1) not in self.cells:
                raise ValueError(f"not admissible: {(i, j)} in, {(i - 1, j - 1)} out")


def admissible_from_subset(d: int, T) -> AdmissibleSubset:
    """The admissible J attached to T: with t_1 > ... > t_s the elements of
    T, J = {(i,j) : i <= s, j > d - t_i}."""
    T = frozenset(int(t) for t in T)
    if not all(1 <= t <= d for t in T):
        raise ValueError(f"T must be a subset of 1..{d}")
    ts = sorted(T, reverse=True)
    cells = frozenset((i, j) for i in range(1, len(ts) + 1)
                      for j in range(max(i, d - ts[i - 1] + 1), d + 1))
    return AdmissibleSubset(d, cells, T)


def subset_from_admissible(adm: AdmissibleSubset) -> frozenset[int]:
    """Inverse map: the nonzero row counts of J."""
    counts = []
    for i in range(1, adm.d + 1):
        c = sum(1 for (a, b) in adm.cells if a == i)
        if c:
            counts.append(c)
    return frozenset(counts)


def admissible_level(d: int, s: int) -> AdmissibleSubset:
    """I_s = {(i,j) : j - i >= d - s}, the admissible subset of {1..s}."""
    return admissible_from_subset(d, range(1, s + 1))


@dataclass(frozen=True)
class OrdTableau:
    """The triangular filling attached to w: entry(i,j) is the step at which
    the cell gets filled by the greedy column procedure (value s goes into
    the last w(s) columns, each time as high as possible)."""

    d: int
    entries: dict[tuple[int, int], int]

    def __getitem__(self, cell):
        return self.entries[cell]

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(self.entries[(i, j)] for j in range(i, self.d + 1))

    def level_set(self, s: int) -> AdmissibleSubset:
        """The cells with entry <= s, as an admissible subset."""
        cells = frozenset(c for c, v in self.entries.items() if v <= s)
        return admissible_from_cells(self.d, cells)


def admissible_from_cells(d: int, cells) -> AdmissibleSubset:
    """Build an AdmissibleSubset from its cell set (validates closure)."""
    cells = frozenset((int(i), int(j)) for i, j in cells)
    counts = frozenset(c for c in (sum(1 for (a, _) in cells if a == i)
                                   for i in range(1, d + 1)) if c)
    adm = AdmissibleSubset(d, cells, counts)
    if admissible_from_subset(d, counts).cells != cells:
        raise ValueError("cell set is not the admissible set of its T")
    return adm


def ord_tableau(w: Permutation) -> OrdTableau:
    """
    >>> ord_tableau(Permutation((3, 2, 4, 5, 1))).row(1)
    (4, 3, 1, 1, 1)
    """
    d = w.d
    entries: dict[tuple[int, int], int] = {}
    depth = {j: 0 for j in range(1, d + 1)}  # filled cells per column, from the top
    for s in range(1, d + 1):
        for j in range(d - w(s) + 1, d + 1):
            i = depth[j] + 1
            depth[j] = i
            entries[(i, j)] = s
    assert all(depth[j] == j for j in range(1, d + 1))
    return OrdTableau(d, entries)


def level_set(w: Permutation, s: int) -> AdmissibleSubset:
    """I_s(w), the admissible subset attached to T_s(w) = w*({1..s})."""
    ws = w_star(w)
    return admissible_from_subset(w.d, {ws(i) for i in range(1, s + 1)})


def wv_chain(w: Permutation) -> list[Permutation]:
    """The permutations v_i with v_i(j) = w_i^{-1}(d+2-i-j), where w_1 = w
    and w_{i+1} is the losers' permutation of w_i."""
    chain = losers_chain(w)
    out = []
    for i, wi in enumerate(chain, start=1):
        di = wi.d  # = d + 1 - i
        inv = wi.inverse()
        out.append(Permutation(tuple(inv(di + 1 - j) for j in range(1, di + 1))))
    return out


# ---------------------------------------------------------------------------
# rho_w and the order on S_d
# ---------------------------------------------------------------------------

def rho_w(w: Permutation, b: int) -> Vec:
    """The vector with i-th coordinate (b-1) * sum_{n>=1} (d+1-i-w^n(i))/b^n,
    summed in closed form over each cycle of w.

    >>> rho_w(Permutation((2, 1)), 3)
    (Fraction(1, 4), Fraction(-1, 4))
    """
    if b < 2:
        raise ValueError("b must be at least 2")
    d = w.d
    out = [Fraction(0)] * d
    for cyc in w.cycles():
        L = len(cyc)
        denom = b ** L - 1
        for i in cyc:
            # sum over one period of w^n(i), weighted b^{L-n}
            s = 0
            j = i
            for n in range(1, L + 1):
                j = w(j)
                s += j * b ** (L - n)
            out[i - 1] = frac(d + 1 - i) - Fraction((b - 1) * s, denom)
    return tuple(out)


def _prefix_sum_sequence(w: Permutation, s: int, length: int) -> list[int]:
    """(sum_{i<=s} w^n(i)) for n = 1..length."""
    cur = list(range(1, w.d + 1))
    out = []
    for _ in range(length):
        cur = [w(x) for x in cur]
        out.append(sum(cur[:s]))
    return out


def precedes(w1: Permutation, w2: Permutation, b: int | None = None) -> bool:
    """The order on S_d: w1 <= w2 iff for every s the sequence of prefix sums
    sum_{i<=s} w1^n(i) is lexicographically <= the one for w2.

    The sequences are periodic, so comparison up to n = lcm of the two
    permutation orders decides.  With b given (b >= b0 = 1 + floor((d-1)^2/4))
    the test rho_{w1} in rho_{w2} + C* is used instead; beware that the two
    tests provably coincide only once b >= floor(d^2/4) + 1 (checked
    exhaustively through d = 5; at (d, b) = (4, 3) and (4, 4) they differ).
    """
    if w1.d != w2.d:
        raise ValueError("permutations of different sizes")
    if b is not None:
        d = w1.d
        b0 = 1 + (d - 1) ** 2 // 4
        if b < b0:
            raise ValueError(f"the rho-based test needs b >= {b0}")
        diff = tuple(x - y for x, y in zip(rho_w(w1, b), rho_w(w2, b)))
        return in_dual_chain_cone(diff)
    o1, o2 = w1.order(), w2.order()
    n = o1 * o2 // gcd(o1, o2)
    for s in range(1, w1.d):
        if _prefix_sum_sequence(w1, s, n) > _prefix_sum_sequence(w2, s, n):
            return False
    return True


def in_dual_chain_cone(z: Vec) -> bool:
    """Membership in C* = {z : sum z = 0, all prefix sums >= 0}."""
    total = sum(z)
    if total != 0:
        return False
    run = 0
    for x in z[:-1]:
        run += x
        if run < 0:
            return False
    return True


def hasse_diagram(d: int) -> list[tuple[Permutation, Permutation]]:
    """Covering relations (lower, upper) of the order on S_d."""
    perms = list(all_permutations(d))
    less = {}
    for a in perms:
        for b_ in perms:
            if a != b_ and precedes(a, b_):
                less.setdefault(a, set()).add(b_)
    edges = []
    for a in perms:
        for c in less.get(a, ()):
            if not any(c in less.get(m, ()) for m in less[a] if m != c):
                edges.append((a, c))
    return edges


def maximal_elements(d: int) -> list[Permutation]:
    perms = list(all_permutations(d))
    return [a for a in perms
            if not any(a != b_ and precedes(a, b_) for b_ in perms)]


def hasse_dot(d: int) -> str:
    """DOT export: one node per permutation labeled w(1)w(2)...w(d), one edge
    per covering relation, drawn from the smaller to the larger element."""
    lines = ["digraph hasse {"]
    for w in all_permutations(d):
        lines.append(f'  "{w.label()}";')
    for lo, hi in sorted(hasse_diagram(d), key=lambda e: (e[0].images, e[1].images)):
        lines.append(f'  "{lo.label()}" -> "{hi.label()}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
