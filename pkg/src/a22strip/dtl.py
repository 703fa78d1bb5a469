"""The dilute Temperley-Lieb algebra dTL_N(beta).

A connectivity is a planar pairing of 2N boundary nodes of a rectangle where
unpaired nodes are vacancies.  Nodes are numbered counter-clockwise: bottom
row 0..N-1 left to right, then top row N..2N-1 right to left.  In this
numbering planarity is exactly the non-crossing (balanced bracket) condition
on the linear order 0..2N-1.

Multiplication stacks the second diagram on top of the first: loose strand
meeting a vacancy kills the term, each closed loop contributes a factor beta,
and surviving strands are contracted.  Standard modules W_N^d are spanned by
link states with d defects; the regular representation uses the connectivity
basis itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

VACANT = -1
DEFECT = -2

PRUNE_TOL = 1e-14  # dropped from term maps after arithmetic


def _is_noncrossing_pairing(pairing) -> bool:
    m = len(pairing)
    stack = []
    for i, j in enumerate(pairing):
        if j == VACANT:
            continue
        if not (0 <= j < m) or j == i or pairing[j] != i:
            return False
        if j > i:
            stack.append(j)
        elif stack.pop() != i:
            return False
    return not stack


@dataclass(frozen=True)
class Connectivity:
    """Basis diagram of dTL_N: planar pairing with vacancies over 2N nodes."""

    n_sites: int
    pairing: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairing", tuple(self.pairing))
        if len(self.pairing) != 2 * self.n_sites:
            raise ValueError("pairing must cover 2N nodes")
        if not _is_noncrossing_pairing(self.pairing):
            raise ValueError(f"pairing is not a planar matching: {self.pairing}")

    def to_brackets(self) -> str:
        """Serialize as a length-2N string over '.', '(' and ')'."""
        out = []
        for i, j in enumerate(self.pairing):
            out.append("." if j == VACANT else ("(" if j > i else ")"))
        return "".join(out)

    @staticmethod
    def from_brackets(text: str) -> "Connectivity":
        if len(text) % 2:
            raise ValueError("bracket string must have even length")
        pairing = [VACANT] * len(text)
        stack = []
        for i, ch in enumerate(text):
            if ch == "(":
                stack.append(i)
            elif ch == ")":
                if not stack:
                    raise ValueError(f"unbalanced brackets in {text!r}")
                j = stack.pop()
                pairing[i], pairing[j] = j, i
            elif ch != ".":
                raise ValueError(f"bad character {ch!r} in bracket string")
        if stack:
            raise ValueError(f"unbalanced brackets in {text!r}")
        return Connectivity(len(text) // 2, tuple(pairing))

    def vacancy_count(self) -> int:
        return sum(1 for j in self.pairing if j == VACANT)


@lru_cache(maxsize=None)
def _motzkin_matchings(m: int):
    """All non-crossing partial matchings of m linearly ordered points."""
    if m == 0:
        return (tuple(),)
    out = []
    # point 0 vacant
    for rest in _motzkin_matchings(m - 1):
        out.append((VACANT,) + tuple(x + 1 if x >= 0 else x for x in rest))
    # point 0 paired with point j; inside and outside are independent
    for j in range(1, m):
        for inner in _motzkin_matchings(j - 1):
            for outer in _motzkin_matchings(m - 1 - j):
                pairing = [VACANT] * m
                pairing[0], pairing[j] = j, 0
                for a, b in enumerate(inner):
                    pairing[1 + a] = b + 1 if b >= 0 else b
                for a, b in enumerate(outer):
                    pairing[j + 1 + a] = b + j + 1 if b >= 0 else b
                out.append(tuple(pairing))
    return tuple(out)


def motzkin_number(m: int) -> int:
    """M_m, via the standard recurrence."""
    vals = [1, 1]
    for k in range(2, m + 1):
        vals.append(((2 * k + 1) * vals[k - 1] + 3 * (k - 1) * vals[k - 2]) // (k + 2))
    return vals[m]


def enumerate_connectivities(n: int) -> list:
    """Complete basis of dTL_n; its length is the Motzkin number M_{2n}."""
    if not 1 <= n <= 6:
        raise ValueError("connectivity enumeration supported for 1 <= N <= 6")
    return [Connectivity(n, pairing) for pairing in _motzkin_matchings(2 * n)]


@dataclass
class AlgebraElement:
    """Finite formal sum of connectivities with complex coefficients."""

    n_sites: int
    terms: dict

    def __init__(self, n_sites: int, terms: dict | None = None):
        self.n_sites = n_sites
        self.terms = {}
        if terms:
            for c, x in terms.items():
                if c.n_sites != n_sites:
                    raise ValueError("mixed sizes in algebra element")
                if abs(x) >= PRUNE_TOL:
                    self.terms[c] = self.terms.get(c, 0.0) + complex(x)

    @staticmethod
    def from_connectivity(c: Connectivity, coeff=1.0) -> "AlgebraElement":
        return AlgebraElement(c.n_sites, {c: coeff})

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.n_sites != other.n_sites:
            raise ValueError("size mismatch")
        terms = dict(self.terms)
        for c, x in other.terms.items():
            terms[c] = terms.get(c, 0.0) + x
        return AlgebraElement(self.n_sites, terms)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.n_sites, {c: scalar * x for c, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            raise TypeError("use compose(a, b, beta): the product needs beta")
        return self.__rmul__(other)

    def norm_inf(self) -> float:
        return max((abs(x) for x in self.terms.values()), default=0.0)

    def to_json(self) -> str:
        rows = [
            {"diagram": c.to_brackets(), "re": x.real, "im": x.imag}
            for c, x in sorted(self.terms.items(), key=lambda kv: kv[0].to_brackets())
        ]
        return json.dumps(rows)

    @staticmethod
    def from_json(text: str) -> "AlgebraElement":
        rows = json.loads(text)
        if not rows:
            raise ValueError("cannot infer size of an empty element")
        terms = {}
        for row in rows:
            c = Connectivity.from_brackets(row["diagram"])
            terms[c] = complex(row["re"], row["im"])
        return AlgebraElement(c.n_sites, terms)


def identity_element(n: int) -> AlgebraElement:
    """Unit of dTL_n: each site carries a through strand or a vacancy pair."""
    if n < 1:
        raise ValueError("need n >= 1")
    terms = {}
    for mask in range(2 ** n):
        pairing = [VACANT] * (2 * n)
        for i in range(n):
            if mask >> i & 1:
                top = 2 * n - 1 - i
                pairing[i], pairing[top] = top, i
        terms[Connectivity(n, tuple(pairing))] = 1.0
    return AlgebraElement(n, terms)


def _compose_pairings(bottom, top, n, beta):
    """Stack `top` above `bottom`; return (coeff, pairing) or (0, None).

    Interface: bottom's top node for column i is slot 2n-1-i, top's bottom
    node for column i is slot i.  New numbering keeps bottom's bottom row and
    top's top row.
    """
    # Global point ids: 0..2n-1 bottom diagram, 2n..4n-1 top diagram.
    def partner(pt):
        if pt < 2 * n:
            q = bottom[pt]
            return q if q == VACANT else q
        q = top[pt - 2 * n]
        return q if q == VACANT else q + 2 * n

    def interface_mate(pt):
        """The glued point across the interface, or None."""
        if n <= pt < 2 * n:  # bottom diagram's top edge, column i = 2n-1-pt
            return 2 * n + (2 * n - 1 - pt)
        if 2 * n <= pt < 3 * n:  # top diagram's bottom edge, column pt-2n
            return 2 * n - 1 - (pt - 2 * n)
        return None

    external = list(range(0, n)) + list(range(3 * n, 4 * n))
    result = [VACANT] * (2 * n)
    coeff = 1.0
    visited = set()

    def ext_slot(pt):
        return pt if pt < n else pt - 2 * n

    # Vacancy consistency at the interface: strand meeting vacancy kills.
    for pt in range(n, 2 * n):
        if (partner(pt) == VACANT) != (partner(interface_mate(pt)) == VACANT):
            return 0.0, None

    # Follow strands from each external point.
    for start in external:
        if start in visited or partner(start) == VACANT:
            continue
        visited.add(start)
        pt = partner(start)
        while True:
            visited.add(pt)
            mate = interface_mate(pt)
            if mate is None:  # reached an external point
                result[ext_slot(start)] = ext_slot(pt)
                result[ext_slot(pt)] = ext_slot(start)
                break
            visited.add(mate)
            pt = partner(mate)
            visited.add(pt)

    # Remaining strands at the interface are closed loops.
    for pt in range(n, 2 * n):
        if pt in visited or partner(pt) == VACANT:
            continue
        coeff *= beta
        cur = pt
        while cur not in visited:
            visited.add(cur)
            mate = interface_mate(cur)
            visited.add(mate)
            cur = partner(mate)

    return coeff, tuple(result)


def compose(a: AlgebraElement, b: AlgebraElement, beta) -> AlgebraElement:
    """Product ab in dTL_N(beta): b is stacked above a, bilinearly extended."""
    if a.n_sites != b.n_sites:
        raise ValueError(f"size mismatch: {a.n_sites} vs {b.n_sites}")
    n = a.n_sites
    terms = {}
    for ca, xa in a.terms.items():
        for cb, xb in b.terms.items():
            coeff, pairing = _compose_pairings(ca.pairing, cb.pairing, n, beta)
            if pairing is None or coeff == 0.0:
                continue
            c = Connectivity(n, pairing)
            terms[c] = terms.get(c, 0.0) + coeff * xa * xb
    return AlgebraElement(n, terms)


# ----------------------------------------------------------------------
# Link states and standard modules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LinkState:
    """Half-diagram on N nodes: arcs, defects (DEFECT) and vacancies (VACANT)."""

    n_sites: int
    structure: tuple

    def __post_init__(self):
        object.__setattr__(self, "structure", tuple(self.structure))
        s = self.structure
        if len(s) != self.n_sites:
            raise ValueError("structure must cover N nodes")
        for i, j in enumerate(s):
            if j in (VACANT, DEFECT):
                continue
            if not (0 <= j < self.n_sites) or j == i or s[j] != i:
                raise ValueError(f"bad link structure {s}")
        # Arcs must not cross and must not cover a defect.
        for i, j in enumerate(s):
            if j <= i:
                continue
            for k in range(i + 1, j):
                if s[k] == DEFECT:
                    raise ValueError("arc over a defect")
                if s[k] not in (VACANT, DEFECT) and not (i < s[k] < j):
                    raise ValueError("crossing arcs")

    @property
    def defect_count(self) -> int:
        return sum(1 for j in self.structure if j == DEFECT)

    def to_string(self) -> str:
        out = []
        for i, j in enumerate(self.structure):
            out.append("." if j == VACANT else "|" if j == DEFECT else "(" if j > i else ")")
        return "".join(out)

    @staticmethod
    def from_string(text: str) -> "LinkState":
        structure = [VACANT] * len(text)
        stack = []
        for i, ch in enumerate(text):
            if ch == "(":
                stack.append(i)
            elif ch == ")":
                j = stack.pop()
                structure[i], structure[j] = j, i
            elif ch == "|":
                structure[i] = DEFECT
            elif ch != ".":
                raise ValueError(f"bad character {ch!r}")
        if stack:
            raise ValueError("unbalanced arcs")
        return LinkState(len(text), tuple(structure))


@lru_cache(maxsize=None)
def link_states(n: int, d: int) -> tuple:
    """All link states on n nodes with exactly d defects."""
    if d > n or d < 0:
        return tuple()

    out = []

    def build(pos, structure, open_arcs, defects_used):
        if pos == n:
            if not open_arcs and defects_used == d:
                out.append(LinkState(n, tuple(structure)))
            return
        # vacancy
        structure.append(VACANT)
        build(pos + 1, structure, open_arcs, defects_used)
        structure.pop()
        # defect: allowed only if no arc is currently open above it
        if not open_arcs and defects_used < d:
            structure.append(DEFECT)
            build(pos + 1, structure, open_arcs, defects_used + 1)
            structure.pop()
        # open an arc
        structure.append(None)
        open_arcs.append(pos)
        build(pos + 1, structure, open_arcs, defects_used)
        open_arcs.pop()
        structure.pop()
        # close the innermost open arc
        if open_arcs:
            j = open_arcs.pop()
            structure[j] = pos
            structure.append(j)
            build(pos + 1, structure, open_arcs, defects_used)
            structure.pop()
            structure[j] = None
            open_arcs.append(j)

    build(0, [], [], 0)
    return tuple(out)


def trinomial(n: int, k: int) -> int:
    """Coefficient of x^k in (x + 1 + 1/x)^n."""
    k = abs(k)
    total = 0
    for j in range(n + 1):
        if (n - k - j) % 2 or n - k - j < 0:
            continue
        a = (n - k - j) // 2  # x^{-1} count; j ones; rest x
        total += math.factorial(n) // (math.factorial(j) * math.factorial(a) * math.factorial(a + k))
    return total


def standard_module_dimension(n: int, d: int) -> int:
    return trinomial(n, d) - trinomial(n, d + 2)


def act_on_link_state(c: Connectivity, w: LinkState, beta):
    """Act with connectivity c on link state w (w glued above c).

    Returns (coefficient, LinkState or None).  The action kills the term when
    a strand meets a vacancy or when the defect number would decrease.
    """
    if c.n_sites != w.n_sites:
        raise ValueError("size mismatch")
    n = c.n_sites
    pairing = c.pairing

    def top_slot(col):  # c's top node for column col (0-based)
        return 2 * n - 1 - col

    # Vacancy consistency at the interface.
    for col in range(n):
        c_vac = pairing[top_slot(col)] == VACANT
        w_vac = w.structure[col] == VACANT
        if c_vac != w_vac:
            return 0.0, None

    result = [VACANT] * n
    coeff = 1.0
    visited = set()  # visited points: ('c', slot) and ('w', node)

    def follow_down(col):
        """From c's top node at column col, through c, to its end in c."""
        return pairing[top_slot(col)]

    # Defects of w must come out at the bottom of c.
    for col in range(n):
        if w.structure[col] != DEFECT:
            continue
        pt = follow_down(col)
        visited.add(("w", col))
        visited.add(("c", top_slot(col)))
        while True:
            visited.add(("c", pt))
            if pt < n:
                result[pt] = DEFECT
                break
            # re-enters w at column 2n-1-pt
            wcol = 2 * n - 1 - pt
            visited.add(("w", wcol))
            mate = w.structure[wcol]
            if mate == DEFECT:
                return 0.0, None  # two defects annihilate: defect count drops
            visited.add(("w", mate))
            visited.add(("c", top_slot(mate)))
            pt = follow_down(mate)

    # Strands starting at c's bottom nodes.
    for start in range(n):
        if ("c", start) in visited or pairing[start] == VACANT:
            continue
        visited.add(("c", start))
        pt = pairing[start]
        while True:
            visited.add(("c", pt))
            if pt < n:
                result[start], result[pt] = pt, start
                break
            wcol = 2 * n - 1 - pt
            visited.add(("w", wcol))
            mate = w.structure[wcol]
            # Defect endpoints were all walked first, so mate is an arc here.
            assert mate != DEFECT
            visited.add(("w", mate))
            visited.add(("c", top_slot(mate)))
            pt = follow_down(mate)

    # Closed loops among the remaining interface strands.
    for col in range(n):
        if ("w", col) in visited or w.structure[col] == VACANT:
            continue
        coeff *= beta
        cur = col
        while ("w", cur) not in visited:
            visited.add(("w", cur))
            mate = w.structure[cur]
            visited.add(("w", mate))
            pt = follow_down(mate)
            visited.add(("c", top_slot(mate)))
            visited.add(("c", pt))
            cur = 2 * n - 1 - pt

    new_state = LinkState(n, tuple(result))
    if new_state.defect_count != w.defect_count:
        return 0.0, None
    return coeff, new_state


# ----------------------------------------------------------------------
# Representations
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Representation:
    """A concrete matrix representation: a standard module W_N^d or the
    regular representation on the connectivity basis."""

    kind: str  # "standard" or "regular"
    n_sites: int
    defects: int | None
    basis: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, element) -> int:
        return self._index_map()[element]

    def _index_map(self):
        if not hasattr(self, "_cached_index"):
            object.__setattr__(self, "_cached_index", {b: i for i, b in enumerate(self.basis)})
        return self._cached_index


def standard_module(n: int, d: int) -> Representation:
    basis = link_states(n, d)
    if len(basis) != standard_module_dimension(n, d):
        raise AssertionError("link state enumeration disagrees with dimension formula")
    return Representation("standard", n, d, basis)


def regular_representation(n: int) -> Representation:
    if n > 5:
        raise ValueError("regular representation supported for N <= 5")
    return Representation("regular", n, None, tuple(enumerate_connectivities(n)))


def representation_matrix(x: AlgebraElement, rep: Representation, beta) -> np.ndarray:
    """Matrix of the left action of x in the ordered basis of rep."""
    if x.n_sites != rep.n_sites:
        raise ValueError("size mismatch")
    dim = rep.dimension
    mat = np.zeros((dim, dim), dtype=complex)
    index = rep._index_map()
    if rep.kind == "standard":
        for j, w in enumerate(rep.basis):
            for c, coeff in x.terms.items():
                factor, out = act_on_link_state(c, w, beta)
                if out is not None and factor != 0.0:
                    mat[index[out], j] += coeff * factor
    else:
        for j, b in enumerate(rep.basis):
            col = compose(x, AlgebraElement.from_connectivity(b), beta)
            for c, coeff in col.terms.items():
                mat[index[c], j] += coeff
    return mat
