"""Planar gluing of local tiles into dTL elements.

A Tile is a linear combination of partial pairings over its k nodes (VACANT
marks a vacancy).  A Network is a list of tiles together with gluings between
tile nodes and an ordered list of external nodes; contraction processes the
tiles in order, tracking a frontier of open strand ends, killing terms where
a strand meets a vacancy and multiplying by beta for each closed loop.

Listing the externals counter-clockwise from the bottom-left makes the result
directly interpretable as a dTL element (bottom row left-to-right, then the
top row right-to-left), which is how every tangle identity is checked.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dtl import VACANT, AlgebraElement, Connectivity

PRUNE_TOL = 1e-300  # only true float dust is dropped mid-contraction


def _check_term(n_nodes, pairing):
    if len(pairing) != n_nodes:
        raise ValueError("pairing length mismatch")
    for i, j in enumerate(pairing):
        if j == VACANT:
            continue
        if not (0 <= j < n_nodes) or j == i or pairing[j] != i:
            raise ValueError(f"bad pairing {pairing}")


@dataclass
class Tile:
    """Linear combination of partial pairings of n_nodes boundary points."""

    n_nodes: int
    terms: dict

    def __init__(self, n_nodes: int, terms: dict | None = None):
        self.n_nodes = n_nodes
        self.terms = {}
        if terms:
            for pairing, x in terms.items():
                pairing = tuple(pairing)
                _check_term(n_nodes, pairing)
                if abs(x) > PRUNE_TOL:
                    self.terms[pairing] = self.terms.get(pairing, 0.0) + complex(x)

    @staticmethod
    def from_pairs(n_nodes: int, pairs, coeff=1.0) -> "Tile":
        pairing = [VACANT] * n_nodes
        for i, j in pairs:
            pairing[i], pairing[j] = j, i
        return Tile(n_nodes, {tuple(pairing): coeff})

    def scaled(self, x) -> "Tile":
        return Tile(self.n_nodes, {p: x * c for p, c in self.terms.items()})

    def __add__(self, other: "Tile") -> "Tile":
        if self.n_nodes != other.n_nodes:
            raise ValueError("node count mismatch")
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0.0) + c
        return Tile(self.n_nodes, terms)

    def __sub__(self, other: "Tile") -> "Tile":
        return self + other.scaled(-1.0)

    def norm_inf(self) -> float:
        return max((abs(x) for x in self.terms.values()), default=0.0)


def unit_strand() -> Tile:
    """Dashed (identity) line: strand plus vacancy pair on two nodes."""
    return Tile(2, {(1, 0): 1.0, (VACANT, VACANT): 1.0})


def tiles_diff(a: Tile, b: Tile) -> float:
    """Relative sup-norm difference of two tiles' coefficient maps."""
    scale = max(a.norm_inf(), b.norm_inf(), 1e-300)
    keys = set(a.terms) | set(b.terms)
    return max(
        (abs(a.terms.get(k, 0.0) - b.terms.get(k, 0.0)) for k in keys), default=0.0
    ) / scale


class Network:
    """A planar arrangement of tiles with internal gluings and external legs.

    Tiles are contracted in the order they were added, so callers should add
    them in a sweep order that keeps the frontier small.
    """

    def __init__(self, beta):
        self.beta = beta
        self.tiles: list[Tile] = []
        self.links: dict = {}
        self.externals: list = []

    def add(self, tile: Tile) -> int:
        self.tiles.append(tile)
        return len(self.tiles) - 1

    def glue(self, a, b):
        """Glue tile nodes a = (ti, ni) and b = (tj, nj)."""
        if a in self.links or b in self.links:
            raise ValueError(f"node {a} or {b} already glued")
        self.links[a] = b
        self.links[b] = a

    def set_externals(self, nodes):
        self.externals = list(nodes)

    # ------------------------------------------------------------------
    def contract(self) -> Tile:
        """Contract the network into a Tile over the external nodes."""
        ext_index = {}
        for i, port in enumerate(self.externals):
            if port in self.links:
                raise ValueError(f"external node {port} is glued")
            ext_index[port] = i
        # Every tile node must be glued or external.
        for ti, tile in enumerate(self.tiles):
            for ni in range(tile.n_nodes):
                port = (ti, ni)
                if port not in self.links and port not in ext_index:
                    raise ValueError(f"dangling node {port}")

        n_ext = len(self.externals)
        VAC = "v"
        # state: frozen tuple of sorted (key, status); keys are ('e', edge-id
        # as a sorted port pair) for open internal edges and ('x', i) for
        # externals already seen; status is VAC or the partner key.
        states = {(): 1.0 + 0.0j}

        def edge_key(a, b):
            return ("e", min(a, b), max(a, b))

        for ti, tile in enumerate(self.tiles):
            # Classify this tile's nodes.
            targets = []
            for ni in range(tile.n_nodes):
                port = (ti, ni)
                if port in ext_index:
                    targets.append(("x", ext_index[port]))
                else:
                    other = self.links[port]
                    targets.append(edge_key(port, other))
            consumed = set()
            for ni in range(tile.n_nodes):
                port = (ti, ni)
                other = self.links.get(port)
                if other is not None and (other[0] < ti or (other[0] == ti and other[1] < ni)):
                    consumed.add(targets[ni])

            new_states: dict = {}
            for state_key, amp in states.items():
                status = dict(state_key)
                for term, weight in tile.terms.items():
                    out = _merge_term(
                        status, term, targets, consumed, self.beta
                    )
                    if out is None:
                        continue
                    new_status, loops = out
                    key = tuple(sorted(new_status.items()))
                    add = amp * weight * (self.beta ** loops if loops else 1.0)
                    new_states[key] = new_states.get(key, 0.0) + add
            states = {k: v for k, v in new_states.items() if abs(v) > PRUNE_TOL}
            if not states:
                break

        result = Tile(n_ext)
        for state_key, amp in states.items():
            pairing = [VACANT] * n_ext
            ok = True
            for key, st in state_key:
                if key[0] != "x":
                    ok = False  # an internal edge never closed: malformed net
                    break
                i = key[1]
                if st == VAC:
                    pairing[i] = VACANT
                else:
                    if st[0] != "x":
                        ok = False
                        break
                    pairing[i] = st[1]
            if not ok:
                raise ValueError("network left open internal edges")
            result = result + Tile(n_ext, {tuple(pairing): amp})
        return result


def _merge_term(status, term, targets, consumed, beta):
    """Merge one tile term into the open-frontier status map.

    Returns (new_status_dict, n_loops) or None when the term dies.
    status maps open keys to 'v' or a partner key.  targets[ni] is the key
    this tile node attaches to; keys in `consumed` already exist in status.
    """
    VAC = "v"
    new_status = dict(status)

    # Build the splice graph: vertices are keys; vacancies mark vertices.
    # Edges come from the tile term and from existing strands at consumed keys.
    adj: dict = {}
    vac_marks = set()

    def add_edge(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for ni, j in enumerate(term):
        t = targets[ni]
        if j == VACANT:
            vac_marks.add(t)
            adj.setdefault(t, [])
        elif j > ni:
            add_edge(t, targets[j])

    for key in sorted(consumed):
        st = status.get(key)
        if st is None:
            # Consumed edge never opened: the far tile had no surviving node
            # status -- cannot happen since every node is processed.
            raise AssertionError(f"consumed key {key} missing from status")
        if st == VAC:
            vac_marks.add(key)
            adj.setdefault(key, [])
        elif st in consumed and st < key:
            pass  # this strand was already added from its other endpoint
        else:
            add_edge(key, st)

    # Old endpoints: a consumed key's strand partner stays live unless itself
    # consumed.  Remove consumed keys from the status map now.
    for key in consumed:
        new_status.pop(key, None)

    # A vacancy-marked vertex with an incident strand kills the term; two
    # vacancies meeting (vertex marked, no strand) is fine.
    for v in vac_marks:
        if adj.get(v):
            return None
        # consume: vertex disappears; if it is a fresh (non-consumed) key, it
        # becomes a vacancy in the status map.
        if v not in consumed:
            new_status[v] = VAC

    loops = 0
    seen = set()
    for v in adj:
        if v in seen or v in vac_marks:
            continue
        deg = len(adj[v])
        if deg == 1:
            # walk the path from this endpoint
            path = [v]
            seen.add(v)
            prev, cur = v, adj[v][0]
            while True:
                seen.add(cur)
                nxt = [x for x in adj[cur] if x != prev] if len(adj[cur]) == 2 else []
                if len(adj[cur]) == 1:
                    break
                if not nxt:  # degenerate: double edge = loop of length 2
                    break
                prev, cur = cur, nxt[0]
            a, b = v, cur
            new_status[a] = b
            new_status[b] = a
    for v in adj:
        if v in seen or v in vac_marks:
            continue
        # remaining components are cycles
        loops += 1
        stack = [v]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj[x])

    return new_status, loops


def tile_to_element(tile: Tile, n_sites: int) -> AlgebraElement:
    """Interpret a tile with 2N externals (listed counter-clockwise from the
    bottom-left) as an element of dTL_N."""
    if tile.n_nodes != 2 * n_sites:
        raise ValueError("tile must have 2N external nodes")
    terms = {}
    for pairing, x in tile.terms.items():
        terms[Connectivity(n_sites, pairing)] = x
    return AlgebraElement(n_sites, terms)
