"""Proof structures: formula occurrences wired together by typed links.

A proof structure is a set of formula-occurrence vertices plus tensor/par
links.  Every vertex is at most once a premiss and at most once a
conclusion of a link; the two slots are called ``below`` (the link this
vertex is a premiss of, drawn under it) and ``above`` (the link this
vertex is a conclusion of, drawn over it).  A vertex with a free
``above`` slot can carry a hypothesis label ``p``; one with a free
``below`` slot a conclusion label ``q``.

Each logical connective owns one link geometry.  The table below records
the *tensor* variant; the par variant of the same connective mirrors the
shape upside down and flips every port from premiss to conclusion and
back, keeping indices.  Whether an occurrence unfolds to the tensor or
the par variant depends on which side of the turnstile the connective's
non-invertible sequent rule lives: a connective whose tensor link is the
left rule unfolds tensor-wise in hypothesis position and par-wise in
conclusion position, and dually.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Literal, Sequence

from .syntax import Atom, Binary, Formula, Nullary, Unary

__all__ = [
    "Polarity", "Vertex", "Link", "ProofStructure",
    "B_RES", "B_DUAL", "U_DIA", "U_GAL", "U_DGAL",
    "TRI_UP", "TRI_DN", "UNIT_DOWN", "UNIT_UP",
    "SHAPE_PORTS", "MIRROR_SHAPE", "LINK_TABLE", "TENSOR_SIDE", "PAR_SIDE",
    "mirror_port", "link_row", "unfold_kind", "formula_args",
    "unfold", "unfold_into", "enumerate_axiom_linkings",
    "classify_axioms_cuts",
]

Polarity = Literal["hypothesis", "conclusion"]

# ---------------------------------------------------------------------------
# Link shapes.  Names encode the drawing: B_RES is the binary link with two
# premisses on top and one conclusion hub below, B_DUAL its mirror image,
# and so on.  Ports are (side, index) pairs; premisses before conclusions.

B_RES = "B_RES"
B_DUAL = "B_DUAL"
U_DIA = "U_DIA"
U_GAL = "U_GAL"
U_DGAL = "U_DGAL"
TRI_UP = "TRI_UP"
TRI_DN = "TRI_DN"
UNIT_DOWN = "UNIT_DOWN"
UNIT_UP = "UNIT_UP"

SHAPE_PORTS: dict[str, tuple[tuple[str, int], ...]] = {
    B_RES: (("prem", 0), ("prem", 1), ("concl", 0)),
    B_DUAL: (("prem", 0), ("concl", 0), ("concl", 1)),
    U_DIA: (("prem", 0), ("concl", 0)),
    U_GAL: (("prem", 0), ("prem", 1)),
    U_DGAL: (("concl", 0), ("concl", 1)),
    TRI_UP: (("prem", 0), ("prem", 1), ("prem", 2)),
    TRI_DN: (("concl", 0), ("concl", 1), ("concl", 2)),
    UNIT_DOWN: (("concl", 0),),
    UNIT_UP: (("prem", 0),),
}

MIRROR_SHAPE = {
    B_RES: B_DUAL, B_DUAL: B_RES,
    U_DIA: U_DIA,
    U_GAL: U_DGAL, U_DGAL: U_GAL,
    TRI_UP: TRI_DN, TRI_DN: TRI_UP,
    UNIT_DOWN: UNIT_UP, UNIT_UP: UNIT_DOWN,
}


def mirror_port(port: tuple[str, int]) -> tuple[str, int]:
    side, i = port
    return ("concl" if side == "prem" else "prem", i)


@dataclass(frozen=True)
class _Row:
    shape: str
    main: tuple[str, int]
    subs: tuple[tuple[str, int], ...]


# Tensor-variant geometry per connective: shape, main port, and the ports
# of the immediate subformulas in argument order.
LINK_TABLE: dict[str, _Row] = {
    "*": _Row(B_RES, ("concl", 0), (("prem", 0), ("prem", 1))),
    "o-": _Row(B_RES, ("prem", 0), (("concl", 0), ("prem", 1))),
    "-o": _Row(B_RES, ("prem", 1), (("prem", 0), ("concl", 0))),
    "@": _Row(B_DUAL, ("prem", 0), (("concl", 0), ("concl", 1))),
    "@-": _Row(B_DUAL, ("concl", 0), (("prem", 0), ("concl", 1))),
    "-@": _Row(B_DUAL, ("concl", 1), (("concl", 0), ("prem", 0))),
    "dia": _Row(U_DIA, ("concl", 0), (("prem", 0),)),
    "box": _Row(U_DIA, ("prem", 0), (("concl", 0),)),
    "rgal": _Row(U_GAL, ("prem", 1), (("prem", 0),)),
    "lgal": _Row(U_GAL, ("prem", 0), (("prem", 1),)),
    "rdgal": _Row(U_DGAL, ("concl", 1), (("concl", 0),)),
    "ldgal": _Row(U_DGAL, ("concl", 0), (("concl", 1),)),
    "v": _Row(TRI_UP, ("prem", 1), (("prem", 0), ("prem", 2))),
    "v-": _Row(TRI_UP, ("prem", 0), (("prem", 1), ("prem", 2))),
    "-v": _Row(TRI_UP, ("prem", 2), (("prem", 0), ("prem", 1))),
    "^": _Row(TRI_DN, ("concl", 1), (("concl", 0), ("concl", 2))),
    "^-": _Row(TRI_DN, ("concl", 0), (("concl", 1), ("concl", 2))),
    "-^": _Row(TRI_DN, ("concl", 2), (("concl", 0), ("concl", 1))),
    "one": _Row(UNIT_DOWN, ("concl", 0), ()),
    "bot": _Row(UNIT_UP, ("prem", 0), ()),
}

# Side of the turnstile on which the connective's tensor link is the
# sequent rule: "L" means the tensor variant appears in hypothesis
# position, "R" in conclusion position.
TENSOR_SIDE = {
    "*": "R", "o-": "L", "-o": "L",
    "@": "L", "@-": "R", "-@": "R",
    "dia": "R", "box": "L",
    "rgal": "L", "lgal": "L", "rdgal": "R", "ldgal": "R",
    "v": "L", "v-": "L", "-v": "L",
    "^": "R", "^-": "R", "-^": "R",
    "one": "R", "bot": "L",
}

# Side whose sequent rule the par link is; the opposite of the tensor.
PAR_SIDE = {c: ("L" if s == "R" else "R") for c, s in TENSOR_SIDE.items()}


def link_row(conn: str, kind: str) -> _Row:
    """Geometry of the tensor or par link of a connective."""
    row = LINK_TABLE[conn]
    if kind == "tensor":
        return row
    return _Row(MIRROR_SHAPE[row.shape], mirror_port(row.main),
                tuple(mirror_port(s) for s in row.subs))


def unfold_kind(conn: str, polarity: Polarity) -> str:
    """Which link variant an occurrence of `conn` gets on this side."""
    side = "L" if polarity == "hypothesis" else "R"
    return "tensor" if TENSOR_SIDE[conn] == side else "par"


def formula_args(f: Formula) -> tuple[str | None, tuple[Formula, ...]]:
    match f:
        case Atom(_):
            return None, ()
        case Nullary(conn):
            return conn, ()
        case Unary(conn, arg):
            return conn, (arg,)
        case Binary(conn, left, right):
            return conn, (left, right)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Graph types

@dataclass
class Vertex:
    vid: int
    above: int | None = None   # link this vertex is a conclusion of
    below: int | None = None   # link this vertex is a premiss of
    p: Formula | None = None   # hypothesis label, meaningful iff above free
    q: Formula | None = None   # conclusion label, meaningful iff below free


@dataclass
class Link:
    lid: int
    kind: str                       # "tensor" | "par"
    shape: str
    prems: list[int]
    concls: list[int]
    main_port: tuple[str, int] | None  # None = neutral (punctuation) link
    conn: str | None = None
    formula: Formula | None = None

    def ports(self) -> tuple[tuple[str, int], ...]:
        return SHAPE_PORTS[self.shape]

    def port_vertex(self, port: tuple[str, int]) -> int:
        side, i = port
        return self.prems[i] if side == "prem" else self.concls[i]

    def set_port(self, port: tuple[str, int], vid: int) -> None:
        side, i = port
        if side == "prem":
            self.prems[i] = vid
        else:
            self.concls[i] = vid

    @property
    def main(self) -> int | None:
        if self.main_port is None:
            return None
        return self.port_vertex(self.main_port)

    def sub_ports(self) -> tuple[tuple[str, int], ...]:
        """Non-main ports in subformula argument order (logical links)."""
        assert self.conn is not None
        return link_row(self.conn, self.kind).subs


@dataclass
class ProofStructure:
    vertices: dict[int, Vertex] = field(default_factory=dict)
    links: dict[int, Link] = field(default_factory=dict)
    _next_vid: int = 0
    _next_lid: int = 0

    # -- construction -------------------------------------------------

    def new_vertex(self, p: Formula | None = None, q: Formula | None = None,
                   vid: int | None = None) -> int:
        if vid is None:
            vid = self._next_vid
            self._next_vid += 1
        else:
            assert vid not in self.vertices
            self._next_vid = max(self._next_vid, vid + 1)
        self.vertices[vid] = Vertex(vid, p=p, q=q)
        return vid

    def add_link(self, kind: str, shape: str,
                 prems: Sequence[int], concls: Sequence[int],
                 main_port: tuple[str, int] | None,
                 conn: str | None = None, formula: Formula | None = None,
                 lid: int | None = None) -> int:
        n_prem = sum(1 for s, _ in SHAPE_PORTS[shape] if s == "prem")
        n_concl = len(SHAPE_PORTS[shape]) - n_prem
        if len(prems) != n_prem or len(concls) != n_concl:
            raise ValueError(f"arity mismatch for shape {shape}")
        if lid is None:
            lid = self._next_lid
            self._next_lid += 1
        else:
            assert lid not in self.links
            self._next_lid = max(self._next_lid, lid + 1)
        for vid in prems:
            v = self.vertices[vid]
            if v.below is not None:
                raise ValueError(f"vertex {vid} already premiss of a link")
            v.below = lid
            v.q = None
        for vid in concls:
            v = self.vertices[vid]
            if v.above is not None:
                raise ValueError(f"vertex {vid} already conclusion of a link")
            v.above = lid
            v.p = None
        self.links[lid] = Link(lid, kind, shape, list(prems), list(concls),
                               main_port, conn, formula)
        return lid

    # -- removal and merging -------------------------------------------

    def remove_link(self, lid: int, expose: bool = False) -> None:
        """Detach a link.  With ``expose``, freed slots of a logical link
        are labelled: the main vertex with the link's formula, each
        non-main vertex with the corresponding argument subformula."""
        link = self.links.pop(lid)
        exposure: dict[tuple[str, int], Formula] = {}
        if expose and link.conn is not None and link.formula is not None:
            exposure[link.main_port] = link.formula
            _, args = formula_args(link.formula)
            for port, arg in zip(link.sub_ports(), args):
                exposure[port] = arg
        for port in link.ports():
            vid = link.port_vertex(port)
            v = self.vertices[vid]
            label = exposure.get(port)
            if port[0] == "prem":
                v.below = None
                v.q = label
            else:
                v.above = None
                v.p = label

    def delete_vertex(self, vid: int) -> None:
        v = self.vertices.pop(vid)
        assert v.above is None and v.below is None, "vertex still linked"

    def _rewire(self, lid: int | None, old: int, new: int) -> None:
        if lid is None:
            return
        link = self.links[lid]
        for port in link.ports():
            if link.port_vertex(port) == old:
                link.set_port(port, new)

    def merge_vertices(self, top: int, bottom: int,
                       vid: int | None = None) -> int:
        """Identify two occurrences into one.  The merged vertex keeps
        ``top``'s upper half (its ``above`` link or hypothesis label) and
        ``bottom``'s lower half; top's conclusion label and bottom's
        hypothesis label are consumed by the identification."""
        tv, bv = self.vertices[top], self.vertices[bottom]
        if tv.below is not None or bv.above is not None:
            raise ValueError("merge requires top below-free, bottom above-free")
        w = self.new_vertex(vid=vid)
        wv = self.vertices[w]
        wv.above, wv.p = tv.above, tv.p if tv.above is None else None
        wv.below, wv.q = bv.below, bv.q if bv.below is None else None
        self._rewire(tv.above, top, w)
        self._rewire(bv.below, bottom, w)
        del self.vertices[top]
        del self.vertices[bottom]
        return w

    # -- views ----------------------------------------------------------

    def hypotheses(self) -> list[tuple[int, Formula]]:
        return [(v.vid, v.p) for v in self._sorted_vertices()
                if v.above is None and v.p is not None]

    def conclusions(self) -> list[tuple[int, Formula]]:
        return [(v.vid, v.q) for v in self._sorted_vertices()
                if v.below is None and v.q is not None]

    def _sorted_vertices(self) -> list[Vertex]:
        return [self.vertices[k] for k in sorted(self.vertices)]

    def vertex_links(self, vid: int) -> list[int]:
        v = self.vertices[vid]
        return [l for l in (v.above, v.below) if l is not None]

    def tensor_links(self) -> list[Link]:
        return [self.links[k] for k in sorted(self.links)
                if self.links[k].kind == "tensor"]

    def par_links(self) -> list[Link]:
        return [self.links[k] for k in sorted(self.links)
                if self.links[k].kind == "par"]

    def copy(self) -> "ProofStructure":
        ps = ProofStructure(_next_vid=self._next_vid, _next_lid=self._next_lid)
        ps.vertices = {k: Vertex(v.vid, v.above, v.below, v.p, v.q)
                       for k, v in self.vertices.items()}
        ps.links = {k: Link(l.lid, l.kind, l.shape, list(l.prems),
                            list(l.concls), l.main_port, l.conn, l.formula)
                    for k, l in self.links.items()}
        return ps

    def components(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        """Connected components as (vertex ids, link ids) pairs."""
        parent: dict[int, int] = {v: v for v in self.vertices}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for link in self.links.values():
            vids = [link.port_vertex(p) for p in link.ports()]
            for other in vids[1:]:
                ra, rb = find(vids[0]), find(other)
                if ra != rb:
                    parent[rb] = ra
        groups: dict[int, list[int]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        out = []
        for root in sorted(groups):
            vset = frozenset(groups[root])
            lset = frozenset(l.lid for l in self.links.values()
                             if l.port_vertex(l.ports()[0]) in vset)
            out.append((vset, lset))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subgraph(self, vids: frozenset[int]) -> "ProofStructure":
        """Induced substructure on a vertex set, preserving ids.  Every
        link of the original incident to the set must lie inside it."""
        ps = ProofStructure(_next_vid=self._next_vid, _next_lid=self._next_lid)
        for k in sorted(self.vertices):
            if k in vids:
                v = self.vertices[k]
                ps.vertices[k] = Vertex(v.vid, v.above, v.below, v.p, v.q)
        for k in sorted(self.links):
            l = self.links[k]
            touched = [l.port_vertex(p) for p in l.ports()]
            if any(t in vids for t in touched):
                assert all(t in vids for t in touched), "link crosses the cut"
                ps.links[k] = Link(l.lid, l.kind, l.shape, list(l.prems),
                                   list(l.concls), l.main_port, l.conn,
                                   l.formula)
        return ps


# ---------------------------------------------------------------------------
# Unfolding

def unfold_into(ps: ProofStructure, f: Formula, polarity: Polarity,
                leaves: list[tuple[str, int, Polarity]] | None = None) -> int:
    """Expand one formula occurrence inside ``ps``; returns its vertex.

    ``leaves`` collects (atom name, vertex, leaf polarity) for the atomic
    occurrences, in unfolding order, for axiom-linking enumeration.
    """
    conn, args = formula_args(f)
    if conn is None:
        assert isinstance(f, Atom)
        vid = ps.new_vertex(p=f, q=f)
        if leaves is not None:
            leaves.append((f.name, vid, polarity))
        return vid
    kind = unfold_kind(conn, polarity)
    row = link_row(conn, kind)
    sub_vids: list[int | None] = [None] * len(SHAPE_PORTS[row.shape])
    port_index = {port: i for i, port in enumerate(SHAPE_PORTS[row.shape])}
    for port, arg in zip(row.subs, args):
        sub_pol: Polarity = ("conclusion" if port[0] == "prem"
                             else "hypothesis")
        sub_vids[port_index[port]] = unfold_into(ps, arg, sub_pol, leaves)
    m = ps.new_vertex()
    sub_vids[port_index[row.main]] = m
    prems = [sub_vids[port_index[p]] for p in SHAPE_PORTS[row.shape]
             if p[0] == "prem"]
    concls = [sub_vids[port_index[p]] for p in SHAPE_PORTS[row.shape]
              if p[0] == "concl"]
    ps.add_link(kind, row.shape, prems, concls, row.main, conn, f)
    mv = ps.vertices[m]
    if polarity == "hypothesis":
        assert mv.above is None
        mv.p = f
    else:
        assert mv.below is None
        mv.q = f
    return m


def unfold(f: Formula, p: Polarity) -> ProofStructure:
    """Proof structure of a single formula occurrence on one side."""
    ps = ProofStructure()
    unfold_into(ps, f, p)
    return ps


# ---------------------------------------------------------------------------
# Axioms, cuts, linkings

def classify_axioms_cuts(ps: ProofStructure) -> tuple[set[int], set[int]]:
    """Vertices that are main formula of no link / of two links."""
    count: dict[int, int] = {v: 0 for v in ps.vertices}
    for link in ps.links.values():
        if link.main is not None:
            count[link.main] += 1
    axioms = {v for v, c in count.items() if c == 0}
    cuts = {v for v, c in count.items() if c == 2}
    return axioms, cuts


def enumerate_axiom_linkings(
        hyps: Sequence[Formula],
        concls: Sequence[Formula]) -> Iterator[ProofStructure]:
    """All ways of identifying hypothesis-polar with conclusion-polar
    atomic leaves, one merged proof structure per perfect matching.

    Yields nothing when some atom occurs unequally often on the two
    polarities.  Enumeration order is lexicographic in occurrence ids,
    so runs are reproducible.
    """
    base = ProofStructure()
    leaves: list[tuple[str, int, Polarity]] = []
    for f in hyps:
        unfold_into(base, f, "hypothesis", leaves)
    for f in concls:
        unfold_into(base, f, "conclusion", leaves)
    by_atom: dict[str, tuple[list[int], list[int]]] = {}
    for name, vid, pol in leaves:
        slot = by_atom.setdefault(name, ([], []))
        slot[0 if pol == "hypothesis" else 1].append(vid)
    names = sorted(by_atom)
    for name in names:
        h_occ, c_occ = by_atom[name]
        if len(h_occ) != len(c_occ):
            return
    pools = [itertools.permutations(sorted(by_atom[name][1]))
             for name in names]
    for choice in itertools.product(*pools):
        ps = base.copy()
        for name, perm in zip(names, choice):
            for h, c in zip(sorted(by_atom[name][0]), perm):
                ps.merge_vertices(h, c)
        yield ps
