"""Abstract proof structures, folding, and display moves.

An abstract proof structure keeps the tensor/par split, the link shapes
and the hypothesis/conclusion labels of a proof structure but forgets
which connective produced each link (par links keep their arrow — the
main port — tensor links do not).  Punctuation links created while
rewriting carry no connective at all; they behave exactly like the
tensor links they are.

A tensor tree (an abstract proof structure without par links whose
vertex-link incidence graph is a tree) folds back into sequents: every
vertex x of the tree determines the display sequent T(x) obtained by
reading everything above x as antecedent structure and everything below
as succedent structure.  Moving x along an edge of the tree is one
residuation/Galois display step, so the sequents {T(x)} are exactly one
display-equivalence class.
"""

from __future__ import annotations

from dataclasses import dataclass

from .net import (
    B_DUAL, B_RES, TRI_DN, TRI_UP, U_DGAL, U_DIA, U_GAL, UNIT_DOWN, UNIT_UP,
    Link, ProofStructure,
)
from .syntax import (
    SBinary, SEmpty, SFormula, SUnary, SVar, Sequent, Structure,
    STRUCT_UNARY,
)

__all__ = [
    "FOLD", "FAM", "STRUCT_TABLE", "DisplayStep",
    "abstract", "is_tensor_tree", "fold_head",
    "side_term", "tree_to_sequent", "all_display_variants",
    "seq2tree", "struct_to_tree",
    "display_path", "apply_display", "display_results", "display_equivalent",
]

# ---------------------------------------------------------------------------
# Folding: entering a link at one port turns the rest of the link into
# structural punctuation over the other ports.

# (shape, entry port) -> (structural connective, other ports in argument
# order).  None as connective means the empty structure.
FOLD: dict[tuple[str, tuple[str, int]],
           tuple[str | None, tuple[tuple[str, int], ...]]] = {
    (B_RES, ("concl", 0)): ("o", (("prem", 0), ("prem", 1))),
    (B_RES, ("prem", 0)): ("<", (("concl", 0), ("prem", 1))),
    (B_RES, ("prem", 1)): (">", (("prem", 0), ("concl", 0))),
    (B_DUAL, ("prem", 0)): ("o", (("concl", 0), ("concl", 1))),
    (B_DUAL, ("concl", 0)): ("<", (("prem", 0), ("concl", 1))),
    (B_DUAL, ("concl", 1)): (">", (("concl", 0), ("prem", 0))),
    (U_DIA, ("concl", 0)): ("z", (("prem", 0),)),
    (U_DIA, ("prem", 0)): ("z", (("concl", 0),)),
    (U_GAL, ("prem", 0)): ("fl", (("prem", 1),)),
    (U_GAL, ("prem", 1)): ("ce", (("prem", 0),)),
    (U_DGAL, ("concl", 0)): ("fl", (("concl", 1),)),
    (U_DGAL, ("concl", 1)): ("ce", (("concl", 0),)),
    (TRI_UP, ("prem", 1)): ("<>", (("prem", 0), ("prem", 2))),
    (TRI_UP, ("prem", 0)): ("<|", (("prem", 1), ("prem", 2))),
    (TRI_UP, ("prem", 2)): ("|>", (("prem", 0), ("prem", 1))),
    (TRI_DN, ("concl", 1)): ("<>", (("concl", 0), ("concl", 2))),
    (TRI_DN, ("concl", 0)): ("<|", (("concl", 1), ("concl", 2))),
    (TRI_DN, ("concl", 2)): ("|>", (("concl", 0), ("concl", 1))),
    (UNIT_DOWN, ("concl", 0)): (None, ()),
    (UNIT_UP, ("prem", 0)): (None, ()),
}

# Display-rule family per shape: residuation for the binary/diamond
# links, (dual) Galois moves for the (dual) unary and ternary ones.
FAM = {
    B_RES: "rc", B_DUAL: "drc", U_DIA: "rc",
    U_GAL: "gc", U_DGAL: "dgc", TRI_UP: "gc", TRI_DN: "dgc",
}


def fold_head(shape: str, port: tuple[str, int]) -> str | None:
    return FOLD[(shape, port)][0]


def abstract(ps: ProofStructure) -> ProofStructure:
    """Forget the logical decoration: tensor links lose connective,
    formula and main port; par links keep their main port only."""
    out = ps.copy()
    for link in out.links.values():
        link.conn = None
        link.formula = None
        if link.kind != "par":
            link.main_port = None
    return out


def is_tensor_tree(aps: ProofStructure) -> bool:
    """No par links and the vertex/link incidence graph is a tree."""
    if any(l.kind == "par" for l in aps.links.values()):
        return False
    if not aps.vertices:
        return False
    if not aps.is_connected():
        return False
    incidences = sum(len(l.ports()) for l in aps.links.values())
    return incidences == len(aps.vertices) + len(aps.links) - 1


def _entry_port(link: Link, vid: int, side: str) -> tuple[str, int]:
    want = "concl" if side == "above" else "prem"
    for port in link.ports():
        if port[0] == want and link.port_vertex(port) == vid:
            return port
    raise ValueError(f"vertex {vid} not on the {side} side of link {link.lid}")


def side_term(aps: ProofStructure, vid: int, side: str,
              var_at: dict[tuple[int, str], str] | None = None) -> Structure:
    """Structure seen from a vertex looking up (side="above") or down.

    ``var_at`` maps (vertex, side) to a structural-variable name; it lets
    rule-pattern trees fold to sequents over variables."""
    v = aps.vertices[vid]
    lid = v.above if side == "above" else v.below
    if lid is None:
        if var_at is not None and (vid, side) in var_at:
            return SVar(var_at[(vid, side)])
        label = v.p if side == "above" else v.q
        if label is None:
            raise ValueError(f"dangling unlabelled vertex {vid}")
        return SFormula(label)
    link = aps.links[lid]
    entry = _entry_port(link, vid, side)
    conn, others = FOLD[(link.shape, entry)]
    kids = [side_term(aps, link.port_vertex(op),
                      "above" if op[0] == "prem" else "below", var_at)
            for op in others]
    if conn is None:
        return SEmpty()
    if conn in STRUCT_UNARY:
        return SUnary(conn, kids[0])
    return SBinary(conn, kids[0], kids[1])


def tree_to_sequent(aps: ProofStructure, vid: int,
                    var_at: dict[tuple[int, str], str] | None = None,
                    ) -> Sequent:
    """Display sequent of a tensor tree read at one of its vertices."""
    return Sequent(side_term(aps, vid, "above", var_at),
                   side_term(aps, vid, "below", var_at))


def all_display_variants(aps: ProofStructure) -> list[tuple[int, Sequent]]:
    return [(vid, tree_to_sequent(aps, vid)) for vid in sorted(aps.vertices)]


# ---------------------------------------------------------------------------
# Sequent -> tensor tree.  Inverse of folding: each structural connective
# in a given reading mode ("above" = antecedent side, "below" =
# succedent side) expands into one punctuation link with the walked
# vertex at a fixed port and the arguments at the remaining ports, each
# read in its own mode.

# (mode, connective) -> (shape, own port, ((child port, child mode), ...))
STRUCT_TABLE: dict[tuple[str, str],
                   tuple[str, tuple[str, int],
                         tuple[tuple[tuple[str, int], str], ...]]] = {
    ("above", "o"): (B_RES, ("concl", 0),
                     ((("prem", 0), "above"), (("prem", 1), "above"))),
    ("below", "o"): (B_DUAL, ("prem", 0),
                     ((("concl", 0), "below"), (("concl", 1), "below"))),
    ("above", "<"): (B_DUAL, ("concl", 0),
                     ((("prem", 0), "above"), (("concl", 1), "below"))),
    ("below", "<"): (B_RES, ("prem", 0),
                     ((("concl", 0), "below"), (("prem", 1), "above"))),
    ("above", ">"): (B_DUAL, ("concl", 1),
                     ((("concl", 0), "below"), (("prem", 0), "above"))),
    ("below", ">"): (B_RES, ("prem", 1),
                     ((("prem", 0), "above"), (("concl", 0), "below"))),
    ("above", "<>"): (TRI_DN, ("concl", 1),
                      ((("concl", 0), "below"), (("concl", 2), "below"))),
    ("below", "<>"): (TRI_UP, ("prem", 1),
                      ((("prem", 0), "above"), (("prem", 2), "above"))),
    ("above", "<|"): (TRI_DN, ("concl", 0),
                      ((("concl", 1), "below"), (("concl", 2), "below"))),
    ("below", "<|"): (TRI_UP, ("prem", 0),
                      ((("prem", 1), "above"), (("prem", 2), "above"))),
    ("above", "|>"): (TRI_DN, ("concl", 2),
                      ((("concl", 0), "below"), (("concl", 1), "below"))),
    ("below", "|>"): (TRI_UP, ("prem", 2),
                      ((("prem", 0), "above"), (("prem", 1), "above"))),
    ("above", "z"): (U_DIA, ("concl", 0), ((("prem", 0), "above"),)),
    ("below", "z"): (U_DIA, ("prem", 0), ((("concl", 0), "below"),)),
    ("above", "fl"): (U_DGAL, ("concl", 0), ((("concl", 1), "below"),)),
    ("below", "fl"): (U_GAL, ("prem", 0), ((("prem", 1), "above"),)),
    ("above", "ce"): (U_DGAL, ("concl", 1), ((("concl", 0), "below"),)),
    ("below", "ce"): (U_GAL, ("prem", 1), ((("prem", 0), "above"),)),
    ("above", "e"): (UNIT_DOWN, ("concl", 0), ()),
    ("below", "e"): (UNIT_UP, ("prem", 0), ()),
}


def struct_to_tree(tree: ProofStructure, s: Structure, mode: str,
                   var_map: dict[str, tuple[int, str]] | None = None) -> int:
    """Build the punctuation tree of one structure into ``tree``; returns
    the vertex at the walked end."""
    match s:
        case SFormula(f):
            return tree.new_vertex(p=f) if mode == "above" \
                else tree.new_vertex(q=f)
        case SVar(name):
            if var_map is None:
                raise ValueError("structural variable outside a rule pattern")
            if name in var_map:
                raise ValueError(f"non-linear structural variable {name}")
            vid = tree.new_vertex()
            var_map[name] = (vid, mode)
            return vid
        case SEmpty():
            conn, args = "e", ()
        case SUnary(conn, arg):
            args = (arg,)
        case SBinary(conn, left, right):
            args = (left, right)
        case _:
            raise TypeError(f"not a structure: {s!r}")
    shape, own, kids = STRUCT_TABLE[(mode, conn)]
    from .net import SHAPE_PORTS
    slots: dict[tuple[str, int], int] = {}
    for (port, kid_mode), arg in zip(kids, args):
        slots[port] = struct_to_tree(tree, arg, kid_mode, var_map)
    x = tree.new_vertex()
    slots[own] = x
    prems = [slots[p] for p in SHAPE_PORTS[shape] if p[0] == "prem"]
    concls = [slots[p] for p in SHAPE_PORTS[shape] if p[0] == "concl"]
    tree.add_link("tensor", shape, prems, concls, None)
    return x


def seq2tree(seq: Sequent,
             ) -> tuple[ProofStructure, int, dict[str, tuple[int, str]]]:
    """Tensor tree of a sequent: a punctuation tree with one vertex x
    such that T(x) is the sequent.  Returns (tree, x, variable map)."""
    tree = ProofStructure()
    var_map: dict[str, tuple[int, str]] = {}
    top = struct_to_tree(tree, seq.ante, "above", var_map)
    bottom = struct_to_tree(tree, seq.succ, "below", var_map)
    x = tree.merge_vertices(top, bottom)
    for name, (vid, mode) in list(var_map.items()):
        if vid in (top, bottom):
            var_map[name] = (x, mode)
    return tree, x, var_map


# ---------------------------------------------------------------------------
# Display steps

@dataclass(frozen=True)
class DisplayStep:
    """One residuation/Galois move: re-reading a tensor tree at the
    neighbouring vertex across one link.  ``from_conn``/``to_conn`` are
    the structural connectives the link folds to at the departed and
    arrived ports; together with the family they name the inference.
    The ports disambiguate the one name (rc(z;z)) that reads the same
    in both directions."""
    fam: str
    from_conn: str
    to_conn: str
    from_port: tuple[str, int] | None = None
    to_port: tuple[str, int] | None = None

    @property
    def rule_id(self) -> str:
        return f"{self.fam}({self.from_conn};{self.to_conn})"

    def __str__(self) -> str:
        return self.rule_id


def _vertex_ports(link: Link, vid: int) -> list[tuple[str, int]]:
    return [p for p in link.ports() if link.port_vertex(p) == vid]


def display_path(aps: ProofStructure, x: int, y: int) -> list[DisplayStep]:
    """Display steps along the unique tree path from x to y."""
    prev: dict[int, tuple[int, int] | None] = {x: None}
    queue = [x]
    while queue and y not in prev:
        u = queue.pop(0)
        for lid in aps.vertex_links(u):
            link = aps.links[lid]
            for port in link.ports():
                w = link.port_vertex(port)
                if w not in prev:
                    prev[w] = (u, lid)
                    queue.append(w)
    if y not in prev:
        raise ValueError("vertices not connected")
    hops: list[tuple[int, int, int]] = []
    at = y
    while prev[at] is not None:
        u, lid = prev[at]
        hops.append((u, lid, at))
        at = u
    steps = []
    for u, lid, w in reversed(hops):
        link = aps.links[lid]
        u_port = _vertex_ports(link, u)[0]
        w_port = _vertex_ports(link, w)[0]
        steps.append(DisplayStep(FAM[link.shape],
                                 fold_head(link.shape, u_port),
                                 fold_head(link.shape, w_port),
                                 u_port, w_port))
    return steps


def display_results(seq: Sequent, fam: str, from_conn: str,
                    to_conn: str) -> list[Sequent]:
    """Every sequent one named display move away from ``seq``.  A name
    is usually unambiguous; rc(z;z) on a sequent with ◌ on both sides
    yields two results."""
    tree, x, _ = seq2tree(seq)
    v = tree.vertices[x]
    out = []
    for side in ("above", "below"):
        lid = v.above if side == "above" else v.below
        if lid is None:
            continue
        link = tree.links[lid]
        if link.shape not in FAM:       # unit links cannot be crossed
            continue
        entry = _entry_port(link, x, side)
        if FAM[link.shape] != fam or fold_head(link.shape, entry) != from_conn:
            continue
        _, others = FOLD[(link.shape, entry)]
        for op in others:
            if fold_head(link.shape, op) == to_conn:
                out.append((entry, op,
                            tree_to_sequent(tree, link.port_vertex(op))))
    return out


def apply_display(seq: Sequent, step: DisplayStep) -> Sequent:
    """Perform one display move on a sequent; raises ValueError when the
    move does not fit the sequent's outermost structure."""
    found = display_results(seq, step.fam, step.from_conn, step.to_conn)
    if step.from_port is not None:
        found = [f for f in found
                 if f[0] == step.from_port and f[1] == step.to_port]
    if not found:
        raise ValueError(f"display step {step} does not apply to {seq}")
    return found[0][2]


def display_equivalent(s1: Sequent, s2: Sequent) -> bool:
    """Whether two sequents are in the same display-equivalence class."""
    tree, _, _ = seq2tree(s1)
    return any(seq == s2 for _, seq in all_display_variants(tree))
