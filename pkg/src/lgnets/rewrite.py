"""Rewriting abstract proof structures: contractions, structural rules,
reduction search, and the union-find contractibility check.

All rewriting is recorded as a trace of step objects.  A step stores the
identities of the objects it acts on plus a serial number that fixes the
ids of everything it creates, so replaying the same steps — on the whole
structure or on a piece of it — always reproduces the same vertex and
link ids.  That property is what lets sequent-proof extraction replay
sub-traces on sub-structures and still resolve references made by later
steps.
"""

from __future__ import annotations

import functools
import heapq
import itertools
import time
from dataclasses import dataclass, field

from .aps import STRUCT_TABLE, is_tensor_tree, seq2tree, tree_to_sequent
from .net import (
    B_DUAL, B_RES, MIRROR_SHAPE, PAR_SIDE, SHAPE_PORTS,
    ProofStructure, mirror_port,
)
from .syntax import (
    Atom, SBinary, SEmpty, SFormula, SUnary, SVar, Sequent, Structure,
    parse_rule_line, print_sequent,
)

__all__ = [
    "Step", "MergeStep", "ContractionStep", "StructuralStep",
    "ReductionTrace", "replay", "BudgetExhausted",
    "StructRule", "Match", "compile_rule", "parse_rules",
    "BUILTIN_RULES", "RULE_GROUPS", "rules_for_variant", "resolve_rules",
    "find_structural_matches", "apply_structural",
    "find_contraction_redexes", "contract",
    "reduce", "canonical_form", "check_contractible_lg",
    "structural_rule_to_sequent_rule",
]

# Created objects live in per-step id bands so that replaying a step
# always allocates the same ids, independent of the state it runs on.
ID_BASE = 1_000_000
_BAND = 64
_serials = itertools.count()


class BudgetExhausted(RuntimeError):
    """The search was cut off by the structural-step budget before the
    goal was found; derivability is undecided at this budget."""


@dataclass(eq=False)
class Step:
    serial: int = field(init=False)

    def __post_init__(self) -> None:
        self.serial = next(_serials)

    def _vid(self, j: int) -> int:
        assert j < 32
        return ID_BASE + self.serial * _BAND + j

    def _lid(self, j: int) -> int:
        assert j < 32
        return ID_BASE + self.serial * _BAND + 32 + j

    # subclasses mutate ps; vmap (old id -> current id or None) is the
    # occurrence-tracking map maintained for proof extraction
    def apply(self, ps: ProofStructure,
              vmap: dict[int, int | None] | None = None) -> None:
        raise NotImplementedError


def _vmap_redirect(vmap: dict[int, int | None], old: set[int],
                   new: int | None) -> None:
    for k, v in vmap.items():
        if v in old:
            vmap[k] = new


@dataclass(eq=False)
class MergeStep(Step):
    """Identify a dangling conclusion occurrence with a dangling
    hypothesis occurrence (an axiom or cut identification)."""
    top: int
    bottom: int

    def apply(self, ps, vmap=None):
        w = ps.merge_vertices(self.top, self.bottom, vid=self._vid(0))
        if vmap is not None:
            _vmap_redirect(vmap, {self.top, self.bottom}, w)
            vmap[w] = w

    @property
    def created(self) -> int:
        return self._vid(0)

    def describe(self) -> str:
        return f"merge({self.top},{self.bottom})"


@dataclass(eq=False)
class ContractionStep(Step):
    """Contract a par link with a mirror-shaped tensor link sharing all
    non-main ports, identifying the two main-side vertices."""
    par_lid: int
    tensor_lid: int
    rule_id: str | None

    def apply(self, ps, vmap=None):
        par = ps.links[self.par_lid]
        tensor = ps.links[self.tensor_lid]
        mp = par.main_port
        m = par.main
        ext = tensor.port_vertex(mirror_port(mp))
        assert m != ext, "contraction would identify a vertex with itself"
        shared = {par.port_vertex(p) for p in par.ports() if p != mp}
        ps.remove_link(self.par_lid)
        ps.remove_link(self.tensor_lid)
        for s in shared:
            ps.delete_vertex(s)
        if mp[0] == "prem":
            w = ps.merge_vertices(m, ext, vid=self._vid(0))
        else:
            w = ps.merge_vertices(ext, m, vid=self._vid(0))
        if vmap is not None:
            _vmap_redirect(vmap, shared, None)
            _vmap_redirect(vmap, {m, ext}, w)
            vmap[w] = w

    @property
    def created(self) -> int:
        return self._vid(0)

    def describe(self) -> str:
        return f"contract[{self.rule_id}]({self.par_lid},{self.tensor_lid})"


# ---------------------------------------------------------------------------
# Structural rules

@dataclass(frozen=True)
class _Pattern:
    tree: ProofStructure
    x: int
    vars: dict[str, tuple[int, str]]     # name -> (vertex, context side)

    def sorted_vids(self) -> list[int]:
        return sorted(self.tree.vertices)

    def sorted_lids(self) -> list[int]:
        return sorted(self.tree.links)


@dataclass(frozen=True)
class StructRule:
    """A structural rewrite over punctuation trees, written as a sequent
    pair over structural variables."""
    name: str
    lhs: Sequent
    rhs: Sequent
    reversible: bool
    lhs_pat: _Pattern
    rhs_pat: _Pattern

    def pattern(self, rev: bool) -> _Pattern:
        return self.rhs_pat if rev else self.lhs_pat

    def replacement(self, rev: bool) -> _Pattern:
        return self.lhs_pat if rev else self.rhs_pat

    def __str__(self) -> str:
        arrow = "<=>" if self.reversible else "=>"
        return (f"{self.name} : {print_sequent(self.lhs)} "
                f"{arrow} {print_sequent(self.rhs)}")


def _check_pure(s: Structure, name: str) -> None:
    match s:
        case SVar(_) | SEmpty():
            return
        case SFormula(_):
            raise ValueError(
                f"rule {name}: formulas are not allowed in rule patterns")
        case SUnary(_, arg):
            _check_pure(arg, name)
        case SBinary(_, left, right):
            _check_pure(left, name)
            _check_pure(right, name)


def _compile_side(seq: Sequent, name: str) -> _Pattern:
    _check_pure(seq.ante, name)
    _check_pure(seq.succ, name)
    tree, x, var_map = seq2tree(seq)
    return _Pattern(tree, x, var_map)


def compile_rule(name: str, lhs: Sequent, rhs: Sequent,
                 reversible: bool = False) -> StructRule:
    lp = _compile_side(lhs, name)
    rp = _compile_side(rhs, name)
    if set(lp.vars) != set(rp.vars):
        raise ValueError(f"rule {name}: sides use different variables")
    for var, (_, mode) in lp.vars.items():
        if rp.vars[var][1] != mode:
            raise ValueError(
                f"rule {name}: variable {var} switches sides of the turnstile")
    return StructRule(name, lhs, rhs, reversible, lp, rp)


def parse_rules(text: str) -> list[StructRule]:
    out = []
    for ln, line in enumerate(text.splitlines(), 1):
        parsed = parse_rule_line(line)
        if parsed is None:
            continue
        name, lhs, rhs, reversible = parsed
        out.append(compile_rule(name, lhs, rhs, reversible))
    return out


_BUILTIN_TEXT = """
# interaction, one direction
gr1 : V |- ((X o Y) < W) => V |- (X o (Y < W))
gr2 : V |- ((X o Y) < W) => V |- (Y < (X > W))
gr3 : V |- ((X o Y) < W) => V |- (X < (W < Y))
gr4 : V |- ((X o Y) < W) => V |- ((X < W) o Y)
# interaction, converse direction
gr1p : V |- (X o (Y < W)) => V |- ((X o Y) < W)
gr2p : V |- (Y < (X > W)) => V |- ((X o Y) < W)
gr3p : V |- (X < (W < Y)) => V |- ((X o Y) < W)
gr4p : V |- ((X < W) o Y) => V |- ((X o Y) < W)
# unit punctuation
idr_tensor : (X o e) |- Y <=> X |- Y
idl_tensor : (e o X) |- Y <=> X |- Y
idr_par : X |- (Y o e) <=> X |- Y
idl_par : X |- (e o Y) <=> X |- Y
"""

BUILTIN_RULES: dict[str, StructRule] = {
    r.name: r for r in parse_rules(_BUILTIN_TEXT)}

RULE_GROUPS: dict[str, tuple[str, ...]] = {
    "identity": ("idr_tensor", "idl_tensor", "idr_par", "idl_par"),
    "grishin_iv": ("gr1", "gr2", "gr3", "gr4"),
    "grishin_i": ("gr1p", "gr2p", "gr3p", "gr4p"),
}


def rules_for_variant(variant: str) -> list[StructRule]:
    """Structural package matching a contractibility-check variant."""
    names = {
        "grishinIV": RULE_GROUPS["grishin_iv"],
        "grishinI": RULE_GROUPS["grishin_i"],
        "both": RULE_GROUPS["grishin_iv"] + RULE_GROUPS["grishin_i"],
    }[variant]
    return [BUILTIN_RULES[n] for n in names]


def resolve_rules(spec: str) -> list[StructRule]:
    """Comma-separated rule or group names -> rule objects."""
    out: list[StructRule] = []
    seen = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        names = RULE_GROUPS.get(part, (part,))
        for n in names:
            if n not in BUILTIN_RULES:
                raise ValueError(f"unknown structural rule {n!r}")
            if n not in seen:
                seen.add(n)
                out.append(BUILTIN_RULES[n])
    return out


@dataclass(frozen=True)
class Match:
    """One embedding of a rule pattern: host links aligned with the
    pattern's sorted link ids, host vertices with its sorted vertex ids."""
    link_ids: tuple[int, ...]
    vertex_ids: tuple[int, ...]


def find_structural_matches(aps: ProofStructure, rule: StructRule,
                            rev: bool = False) -> list[Match]:
    """All embeddings of the rule's source pattern into the structure.

    Pattern links match tensor-kind host links of the same shape,
    regardless of connective decoration; the match must be injective on
    links and on vertices.  A pattern vertex with a free slot that is
    not a variable's context side only matches a host vertex whose slot
    is free and unlabelled, so formula occurrences exposed on dangling
    slots are never swallowed as internal punctuation."""
    pat = rule.pattern(rev)
    plids = pat.sorted_lids()
    pvids = pat.sorted_vids()
    var_sides = {}
    for name, (vid, mode) in pat.vars.items():
        var_sides.setdefault(vid, set()).add(mode)

    host_links = [l for l in aps.links.values() if l.kind == "tensor"]
    host_links.sort(key=lambda l: l.lid)
    matches: list[Match] = []

    def ok_free_slots(bind: dict[int, int]) -> bool:
        for pv, hv in bind.items():
            pvv = pat.tree.vertices[pv]
            hvv = aps.vertices[hv]
            for side in ("above", "below"):
                if getattr(pvv, side) is not None:
                    continue
                if side in var_sides.get(pv, ()):
                    continue
                if getattr(hvv, side) is not None:
                    return False
                if (hvv.p if side == "above" else hvv.q) is not None:
                    return False
        return True

    if not plids:
        (pv,) = pvids
        for hv in sorted(aps.vertices):
            bind = {pv: hv}
            if ok_free_slots(bind):
                matches.append(Match((), (hv,)))
        return matches

    def backtrack(i: int, lmap: dict[int, int], bind: dict[int, int],
                  used_links: set[int], used_vids: set[int]) -> None:
        if i == len(plids):
            if ok_free_slots(bind):
                matches.append(Match(
                    tuple(lmap[pl] for pl in plids),
                    tuple(bind[pv] for pv in pvids)))
            return
        pl = pat.tree.links[plids[i]]
        for hl in host_links:
            if hl.lid in used_links or hl.shape != pl.shape:
                continue
            new_bind: dict[int, int] = {}
            good = True
            for port in pl.ports():
                pv = pl.port_vertex(port)
                hv = hl.port_vertex(port)
                cur = bind.get(pv, new_bind.get(pv))
                if cur is not None:
                    if cur != hv:
                        good = False
                        break
                else:
                    if hv in used_vids or hv in new_bind.values():
                        good = False
                        break
                    new_bind[pv] = hv
            if not good:
                continue
            bind.update(new_bind)
            backtrack(i + 1, {**lmap, pl.lid: hl.lid}, bind,
                      used_links | {hl.lid},
                      used_vids | set(new_bind.values()))
            for pv in new_bind:
                del bind[pv]

    backtrack(0, {}, {}, set(), set())
    matches.sort(key=lambda m: (m.link_ids, m.vertex_ids))
    return matches


def _instantiate_pattern(ps: ProofStructure, seq: Sequent, step: "Step",
                         ) -> dict[str, tuple[int, str]]:
    """Build a rule side as fresh neutral punctuation inside ``ps`` with
    step-banded ids; returns the variable placement."""
    counters = {"v": 0, "l": 0}

    def next_vid() -> int:
        counters["v"] += 1
        return step._vid(counters["v"] - 1)

    def next_lid() -> int:
        counters["l"] += 1
        return step._lid(counters["l"] - 1)

    var_map: dict[str, tuple[int, str]] = {}

    def build(s: Structure, mode: str) -> int:
        match s:
            case SVar(name):
                vid = ps.new_vertex(vid=next_vid())
                var_map[name] = (vid, mode)
                return vid
            case SEmpty():
                conn, args = "e", ()
            case SUnary(conn, arg):
                args = (arg,)
            case SBinary(conn, left, right):
                args = (left, right)
            case _:
                raise TypeError(f"bad rule structure {s!r}")
        shape, own, kids = STRUCT_TABLE[(mode, conn)]
        slots: dict[tuple[str, int], int] = {}
        for (port, kid_mode), arg in zip(kids, args):
            slots[port] = build(arg, kid_mode)
        x = ps.new_vertex(vid=next_vid())
        slots[own] = x
        prems = [slots[p] for p in SHAPE_PORTS[shape] if p[0] == "prem"]
        concls = [slots[p] for p in SHAPE_PORTS[shape] if p[0] == "concl"]
        ps.add_link("tensor", shape, prems, concls, None, lid=next_lid())
        return x

    top = build(seq.ante, "above")
    bottom = build(seq.succ, "below")
    x = ps.merge_vertices(top, bottom, vid=next_vid())
    for name, (vid, mode) in list(var_map.items()):
        if vid in (top, bottom):
            var_map[name] = (x, mode)
    return var_map


@dataclass(eq=False)
class StructuralStep(Step):
    """Apply one structural rule at one match: remove the matched
    punctuation, rebuild the other side fresh, re-plug the contexts."""
    rule: StructRule
    rev: bool
    match: Match

    def apply(self, ps, vmap=None):
        pat = self.rule.pattern(self.rev)
        bind = dict(zip(pat.sorted_vids(), self.match.vertex_ids))
        # capture contexts: what hangs off each variable's free side
        ctx: dict[str, tuple[int, int | None, object]] = {}
        for name, (pv, mode) in pat.vars.items():
            hv = ps.vertices[bind[pv]]
            if mode == "above":
                ctx[name] = (hv.vid, hv.above, hv.p)
            else:
                ctx[name] = (hv.vid, hv.below, hv.q)
        for lid in self.match.link_ids:
            ps.remove_link(lid)
        dst = self.rule.lhs if self.rev else self.rule.rhs
        placed = _instantiate_pattern(ps, dst, self)
        for name in sorted(ctx):
            host_vid, occ, label = ctx[name]
            new_vid, mode = placed[name]
            nv = ps.vertices[new_vid]
            if occ is not None:
                link = ps.links[occ]
                want = "concl" if mode == "above" else "prem"
                for port in link.ports():
                    if port[0] == want and link.port_vertex(port) == host_vid:
                        link.set_port(port, new_vid)
                        break
                hv = ps.vertices[host_vid]
                if mode == "above":
                    hv.above = None
                    nv.above = occ
                else:
                    hv.below = None
                    nv.below = occ
            elif label is not None:
                if mode == "above":
                    nv.p = label
                else:
                    nv.q = label
        var_hosts = {bind[pv] for pv, _ in pat.vars.values()}
        for hv in set(bind.values()):
            ps.delete_vertex(hv)
        if vmap is not None:
            _vmap_redirect(vmap, set(bind.values()) - var_hosts, None)
            for name in sorted(pat.vars):
                pv = pat.vars[name][0]
                _vmap_redirect(vmap, {bind[pv]}, placed[name][0])
            for _, (nvid, _) in placed.items():
                vmap[nvid] = nvid
        self._placed = placed

    def replacement_vars(self) -> dict[str, tuple[int, str]]:
        """Variable placement in the rebuilt side (deterministic across
        replays thanks to banded ids)."""
        return dict(self._placed)

    @property
    def rule_id(self) -> str:
        return (f"s({self.rule.name},rev)" if self.rev
                else f"s({self.rule.name})")

    def describe(self) -> str:
        return f"{self.rule_id}@{self.match.link_ids or self.match.vertex_ids}"


ReductionTrace = list[Step]


def replay(ps: ProofStructure, steps: ReductionTrace,
           ) -> tuple[ProofStructure, dict[int, int | None]]:
    """Re-run a trace on (a copy of) a structure.  Returns the final
    state and the occurrence-tracking map old-id -> current-id/None."""
    work = ps.copy()
    vmap: dict[int, int | None] = {v: v for v in work.vertices}
    for step in steps:
        step.apply(work, vmap)
    return work, vmap


def apply_structural(aps: ProofStructure, rule: StructRule, match: Match,
                     rev: bool = False,
                     ) -> tuple[ProofStructure, dict[str, tuple[int, str]]]:
    """Functional application of a rule at a match; returns the rewritten
    copy and where each variable's context ended up."""
    step = StructuralStep(rule, rev, match)
    out = aps.copy()
    step.apply(out)
    return out, step.replacement_vars()


# ---------------------------------------------------------------------------
# Contraction

def find_contraction_redexes(aps: ProofStructure) -> list[tuple[int, int]]:
    """(par link, tensor link) pairs that contract right now: mirror
    shapes, every non-main port pair shares its vertex, and the two
    main-side vertices differ."""
    out = []
    for par in aps.par_links():
        mp = par.main_port
        if mp is None:
            continue
        nonmain = [p for p in par.ports() if p != mp]
        m = par.main
        for tensor in aps.tensor_links():
            if tensor.shape != MIRROR_SHAPE[par.shape]:
                continue
            if any(tensor.port_vertex(mirror_port(p)) != par.port_vertex(p)
                   for p in nonmain):
                continue
            ext = tensor.port_vertex(mirror_port(mp))
            if m == ext:
                continue
            out.append((par.lid, tensor.lid))
    return out


def contraction_rule_id(aps: ProofStructure, par_lid: int) -> str | None:
    conn = aps.links[par_lid].conn
    if conn is None:
        return None
    return f"{PAR_SIDE[conn]}{conn}"


def contract(aps: ProofStructure, par_lid: int, tensor_lid: int,
             ) -> tuple[ProofStructure, ContractionStep]:
    step = ContractionStep(par_lid, tensor_lid,
                           contraction_rule_id(aps, par_lid))
    out = aps.copy()
    step.apply(out)
    return out, step


# ---------------------------------------------------------------------------
# Canonical forms (isomorphism certificates)

@functools.lru_cache(maxsize=None)
def _fmt_formula(f) -> str:
    from .syntax import print_formula
    return print_formula(f)


def _fmt(f) -> str:
    return "" if f is None else _fmt_formula(f)


def _serialize_from(root: int, vdata: dict, ldata: dict,
                    link_ports: dict) -> tuple:
    """Vertex-id-independent serialization of the component containing
    `root`: a port-ordered traversal assigning dense indices in first-visit
    order, recording every node's local data plus neighbour indices.  Two
    components serialize equally from roots r1, r2 iff some isomorphism
    maps r1 to r2.  Vertices are keyed 2*vid, links 2*lid+1."""
    idx: dict[int, int] = {root * 2: 0}
    queue = [root * 2]
    out = []
    qi = 0
    while qi < len(queue):
        node = queue[qi]
        qi += 1
        if node & 1 == 0:
            p, q, above, below = vdata[node >> 1]
            refs = []
            for lid in (above, below):
                if lid is None:
                    refs.append(-1)
                    continue
                key = lid * 2 + 1
                i = idx.get(key)
                if i is None:
                    i = idx[key] = len(idx)
                    queue.append(key)
                refs.append(i)
            out.append(("v", p, q, refs[0], refs[1]))
        else:
            refs = []
            for vid in link_ports[node >> 1]:
                key = vid * 2
                i = idx.get(key)
                if i is None:
                    i = idx[key] = len(idx)
                    queue.append(key)
                refs.append(i)
            out.append(("l",) + ldata[node >> 1] + (tuple(refs),))
    return tuple(out)


def _min_cert(vids, vdata, ldata, link_ports, vertices) -> tuple:
    """Minimal serialization over the given candidate roots, restricted to
    roots whose cheap local invariant is minimal (isomorphism-invariant)."""
    inv = {}
    for vid in vids:
        v = vertices[vid]
        key = (vdata[vid][0], vdata[vid][1],
               ("",) if v.above is None else ldata[v.above],
               ("",) if v.below is None else ldata[v.below])
        cur = inv.get(key)
        if cur is None:
            inv[key] = [vid]
        else:
            cur.append(vid)
    return min(_serialize_from(r, vdata, ldata, link_ports)
               for r in inv[min(inv)])


def canonical_form(aps: ProofStructure) -> tuple:
    """Hashable certificate, equal for exactly the structures that are
    isomorphic as abstract proof structures: vertex labels, link kinds,
    shapes and par main ports count; tensor decoration does not.

    Computed as the minimal vertex-id-independent serialization over
    port-ordered traversals, one certificate per connected component."""
    vertices = aps.vertices
    # Vertex data: (printed p, printed q, above lid, below lid); the label
    # slots are only populated when the corresponding link slot is free.
    vdata = {vid: (_fmt(v.p), _fmt(v.q), v.above, v.below)
             for vid, v in vertices.items()}
    ldata = {}
    link_ports = {}
    for lid, l in aps.links.items():
        ldata[lid] = (l.kind, l.shape,
                      l.main_port if l.kind == "par" else None)
        link_ports[lid] = tuple(l.port_vertex(p) for p in l.ports())

    cert = _min_cert(vertices, vdata, ldata, link_ports, vertices)
    if len(cert) == len(vertices) + len(aps.links):
        return (cert,)  # connected: single component, no partition needed
    certs = [_min_cert(comp_vids, vdata, ldata, link_ports, vertices)
             for comp_vids, _comp_lids in aps.components()]
    return tuple(sorted(certs))


# ---------------------------------------------------------------------------
# Reduction search

def _goal_vertex(state: ProofStructure, goal) -> bool:
    if not is_tensor_tree(state):
        return False
    if goal is None:
        return True
    if isinstance(goal, Sequent):
        return any(tree_to_sequent(state, vid) == goal
                   for vid in sorted(state.vertices))
    return bool(goal(state))


def _grows(rule: StructRule, rev: bool) -> bool:
    src = rule.pattern(rev)
    dst = rule.lhs_pat if rev else rule.rhs_pat
    return len(dst.tree.links) > len(src.tree.links)


def reduce(aps: ProofStructure, rules: list[StructRule] = (),
           budget: float | None = None, goal=None,
           allow_linking: bool = False, prune_hook=None,
           stats: dict | None = None,
           ) -> tuple[ProofStructure, ReductionTrace] | None:
    """Search for a rewrite of the structure to a goal tensor tree.

    Best-first search over (growing structural steps, total structural
    steps, pars left), which explores states in the same order as
    iterative deepening on structural-step count with the graph-growing
    identity insertions as the outer, most expensive dimension;
    contractions and axiom identifications are free.  The search is
    contraction-eager on binary redexes: a binary redex pins its
    geometry, so while one exists the choice between redexes is branched
    on but conversions are postponed.  Visited states are deduplicated by
    canonical form; the budget caps total structural steps per path.

    goal: None (any tensor tree), a Sequent (some vertex must fold to
    exactly it), or a predicate on the final tree.  Returns the final
    structure and the trace, None when the space is provably exhausted,
    and raises BudgetExhausted when the cutoff clipped the search.
    """
    start = aps.copy()
    assert start._next_vid < ID_BASE and start._next_lid < ID_BASE
    if budget is None:
        budget = 4 * sum(1 for l in start.links.values()
                         if l.kind == "tensor")
    all_moves = [(rule, rev, _grows(rule, rev))
                 for rule in rules
                 for rev in ((False, True) if rule.reversible else (False,))]
    flat_moves = [(r, rev) for r, rev, grows in all_moves if not grows]
    grow_moves = [(r, rev) for r, rev, grows in all_moves if grows]
    counter = itertools.count()
    n_pars = sum(1 for l in start.links.values() if l.kind == "par")
    # heap entries: (growth, total, pars, tiebreak, mode, state, key, chain)
    # where mode "state" expands a state and "grow" lazily generates the
    # graph-growing children of an already-expanded state one layer later
    start_key = canonical_form(start)
    heap = [(0, 0, n_pars, next(counter), "state", start, start_key, None)]
    best = {start_key: (0, 0)}
    clipped = False

    def bump(key):
        if stats is not None:
            stats[key] = stats.get(key, 0) + 1

    while heap:
        gg, gt, pars, _, mode, state, key, chain = heapq.heappop(heap)
        if mode == "grow":
            if best.get(key, (gg - 1, gt - 1)) < (gg - 1, gt - 1):
                continue
            for rule, rev in grow_moves:
                for match in find_structural_matches(state, rule, rev):
                    step = StructuralStep(rule, rev, match)
                    child = state.copy()
                    step.apply(child)
                    ckey = canonical_form(child)
                    if best.get(ckey, (budget + 1, 0)) <= (gg, gt):
                        bump("memo_hits")
                        continue
                    best[ckey] = (gg, gt)
                    child_pars = sum(1 for l in child.links.values()
                                     if l.kind == "par")
                    heapq.heappush(heap, (gg, gt, child_pars,
                                          next(counter), "state", child,
                                          ckey, (chain, step)))
                    bump("pushed")
            continue
        if best.get(key, (gg, gt)) < (gg, gt):
            continue
        bump("expanded")
        if _goal_vertex(state, goal):
            trace: ReductionTrace = []
            while chain is not None:
                chain, step = chain
                trace.append(step)
            trace.reverse()
            return state, trace
        if prune_hook is not None and prune_hook(state):
            bump("pruned")
            continue

        children: list[tuple[int, int, ProofStructure, Step]] = []
        binary_redex = False
        for par_lid, tensor_lid in find_contraction_redexes(state):
            if state.links[par_lid].shape in (B_RES, B_DUAL):
                binary_redex = True
            step = ContractionStep(par_lid, tensor_lid,
                                   contraction_rule_id(state, par_lid))
            child = state.copy()
            step.apply(child)
            children.append((gg, gt, child, step))
        if allow_linking:
            tops = [v for v in state._sorted_vertices()
                    if v.below is None and isinstance(v.q, Atom)]
            bottoms = [v for v in state._sorted_vertices()
                       if v.above is None and isinstance(v.p, Atom)]
            for tv in tops:
                for bv in bottoms:
                    if tv.vid == bv.vid or tv.q != bv.p:
                        continue
                    step = MergeStep(tv.vid, bv.vid)
                    child = state.copy()
                    step.apply(child)
                    children.append((gg, gt, child, step))
        # contraction-eager on binary redexes: a binary redex pins its
        # geometry, so conversions are postponed until it is resolved
        # (choice between overlapping redexes is still branched on above);
        # nullary redexes do not suppress conversions, since a unit par
        # may have to wait for inserted punctuation
        if not binary_redex:
            for rule, rev in flat_moves:
                matches = find_structural_matches(state, rule, rev)
                if matches and gt >= budget:
                    clipped = True
                    continue
                for match in matches:
                    step = StructuralStep(rule, rev, match)
                    child = state.copy()
                    step.apply(child)
                    children.append((gg, gt + 1, child, step))
            if grow_moves:
                if pars == 0 or gt >= budget:
                    # growing a par-free structure only rearranges
                    # punctuation it must remove again; over budget is a
                    # cutoff either way
                    if any(find_structural_matches(state, rule, rev)
                           for rule, rev in grow_moves):
                        clipped = True
                else:
                    heapq.heappush(heap, (gg + 1, gt + 1, pars,
                                          next(counter), "grow", state,
                                          key, chain))

        for gg2, gt2, child, step in children:
            ckey = canonical_form(child)
            if best.get(ckey, (budget + 1, 0)) <= (gg2, gt2):
                bump("memo_hits")
                continue
            best[ckey] = (gg2, gt2)
            child_pars = sum(1 for l in child.links.values()
                             if l.kind == "par")
            heapq.heappush(heap, (gg2, gt2, child_pars, next(counter),
                                  "state", child, ckey, (chain, step)))
            bump("pushed")
    if clipped:
        raise BudgetExhausted(
            "no derivation within the structural-step budget")
    return None


# ---------------------------------------------------------------------------
# Union-find contractibility check

class _DSU:
    """Union-find over vertex ids with path compression and operation
    counters."""

    def __init__(self, items, stats: dict | None = None):
        self.parent = {x: x for x in items}
        self.stats = stats

    def _count(self, key):
        if self.stats is not None:
            self.stats[key] = self.stats.get(key, 0) + 1

    def find(self, x):
        self._count("finds")
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._count("unions")
            self.parent[rb] = ra

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def signature(self) -> frozenset:
        groups: dict[int, list[int]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return frozenset(frozenset(g) for g in groups.values())

    def clone(self) -> "_DSU":
        d = _DSU((), self.stats)
        d.parent = dict(self.parent)
        return d


# Which structural-rule variants let a par/tensor pair match at a given
# non-main port through mere same-class connectivity instead of literal
# vertex sharing.  Keyed by the par link's (shape, main port); the par's
# identity among the three same-shaped pars is exactly its main port.
_GATES: dict[tuple[str, tuple[str, int]],
             dict[tuple[str, int], frozenset[str]]] = {
    (B_DUAL, ("concl", 1)): {("prem", 0): frozenset({"grishinIV", "both"}),
                             ("concl", 0): frozenset({"both"})},
    (B_DUAL, ("concl", 0)): {("prem", 0): frozenset({"grishinIV", "both"}),
                             ("concl", 1): frozenset({"both"})},
    (B_DUAL, ("prem", 0)): {("concl", 0): frozenset({"grishinI", "both"}),
                            ("concl", 1): frozenset({"grishinI", "both"})},
    (B_RES, ("prem", 1)): {("concl", 0): frozenset({"grishinIV", "both"}),
                           ("prem", 0): frozenset({"both"})},
    (B_RES, ("prem", 0)): {("concl", 0): frozenset({"grishinIV", "both"}),
                           ("prem", 1): frozenset({"both"})},
    (B_RES, ("concl", 0)): {("prem", 0): frozenset({"grishinI", "both"}),
                            ("prem", 1): frozenset({"grishinI", "both"})},
}

_VARIANTS = ("grishinI", "grishinIV", "both")


def check_contractible_lg(aps: ProofStructure, variant: str,
                          strategy: str = "backtrack",
                          stats: dict | None = None) -> bool:
    """Decide contractibility-modulo-structural-rules for binary-only
    structures with the union-find pairing algorithm.

    variant selects which interaction package the check assumes
    available; strategy "greedy" is the linear pass whose operation
    counts the benchmark reports, "backtrack" explores pairing orders
    exhaustively and is exact."""
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    if any(l.shape not in (B_RES, B_DUAL) for l in aps.links.values()):
        raise ValueError("union-find check requires binary links only")
    if not aps.vertices:
        return False

    l0 = len(aps.links)
    v0 = len(aps.vertices)
    pars = [l.lid for l in aps.par_links()]
    c_final = len(pars)
    counts_ok = (2 * (l0 - 2 * c_final) == (v0 - 3 * c_final) - 1)
    if not counts_ok or not aps.is_connected():
        return False

    vids = list(aps.vertices)
    ds_res = _DSU(vids, stats)
    ds_dual = _DSU(vids, stats)
    ds_merge = _DSU(vids, stats)
    for link in aps.tensor_links():
        family = ds_res if link.shape == B_RES else ds_dual
        ports = link.ports()
        first = link.port_vertex(ports[0])
        for port in ports[1:]:
            family.union(first, link.port_vertex(port))

    def pairable(par, tensor, dsus) -> bool:
        d_res, d_dual, d_merge = dsus
        if stats is not None:
            stats["scans"] = stats.get("scans", 0) + 1
        mp = par.main_port
        gates = _GATES[(par.shape, mp)]
        family = d_res if par.shape == B_RES else d_dual
        for port in par.ports():
            if port == mp:
                continue
            vp = par.port_vertex(port)
            vt = tensor.port_vertex(mirror_port(port))
            wide = variant in gates[port]
            dsu = family if wide else d_merge
            if not dsu.same(vp, vt):
                return False
        return par.main != tensor.port_vertex(mirror_port(mp))

    def do_union(par, tensor, dsus) -> None:
        m = par.main
        ext = tensor.port_vertex(mirror_port(par.main_port))
        for dsu in dsus:
            dsu.union(m, ext)

    def partners(par, tensors):
        want = MIRROR_SHAPE[aps.links[par].shape]
        return [t for t in tensors if aps.links[t].shape == want]

    tensors0 = [l.lid for l in aps.tensor_links()]

    if strategy == "greedy":
        t0 = time.perf_counter_ns()
        remaining = list(pars)
        tensors = list(tensors0)
        dsus = (ds_res, ds_dual, ds_merge)
        progress = True
        while remaining and progress:
            progress = False
            for p in list(remaining):
                par = aps.links[p]
                hit = None
                for t in partners(p, tensors):
                    if pairable(par, aps.links[t], dsus):
                        hit = t
                        break
                if hit is not None:
                    do_union(par, aps.links[hit], dsus)
                    remaining.remove(p)
                    tensors.remove(hit)
                    progress = True
            if stats is not None:
                stats["micros"] = (time.perf_counter_ns() - t0) // 1000
        if stats is not None:
            stats["micros"] = (time.perf_counter_ns() - t0) // 1000
        return not remaining

    if strategy != "backtrack":
        raise ValueError("strategy must be 'greedy' or 'backtrack'")

    seen: set = set()

    def solve(remaining: frozenset[int], tensors: frozenset[int],
              dsus) -> bool:
        if not remaining:
            return True
        sig = (remaining, tensors,
               dsus[0].signature(), dsus[1].signature(), dsus[2].signature())
        if sig in seen:
            return False
        for p in sorted(remaining):
            par = aps.links[p]
            for t in sorted(partners(p, tensors)):
                if pairable(par, aps.links[t], dsus):
                    nxt = tuple(d.clone() for d in dsus)
                    do_union(par, aps.links[t], nxt)
                    if solve(remaining - {p}, tensors - {t}, nxt):
                        return True
        seen.add(sig)
        return False

    return solve(frozenset(pars), frozenset(tensors0),
                 (ds_res, ds_dual, ds_merge))


# ---------------------------------------------------------------------------
# Structural rules as sequent rules

def structural_rule_to_sequent_rule(rule: StructRule, leaf: str,
                                    ) -> tuple[Sequent, Sequent]:
    """Read a structural rewrite as a sequent inference displayed at one
    of its variables: (premiss pattern, conclusion pattern), with the
    rule's variables standing for arbitrary structures."""
    if leaf not in rule.lhs_pat.vars:
        raise ValueError(f"rule {rule.name} has no variable {leaf}")
    out = []
    for pat in (rule.rhs_pat, rule.lhs_pat):
        var_at = {(vid, mode): name
                  for name, (vid, mode) in pat.vars.items()}
        vid = pat.vars[leaf][0]
        out.append(tree_to_sequent(pat.tree, vid, var_at))
    return out[0], out[1]
