"""Unfolding, axiom linkings, and axiom/cut classification."""

import pytest
from hypothesis import given, strategies as st

from lgnets.net import (
    B_DUAL, B_RES, UNIT_DOWN, UNIT_UP,
    ProofStructure, classify_axioms_cuts, enumerate_axiom_linkings, unfold,
)
from lgnets.syntax import Atom, parse_formula

a, b, i, t = (Atom(n) for n in "abit")


def link_by_conn(ps, conn):
    found = [l for l in ps.links.values() if l.conn == conn]
    assert len(found) == 1
    return found[0]


def test_unfold_atom():
    ps = unfold(a, "conclusion")
    assert len(ps.vertices) == 1 and not ps.links
    (v,) = ps.vertices.values()
    assert v.p == a and v.q == a
    assert v.above is None and v.below is None


def test_unfold_product_conclusion():
    f = parse_formula("a * b")
    ps = unfold(f, "conclusion")
    assert len(ps.links) == 1 and len(ps.vertices) == 3
    (link,) = ps.links.values()
    assert link.kind == "tensor" and link.shape == B_RES and link.conn == "*"
    root = ps.vertices[link.main]
    assert root.q == f and root.below is None and root.p is None
    va, vb = (ps.vertices[v] for v in link.prems)
    assert va.p == a and va.q is None and va.above is None
    assert vb.p == b and vb.q is None


def test_unfold_product_hypothesis_is_par():
    ps = unfold(parse_formula("a * b"), "hypothesis")
    (link,) = ps.links.values()
    assert link.kind == "par" and link.shape == B_DUAL
    assert link.main_port == ("prem", 0)
    root = ps.vertices[link.main]
    assert root.p == parse_formula("a * b") and root.above is None


def test_unfold_lowering_example():
    # (bot o- a) -o bot in hypothesis position: tensor -o over a par o-,
    # a unit-shaped par for the inner bot, a unit-shaped tensor for the
    # outer bot.
    f = parse_formula("(bot o- a) -o bot")
    ps = unfold(f, "hypothesis")
    assert len(ps.links) == 4
    imp = link_by_conn(ps, "-o")
    assert imp.kind == "tensor" and imp.shape == B_RES
    assert imp.main_port == ("prem", 1)
    root = ps.vertices[imp.main]
    assert root.p == f and root.above is None

    sub = link_by_conn(ps, "o-")
    assert sub.kind == "par" and sub.shape == B_DUAL
    mid = ps.vertices[sub.main]
    assert mid.above == sub.lid and mid.below == imp.lid
    assert mid.p is None and mid.q is None

    bots = sorted((l for l in ps.links.values() if l.conn == "bot"),
                  key=lambda l: l.lid)
    inner, outer = bots
    assert inner.kind == "par" and inner.shape == UNIT_DOWN
    assert outer.kind == "tensor" and outer.shape == UNIT_UP

    assert ps.hypotheses() == [(root.vid, f)]
    assert ps.conclusions() == [(sub.concls[1], a)]


def test_linking_counts():
    f = parse_formula("(bot o- a) -o bot")
    assert len(list(enumerate_axiom_linkings([f], [a]))) == 1
    assert len(list(enumerate_axiom_linkings([a], [b]))) == 0
    assert len(list(enumerate_axiom_linkings([a, a],
                                             [parse_formula("a * a")]))) == 2
    assert len(list(enumerate_axiom_linkings(
        [a], [parse_formula("(a o- i) * i")]))) == 1


def test_linking_enumeration_order():
    one, two = enumerate_axiom_linkings([a, a], [parse_formula("a * a")])
    tensor1 = link_by_conn(one, "*")
    tensor2 = link_by_conn(two, "*")
    # first matching pairs lowest hypothesis occurrence with lowest
    # conclusion occurrence; the second swaps them
    assert tensor1.prems == [5, 6]
    assert tensor2.prems == [6, 5]


def test_linked_net_axioms():
    f = parse_formula("(bot o- a) -o bot")
    (ps,) = enumerate_axiom_linkings([f], [a])
    axioms, cuts = classify_axioms_cuts(ps)
    assert not cuts
    assert len(axioms) == 1
    (w,) = axioms
    assert ps.vertices[w].q == a


def test_cut_classification():
    f = parse_formula("a * b")
    (ps,) = enumerate_axiom_linkings([f], [f])
    pars = [l for l in ps.links.values() if l.kind == "par"]
    tensors = [l for l in ps.links.values() if l.kind == "tensor"]
    assert len(pars) == 1 and len(tensors) == 1
    axioms, cuts = classify_axioms_cuts(ps)
    assert len(axioms) == 2 and not cuts
    # identifying the two main occurrences of a * b turns them into a cut
    ps.merge_vertices(tensors[0].main, pars[0].main)
    axioms, cuts = classify_axioms_cuts(ps)
    assert len(axioms) == 2 and len(cuts) == 1


def test_embedding_guard_shapes():
    # printed and mirrored orientation of the vacuous-adjunction formula
    # unfold with swapped link variants on the guard subtree
    printed = parse_formula("(((t o- i) * i) @- a) -@ t")
    ps = unfold(printed, "hypothesis")
    kinds = {l.conn: l.kind for l in ps.links.values()}
    assert kinds == {"-@": "par", "@-": "tensor", "*": "tensor", "o-": "par"}

    mirrored = parse_formula("(t @- a) -@ ((t o- i) * i)")
    ps2 = unfold(mirrored, "hypothesis")
    kinds2 = {l.conn: l.kind for l in ps2.links.values()}
    assert kinds2 == {"-@": "par", "@-": "tensor", "*": "par", "o-": "tensor"}
    assert len(list(enumerate_axiom_linkings([mirrored], [a]))) == 1
    assert len(list(enumerate_axiom_linkings([printed], [a]))) == 1


def test_remove_link_exposes_labels():
    ps = unfold(parse_formula("a * b"), "conclusion")
    (link,) = list(ps.links.values())
    ps.remove_link(link.lid, expose=True)
    assert not ps.links
    labelled = {(v.p, v.q) for v in ps.vertices.values()}
    f = parse_formula("a * b")
    assert labelled == {(a, a), (b, b), (f, f)}


def test_add_link_rejects_occupied_slot():
    ps = ProofStructure()
    v = ps.new_vertex()
    w = ps.new_vertex()
    ps.add_link("tensor", UNIT_UP, [v], [], ("prem", 0), "bot")
    with pytest.raises(ValueError):
        ps.add_link("tensor", UNIT_UP, [v], [], ("prem", 0), "bot")
    ps.add_link("tensor", UNIT_DOWN, [], [w], ("concl", 0), "one")
    with pytest.raises(ValueError):
        ps.add_link("tensor", UNIT_DOWN, [], [w], ("concl", 0), "one")


def test_components_and_subgraph():
    f = parse_formula("(bot o- a) -o bot")
    ps = ProofStructure()
    from lgnets.net import unfold_into
    unfold_into(ps, f, "hypothesis")
    unfold_into(ps, a, "conclusion")
    comps = ps.components()
    assert len(comps) == 2
    big = max(comps, key=lambda c: len(c[0]))
    sub = ps.subgraph(big[0])
    assert set(sub.links) == set(big[1]) and len(sub.links) == 4


def formulas(max_depth=3):
    atoms = st.sampled_from([Atom(n) for n in "abc"])
    from lgnets.syntax import LOGICAL_BINARY, LOGICAL_NULLARY, LOGICAL_UNARY
    from lgnets.syntax import Binary, Nullary, Unary
    nullary = st.sampled_from([Nullary(c) for c in LOGICAL_NULLARY])
    return st.recursive(
        atoms | nullary,
        lambda kids: st.one_of(
            st.builds(Unary, st.sampled_from(list(LOGICAL_UNARY)), kids),
            st.builds(Binary, st.sampled_from(list(LOGICAL_BINARY)),
                      kids, kids)),
        max_leaves=6)


def count_compound(f):
    from lgnets.syntax import Binary, Nullary, Unary
    match f:
        case Atom(_):
            return 0
        case Nullary(_):
            return 1
        case Unary(_, arg):
            return 1 + count_compound(arg)
        case Binary(_, l, r):
            return 1 + count_compound(l) + count_compound(r)


@given(formulas(), st.sampled_from(["hypothesis", "conclusion"]))
def test_unfold_invariants(f, pol):
    ps = unfold(f, pol)
    assert len(ps.links) == count_compound(f)
    for v in ps.vertices.values():
        if v.p is not None:
            assert v.above is None
        if v.q is not None:
            assert v.below is None
    for link in ps.links.values():
        for port in link.ports():
            vid = link.port_vertex(port)
            v = ps.vertices[vid]
            if port[0] == "prem":
                assert v.below == link.lid
            else:
                assert v.above == link.lid
    # the root occurrence carries the whole formula on its outer side
    if pol == "hypothesis":
        assert [lab for _, lab in ps.hypotheses()].count(f) >= 1
    else:
        assert [lab for _, lab in ps.conclusions()].count(f) >= 1
    assert ps.is_connected()
