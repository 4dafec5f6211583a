"""Graph representation, canonicalization, homomorphisms, unravelling."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIG_FC, SIG_Y, ctg, random_graph, tg
from tgrew.core import (
    BOT,
    ArityMismatch,
    CanonicalTermGraph,
    DanglingSuccessor,
    NoSuchNode,
    Signature,
    UnknownSymbol,
    UnreachableNode,
    bisimilar,
    canonicalize,
    collapse,
    delta_hom,
    depth,
    is_tree,
    iso,
    positions_up_to,
    subgraph,
    unravel_to_depth,
    validate,
)


def knot_graph() -> CanonicalTermGraph:
    """app node whose second successor is itself, first child fun."""
    return ctg({"n0": ("app", ["n1", "n0"]), "n1": "fun"}, "n0", SIG_Y)


class TestValidate:
    def test_minimal_shared_graph(self, sig_fc):
        g = tg({"n0": ("f", ["n1", "n1"]), "n1": "c"}, "n0", sig_fc)
        assert len(g) == 2
        assert g.lab("n0") == "f"
        assert g.suc("n0") == ("n1", "n1")

    def test_arity_mismatch(self, sig_fc):
        with pytest.raises(ArityMismatch) as exc:
            validate({"n0": ("f", ("n1",)), "n1": ("c", ())}, "n0", sig_fc)
        assert exc.value.node == "n0"

    def test_unreachable_node_rejected(self, sig_fc):
        with pytest.raises(UnreachableNode) as exc:
            validate({"n0": ("c", ()), "n1": ("c", ())}, "n0", sig_fc)
        assert exc.value.node == "n1"

    def test_unknown_symbol(self, sig_fc):
        with pytest.raises(UnknownSymbol):
            validate({"n0": ("mystery", ())}, "n0", sig_fc)

    def test_dangling_successor(self, sig_fc):
        with pytest.raises(DanglingSuccessor):
            validate({"n0": ("f", ("n1", "gone")), "n1": ("c", ())}, "n0", sig_fc)

    def test_missing_root(self, sig_fc):
        with pytest.raises(NoSuchNode):
            validate({"n0": ("c", ())}, "other", sig_fc)

    def test_bot_and_variables_are_nullary(self):
        sig = Signature()
        with pytest.raises(ArityMismatch):
            sig.declare(BOT, 2)
        with pytest.raises(ArityMismatch):
            sig.declare("$x", 1)
        assert sig.arity(BOT) == 0
        assert sig.arity("$y") == 0


class TestDepthAndPositions:
    def test_root_depth_zero(self, unshared_fcc):
        assert depth(unshared_fcc, unshared_fcc.root) == 0

    def test_knot_child_depth(self):
        h0 = knot_graph()
        fun_node = next(n for n in h0.nodes if h0.lab(n) == "fun")
        assert depth(h0, fun_node) == 1

    def test_shared_constant_depth(self, shared_fcc):
        c_node = next(n for n in shared_fcc.nodes if shared_fcc.lab(n) == "c")
        assert depth(shared_fcc, c_node) == 1

    def test_no_such_node(self, shared_fcc):
        with pytest.raises(NoSuchNode):
            depth(shared_fcc, 99)

    def test_positions_of_root(self, unshared_fcc):
        assert positions_up_to(unshared_fcc, unshared_fcc.root, 0) == {()}

    def test_positions_of_shared_constant(self, shared_fcc):
        c_node = next(n for n in shared_fcc.nodes if shared_fcc.lab(n) == "c")
        assert positions_up_to(shared_fcc, c_node, 1) == {(0,), (1,)}

    def test_positions_through_self_loop(self):
        h0 = knot_graph()
        fun_node = next(n for n in h0.nodes if h0.lab(n) == "fun")
        assert positions_up_to(h0, fun_node, 2) == {(0,), (1, 0)}


class TestCanonicalize:
    def test_idempotent(self, unshared_fcc):
        c = canonicalize(unshared_fcc)
        assert canonicalize(c) == c

    def test_renaming_invariance(self, sig_fc):
        a = tg({"x": ("f", ["y", "z"]), "y": "c", "z": "c"}, "x", sig_fc)
        b = tg({"q": ("f", ["p", "r"]), "r": "c", "p": "c"}, "q", sig_fc)
        assert canonicalize(a) == canonicalize(b)

    def test_sharing_distinguished(self, unshared_fcc, shared_fcc):
        assert canonicalize(unshared_fcc) != canonicalize(shared_fcc)

    def test_node_zero_is_root(self, unshared_fcc):
        assert canonicalize(unshared_fcc).root == 0

    def test_least_position_order(self, sig_fc):
        # right child named before the left child's child
        g = tg(
            {"r": ("f", ["u", "v"]), "u": ("f", ["w", "w"]), "v": "c", "w": "b"},
            "r", sig_fc,
        )
        c = canonicalize(g)
        assert c.labels == ("f", "f", "c", "b")


class TestIsoAndHom:
    def test_reflexive(self, unshared_fcc):
        assert iso(unshared_fcc, unshared_fcc)

    def test_sharing_not_isomorphic(self, unshared_fcc, shared_fcc):
        assert not iso(unshared_fcc, shared_fcc)
        assert not iso(shared_fcc, unshared_fcc)

    def test_identity_hom(self, unshared_fcc):
        g = canonicalize(unshared_fcc)
        assert delta_hom(g, g, ()) == {n: n for n in g.nodes}

    def test_collapsing_hom_exists(self, unshared_fcc, shared_fcc):
        phi = delta_hom(unshared_fcc, shared_fcc, ())
        assert phi == {0: 0, 1: 1, 2: 1}

    def test_no_hom_from_shared_to_unshared(self, unshared_fcc, shared_fcc):
        assert delta_hom(shared_fcc, unshared_fcc, ()) is None

    def test_hom_conditions_hold_nodewise(self):
        rng = random.Random(11)
        checked = 0
        for _ in range(200):
            g = random_graph(rng, 8)
            h = random_graph(rng, 8)
            phi = delta_hom(g, h, (BOT,))
            if phi is None:
                continue
            checked += 1
            assert phi[g.root] == h.root
            for n in g.nodes:
                if g.lab(n) == BOT:
                    continue
                assert g.lab(n) == h.lab(phi[n])
                for i, s in enumerate(g.suc(n)):
                    assert phi[s] == h.suc(phi[n])[i]
        assert checked > 0

    def test_non_nullary_suspension_rejected(self, unshared_fcc):
        with pytest.raises(ValueError):
            delta_hom(unshared_fcc, unshared_fcc, ("f",))


class TestBisimilarityAndCollapse:
    def test_reflexive(self, unshared_fcc):
        assert bisimilar(unshared_fcc, unshared_fcc)

    def test_sharing_bisimilar(self, unshared_fcc, shared_fcc):
        assert bisimilar(unshared_fcc, shared_fcc)

    def test_collapse_already_shared(self, shared_fcc):
        assert collapse(shared_fcc) == canonicalize(shared_fcc)

    def test_collapse_merges_constants(self, unshared_fcc, shared_fcc):
        assert collapse(unshared_fcc) == canonicalize(shared_fcc)

    def test_collapse_idempotent(self):
        rng = random.Random(3)
        for _ in range(100):
            g = random_graph(rng, 9)
            c = collapse(g)
            assert collapse(c) == c
            assert bisimilar(c, g)

    def test_collapse_keeps_distinct_spine(self):
        # unfolding chain: app nodes at different unfolding depths stay apart
        g2 = ctg(
            {
                "a0": ("app", ["f", "a1"]),
                "a1": ("app", ["f", "a2"]),
                "a2": ("app", ["y", "f"]),
                "f": "fun",
                "y": "Y",
            },
            "a0", SIG_Y,
        )
        c = collapse(g2)
        assert len(c) == len(g2)
        assert sum(1 for n in c.nodes if c.lab(n) == "fun") == 1

    def test_no_two_result_nodes_bisimilar(self):
        rng = random.Random(5)
        for _ in range(50):
            c = collapse(random_graph(rng, 8))
            for n in c.nodes:
                for m in c.nodes:
                    if n != m:
                        assert not bisimilar(subgraph(c, n), subgraph(c, m))


class TestUnravel:
    def test_acyclic_fully_expands(self, shared_fcc, unshared_fcc):
        assert unravel_to_depth(shared_fcc, 2) == canonicalize(unshared_fcc)

    def test_knot_two_levels(self):
        h0 = knot_graph()
        expected = ctg(
            {"r": ("app", ["f", "i"]), "f": "fun", "i": ("app", ["b1", "b2"]), "b1": BOT, "b2": BOT},
            "r", SIG_Y,
        )
        assert unravel_to_depth(h0, 2) == expected

    def test_depth_zero_cuts_root(self, unshared_fcc):
        assert unravel_to_depth(unshared_fcc, 0) == ctg({"n": BOT}, "n", SIG_FC)

    def test_result_is_tree(self):
        rng = random.Random(13)
        for _ in range(60):
            t = unravel_to_depth(random_graph(rng, 7), 4)
            assert is_tree(t)

    def test_bot_hom_back_to_source(self):
        # cut points act as holes instantiated by the original graph
        rng = random.Random(17)
        for _ in range(60):
            g = random_graph(rng, 7)
            for d in (0, 1, 3):
                assert delta_hom(unravel_to_depth(g, d), g, (BOT,)) is not None

    def test_bisimilar_iff_unravellings_agree(self):
        rng = random.Random(19)
        for _ in range(80):
            g = random_graph(rng, 6)
            h = random_graph(rng, 6)
            agree = all(
                unravel_to_depth(g, d) == unravel_to_depth(h, d) for d in range(0, 14)
            )
            assert bisimilar(g, h) == agree


class TestSubgraph:
    def test_at_root_is_identity(self, shared_fcc):
        g = canonicalize(shared_fcc)
        assert subgraph(g, g.root) == g

    def test_at_leaf(self, unshared_fcc):
        g = canonicalize(unshared_fcc)
        sub = subgraph(g, 1)
        assert len(sub) == 1 and sub.lab(sub.root) == "c"

    def test_self_loop_keeps_everything(self):
        h0 = knot_graph()
        assert iso(subgraph(h0, h0.root), h0)


@st.composite
def graphs(draw):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    size = draw(st.integers(min_value=1, max_value=9))
    return random_graph(random.Random(seed), size)


class TestCanonicalProperties:
    @given(graphs())
    @settings(max_examples=150, deadline=None)
    def test_canonical_is_isomorphic(self, g):
        assert iso(g, canonicalize(g))

    @given(graphs(), graphs())
    @settings(max_examples=150, deadline=None)
    def test_iso_iff_equal_canonical(self, g, h):
        assert iso(g, h) == (canonicalize(g) == canonicalize(h))

    @given(graphs(), graphs())
    @settings(max_examples=100, deadline=None)
    def test_forced_iso_unique(self, g, h):
        if iso(g, h):
            phi = delta_hom(g, h, ())
            assert phi is not None and len(set(phi.values())) == len(phi)
