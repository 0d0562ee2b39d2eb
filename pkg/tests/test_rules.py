import pytest
from hypothesis import given, settings, strategies as st

from ellss.graph import ProblemKind, complete_graph, make_graph, path_graph
from ellss.rules import (IN, OUT, NodeView, RemovableMode, RuleClass,
                         RuleContractError, StateVector, apply_rule, dominators_of,
                         enabled_rules, forbidden_sdds, fresh_view, gc_macros,
                         is_macros, removable_sdds, rule_system, satisfied_sdds,
                         vc_macros)

from conftest import binary_states, colorings, graphs

FAITHFUL, SELF_AWARE = RemovableMode.FAITHFUL, RemovableMode.SELF_AWARE
KINDS = list(ProblemKind)


def sv(kind, *values):
    return StateVector(kind, tuple(values))


def view(state, i):
    return fresh_view(state, i)


# -- naive set-based evaluator for the SDDS macros --------------------------


def _naive_removable(g, members, i, mode):
    def covered(node, d, without=None):
        return any(k in members and k != without and g.services[k] >> d & 1
                   for k in g.adj[node])

    if not all(covered(i, d) for d in g.demand_labels(i)):
        return False
    for j in g.adj[i]:
        if mode is SELF_AWARE and j in members:
            continue
        needs = [d for d in g.demand_labels(j) if g.services[i] >> d & 1]
        if not all(covered(j, d, without=i) for d in needs):
            return False
    return True


def _naive_forbidden(g, members, i, mode):
    if i not in members or not _naive_removable(g, members, i, mode):
        return False
    ok = lambda k: g.ids[k] < g.ids[i] or not _naive_removable(g, members, k, mode)
    rivals = set()
    for j in g.adj[i]:
        shared = g.demands[j] & g.services[i]
        if not shared:
            continue
        rivals |= {k for k in g.adj[j] if k in members and g.services[k] & shared}
        if j in members and (mode is SELF_AWARE or g.services[j] & shared):
            rivals.add(j)
    if mode is SELF_AWARE:
        rivals |= {j for j in g.adj[i] if j in members and g.services[j] & g.demands[i]}
    rivals.discard(i)
    return all(ok(k) for k in rivals)


@settings(max_examples=150)
@given(st.data())
def test_sdds_macros_match_naive_evaluator(data):
    g = data.draw(graphs())
    s = StateVector(ProblemKind.SDDS, data.draw(binary_states(g)))
    members = s.members()
    for mode in RemovableMode:
        for i in range(g.n):
            assert removable_sdds(view(s, i), g, mode) == _naive_removable(g, members, i, mode)
            assert forbidden_sdds(view(s, i), g, mode) == _naive_forbidden(g, members, i, mode)


# -- worked examples ----------------------------------------------------------


def test_p3_all_in_faithful_forbids_only_node_3(p3):
    s = sv(ProblemKind.SDDS, IN, IN, IN)
    forb = [g_id for i, g_id in enumerate(p3.ids) if forbidden_sdds(view(s, i), p3, FAITHFUL)]
    assert forb == [3]
    assert all(satisfied_sdds(view(s, i), p3) for i in range(3))


def test_p3_removable_examples(p3):
    s = sv(ProblemKind.SDDS, IN, IN, OUT)
    # Verbatim, node 2 counts as relying on 1 even though 2 is IN.
    assert not removable_sdds(view(s, 0), p3, FAITHFUL)
    assert removable_sdds(view(s, 0), p3, SELF_AWARE)
    # Node 2 is the only cover of 3.
    assert not removable_sdds(view(s, 1), p3, FAITHFUL)
    assert satisfied_sdds(view(s, 2), p3)
    t = sv(ProblemKind.SDDS, OUT, IN, OUT)
    assert not removable_sdds(view(t, 1), p3, SELF_AWARE)


def test_self_aware_forbids_lower_of_two_adjacent_members(p3):
    s = sv(ProblemKind.SDDS, IN, IN, OUT)
    forb = {p3.ids[i] for i in range(3) if forbidden_sdds(view(s, i), p3, SELF_AWARE)}
    assert forb == {1}


def test_dominators(p3):
    s = sv(ProblemKind.SDDS, IN, IN, IN)
    assert {p3.ids[k] for k in dominators_of(view(s, 0), p3, 1)} == {1, 2, 3}
    t = sv(ProblemKind.SDDS, IN, IN, OUT)
    assert {p3.ids[k] for k in dominators_of(view(t, 0), p3, 1)} == {1, 2}


def test_multilabel_demand_needs_matching_service():
    g = make_graph([1, 2, 3], [(1, 2), (1, 3)], [["a", "b"], ["a"], ["b"]],
                   [[], ["a"], ["a"]], labels=["a", "b"])
    s = sv(ProblemKind.SDDS, OUT, IN, IN)
    # Node 1 demands a and b; nobody serves b.
    assert not satisfied_sdds(view(s, 0), g)


def test_vc_examples(p3):
    s = sv(ProblemKind.VC, IN, IN, IN)
    m = [vc_macros(view(s, i), p3) for i in range(3)]
    assert [x["removable"] for x in m] == [True, True, True]
    assert [x["forbidden"] for x in m] == [False, False, True]
    u = sv(ProblemKind.VC, IN, IN, OUT)
    assert [vc_macros(view(u, i), p3)["forbidden"] for i in range(3)] == [True, False, False]
    k2 = complete_graph(2)
    both_out = sv(ProblemKind.VC, OUT, OUT)
    assert all(vc_macros(view(both_out, i), k2)["unsatisfied"] for i in range(2))
    lone = make_graph([1], [])
    assert not vc_macros(view(sv(ProblemKind.VC, OUT), 0), lone)["unsatisfied"]
    t = sv(ProblemKind.VC, OUT, OUT, IN)
    assert vc_macros(view(t, 0), p3)["unsatisfied"]
    assert not vc_macros(view(t, 2), p3)["unsatisfied"]


def test_is_examples(p3):
    s = sv(ProblemKind.IS, OUT, OUT, OUT)
    m = [is_macros(view(s, i), p3) for i in range(3)]
    assert [x["addable"] for x in m] == [True, True, True]
    assert [x["forbidden"] for x in m] == [False, False, True]
    system = rule_system(ProblemKind.IS)
    assert apply_rule(system, s, 2, "Forbidden-IS", p3).values == (OUT, OUT, IN)
    u = sv(ProblemKind.IS, OUT, OUT, IN)
    assert [is_macros(view(u, i), p3)["forbidden"] for i in range(3)] == [True, False, False]
    lone = make_graph([1], [])
    assert is_macros(view(sv(ProblemKind.IS, OUT), 0), lone)["forbidden"]
    t = sv(ProblemKind.IS, IN, IN, OUT)
    assert [is_macros(view(t, i), p3)["unsatisfied"] for i in range(3)] == [True, True, False]


def test_gc_triangle_proper_is_silent(triangle):
    s = sv(ProblemKind.GC, 1, 2, 3)
    system = rule_system(ProblemKind.GC)
    for i in range(3):
        assert not gc_macros(view(s, i), triangle)["subtractable"]
        assert enabled_rules(system, view(s, i), triangle) == []


def test_gc_triangle_conflict(triangle):
    s = sv(ProblemKind.GC, 1, 1, 1)
    system = rule_system(ProblemKind.GC)
    assert enabled_rules(system, view(s, 1), triangle) == ["Unsatisfied-GC"]
    assert apply_rule(system, s, 2, "Unsatisfied-GC", triangle).values == (1, 1, 4)


def test_gc_p3_forbidden_drops_to_lowest_free(p3):
    s = sv(ProblemKind.GC, 1, 2, 4)
    system = rule_system(ProblemKind.GC)
    m = gc_macros(view(s, 2), p3)
    assert m["subtractable"] and m["forbidden"]
    assert apply_rule(system, s, 2, "Forbidden-GC", p3).values == (1, 2, 1)


def test_lowest_free_color_contract():
    from ellss.rules import _lowest_free_color
    g = path_graph(2)
    assert _lowest_free_color({0: 5, 1: 1}, g, 0) == 2

    class Everything(dict):
        # A neighbor that "holds" every color at once.
        def __getitem__(self, k):
            return _Any()

    with pytest.raises(RuleContractError):
        _lowest_free_color(Everything(), g, 0)


class _Any:
    def __eq__(self, other):
        return True

    def __ne__(self, other):
        return False


def test_rule_order_and_classes():
    for kind in KINDS:
        system = rule_system(kind)
        assert [r.rule_class for r in system.rules] == [RuleClass.F2_LATTICE,
                                                        RuleClass.F1_CORRECTION]
        assert system.rules[0].name.startswith("Forbidden")


def test_apply_rejects_wrong_kind(p3):
    with pytest.raises(ValueError):
        apply_rule(rule_system(ProblemKind.VC), sv(ProblemKind.IS, IN, IN, IN),
                   0, "Forbidden-VC", p3)


# -- properties ---------------------------------------------------------------


def _state(data, kind, g):
    if kind is ProblemKind.GC:
        return StateVector(kind, data.draw(colorings(g)))
    return StateVector(kind, data.draw(binary_states(g)))


@settings(max_examples=120)
@given(st.data(), st.sampled_from(KINDS), st.sampled_from(list(RemovableMode)))
def test_guards_mutually_exclusive(data, kind, mode):
    g = data.draw(graphs())
    s = _state(data, kind, g)
    system = rule_system(kind)
    for i in range(g.n):
        assert len(enabled_rules(system, view(s, i), g, mode)) <= 1


@settings(max_examples=120)
@given(st.data(), st.sampled_from(list(RemovableMode)))
def test_forbidden_implies_removable(data, mode):
    g = data.draw(graphs())
    s = StateVector(ProblemKind.SDDS, data.draw(binary_states(g)))
    for i in range(g.n):
        if forbidden_sdds(view(s, i), g, mode):
            assert removable_sdds(view(s, i), g, mode)


@settings(max_examples=120)
@given(st.data(), st.sampled_from(KINDS))
def test_rule_direction(data, kind):
    g = data.draw(graphs())
    s = _state(data, kind, g)
    system = rule_system(kind)
    for i in range(g.n):
        for name in enabled_rules(system, view(s, i), g):
            post = apply_rule(system, s, i, name, g).values[i]
            pre = s.values[i]
            if kind is ProblemKind.GC:
                assert post < pre if name.startswith("Forbidden") else post > pre
            elif kind is ProblemKind.IS:
                assert (pre, post) == ((OUT, IN) if name.startswith("Forbidden") else (IN, OUT))
            else:
                assert (pre, post) == ((IN, OUT) if name.startswith("Forbidden") else (OUT, IN))


@settings(max_examples=120)
@given(st.data(), st.sampled_from(KINDS))
def test_locality(data, kind):
    g = data.draw(graphs(max_n=9))
    s = _state(data, kind, g)
    system = rule_system(kind)
    i = data.draw(st.integers(0, g.n - 1))
    ball = g.ball(i, system.radius)
    restricted = NodeView(i, {j: s.values[j] for j in ball})
    assert enabled_rules(system, restricted, g) == enabled_rules(system, view(s, i), g)
    far = [j for j in range(g.n) if j not in ball]
    if far:
        j = data.draw(st.sampled_from(far))
        flipped = s.replace(j, s.values[j] + 1 if kind is ProblemKind.GC
                            else (IN if s.values[j] == OUT else OUT))
        assert enabled_rules(system, view(flipped, i), g) == enabled_rules(system, view(s, i), g)


@settings(max_examples=60)
@given(st.data(), st.sampled_from(KINDS))
def test_guards_and_actions_are_pure(data, kind):
    g = data.draw(graphs())
    s = _state(data, kind, g)
    system = rule_system(kind)
    before = s.values
    for i in range(g.n):
        first = enabled_rules(system, view(s, i), g)
        assert enabled_rules(system, view(s, i), g) == first
        for name in first:
            a = apply_rule(system, s, i, name, g)
            assert apply_rule(system, s, i, name, g) == a
    assert s.values == before
