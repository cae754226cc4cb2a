import itertools

import pytest

from arboreal.errors import CapacityError, ValidationError
from arboreal.trees import (
    LeafyForest,
    SignedForest,
    SignedRootedTree,
    attach_root,
    canonical_form,
    chain_to_root,
    delete_root,
    enumerate_signed_rooted_trees,
    leafy_extend,
    tree_from_json,
    tree_to_json,
)


def make_path(signs):
    """Path 0 -> 1 -> ... with given signs on the non-root edges."""
    n = len(signs) + 2
    edges = tuple((i, i + 1) for i in range(n - 1))
    sign_map = {(i, i + 1): s for i, s in zip(range(1, n - 1), signs)}
    return SignedRootedTree(tuple(range(n)), 0, edges, sign_map)


# --- brute-force oracle -----------------------------------------------------


def brute_force_classes(n):
    """All iso-classes on n vertices via labeled parent arrays + sign choices.

    Every rooted tree admits a labeling in which each child has a larger id
    than its parent, so parent arrays p[i] < i cover every class.
    """
    classes = set()
    if n == 1:
        return {canonical_form(SignedRootedTree((0,), 0, (), {}))}
    for parents in itertools.product(*[range(i) for i in range(1, n)]):
        edges = tuple((parents[i - 1], i) for i in range(1, n))
        signable = [e for e in edges if e[0] != 0]
        for combo in itertools.product((1, -1), repeat=len(signable)):
            signs = dict(zip(signable, combo))
            t = SignedRootedTree(tuple(range(n)), 0, edges, signs)
            classes.add(canonical_form(t))
    return classes


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 1), (3, 3)])
def test_per_size_class_counts_small(n, expected):
    assert len(brute_force_classes(n)) == expected


def test_enumerate_counts_match_spec():
    assert len(enumerate_signed_rooted_trees(1)) == 1
    assert len(enumerate_signed_rooted_trees(2)) == 2
    assert len(enumerate_signed_rooted_trees(3)) == 5


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_brute_force(n):
    enumerated = [t for t in enumerate_signed_rooted_trees(n) if t.size() == n]
    encs = [canonical_form(t) for t in enumerated]
    assert len(set(encs)) == len(encs), "enumeration emitted duplicates"
    assert set(encs) == brute_force_classes(n)


def test_enumeration_deterministic_order():
    a = enumerate_signed_rooted_trees(4)
    b = enumerate_signed_rooted_trees(4)
    assert [canonical_form(t) for t in a] == [canonical_form(t) for t in b]


def test_capacity_error():
    with pytest.raises(CapacityError):
        enumerate_signed_rooted_trees(9)
    with pytest.raises(CapacityError):
        enumerate_signed_rooted_trees(0)


# --- canonical form ---------------------------------------------------------


def test_canonical_atom():
    assert canonical_form(SignedRootedTree((0,), 0, (), {})) == "()"


def test_canonical_star_relabeling_invariant():
    t1 = SignedRootedTree((0, 1, 2), 0, ((0, 1), (0, 2)), {})
    t2 = SignedRootedTree((5, 9, 7), 5, ((5, 9), (5, 7)), {})
    assert canonical_form(t1) == canonical_form(t2)


def test_canonical_sign_sensitivity():
    assert canonical_form(make_path([1])) != canonical_form(make_path([-1]))


# --- delete_root / attach_root ----------------------------------------------


def test_delete_root_single_vertex():
    f = delete_root(SignedRootedTree((0,), 0, (), {}))
    assert f.components == []


def test_delete_root_two_vertex():
    f = delete_root(SignedRootedTree((0, 1), 0, ((0, 1),), {}))
    assert len(f.components) == 1
    assert f.components[0].size() == 1


def test_delete_root_three_path_keeps_sign():
    f = delete_root(make_path([1]))
    (comp,) = f.components
    assert comp.size() == 2
    assert list(comp.signs.values()) == [1]


def test_attach_root_round_trip():
    for t in enumerate_signed_rooted_trees(4):
        back = attach_root(delete_root(t))
        assert canonical_form(back) == canonical_form(t)


# --- leafy_extend -----------------------------------------------------------


def leafy_singleton(marked):
    f = SignedForest([SignedRootedTree((1,), 1, (), {})])
    return LeafyForest(f, frozenset({1}) if marked else frozenset())


def test_leafy_extend_marked_singleton():
    ext = leafy_extend(leafy_singleton(True))
    (comp,) = ext.components
    assert comp.size() == 2
    assert list(comp.signs.values()) == [1]


def test_leafy_extend_unmarked_unchanged():
    ext = leafy_extend(leafy_singleton(False))
    assert ext.size() == 1


def test_leafy_extend_two_chain_top_marked():
    f = SignedForest(
        [SignedRootedTree((1, 2), 1, ((1, 2),), {(1, 2): 1}, all_signed=True)]
    )
    ext = leafy_extend(LeafyForest(f, frozenset({2})))
    (comp,) = ext.components
    assert comp.size() == 3


def test_leafy_extend_size_invariant():
    for t in enumerate_signed_rooted_trees(4):
        f = delete_root(t)
        leaves = f.leaves()
        for r in range(len(leaves) + 1):
            marked = frozenset(leaves[:r])
            ext = leafy_extend(LeafyForest(f, marked))
            assert ext.size() == f.size() + len(marked)


def test_marked_non_leaf_rejected():
    f = SignedForest(
        [SignedRootedTree((1, 2), 1, ((1, 2),), {(1, 2): 1}, all_signed=True)]
    )
    with pytest.raises(ValidationError):
        LeafyForest(f, frozenset({1}))


# --- chain_to_root ----------------------------------------------------------


def test_chain_component_root():
    f = delete_root(make_path([1, -1]))
    root = f.components[0].root
    ch = chain_to_root(f, root)
    assert ch.vertices == (root,) and ch.signs == ()


def test_chain_depth_two():
    f = delete_root(make_path([1, -1]))
    deep = [v for v in f.vertices() if not f.components[0].children(v)][0]
    ch = chain_to_root(f, deep)
    assert len(ch.vertices) == 3
    assert ch.signs == (1, -1)


def test_chain_unknown_vertex():
    f = delete_root(make_path([1]))
    with pytest.raises(ValidationError):
        chain_to_root(f, 99)


# --- JSON -------------------------------------------------------------------


def test_json_round_trip():
    for t in enumerate_signed_rooted_trees(4):
        obj = tree_to_json(t)
        back, marked = tree_from_json(obj)
        assert canonical_form(back) == canonical_form(t)
        assert marked == frozenset()


def test_json_null_sign_only_root_adjacent():
    obj = {
        "vertices": [0, 1, 2],
        "root": 0,
        "edges": [{"from": 0, "to": 1, "sign": None}, {"from": 1, "to": 2, "sign": None}],
    }
    with pytest.raises(ValidationError):
        tree_from_json(obj)


def test_json_marked_must_be_leaf():
    obj = {
        "vertices": [0, 1, 2],
        "root": 0,
        "edges": [{"from": 0, "to": 1, "sign": None}, {"from": 1, "to": 2, "sign": 1}],
        "marked": [1],
    }
    with pytest.raises(ValidationError):
        tree_from_json(obj)
