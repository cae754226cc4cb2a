"""Signed rooted trees and leafy forests.

A signed rooted tree carries a sign in {+1, -1} on every edge *not* adjacent
to the root; root-adjacent edges are unsigned.  Deleting the root yields a
signed forest (every surviving edge signed), which is the combinatorial input
for building hypersurfaces.  Isomorphism is always root- and sign-preserving
and is decided through a canonical text encoding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import CapacityError, ValidationError

MAX_ENUM_VERTICES = 8


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass
class SignedRootedTree:
    """Rooted tree with signs on all non-root-adjacent edges.

    ``edges`` are (parent, child) pairs; ``signs`` maps such a pair to +1/-1
    and must be defined exactly on the edges whose parent is not the root.
    """

    vertices: tuple[int, ...]
    root: int
    edges: tuple[tuple[int, int], ...]
    signs: dict[tuple[int, int], int] = field(default_factory=dict)
    #: forest components sign *all* edges, including the root-adjacent ones
    all_signed: bool = False

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.edges = tuple((int(p), int(c)) for p, c in self.edges)
        self.signs = {(int(p), int(c)): int(s) for (p, c), s in self.signs.items()}
        self.validate()

    # -- structure ---------------------------------------------------------
    def validate(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        if self.root not in vs:
            raise ValidationError("root is not a vertex")
        parent: dict[int, int] = {}
        for p, c in self.edges:
            if p not in vs or c not in vs:
                raise ValidationError(f"edge ({p},{c}) uses unknown vertex")
            if c in parent:
                raise ValidationError(f"vertex {c} has two parents")
            if c == self.root:
                raise ValidationError("root cannot be a child")
            parent[c] = p
        if len(self.edges) != len(self.vertices) - 1:
            raise ValidationError("edge count must be |V|-1")
        # connectivity: walk up from every vertex to the root
        for v in self.vertices:
            seen = set()
            while v != self.root:
                if v in seen or v not in parent:
                    raise ValidationError("edge relation is not a rooted tree")
                seen.add(v)
                v = parent[v]
        for (p, c) in self.edges:
            if p == self.root and not self.all_signed:
                if (p, c) in self.signs:
                    raise ValidationError("root-adjacent edge must be unsigned")
            else:
                s = self.signs.get((p, c))
                if s not in (1, -1):
                    raise ValidationError(f"edge ({p},{c}) needs a sign in {{+1,-1}}")
        if set(self.signs) - set(self.edges):
            raise ValidationError("sign on a non-existent edge")

    def children(self, v: int) -> list[int]:
        return [c for p, c in self.edges if p == v]

    def parent_of(self, v: int) -> Optional[int]:
        for p, c in self.edges:
            if c == v:
                return p
        return None

    def size(self) -> int:
        return len(self.vertices)


@dataclass
class SignedForest:
    """Disjoint union of signed rooted trees in which every edge is signed."""

    components: list[SignedRootedTree]

    def __post_init__(self):
        seen: set[int] = set()
        for t in self.components:
            if seen & set(t.vertices):
                raise ValidationError("forest components share vertex ids")
            seen.update(t.vertices)
            for (p, c) in t.edges:
                if t.signs.get((p, c)) not in (1, -1):
                    raise ValidationError("forest edges must all carry signs")

    def vertices(self) -> list[int]:
        return [v for t in self.components for v in t.vertices]

    def size(self) -> int:
        return len(self.vertices())

    def component_of(self, v: int) -> SignedRootedTree:
        for t in self.components:
            if v in t.vertices:
                return t
        raise ValidationError(f"unknown vertex id {v}")

    def leaves(self) -> list[int]:
        return [v for t in self.components for v in t.vertices if not t.children(v)]


@dataclass
class LeafyForest:
    """Signed forest with a set of marked leaves (maximal vertices)."""

    forest: SignedForest
    marked: frozenset[int] = frozenset()

    def __post_init__(self):
        self.marked = frozenset(int(v) for v in self.marked)
        leaves = set(self.forest.leaves())
        bad = self.marked - leaves
        if bad:
            raise ValidationError(f"marked vertices {sorted(bad)} are not leaves")


@dataclass
class VertexChain:
    """Directed chain from a component root down to a vertex.

    ``signs[i]`` is the sign of the edge from ``vertices[i]`` to
    ``vertices[i+1]``.
    """

    vertices: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != len(self.vertices) - 1:
            raise ValidationError("chain needs one sign per traversed edge")

    def depth(self) -> int:
        return len(self.signs)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def delete_root(tree: SignedRootedTree) -> SignedForest:
    """Forest induced by deleting the root; retained edges keep their signs."""
    comps: list[SignedRootedTree] = []
    for top in tree.children(tree.root):
        verts: list[int] = []
        edges: list[tuple[int, int]] = []
        signs: dict[tuple[int, int], int] = {}
        stack = [top]
        while stack:
            v = stack.pop()
            verts.append(v)
            for c in sorted(tree.children(v)):
                edges.append((v, c))
                signs[(v, c)] = tree.signs[(v, c)]
                stack.append(c)
        comps.append(SignedRootedTree(tuple(verts), top, tuple(edges), signs, all_signed=True))
    comps.sort(key=lambda t: (canonical_form(t), t.root))
    return SignedForest(comps)


def attach_root(forest: SignedForest, root: Optional[int] = None) -> SignedRootedTree:
    """Inverse of :func:`delete_root`: join component roots to a fresh root."""
    used = set(forest.vertices())
    if root is None:
        root = max(used, default=0) + 1
    if root in used:
        raise ValidationError("requested root id already in use")
    verts = [root] + forest.vertices()
    edges: list[tuple[int, int]] = []
    signs: dict[tuple[int, int], int] = {}
    for t in forest.components:
        edges.append((root, t.root))
        edges.extend(t.edges)
        signs.update(t.signs)
    return SignedRootedTree(tuple(verts), root, tuple(edges), signs)


def leafy_extend(lf: LeafyForest) -> SignedForest:
    """Add one vertex above every marked leaf.

    The new edges are given the fixed sign +1: the marked leaf's own stratum
    is the one suppressed downstream, so the two sign choices give ambient-
    isotopic hypersurfaces and the degree of freedom is spurious.
    """
    used = set(lf.forest.vertices())
    next_id = max(used, default=0) + 1
    comps = []
    for t in lf.forest.components:
        verts = list(t.vertices)
        edges = list(t.edges)
        signs = dict(t.signs)
        for v in sorted(set(t.vertices) & lf.marked):
            new = next_id
            next_id += 1
            verts.append(new)
            edges.append((v, new))
            signs[(v, new)] = 1
        comps.append(SignedRootedTree(tuple(verts), t.root, tuple(edges), signs, all_signed=True))
    return SignedForest(comps)


def chain_to_root(forest: SignedForest, v: int) -> VertexChain:
    """Unique directed chain from the component root to ``v``."""
    t = forest.component_of(v)
    path = [v]
    while path[-1] != t.root:
        path.append(t.parent_of(path[-1]))
    path.reverse()
    signs = tuple(t.signs[(path[i], path[i + 1])] for i in range(len(path) - 1))
    return VertexChain(tuple(path), signs)


# ---------------------------------------------------------------------------
# canonical form and enumeration
# ---------------------------------------------------------------------------


def _encode(tree: SignedRootedTree, v: int, signed_edge_to: Optional[int]) -> str:
    parts = []
    for c in tree.children(v):
        s = tree.signs.get((v, c))
        prefix = "" if s is None else ("+" if s > 0 else "-")
        parts.append(prefix + _encode(tree, c, s))
    parts.sort()
    return "(" + ",".join(parts) + ")"


def canonical_form(tree: SignedRootedTree) -> str:
    """Canonical encoding; equal iff trees are sign/root-isomorphic."""
    return _encode(tree, tree.root, None)


def forest_canonical_form(forest: SignedForest) -> str:
    """Canonical encoding of a signed forest (sorted signed components)."""
    parts = sorted(_encode(t, t.root, None) for t in forest.components)
    return "{" + ",".join(parts) + "}"


# Shapes are nested tuples: a signed (inner) tree shape is a sorted tuple of
# (sign, child_shape); a top shape is a sorted tuple of (0, inner_shape).


def _inner_shapes(n: int, cache: dict) -> list[tuple]:
    """All iso-classes of rooted trees with n vertices, every edge signed."""
    if n in cache:
        return cache[n]
    if n == 1:
        cache[1] = [()]
        return cache[1]
    atoms = []
    for k in range(1, n):
        for sh in _inner_shapes(k, cache):
            for s in (1, -1):
                atoms.append((k, (s, sh)))
    atoms.sort(key=lambda a: (a[0], repr(a[1])))
    out: set[tuple] = set()

    def rec(remaining: int, start: int, chosen: tuple):
        if remaining == 0:
            out.add(tuple(sorted(chosen, key=repr)))
            return
        for i in range(start, len(atoms)):
            k, atom = atoms[i]
            if k > remaining:
                continue
            rec(remaining - k, i, chosen + (atom,))

    rec(n - 1, 0, ())
    cache[n] = sorted(out, key=repr)
    return cache[n]


def _top_shapes(n: int, cache: dict) -> list[tuple]:
    """Iso-classes of signed rooted trees with n vertices (root unsigned)."""
    if n == 1:
        return [()]
    atoms = []
    for k in range(1, n):
        for sh in _inner_shapes(k, cache):
            atoms.append((k, (0, sh)))
    atoms.sort(key=lambda a: (a[0], repr(a[1])))
    out: set[tuple] = set()

    def rec(remaining: int, start: int, chosen: tuple):
        if remaining == 0:
            out.add(tuple(sorted(chosen, key=repr)))
            return
        for i in range(start, len(atoms)):
            k, atom = atoms[i]
            if k > remaining:
                continue
            rec(remaining - k, i, chosen + (atom,))

    rec(n - 1, 0, ())
    return sorted(out, key=repr)


def _shape_to_tree(shape: tuple) -> SignedRootedTree:
    verts = [0]
    edges: list[tuple[int, int]] = []
    signs: dict[tuple[int, int], int] = {}

    def build(parent: int, children: tuple):
        for s, sub in children:
            new = len(verts)
            verts.append(new)
            edges.append((parent, new))
            if s != 0:
                signs[(parent, new)] = s
            build(new, sub)

    build(0, shape)
    return SignedRootedTree(tuple(verts), 0, tuple(edges), signs)


def enumerate_signed_rooted_trees(max_vertices: int) -> list[SignedRootedTree]:
    """One representative per isomorphism class, all sizes up to the bound.

    Deterministic order: by size, then by canonical encoding.
    """
    if not 1 <= max_vertices <= MAX_ENUM_VERTICES:
        raise CapacityError(
            f"max_vertices must be in [1, {MAX_ENUM_VERTICES}], got {max_vertices}"
        )
    cache: dict = {}
    trees: list[SignedRootedTree] = []
    for n in range(1, max_vertices + 1):
        batch = [_shape_to_tree(sh) for sh in _top_shapes(n, cache)]
        batch.sort(key=canonical_form)
        trees.extend(batch)
    return trees


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def tree_to_json(tree: SignedRootedTree, marked: Iterable[int] = ()) -> dict:
    """Schema: vertices, root, edges with null sign on root-adjacent edges."""
    return {
        "vertices": list(tree.vertices),
        "root": tree.root,
        "edges": [
            {"from": p, "to": c, "sign": tree.signs.get((p, c))} for p, c in tree.edges
        ],
        "marked": sorted(int(v) for v in marked),
    }


def tree_from_json(obj: dict) -> tuple[SignedRootedTree, frozenset[int]]:
    """Parse the tree schema; returns the tree and its marked-leaf set."""
    try:
        vertices = tuple(int(v) for v in obj["vertices"])
        root = int(obj["root"])
        edges = []
        signs = {}
        for e in obj["edges"]:
            p, c = int(e["from"]), int(e["to"])
            edges.append((p, c))
            if e.get("sign") is not None:
                signs[(p, c)] = int(e["sign"])
        marked = frozenset(int(v) for v in obj.get("marked", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed tree object: {exc}") from exc
    tree = SignedRootedTree(vertices, root, tuple(edges), signs)
    if root in marked:
        raise ValidationError("the root cannot be marked")
    for v in marked:
        if v not in vertices:
            raise ValidationError(f"marked vertex {v} is not in the tree")
        if tree.children(v):
            raise ValidationError(f"marked vertex {v} is not a leaf")
    return tree, marked


def load_tree_file(path: str) -> tuple[SignedRootedTree, frozenset[int]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read tree file {path}: {exc}") from exc
    return tree_from_json(obj)
