"""Rooted full binary trees with ordered leaves, and DOT rendering.

A tree is either an integer leaf index or a pair (left, right).  The
number of trees with n ordered leaves is the Catalan number C_{n-1};
enumeration order is deterministic (splits from left to right, then
recursively by the same rule).
"""

from __future__ import annotations

DEFAULT_ARITY_CAP = 8


def enumerate_trees(n: int, cap: int = DEFAULT_ARITY_CAP) -> list:
    if n < 1:
        raise ValueError("a tree needs at least one leaf")
    if n > cap:
        raise ValueError("arity %d exceeds the configured cap %d" % (n, cap))

    def over(lo: int, hi: int) -> list:
        if hi - lo == 1:
            return [lo]
        out = []
        for mid in range(lo + 1, hi):
            for left in over(lo, mid):
                for right in over(mid, hi):
                    out.append((left, right))
        return out

    return over(0, n)


def tree_count(n: int) -> int:
    """Catalan number C_{n-1}, computed without enumeration."""
    from math import comb
    return comb(2 * (n - 1), n - 1) // n


def serialize(tree) -> str:
    if isinstance(tree, int):
        return str(tree)
    return "(%s,%s)" % (serialize(tree[0]), serialize(tree[1]))


def leaves(tree) -> list[int]:
    if isinstance(tree, int):
        return [tree]
    return leaves(tree[0]) + leaves(tree[1])


def internal_nodes(tree) -> list:
    """Internal subtrees in preorder."""
    if isinstance(tree, int):
        return []
    return [tree] + internal_nodes(tree[0]) + internal_nodes(tree[1])


def to_dot(tree, leaf_labels=None, zero_edges=None, name: str = "transfer_tree") -> str:
    """Deterministic DOT digraph for one transfer tree.

    Leaves are labelled ``e:<input>``, internal vertices by the product,
    the root carries the projection.  ``zero_edges`` is an optional set of
    serialized subtrees whose incoming homotopy edge evaluated to zero;
    those edges are rendered dashed.
    """
    zero_edges = zero_edges or set()
    lines = ["digraph %s {" % name, "  rankdir=BT;"]
    counter = [0]
    ids = {}

    def walk(node, is_root: bool):
        nid = "n%d" % counter[0]
        counter[0] += 1
        ids[id(node)] = nid
        if isinstance(node, int):
            label = leaf_labels[node] if leaf_labels else "in%d" % node
            lines.append('  %s [shape=box,label="e:%s"];' % (nid, label))
            return nid
        shape = 'label="p o b"' if is_root else 'label="b"'
        lines.append("  %s [shape=circle,%s];" % (nid, shape))
        for child in node:
            cid = walk(child, False)
            style = ""
            if not isinstance(child, int):
                style = ',style=dashed,label="k=0"' if serialize(child) in zero_edges \
                    else ',label="k"'
            lines.append("  %s -> %s [dir=none%s];" % (cid, nid, style))
        return nid

    walk(tree, True)
    lines.append("}")
    return "\n".join(lines) + "\n"
