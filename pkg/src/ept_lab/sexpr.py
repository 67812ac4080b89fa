"""Parsing of parenthesized proof-term dumps and reification into shared DAGs.

A dump is a sequence of top-level ``(Definition <name> <body>)`` forms whose
bodies are nested labeled terms, e.g. ``(App ev_SS O ev_0)``.  ``;`` starts a
comment running to end of line.  Reification hash-conses structurally
identical subtrees so each distinct term becomes exactly one graph node.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph import CycleError, DagError, ProofDag

DEFAULT_BINDER_LABELS = ("Lambda",)

_LABEL_FORBIDDEN = set("() \t\r\n;")


class SexprParseError(ValueError):
    """Malformed term text, with 1-based line/column position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DuplicateNameError(ValueError):
    """Two top-level definitions share a name."""


@dataclass(frozen=True, eq=False)
class TermTree:
    """One parsed term: a label plus ordered child terms."""

    label: str
    children: tuple["TermTree", ...] = ()

    def __post_init__(self) -> None:
        if not self.label or _LABEL_FORBIDDEN & set(self.label):
            raise ValueError(f"invalid term label {self.label!r}")

    def __eq__(self, other: object) -> bool:
        # iterative structural equality; terms can nest deeper than the
        # interpreter recursion limit
        if not isinstance(other, TermTree):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a.label != b.label or len(a.children) != len(b.children):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __hash__(self) -> int:
        return hash((self.label, len(self.children)))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def render(self) -> str:
        out: list[str] = []
        stack: list[TermTree | str] = [self]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            if item.is_leaf:
                out.append(item.label)
            else:
                out.append(f"({item.label}")
                stack.append(")")
                for child in reversed(item.children):
                    stack.append(child)
        # Joining with spaces then tidying closers keeps the renderer iterative.
        return " ".join(out).replace(" )", ")")

    def iter_subtrees(self) -> Iterator["TermTree"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass(frozen=True)
class DefinitionForest:
    """Ordered named definitions, each a ``(Definition name body)`` tree."""

    definitions: tuple[tuple[str, TermTree], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name, _ in self.definitions:
            if name in seen:
                raise DuplicateNameError(f"duplicate definition name {name!r}")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.definitions)

    def body(self, name: str) -> TermTree:
        for n, b in self.definitions:
            if n == name:
                return b
        raise KeyError(name)

    def render(self) -> str:
        return "\n".join(
            f"(Definition {name} {body.render()})" for name, body in self.definitions
        ) + ("\n" if self.definitions else "")


# -- tokenizer / parser ---------------------------------------------------------

_OPEN, _CLOSE, _ATOM = 0, 1, 2


def _tokenize(text: str) -> Iterator[tuple[int, str, int, int]]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            yield _OPEN, c, line, col
            i += 1
            col += 1
        elif c == ")":
            yield _CLOSE, c, line, col
            i += 1
            col += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in "() \t\r\n;":
                i += 1
                col += 1
            yield _ATOM, text[start:i], line, start_col


def parse_sexpr(text: str) -> DefinitionForest:
    """Parse a dump into a definition forest, preserving top-level order.

    Raises :class:`SexprParseError` for unbalanced parentheses, empty ``()``
    labels, or any top-level form that is not a two-argument ``Definition``;
    raises :class:`DuplicateNameError` for repeated definition names.
    """
    # Each stack frame is (label, children, line, col); label None means the
    # opening paren has been read but the head atom not yet.
    stack: list[list] = []
    top_level: list[tuple[TermTree, int, int]] = []
    last_line, last_col = 1, 1

    def close_value(value: TermTree, line: int, col: int) -> None:
        if stack:
            stack[-1][1].append(value)
        else:
            top_level.append((value, line, col))

    for kind, tok, line, col in _tokenize(text):
        last_line, last_col = line, col
        if kind == _OPEN:
            stack.append([None, [], line, col])
        elif kind == _ATOM:
            if stack and stack[-1][0] is None:
                stack[-1][0] = tok
            else:
                close_value(TermTree(tok), line, col)
        else:  # _CLOSE
            if not stack:
                raise SexprParseError("unexpected ')'", line, col)
            label, children, oline, ocol = stack.pop()
            if label is None:
                raise SexprParseError("empty '()' form has no label", oline, ocol)
            close_value(TermTree(label, tuple(children)), oline, ocol)
    if stack:
        _, _, oline, ocol = stack[-1]
        raise SexprParseError(
            f"unbalanced parenthesis opened at {oline}:{ocol}", last_line, last_col + 1
        )

    definitions: list[tuple[str, TermTree]] = []
    names: set[str] = set()
    for tree, line, col in top_level:
        if tree.is_leaf or tree.label != "Definition":
            raise SexprParseError(
                f"top-level form must be (Definition name body), got {tree.label!r}",
                line,
                col,
            )
        if len(tree.children) != 2 or not tree.children[0].is_leaf:
            raise SexprParseError(
                "Definition expects a name atom and exactly one body term", line, col
            )
        name = tree.children[0].label
        if name in names:
            raise DuplicateNameError(f"duplicate definition name {name!r}")
        names.add(name)
        definitions.append((name, tree.children[1]))
    return DefinitionForest(tuple(definitions))


# -- binder renaming ------------------------------------------------------------

# Scope chains are linked tuples (original_name, new_name, parent) so nested
# shadowing resolves to the innermost binding.
_Scope = tuple | None


def _scope_lookup(scope: _Scope, name: str) -> str | None:
    while scope is not None:
        orig, new, scope = scope
        if orig == name:
            return new
    return None


def alpha_number(
    forest: DefinitionForest,
    binder_labels: Sequence[str] = DEFAULT_BINDER_LABELS,
) -> DefinitionForest:
    """Give every binder a forest-unique numbered name.

    A binder is a ``(Lambda var type body)`` form (arity 3, leaf var); ``var``
    scopes over ``body`` only.  The k-th binder encountered (depth-first over
    the forest) is renamed ``var_2…2`` with k twos, so identically named
    binders in nested scopes or sibling definitions can never be unified by
    the later structural sharing pass.  Other labels pass through untouched.
    """
    binders = set(binder_labels)
    counter = 0

    def rebuild(root: TermTree) -> TermTree:
        nonlocal counter
        # Work items: ("visit", tree, scope) or ("emit", label, n_children).
        work: list[tuple] = [("visit", root, None)]
        values: list[TermTree] = []
        while work:
            op, a, b = work.pop()
            if op == "emit":
                children = tuple(values[len(values) - b:])
                del values[len(values) - b:]
                values.append(TermTree(a, children))
                continue
            if op == "leaf":
                values.append(TermTree(a))
                continue
            tree, scope = a, b
            if tree.is_leaf:
                values.append(TermTree(_scope_lookup(scope, tree.label) or tree.label))
            elif (
                tree.label in binders
                and len(tree.children) == 3
                and tree.children[0].is_leaf
            ):
                var, vtype, body = tree.children
                counter += 1
                new_name = f"{var.label}_{'2' * counter}"
                inner = (var.label, new_name, scope)
                work.append(("emit", tree.label, 3))
                work.append(("visit", body, inner))
                work.append(("visit", vtype, scope))
                work.append(("leaf", new_name, None))
            else:
                work.append(("emit", tree.label, len(tree.children)))
                for child in reversed(tree.children):
                    work.append(("visit", child, scope))
        return values[0]

    return DefinitionForest(
        tuple((name, rebuild(body)) for name, body in forest.definitions)
    )


# -- reification ----------------------------------------------------------------


class HashConsError(DagError):
    """Structural-identity bookkeeping failed (duplicate or collision)."""


def _canonical_id(label: str, child_ids: Sequence[str]) -> str:
    h = hashlib.sha256()
    h.update(label.encode("utf-8"))
    for cid in child_ids:
        h.update(b"\x1f")
        h.update(cid.encode("ascii"))
    return h.hexdigest()[:16]


def reify_dag(forest: DefinitionForest) -> ProofDag:
    """Turn a forest into a structurally shared DAG.

    Identical subtrees map to a single node; a leaf naming any definition in
    the forest (before or after its own tree) resolves to that definition's
    node; unresolved names stay as axiom-role leaves.  Edges run dependency
    (child term) to dependent (the term using it).  The first definition is
    the designated theorem.
    """
    labels: list[str] = []
    children: list[tuple[int, ...] | None] = []
    table: dict[tuple[str, tuple[int, ...]], int] = {}
    name_to_slot: dict[str, int] = {}

    def new_slot(label: str, kids: tuple[int, ...] | None) -> int:
        labels.append(label)
        children.append(kids)
        return len(labels) - 1

    for name, _ in forest.definitions:
        name_to_slot[name] = new_slot(name, None)

    def intern(label: str, kids: tuple[int, ...]) -> int:
        key = (label, kids)
        slot = table.get(key)
        if slot is None:
            slot = new_slot(label, kids)
            table[key] = slot
        return slot

    def reify_tree(root: TermTree) -> int:
        work: list[tuple] = [("visit", root)]
        values: list[int] = []
        while work:
            op, a = work.pop()
            if op == "emit":
                label, n = a
                kids = tuple(values[len(values) - n:])
                del values[len(values) - n:]
                values.append(intern(label, kids))
                continue
            tree = a
            if tree.is_leaf:
                if tree.label in name_to_slot:
                    values.append(name_to_slot[tree.label])
                else:
                    values.append(intern(tree.label, ()))
            else:
                work.append(("emit", (tree.label, len(tree.children))))
                for child in reversed(tree.children):
                    work.append(("visit", child))
        return values[0]

    for name, body in forest.definitions:
        body_slot = reify_tree(body)
        slot = name_to_slot[name]
        key = (name, (body_slot,))
        if key in table:
            raise HashConsError(
                f"definition {name!r} duplicates an existing structural node"
            )
        children[slot] = (body_slot,)
        table[key] = slot

    n = len(labels)
    kids_of: list[tuple[int, ...]] = [k if k is not None else () for k in children]

    # Topological order (children before parents) for canonical id assignment;
    # failure means some definition expansion is cyclic.
    parents: list[list[int]] = [[] for _ in range(n)]
    pending = [0] * n
    for slot in range(n):
        uniq = set(kids_of[slot])
        uniq.discard(slot)
        pending[slot] = len(uniq)
        for c in uniq:
            parents[c].append(slot)
    ready = [s for s in range(n) if pending[s] == 0]
    topo: list[int] = []
    while ready:
        s = ready.pop()
        topo.append(s)
        for p in parents[s]:
            pending[p] -= 1
            if pending[p] == 0:
                ready.append(p)
    if len(topo) != n:
        stuck = {s for s in range(n) if pending[s] > 0}
        for name, slot in name_to_slot.items():
            if slot in stuck:
                raise CycleError(f"expansion of definition {name!r} creates a cycle")
        raise CycleError("term graph contains a cycle")
    for slot in range(n):
        if slot in set(kids_of[slot]):
            # Self-reference, e.g. (Definition A A).
            for name, s in name_to_slot.items():
                if s == slot:
                    raise CycleError(f"expansion of definition {name!r} creates a cycle")

    canonical: list[str | None] = [None] * n
    by_id: dict[str, tuple[str, tuple[int, ...]]] = {}
    for slot in topo:
        cid = _canonical_id(labels[slot], [canonical[c] for c in kids_of[slot]])
        prior = by_id.get(cid)
        if prior is not None:
            if prior == (labels[slot], kids_of[slot]):
                raise HashConsError(f"duplicate structural node for id {cid}")
            raise HashConsError(f"structural hash collision on id {cid}")
        by_id[cid] = (labels[slot], kids_of[slot])
        canonical[slot] = cid

    nodes = {canonical[s]: labels[s] for s in range(n)}
    edges = {
        (canonical[c], canonical[s]) for s in range(n) for c in kids_of[s]
    }
    theorem = None
    if forest.definitions:
        theorem = canonical[name_to_slot[forest.definitions[0][0]]]
    return ProofDag.from_parts(nodes, edges, theorem)


def ingest_text(text: str, binder_labels: Sequence[str] = DEFAULT_BINDER_LABELS) -> ProofDag:
    """parse -> alpha-number -> reify, the full ingestion pipeline."""
    return reify_dag(alpha_number(parse_sexpr(text), binder_labels))
