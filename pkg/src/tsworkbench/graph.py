"""Directed acyclic computation graph over feature functions.

A graph is executed once per channel: every node is evaluated at most once
(memoization), intermediates are dropped as soon as their last consumer has
run, and the evaluation order is a fixed deterministic topological order so
instrumentation and golden outputs are reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Any, Callable, Mapping, MutableMapping, Sequence

from .core import ChannelData, ValidationError

INPUT_NODES = ("times", "values", "errors")

# A node result: scalar, array, None (absent errors), or an opaque model.
Value = Any

# A custom definition: either a bare callable taking (times, values, errors)
# or an explicit (deps, callable) pair whose deps may name other features.
CustomDef = Callable | tuple[Sequence[str], Callable]


class GraphError(ValidationError):
    """Invalid graph structure or unresolvable feature request."""


class NodeExecutionError(RuntimeError):
    """A node's eval function failed during execution."""

    def __init__(self, node_id: str, cause: BaseException):
        super().__init__(f"node '{node_id}' failed: {cause}")
        self.node_id = node_id
        self.cause = cause


@dataclass(frozen=True)
class Node:
    """One computation step: an input binding or a pure function of deps."""

    id: str
    kind: str  # "input" | "function"
    deps: tuple[str, ...] = ()
    fn: Callable[..., Value] | None = None

    def __post_init__(self):
        object.__setattr__(self, "deps", tuple(self.deps))
        if self.kind == "input" and self.deps:
            raise GraphError(f"input node '{self.id}' must have no deps")
        if self.kind == "function" and self.fn is None:
            raise GraphError(f"function node '{self.id}' needs an eval function")


class FeatureGraph:
    """Immutable node map plus the set of requested output node ids."""

    def __init__(self, nodes: Mapping[str, Node], outputs: Sequence[str]):
        self.nodes = dict(nodes)
        self.outputs = tuple(dict.fromkeys(outputs))
        self._validate()

    def _validate(self):
        for node_id, node in self.nodes.items():
            if node.id != node_id:
                raise GraphError(f"node id mismatch: '{node_id}' vs '{node.id}'")
            for dep in node.deps:
                if dep not in self.nodes:
                    raise GraphError(f"node '{node_id}' depends on unknown '{dep}'")
        for out in self.outputs:
            if out not in self.nodes:
                raise GraphError(f"output '{out}' is not a node")
        cycle = self._find_cycle()
        if cycle:
            raise GraphError("dependency cycle: " + " -> ".join(cycle))

    def _find_cycle(self) -> list[str] | None:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {nid: WHITE for nid in self.nodes}
        stack: list[str] = []

        def visit(nid: str) -> list[str] | None:
            color[nid] = GRAY
            stack.append(nid)
            for dep in self.nodes[nid].deps:
                if color[dep] == GRAY:
                    return stack[stack.index(dep):] + [dep]
                if color[dep] == WHITE:
                    found = visit(dep)
                    if found:
                        return found
            color[nid] = BLACK
            stack.pop()
            return None

        for nid in sorted(self.nodes):
            if color[nid] == WHITE:
                found = visit(nid)
                if found:
                    return found
        return None

    def ancestors_of_outputs(self) -> set[str]:
        """Every node reachable (via deps) from the output set."""
        seen: set[str] = set()
        frontier = list(self.outputs)
        while frontier:
            nid = frontier.pop()
            if nid in seen:
                continue
            seen.add(nid)
            frontier.extend(self.nodes[nid].deps)
        return seen

    def topological_order(self) -> list[str]:
        """Dependencies before dependents; ties broken lexicographically.

        Restricted to nodes reachable from the outputs.
        """
        needed = self.ancestors_of_outputs()
        pending = {nid: sum(1 for d in self.nodes[nid].deps if d in needed)
                   for nid in needed}
        dependents: dict[str, list[str]] = {nid: [] for nid in needed}
        for nid in needed:
            for dep in self.nodes[nid].deps:
                dependents[dep].append(nid)
        ready = [nid for nid, cnt in pending.items() if cnt == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            nid = heapq.heappop(ready)
            order.append(nid)
            for child in dependents[nid]:
                pending[child] -= 1
                if pending[child] == 0:
                    heapq.heappush(ready, child)
        return order


def build_graph(
    requested_features: Sequence[str],
    custom_defs: Mapping[str, CustomDef] | None = None,
    params: Mapping[str, Mapping[str, Any]] | None = None,
) -> FeatureGraph:
    """Graph computing *requested_features* plus their transitive deps.

    Names resolve among the builtin catalog and *custom_defs*; custom names
    must not shadow builtins, and custom deps may reference builtin features
    so intermediates are shared.  *params* tunes parameterized builtins
    (see :func:`tsworkbench.features.builtin_defs`).
    """
    from .features import builtin_defs

    builtins = builtin_defs(params)
    custom_defs = dict(custom_defs or {})
    for name in custom_defs:
        if name in builtins or name in INPUT_NODES:
            raise GraphError(f"custom feature '{name}' shadows a builtin name")

    def resolve(name: str) -> tuple[tuple[str, ...], Callable]:
        if name in custom_defs:
            d = custom_defs[name]
            if callable(d):
                return INPUT_NODES, d
            deps, fn = d
            return tuple(deps), fn
        if name in builtins:
            return builtins[name]
        raise GraphError(f"unknown feature: {name}")

    unknown = [
        n for n in requested_features
        if n not in builtins and n not in custom_defs
    ]
    if unknown:
        raise GraphError("unknown feature: " + ", ".join(unknown))

    nodes: dict[str, Node] = {
        nid: Node(id=nid, kind="input") for nid in INPUT_NODES
    }
    frontier = list(dict.fromkeys(requested_features))
    while frontier:
        name = frontier.pop()
        if name in nodes:
            continue
        deps, fn = resolve(name)
        nodes[name] = Node(id=name, kind="function", deps=deps, fn=fn)
        frontier.extend(d for d in deps if d not in nodes)

    return FeatureGraph(nodes, requested_features)


def execute(
    graph: FeatureGraph,
    ch: ChannelData,
    *,
    eval_counts: MutableMapping[str, int] | None = None,
    failures: MutableMapping[str, str] | None = None,
) -> dict[str, Value]:
    """Evaluate the graph on one channel; returns output-node results only.

    Pure in (graph, channel): repeated calls agree bitwise.  When
    *eval_counts* is given, every function-node evaluation increments its
    entry.  When *failures* is given, a failing node is recorded there and
    poisons its dependents instead of aborting; otherwise the first failure
    raises :class:`NodeExecutionError`.
    """
    order = graph.topological_order()
    needed = set(order)
    remaining_consumers = {
        nid: sum(1 for other in needed for d in graph.nodes[other].deps if d == nid)
        for nid in needed
    }
    outputs = set(graph.outputs)

    input_values = {
        "times": ch.time_axis(),
        "values": ch.values,
        "errors": ch.errors,
    }
    results: dict[str, Value] = {}
    failed: dict[str, str] = {}

    for nid in order:
        node = graph.nodes[nid]
        if node.kind == "input":
            results[nid] = input_values[nid]
        else:
            bad_dep = next((d for d in node.deps if d in failed), None)
            if bad_dep is not None:
                failed[nid] = f"upstream failure in '{bad_dep}'"
            else:
                if eval_counts is not None:
                    eval_counts[nid] = eval_counts.get(nid, 0) + 1
                try:
                    results[nid] = node.fn(*(results[d] for d in node.deps))
                except Exception as exc:
                    if failures is None:
                        raise NodeExecutionError(nid, exc) from exc
                    failed[nid] = str(exc)
        for dep in node.deps:
            remaining_consumers[dep] -= 1
            if remaining_consumers[dep] == 0 and dep not in outputs:
                results.pop(dep, None)

    if failures is not None:
        failures.update(failed)
    return {out: results[out] for out in graph.outputs if out in results}
