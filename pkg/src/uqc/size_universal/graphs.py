"""
Fanin-2 circuit graphs and edge-universal graphs.

Vertices of a Gamma2Graph are numbered 0..n-1 in topological order. An
edge-universal graph is built from two copies of a recursive Gamma1
router sharing the pole vertices. The router pairs poles into blocks; each
block owns three switch vertices (A, C, D):

    A -> p0,  A -> C,  p0 -> C,  C -> p1,  C -> D,  p1 -> D

and the blocks' (A, D) pairs are the ports of two half-size routers. A
Gamma2 graph is split into two Gamma1 graphs by 2-edge-colouring, and each
half is routed through one copy. Vertex count is about 3 N lg N.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
import heapq
import math
from typing import Sequence

import numpy as np

from ..circuit import Circuit


# |V| <= EU_SIZE_CONSTANT * N lg N; the largest measured ratio for
# 2 <= N <= 1024 is about 3.47 (at N = 17)
EU_SIZE_CONSTANT = 3.5


class EmbeddingError(RuntimeError):
    """A graph that should embed did not; signals a construction bug."""


class GraphError(ValueError):
    pass


# Gamma2 graphs

@dataclass(frozen=True)
class Gamma2Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        fin, fout = [0] * self.n, [0] * self.n
        for i, j in edges:
            if not 0 <= i < j < self.n:
                raise GraphError(f"edge ({i}, {j}) is not forward within {self.n} vertices")
            fout[i] += 1
            fin[j] += 1
        if max(fin + fout, default=0) > 2:
            raise GraphError("fanin and fanout are limited to 2")

    def fanin(self, v: int) -> int:
        return sum(1 for _, j in self.edges if j == v)

    def fanout(self, v: int) -> int:
        return sum(1 for i, _ in self.edges if i == v)


@dataclass(frozen=True)
class WireLabels:
    """Which qubit each edge carries, and what each gate vertex does.

    ``edge_qubit[k]`` labels ``edges[k]``; ``gates[v]`` is the gate at vertex
    v (None for input vertices); ``operands[v]`` lists its qubits in gate
    order; ``last[q]`` is the vertex at which qubit q's line ends.
    """
    edge_qubit: tuple[int, ...]
    gates: tuple
    last: tuple[int, ...]


def circuit_to_gamma2(c: Circuit) -> tuple[Gamma2Graph, WireLabels]:
    """Input vertices 0..n-1, then one vertex per gate in (layer, position) order."""
    n = c.n_qubits
    last = list(range(n))
    edges, labels, gates = [], [], [None] * n
    for g in c.gates():
        if len(g.qubits) > 2:
            raise GraphError(f"{g}: gates with more than two qubits must be decomposed first")
        v = len(gates)
        gates.append(g)
        for q in g.qubits:
            edges.append((last[q], v))
            labels.append(q)
            last[q] = v
    return Gamma2Graph(len(gates), tuple(edges)), WireLabels(tuple(labels), tuple(gates), tuple(last))


def split_gamma2(g: Gamma2Graph) -> tuple[list[int], list[int]]:
    """Partition edge indices into two classes with fanin, fanout <= 1 each.

    The edges form a bipartite multigraph (tails vs heads) of maximum degree
    2, whose components are paths and even cycles; alternating colours along
    each component is a proper 2-edge-colouring.
    """
    ends = [(("o", i), ("i", j)) for i, j in g.edges]
    adj = defaultdict(list)
    for k, (a, b) in enumerate(ends):
        adj[a].append(k)
        adj[b].append(k)
    colour = [-1] * len(ends)

    def walk(node):
        c = 0
        while True:
            free = [k for k in adj[node] if colour[k] < 0]
            if not free:
                return
            k = free[0]
            colour[k] = c
            a, b = ends[k]
            node = b if node == a else a
            c ^= 1

    # paths first, from an endpoint, so alternation never clashes
    for node in sorted(adj, key=lambda x: (len(adj[x]) != 1, x)):
        walk(node)
    return [k for k in range(len(ends)) if colour[k] == 0], [k for k in range(len(ends)) if colour[k] == 1]


def random_gamma2(n: int, rng: np.random.Generator, density: float = 0.8) -> Gamma2Graph:
    """Random member of Gamma2(n): each vertex draws up to two earlier predecessors."""
    out_left = [2] * n
    edges = []
    for j in range(1, n):
        for _ in range(2):
            if rng.random() > density:
                continue
            cands = [i for i in range(j) if out_left[i] > 0]
            if not cands:
                break
            i = int(rng.choice(cands))
            out_left[i] -= 1
            edges.append((i, j))
    return Gamma2Graph(n, tuple(edges))


# Gamma1 router

@dataclass
class _Block:
    first: int
    second: int | None
    A: int
    C: int | None
    D: int


class _Router:
    """One recursive Gamma1 router over ``ports`` = [(in_vertex, out_vertex)]."""

    def __init__(self, ports: list[tuple[int, int]], alloc, edges: list):
        self.ports = ports
        self.blocks: list[_Block] = []
        self.left = self.right = None
        if len(ports) <= 1:
            return
        sub_ports = []
        for b in range(0, len(ports), 2):
            A, D = alloc(), alloc()
            p0 = ports[b]
            edges.append((A, p0[0]))
            if b + 1 < len(ports):
                C = alloc()
                p1 = ports[b + 1]
                edges += [(A, C), (p0[1], C), (C, p1[0]), (C, D), (p1[1], D)]
                self.blocks.append(_Block(b, b + 1, A, C, D))
            else:
                edges.append((p0[1], D))
                self.blocks.append(_Block(b, None, A, None, D))
            sub_ports.append((A, D))
        if len(sub_ports) > 1:
            self.left = _Router(sub_ports, alloc, edges)
            self.right = _Router(sub_ports, alloc, edges)

    def route(self, pairs: Sequence[tuple[int, int]]) -> list[list[int]]:
        """Vertex paths from ports[i].out to ports[j].in, one per pair, edge-disjoint."""
        paths: list[list[int] | None] = [None] * len(pairs)
        pending = []
        for k, (i, j) in enumerate(pairs):
            bi, bj = self.blocks[i // 2], self.blocks[j // 2]
            src, dst = self.ports[i][1], self.ports[j][0]
            if bi is bj:
                paths[k] = [src, bi.C, dst]
                continue
            head = [src, bi.C, bi.D] if (i == bi.first and bi.C is not None) else [src, bi.D]
            tail = [bj.A, dst] if j == bj.first else [bj.A, bj.C, dst]
            pending.append((k, i // 2, j // 2, head, tail))
        if pending:
            if self.left is None:
                raise EmbeddingError("inter-block edge with no sub-router")
            sub = Gamma2Graph(len(self.blocks), tuple((bi, bj) for _, bi, bj, _, _ in pending))
            halves = split_gamma2(sub)
            for router, idx in zip((self.left, self.right), halves):
                sub_paths = router.route([sub.edges[m] for m in idx])
                for m, sp in zip(idx, sub_paths):
                    k, _, _, head, tail = pending[m]
                    paths[k] = head[:-1] + sp + tail[1:]
        return paths


# edge-universal graph

@dataclass
class EUGraph:
    """Directed acyclic graph with poles 0..N-1 (vertex ids equal pole numbers)."""
    n_poles: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    _routers: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        self.in_edges: dict[int, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        self.out_edges: dict[int, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self.out_edges[e[0]].append(e)
            self.in_edges[e[1]].append(e)
        self.edge_set = frozenset(self.edges)

    @property
    def poles(self) -> list[int]:
        return list(range(self.n_poles))

    def is_pole(self, v: int) -> bool:
        return v < self.n_poles

    @property
    def non_poles(self) -> list[int]:
        return [v for v in self.vertices if v >= self.n_poles]

    def topological_order(self) -> list[int]:
        indeg = {v: len(self.in_edges[v]) for v in self.vertices}
        heap = [v for v, k in indeg.items() if k == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for _, w in self.out_edges[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) != len(self.vertices):
            raise GraphError("graph has a cycle")
        return order

    def check(self) -> None:
        """Raise unless acyclic with fanin and fanout at most 2 everywhere."""
        self.topological_order()
        for v in self.vertices:
            if len(self.in_edges[v]) > 2 or len(self.out_edges[v]) > 2:
                raise GraphError(f"vertex {v} exceeds degree 2")
        if len(self.edge_set) != len(self.edges):
            raise GraphError("duplicate edge")

    def without(self, drop_in=(), drop_out=()) -> "EUGraph":
        """Remove in-edges of ``drop_in`` poles and out-edges of ``drop_out`` poles, then prune."""
        din, dout = set(drop_in), set(drop_out)
        edges = [e for e in self.edges if e[1] not in din and e[0] not in dout]
        return _pruned(self.n_poles, self.vertices, edges, self._routers)

    def size_constant(self) -> float:
        """|V| / (N lg N), the constant in the size law."""
        N = self.n_poles
        return len(self.vertices) / (N * math.log2(N)) if N > 1 else float(len(self.vertices))

    def to_dot(self, embedding: "EdgeEmbedding | None" = None, name: str = "eu") -> str:
        colours = {}
        if embedding is not None:
            palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]
            for k, path in enumerate(embedding.paths):
                for e in zip(path, path[1:]):
                    colours[e] = (palette[k % len(palette)], k)
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in self.vertices:
            if self.is_pole(v):
                lines.append(f'  v{v} [label="p{v}", shape=doublecircle];')
            else:
                lines.append(f'  v{v} [label="", shape=point];')
        for u, v in self.edges:
            if (u, v) in colours:
                col, k = colours[(u, v)]
                lines.append(f'  v{u} -> v{v} [color={col}, penwidth=2, label="e{k}"];')
            else:
                lines.append(f"  v{u} -> v{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _pruned(n_poles, vertices, edges, routers) -> EUGraph:
    # drop non-pole vertices that cannot lie on a pole-to-pole path
    edges = set(edges)
    succ, pred = defaultdict(set), defaultdict(set)
    for u, v in edges:
        succ[u].add(v)
        pred[v].add(u)
    alive = set(vertices)
    todo = [v for v in vertices if v >= n_poles]
    while todo:
        v = todo.pop()
        if v < n_poles or v not in alive or (pred[v] and succ[v]):
            continue
        alive.discard(v)
        for u in pred.pop(v, ()):
            succ[u].discard(v)
            todo.append(u)
        for w in succ.pop(v, ()):
            pred[w].discard(v)
            todo.append(w)
    kept = sorted((u, v) for u, v in edges if u in alive and v in alive)
    return EUGraph(n_poles, tuple(sorted(alive)), tuple(kept), routers)


def build_edge_universal(N: int) -> EUGraph:
    """Edge-universal graph for Gamma2(N): two Gamma1 routers on shared poles."""
    if N < 1:
        raise ValueError("need at least one pole")
    counter = [N]
    edges: list[tuple[int, int]] = []

    def alloc():
        counter[0] += 1
        return counter[0] - 1

    ports = [(p, p) for p in range(N)]
    routers = (_Router(ports, alloc, edges), _Router(ports, alloc, edges))
    return _pruned(N, tuple(range(counter[0])), edges, routers)


# embeddings

@dataclass(frozen=True)
class EdgeEmbedding:
    rho: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]

    def path_edges(self, k: int) -> list[tuple[int, int]]:
        p = self.paths[k]
        return list(zip(p, p[1:]))


def embed(g: Gamma2Graph, eu: EUGraph) -> EdgeEmbedding:
    """Route every edge of ``g`` through ``eu`` along edge-disjoint paths."""
    if g.n != eu.n_poles:
        raise GraphError(f"graph has {g.n} vertices, edge-universal graph has {eu.n_poles} poles")
    halves = split_gamma2(g)
    paths: list = [None] * len(g.edges)
    for router, idx in zip(eu._routers, halves):
        for k, p in zip(idx, router.route([g.edges[k] for k in idx])):
            paths[k] = tuple(p)
    emb = EdgeEmbedding(tuple(range(g.n)), tuple(paths))
    check_embedding(g, eu, emb)
    return emb


def check_embedding(g: Gamma2Graph, eu: EUGraph, e: EdgeEmbedding) -> None:
    """Raise EmbeddingError unless ``e`` is a valid edge-disjoint embedding of ``g``."""
    if e.rho != tuple(range(g.n)) or len(e.paths) != len(g.edges):
        raise EmbeddingError("vertex map or path count mismatch")
    used = []
    for (i, j), path in zip(g.edges, e.paths):
        if path[0] != e.rho[i] or path[-1] != e.rho[j]:
            raise EmbeddingError(f"path for ({i}, {j}) has wrong endpoints")
        for k, step in enumerate(zip(path, path[1:])):
            if step not in eu.edge_set:
                raise EmbeddingError(f"path for ({i}, {j}) uses missing edge {step}")
            if 0 < k and eu.is_pole(step[0]):
                raise EmbeddingError(f"path for ({i}, {j}) passes through pole {step[0]}")
        used += list(zip(path, path[1:]))
    if len(used) != len(set(used)):
        raise EmbeddingError("paths share an edge")
