"""Vertex-colored multigraphs exchanged between the lattice and search layers."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ColoredGraph:
    """Adjacency multiplicities plus per-vertex h-degree (``color``) and an
    optional partition tag (``part``, the product with ι)."""

    adjacency: tuple
    color: tuple
    part: tuple | None = None
    vec: tuple | None = None
    aut_order: int | None = None

    def __post_init__(self):
        adj = tuple(tuple(int(x) for x in row) for row in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "color", tuple(int(c) for c in self.color))
        if self.part is not None:
            object.__setattr__(self, "part", tuple(int(c) for c in self.part))
        n = len(adj)
        if len(self.color) != n:
            raise ValueError("color list has wrong length")
        for i in range(n):
            if adj[i][i]:
                raise ValueError(f"loop at vertex {i}")
            for j in range(i):
                if adj[i][j] != adj[j][i]:
                    raise ValueError(f"adjacency not symmetric at ({i}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges, color=None, part=None, vec=None) -> "ColoredGraph":
        adj = [[0] * n for _ in range(n)]
        for e in edges:
            i, j = e[0], e[1]
            m = e[2] if len(e) > 2 else 1
            adj[i][j] = adj[j][i] = m
        return cls(adj, color if color is not None else (1,) * n, part, vec)

    @classmethod
    def empty(cls) -> "ColoredGraph":
        return cls((), ())

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def __len__(self) -> int:
        return self.n

    def neighbors(self, v: int) -> list:
        return [w for w, m in enumerate(self.adjacency[v]) if m]

    def degree(self, v: int) -> int:
        return sum(self.adjacency[v])

    def edges(self):
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.adjacency[i][j]:
                    yield i, j, self.adjacency[i][j]

    def lines(self) -> list:
        return [v for v in range(self.n) if self.color[v] == 1]

    def exceptional(self) -> list:
        return [v for v in range(self.n) if self.color[v] == 0]

    def induced(self, vertices) -> "ColoredGraph":
        vs = list(vertices)
        adj = [[self.adjacency[a][b] for b in vs] for a in vs]
        part = tuple(self.part[v] for v in vs) if self.part is not None else None
        vec = tuple(self.vec[v] for v in vs) if self.vec is not None else None
        return ColoredGraph(adj, [self.color[v] for v in vs], part, vec)

    def plain(self) -> "ColoredGraph":
        return self.induced(self.lines())

    def permuted(self, perm) -> "ColoredGraph":
        """Relabel: vertex v of self becomes vertex perm[v]."""
        n = self.n
        inv = [0] * n
        for v, p in enumerate(perm):
            inv[p] = v
        adj = [[self.adjacency[inv[a]][inv[b]] for b in range(n)] for a in range(n)]
        part = tuple(self.part[inv[a]] for a in range(n)) if self.part is not None else None
        vec = tuple(self.vec[inv[a]] for a in range(n)) if self.vec is not None else None
        return ColoredGraph(adj, [self.color[inv[a]] for a in range(n)], part, vec)

    def components(self) -> list:
        seen, comps = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    # ------------------------------------------------------------ records

    def to_record(self) -> str:
        rec = {
            "n": self.n,
            "edges": [[i, j, m] for i, j, m in self.edges()],
            "color": list(self.color),
        }
        if self.part is not None:
            rec["part"] = list(self.part)
        if self.vec is not None:
            rec["vec"] = [[str(x) for x in v] for v in self.vec]
        if self.aut_order is not None:
            rec["aut"] = self.aut_order
        return json.dumps(rec, separators=(",", ":"))

    @classmethod
    def from_record(cls, line: str) -> "ColoredGraph":
        rec = json.loads(line)
        n = rec["n"]
        vec = rec.get("vec")
        if vec is not None:
            vec = tuple(tuple(_num(x) for x in v) for v in vec)
        g = cls.from_edges(n, [tuple(e) for e in rec["edges"]], rec["color"], rec.get("part"), vec)
        if "aut" in rec:
            object.__setattr__(g, "aut_order", int(rec["aut"]))
        return g


def _num(s: str):
    f = Fraction(s)
    return f.numerator if f.denominator == 1 else f


def write_records(path, graphs) -> None:
    with open(path, "w") as fh:
        for g in graphs:
            fh.write(g.to_record() + "\n")


def read_records(path) -> list:
    with open(path) as fh:
        return [ColoredGraph.from_record(line) for line in fh if line.strip()]
