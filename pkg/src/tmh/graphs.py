"""Simple undirected graphs, rotation-system embeddings, and combinatorial
disk regions.

Everything downstream (walls, annuli, linkages, the solver) operates on the
three substrates defined here:

  * Graph: an immutable simple graph over integer vertex ids.  Ids are stable
    across subgraph operations, so a vertex found in a reduced graph names the
    same vertex of the original instance.

  * PlaneEmbedding: a clockwise rotation system plus the face structure it
    induces.  Faces are traced combinatorially; no coordinates are kept.

  * DiskRegion / NestedCycles: disks are sets of faces, never geometry.  A
    cycle of an embedded graph bounds the set of faces that cannot reach the
    outer face without crossing the cycle, and every region predicate
    (open/closed membership, annulus bands, nesting) reduces to face-set
    arithmetic on that representation.
"""

from __future__ import annotations

import itertools
from collections import deque


class TmhError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TmhError):
    """Malformed input document."""


class EmbeddingError(TmhError):
    """Rotation system is inconsistent or a region query is undefined."""


def _normalize_edge(u, v):
    if u == v:
        raise TmhError("loop edge %r forbidden" % (u,))
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph with integer-comparable vertex ids."""

    __slots__ = ("_adj", "_vertices", "_edges", "_hash")

    def __init__(self, vertices=(), edges=()):
        adj = {v: set() for v in vertices}
        es = set()
        for u, v in edges:
            e = _normalize_edge(u, v)
            if e[0] not in adj or e[1] not in adj:
                raise TmhError("edge %r has an undeclared endpoint" % (e,))
            es.add(e)
            adj[e[0]].add(e[1])
            adj[e[1]].add(e[0])
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self._vertices = tuple(sorted(adj))
        self._edges = frozenset(es)
        self._hash = None

    @classmethod
    def from_edges(cls, edges, extra_vertices=()):
        edges = list(edges)
        vs = set(extra_vertices)
        for u, v in edges:
            vs.add(u)
            vs.add(v)
        return cls(vs, edges)

    @property
    def vertices(self):
        return self._vertices

    @property
    def edges(self):
        return self._edges

    def sorted_edges(self):
        return sorted(self._edges)

    @property
    def n(self):
        return len(self._vertices)

    @property
    def m(self):
        return len(self._edges)

    def __contains__(self, v):
        return v in self._adj

    def has_edge(self, u, v):
        if u == v:
            return False
        return ((u, v) if u < v else (v, u)) in self._edges

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def max_degree(self):
        return max((len(ns) for ns in self._adj.values()), default=0)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vertices, self._edges))
        return self._hash

    def __repr__(self):
        return "Graph(n=%d, m=%d)" % (self.n, self.m)

    # -- derivation ----------------------------------------------------------

    def subgraph(self, vertices):
        """Induced subgraph on the given vertex set."""
        vs = set(vertices)
        unknown = vs - set(self._adj)
        if unknown:
            raise TmhError("unknown vertices %r" % (sorted(unknown),))
        edges = [e for e in self._edges if e[0] in vs and e[1] in vs]
        return Graph(vs, edges)

    def restrict(self, vertices, edges):
        """Subgraph with exactly the given vertices and the given edges."""
        vs = set(vertices)
        es = []
        for u, v in edges:
            e = _normalize_edge(u, v)
            if e not in self._edges:
                raise TmhError("edge %r not present" % (e,))
            es.append(e)
        return Graph(vs, es)

    def delete_vertices(self, s):
        s = set(s)
        unknown = s - set(self._adj)
        if unknown:
            raise TmhError("cannot delete unknown vertices %r" % (sorted(unknown),))
        return self.subgraph(set(self._adj) - s)

    def union(self, other):
        vs = set(self._vertices) | set(other._vertices)
        return Graph(vs, set(self._edges) | set(other._edges))

    def intersection(self, other):
        vs = set(self._vertices) & set(other._vertices)
        return Graph(vs, self._edges & other._edges)

    def difference_edges(self, other):
        """This graph minus the other's edges; vertex set unchanged."""
        return Graph(self._vertices, self._edges - other._edges)

    def add_edges(self, edges):
        new = set(self._edges)
        vs = set(self._vertices)
        for u, v in edges:
            e = _normalize_edge(u, v)
            vs.add(e[0])
            vs.add(e[1])
            new.add(e)
        return Graph(vs, new)

    def relabel(self, mapping):
        """New graph with vertex v renamed mapping[v]; mapping must be injective."""
        if len(set(mapping.values())) != len(mapping):
            raise TmhError("relabel mapping is not injective")
        vs = [mapping[v] for v in self._vertices]
        es = [(mapping[u], mapping[v]) for u, v in self._edges]
        return Graph(vs, es)

    # -- traversal -----------------------------------------------------------

    def connected_components(self):
        """Components as sorted vertex tuples, ordered by smallest member."""
        seen = set()
        out = []
        for start in self._vertices:
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self):
        return self.n <= 1 or len(self.connected_components()) == 1

    def shortest_path(self, source, targets, forbidden_edges=None, forbidden_vertices=None):
        """BFS path from source to the nearest of targets, or None.

        Ties are broken by visiting neighbors in sorted order, so the result
        is deterministic.  forbidden_edges/_vertices are excluded (the source
        itself is always allowed).
        """
        targets = set(targets)
        banned_e = frozenset(_normalize_edge(u, v) for u, v in (forbidden_edges or ()))
        banned_v = set(forbidden_vertices or ())
        banned_v.discard(source)
        if source in targets:
            return [source]
        prev = {source: None}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if w in prev or w in banned_v:
                    continue
                if _normalize_edge(u, w) in banned_e:
                    continue
                prev[w] = u
                if w in targets:
                    path = [w]
                    while path[-1] is not None and prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    path.reverse()
                    return path
                queue.append(w)
        return None

    def path_vertices_in_order(self):
        """If this graph is a single simple path, its vertices end to end.

        Returns None when the graph is not a path.  A single vertex counts as
        a (trivial) path.  Of the two traversal directions the one starting
        at the smaller endpoint is returned.
        """
        if self.n == 0:
            return None
        if self.n == 1:
            return [self._vertices[0]]
        degs = [self.degree(v) for v in self._vertices]
        ends = [v for v in self._vertices if self.degree(v) == 1]
        if len(ends) != 2 or any(d > 2 for d in degs) or self.m != self.n - 1:
            return None
        start = min(ends)
        order = [start]
        prev = None
        cur = start
        while len(order) < self.n:
            nxt = [w for w in self._adj[cur] if w != prev]
            if len(nxt) != 1:
                return None
            prev, cur = cur, nxt[0]
            order.append(cur)
        return order

    def cycle_vertices_in_order(self):
        """If this graph is a single cycle, its vertices in cyclic order.

        Starts at the smallest vertex and proceeds toward its smaller
        neighbor, so the result is deterministic.  Returns None otherwise.
        """
        if self.n < 3 or self.m != self.n:
            return None
        if any(self.degree(v) != 2 for v in self._vertices):
            return None
        if not self.is_connected():
            return None
        start = self._vertices[0]
        order = [start]
        prev = None
        cur = start
        while True:
            a, b = self._adj[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            prev, cur = cur, nxt
            order.append(cur)
        return order


def parse_graph(text):
    """Parse a flat edge-list document: first line "n m", then m lines "u v".

    Vertex ids are 0..n-1.  Raises ParseError naming the offending line for
    duplicate edges, loops, and out-of-range ids.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not rows:
        raise ParseError("empty document")
    head_no, head = rows[0]
    parts = head.split()
    if len(parts) != 2:
        raise ParseError("line %d: expected 'n m', got %r" % (head_no, head))
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("line %d: expected integers, got %r" % (head_no, head))
    if n < 0 or m < 0:
        raise ParseError("line %d: negative counts" % head_no)
    body = rows[1:]
    if len(body) != m:
        raise ParseError("expected %d edge lines, found %d" % (m, len(body)))
    seen = set()
    edges = []
    for line_no, ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError("line %d: expected 'u v', got %r" % (line_no, ln))
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("line %d: expected integers, got %r" % (line_no, ln))
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError("line %d: vertex id out of range [0,%d)" % (line_no, n))
        if u == v:
            raise ParseError("line %d: loop forbidden" % line_no)
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise ParseError("line %d: duplicate edge" % line_no)
        seen.add(e)
        edges.append(e)
    return Graph(range(n), edges)


def delete_vertices(g, s):
    return g.delete_vertices(s)


def is_separation(g, a, b):
    """True iff (a, b) covers V(g) and no edge joins a-only to b-only."""
    a, b = set(a), set(b)
    if a | b != set(g.vertices):
        return False
    a_only = a - b
    b_only = b - a
    for u, v in g.edges:
        if (u in a_only and v in b_only) or (v in a_only and u in b_only):
            return False
    return True


class PlaneEmbedding:
    """A rotation system (clockwise neighbor order per vertex) with faces.

    Faces are traced by following, after arriving at v from u, the neighbor
    that comes right after u in v's clockwise rotation.  Each directed edge
    lies on exactly one face walk; the walk bounding the unbounded region is
    designated the outer face.
    """

    __slots__ = ("graph", "rotation", "faces", "outer_face", "_vertex_faces", "_edge_faces")

    def __init__(self, graph, rotation, outer_edge=None, outer_face_index=None):
        """rotation: dict v -> sequence of neighbors in clockwise order.

        The outer face is named either by outer_edge, a directed edge (u, v)
        whose face walk bounds the unbounded region, or directly by index
        into the traced face list.  One of the two must be given, except for
        edgeless graphs where the single implicit face is the outer one.
        """
        self.graph = graph
        rot = {}
        for v in graph.vertices:
            order = tuple(rotation.get(v, ()))
            if sorted(order) != sorted(graph.neighbors(v)):
                raise EmbeddingError(
                    "rotation at %r does not list its neighbors exactly once" % (v,))
            rot[v] = order
        self.rotation = rot
        self.faces = self._trace()
        self._edge_faces = {}
        self._vertex_faces = {v: set() for v in graph.vertices}
        for idx, face in enumerate(self.faces):
            for (u, v) in face:
                e = _normalize_edge(u, v)
                self._edge_faces.setdefault(e, []).append(idx)
                self._vertex_faces[u].add(idx)
                self._vertex_faces[v].add(idx)
        if outer_face_index is not None:
            self.outer_face = outer_face_index
        elif outer_edge is not None:
            self.outer_face = self.face_of_directed_edge(outer_edge)
        elif not self.faces:
            self.outer_face = None
        else:
            raise EmbeddingError("outer face must be designated")

    def _trace(self):
        succ = {}
        for v, order in self.rotation.items():
            deg = len(order)
            for i, u in enumerate(order):
                # Arriving at v from u, leave toward the next clockwise neighbor.
                succ[(u, v)] = (v, order[(i + 1) % deg])
        unused = set(succ)
        faces = []
        for start in sorted(unused):
            if start not in unused:
                continue
            walk = []
            cur = start
            while cur in unused:
                unused.discard(cur)
                walk.append(cur)
                cur = succ[cur]
            if cur != start:
                raise EmbeddingError("face walk from %r does not close" % (start,))
            faces.append(tuple(walk))
        return tuple(faces)

    def face_of_directed_edge(self, de):
        u, v = de
        for idx, face in enumerate(self.faces):
            if (u, v) in face:
                return idx
        raise EmbeddingError("directed edge %r not on any face" % (de,))

    def face_vertex_set(self, idx):
        return frozenset(u for (u, _) in self.faces[idx])

    def faces_of_vertex(self, v):
        if v not in self._vertex_faces:
            raise EmbeddingError("vertex %r is not embedded" % (v,))
        return frozenset(self._vertex_faces[v])

    def faces_of_edge(self, u, v):
        e = _normalize_edge(u, v)
        if e not in self._edge_faces:
            raise EmbeddingError("edge %r is not embedded" % (e,))
        return tuple(self._edge_faces[e])

    def check_euler(self):
        """v - e + f = 2 on each connected component (f counted locally)."""
        for comp in self.graph.connected_components():
            vs = set(comp)
            es = sum(1 for e in self.graph.edges if e[0] in vs)
            fs = set()
            for v in comp:
                fs |= self._vertex_faces[v]
            if len(comp) == 1 and not fs:
                continue
            if len(vs) - es + len(fs) != 2:
                return False
        return True


def trace_faces(emb):
    """The face list of an embedding (each face a tuple of directed edges)."""
    return emb.faces


def planar_rotation(g):
    """Clockwise rotation system for a planar graph, or raise EmbeddingError.

    Backed by the standard linear-time planarity test; the returned dict maps
    each vertex to its neighbors in clockwise order.
    """
    import networkx as nx

    ng = nx.Graph()
    ng.add_nodes_from(g.vertices)
    ng.add_edges_from(g.edges)
    ok, emb = nx.check_planarity(ng)
    if not ok:
        raise EmbeddingError("graph is not planar")
    data = emb.get_data()
    return {v: tuple(data.get(v, ())) for v in g.vertices}


def embed_planar(g, rotation=None):
    """Embed a planar graph; the outer face is the walk through the smallest
    directed edge, which makes the choice deterministic."""
    rot = rotation if rotation is not None else planar_rotation(g)
    if g.m == 0:
        return PlaneEmbedding(g, rot)
    first = min((u, v) for u, v in
                ((a, b) for e in g.edges for a, b in (e, (e[1], e[0]))))
    return PlaneEmbedding(g, rot, outer_edge=first)


class DiskRegion:
    """A closed disk of an embedding: a set of interior faces plus the cycle
    bounding them.  Membership is face arithmetic and nothing else."""

    __slots__ = ("embedding", "interior_faces", "boundary_cycle", "_closed_v", "_open_v",
                 "_closed_e", "_open_e")

    def __init__(self, embedding, interior_faces, boundary_cycle):
        self.embedding = embedding
        self.interior_faces = frozenset(interior_faces)
        self.boundary_cycle = tuple(boundary_cycle)
        boundary = set(self.boundary_cycle)
        closed_v, open_v = set(), set()
        for v in embedding.graph.vertices:
            fs = embedding.faces_of_vertex(v)
            if fs and fs <= self.interior_faces:
                open_v.add(v)
                closed_v.add(v)
            elif fs & self.interior_faces or v in boundary:
                closed_v.add(v)
        self._closed_v = frozenset(closed_v)
        self._open_v = frozenset(open_v - boundary)
        closed_e, open_e = set(), set()
        for e in embedding.graph.edges:
            fs = embedding.faces_of_edge(*e)
            inside = [f in self.interior_faces for f in fs]
            if all(inside):
                open_e.add(e)
                closed_e.add(e)
            elif any(inside):
                closed_e.add(e)
        self._closed_e = frozenset(closed_e)
        self._open_e = frozenset(open_e)

    @classmethod
    def of_cycle(cls, embedding, cycle_vertices):
        """The disk bounded by a cycle: all faces not reachable from the
        outer face in the dual graph without crossing a cycle edge."""
        cyc = list(cycle_vertices)
        k = len(cyc)
        if k < 3:
            raise EmbeddingError("a bounding cycle needs at least 3 vertices")
        cycle_edges = set()
        for i in range(k):
            u, v = cyc[i], cyc[(i + 1) % k]
            if not embedding.graph.has_edge(u, v):
                raise EmbeddingError("cycle step %r-%r is not an edge" % (u, v))
            cycle_edges.add(_normalize_edge(u, v))
        if embedding.outer_face is None:
            raise EmbeddingError("embedding has no outer face")
        # Flood the dual from the outer face, never crossing the cycle.
        outside = {embedding.outer_face}
        queue = deque([embedding.outer_face])
        while queue:
            f = queue.popleft()
            for (u, v) in embedding.faces[f]:
                e = _normalize_edge(u, v)
                if e in cycle_edges:
                    continue
                for g in embedding.faces_of_edge(u, v):
                    if g not in outside:
                        outside.add(g)
                        queue.append(g)
        interior = set(range(len(embedding.faces))) - outside
        return cls(embedding, interior, cyc)

    def vertices(self, mode="closed"):
        if mode == "closed":
            return self._closed_v
        if mode == "open":
            return self._open_v
        raise TmhError("mode must be 'open' or 'closed'")

    def edges(self, mode="closed"):
        if mode == "closed":
            return self._closed_e
        if mode == "open":
            return self._open_e
        raise TmhError("mode must be 'open' or 'closed'")

    def contains_vertex(self, v, mode="closed"):
        if v not in self.embedding.graph:
            raise EmbeddingError("vertex %r is outside the embedded part" % (v,))
        return v in self.vertices(mode)

    def subgraph(self, mode="closed"):
        return self.embedding.graph.restrict(self.vertices(mode), self.edges(mode))


def region_membership(region, v, mode):
    if mode not in ("open", "closed"):
        raise TmhError("mode must be 'open' or 'closed'")
    return region.contains_vertex(v, mode)


class NestedCycles:
    """A sequence [C_1..C_r] of pairwise disjoint cycles whose disks nest,
    outermost first, within one embedding."""

    __slots__ = ("embedding", "cycles", "regions")

    def __init__(self, embedding, cycles):
        self.embedding = embedding
        self.cycles = [tuple(c) for c in cycles]
        seen = set()
        for c in self.cycles:
            cs = set(c)
            if cs & seen:
                raise EmbeddingError("nested cycles must be pairwise vertex-disjoint")
            seen |= cs
        self.regions = [DiskRegion.of_cycle(embedding, c) for c in self.cycles]
        for a, b in itertools.pairwise(self.regions):
            if not (b.interior_faces <= a.interior_faces):
                raise EmbeddingError("cycle disks do not nest")

    @property
    def r(self):
        return len(self.cycles)

    def open_disk(self, i):
        """Vertices strictly inside C_i (1-based)."""
        return self.regions[i - 1].vertices("open")

    def closed_disk(self, i):
        return self.regions[i - 1].vertices("closed")

    def annulus(self, x, y):
        return annulus_region(self, x, y)


class AnnulusBand:
    """Vertex and edge sets of a band between two nested cycles."""

    __slots__ = ("vertices", "edges", "x", "y")

    def __init__(self, vertices, edges, x, y):
        self.vertices = frozenset(vertices)
        self.edges = frozenset(edges)
        self.x = x
        self.y = y

    def subgraph_of(self, g):
        vs = self.vertices & set(g.vertices)
        es = [e for e in self.edges if e in g.edges]
        return g.restrict(vs, es)


def annulus_region(nc, x, y):
    """The band D-closed(x) minus D-open(y) of a nested cycle sequence,
    1-based, x outermost.  ann(C) is annulus_region(nc, 1, r)."""
    if not (1 <= x <= y <= nc.r):
        raise TmhError("annulus indices must satisfy 1 <= x <= y <= r")
    outer = nc.regions[x - 1]
    inner = nc.regions[y - 1]
    vs = outer.vertices("closed") - inner.vertices("open")
    es = outer.edges("closed") - inner.edges("open")
    return AnnulusBand(vs, es, x, y)


class PartiallyDiskEmbedded:
    """A graph G together with a disk Delta: the part of G inside Delta (the
    compass) carries a plane embedding whose designated boundary cycle is
    bor(Delta); the rest of G attaches only through boundary vertices."""

    __slots__ = ("graph", "compass", "embedding", "boundary_cycle")

    def __init__(self, graph, embedding, boundary_cycle):
        self.graph = graph
        self.embedding = embedding
        self.compass = embedding.graph
        self.boundary_cycle = tuple(boundary_cycle)
        b = set(self.boundary_cycle)
        k = len(self.boundary_cycle)
        for i in range(k):
            u, v = self.boundary_cycle[i], self.boundary_cycle[(i + 1) % k]
            if not self.compass.has_edge(u, v):
                raise EmbeddingError("boundary step %r-%r is not a compass edge" % (u, v))
        if not (set(self.compass.vertices) <= set(graph.vertices)):
            raise TmhError("compass vertices must belong to the graph")
        if not (self.compass.edges <= graph.edges):
            raise TmhError("compass edges must belong to the graph")
        inside_only = set(self.compass.vertices) - b
        outside = set(graph.vertices) - set(self.compass.vertices)
        for u, v in graph.edges:
            if (u in inside_only and v in outside) or (v in inside_only and u in outside):
                raise TmhError(
                    "edge %r-%r crosses the disk boundary away from it" % (u, v))

    def separation_halves(self):
        a = set(self.compass.vertices)
        b = (set(self.graph.vertices) - a) | set(self.boundary_cycle)
        return a, b
