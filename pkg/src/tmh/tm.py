"""Topological-minor machinery: models, dissolution, containment search,
boundaried graphs and their folios, and the exhaustive deletion oracle.

A model of a pattern H inside a host G is kept as a pair (M, T): M is a
subgraph of G, T the set of branch vertices, and every vertex of M outside T
has degree exactly two in M, so M is a subdivision shape.  Dissolving the
degree-two vertices of M recovers a graph on T which must be isomorphic to H.

Containment search is exhaustive and budgeted.  A family of frequently used
small patterns (triangle, 4-cycle, K4, K2,3) is additionally recognized and
dispatched to direct structural criteria; the generic search remains the
reference implementation and the two routes are cross-checked in the test
suite rather than trusted blindly.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import deque

from .graphs import Graph, TmhError, _normalize_edge


class BudgetExceeded(TmhError):
    """The node budget of an exhaustive search ran out: the search result is
    unknown, which is distinct from a certified absence."""


DEFAULT_BUDGET_NODES = 10_000_000


def default_budget():
    raw = os.environ.get("TMH_BUDGET_NODES")
    if raw is None:
        return SearchBudget(DEFAULT_BUDGET_NODES)
    try:
        return SearchBudget(int(raw))
    except ValueError:
        raise TmhError("TMH_BUDGET_NODES must be an integer, got %r" % raw)


class SearchBudget:
    """A mutable countdown of search nodes shared across nested searches."""

    __slots__ = ("limit", "used")

    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self, amount=1):
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded("search budget of %d nodes exhausted" % self.limit)


class TmPair:
    """A subdivision-shaped subgraph M with branch vertices T."""

    __slots__ = ("model", "branches")

    def __init__(self, model, branches):
        branches = frozenset(branches)
        if not branches <= set(model.vertices):
            raise TmhError("branch vertices must belong to the model")
        for v in model.vertices:
            if v not in branches and model.degree(v) != 2:
                raise TmhError(
                    "non-branch vertex %r has degree %d, want 2" % (v, model.degree(v)))
        self.model = model
        self.branches = branches

    def __repr__(self):
        return "TmPair(|M|=%d, |T|=%d)" % (self.model.n, len(self.branches))


def arcs(pair):
    """The arc decomposition of a TmPair.

    Returns (arc_list, leftover) where arc_list holds triples
    (u, v, interior) for each maximal path between branch vertices u and v
    whose interior vertices are all non-branch, and leftover is the set of
    non-branch vertices on components containing no branch vertex at all
    (those make the pair dissolve into something non-simple, so callers
    treat a non-empty leftover as invalid).
    """
    m, t = pair.model, pair.branches
    used = set()
    out = []
    for b in sorted(t):
        for first in m.neighbors(b):
            if first in t:
                if b < first:
                    out.append((b, first, ()))
                continue
            if (b, first) in used:
                continue
            interior = [first]
            prev, cur = b, first
            while cur not in t:
                a, c = m.neighbors(cur)
                nxt = a if a != prev else c
                prev, cur = cur, nxt
                if cur not in t:
                    interior.append(cur)
            used.add((b, interior[0]))
            used.add((cur, interior[-1]))
            out.append((b, cur, tuple(interior)))
    covered = set(t)
    for _, _, interior in out:
        covered.update(interior)
    leftover = set(m.vertices) - covered
    return out, leftover


def dissolve(pair):
    """Contract every degree-two non-branch vertex away; the result is a
    graph on the branch set.  A pair whose dissolution would need a loop or
    parallel edge is rejected as an invalid model shape."""
    arc_list, leftover = arcs(pair)
    if leftover:
        raise TmhError(
            "model has branchless cycles through %r; not a subdivision" % (sorted(leftover)[:4],))
    edges = set()
    for u, v, _ in arc_list:
        if u == v:
            raise TmhError("dissolution creates a loop at %r" % (u,))
        e = (u, v) if u < v else (v, u)
        if e in edges:
            raise TmhError("dissolution creates parallel edges %r" % (e,))
        edges.add(e)
    return Graph(pair.branches, edges)


# -- generic containment search ---------------------------------------------


def _isomorphic_small(g, h):
    """Exact isomorphism for small graphs by ordered backtracking."""
    if g.n != h.n or g.m != h.m:
        return False
    if sorted(g.degree(v) for v in g.vertices) != sorted(h.degree(v) for v in h.vertices):
        return False
    hv = sorted(h.vertices, key=lambda v: (-h.degree(v), v))
    gv = list(g.vertices)

    def extend(i, mapping, used):
        if i == len(hv):
            return True
        p = hv[i]
        for c in gv:
            if c in used or g.degree(c) != h.degree(p):
                continue
            ok = True
            for q in h.neighbors(p):
                if q in mapping and not g.has_edge(mapping[q], c):
                    ok = False
                    break
            if not ok:
                continue
            for q in hv[:i]:
                if not h.has_edge(p, q) and g.has_edge(mapping[q], c):
                    ok = False
                    break
            if ok:
                mapping[p] = c
                used.add(c)
                if extend(i + 1, mapping, used):
                    return True
                del mapping[p]
                used.discard(c)
        return False

    return extend(0, {}, set())


def find_tm_model(g, h, budget=None, candidates=None, forbidden_interior=()):
    """Search for a topological-minor model of h inside g.

    Returns a TmPair with dissolve(pair) isomorphic to h, or None when the
    exhaustive search certifies absence.  Raises BudgetExceeded when the
    node budget runs out first.

    candidates optionally restricts, per pattern vertex, the host vertices
    its branch image may use; forbidden_interior lists host vertices that
    arc interiors must avoid (their use as branch images is governed by
    candidates alone).  Both hooks exist for boundaried containment.
    """
    budget = budget or default_budget()
    forbidden_interior = frozenset(forbidden_interior)

    pattern_vs = sorted(h.vertices, key=lambda v: (-h.degree(v), v))
    host_vs = list(g.vertices)

    def allowed(p):
        base = candidates.get(p, host_vs) if candidates is not None else host_vs
        return [c for c in sorted(base) if c in g and g.degree(c) >= h.degree(p)]

    pattern_edges = sorted((min(e), max(e)) for e in h.edges)
    image = {}
    paths = {}

    def place(i):
        budget.spend()
        if i == len(pattern_vs):
            return route(0, frozenset(image.values()))
        p = pattern_vs[i]
        taken = set(image.values())
        for c in allowed(p):
            if c in taken:
                continue
            image[p] = c
            if place(i + 1):
                return True
            del image[p]
        return False

    def route(j, blocked):
        """Pack an internally disjoint path for pattern edge j, then recurse;
        blocked holds branch images plus interiors of earlier paths."""
        if j == len(pattern_edges):
            return True
        a, b = pattern_edges[j]
        s, t = image[a], image[b]
        avoid = set(blocked) | set(forbidden_interior)
        avoid.discard(t)

        def later_pairs_alive(interior):
            # endpoints of every still-unrouted pattern edge must stay
            # connected around everything laid down so far; interiors only
            # grow deeper in the search, so a cut pair can never recover
            for a2, b2 in pattern_edges[j + 1:]:
                s2, t2 = image[a2], image[b2]
                if g.has_edge(s2, t2):
                    continue
                barrier = (blocked | forbidden_interior
                           | frozenset(interior)) - {s2, t2}
                seen = {s2}
                stack = [s2]
                hit = False
                while stack and not hit:
                    u = stack.pop()
                    for w in g.neighbors(u):
                        if w == t2:
                            hit = True
                            break
                        if w not in barrier and w not in seen:
                            seen.add(w)
                            stack.append(w)
                if not hit:
                    return False
            return True

        def extend(cur, interior):
            budget.spend()
            if not later_pairs_alive(interior):
                return False
            if g.has_edge(cur, t):
                paths[(a, b)] = tuple(interior)
                if route(j + 1, blocked | frozenset(interior)):
                    return True
                del paths[(a, b)]
            # distances to t through non-avoided vertices: neighbors cut
            # off from t cannot start a completion and are skipped, the
            # rest are tried nearest first so detours stay last resorts
            dist = {t: 0}
            frontier = [t]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in g.neighbors(u):
                        if w not in dist and w not in avoid:
                            dist[w] = dist[u] + 1
                            nxt.append(w)
                frontier = nxt
            live = [w for w in g.neighbors(cur)
                    if w != t and w not in avoid and w in dist]
            live.sort(key=lambda w: (dist[w], w))
            for w in live:
                interior.append(w)
                avoid.add(w)
                if extend(w, interior):
                    return True
                avoid.discard(w)
                interior.pop()
            return False

        return extend(s, [])

    if not place(0):
        return None
    model_vertices = set(image.values())
    model_edges = []
    for (a, b), interior in paths.items():
        chain = [image[a], *interior, image[b]]
        model_vertices.update(interior)
        model_edges.extend(zip(chain, chain[1:]))
    model = Graph(model_vertices, model_edges)
    return TmPair(model, set(image.values()))


# -- structural fast paths for the common small patterns --------------------
#
# Each criterion below is an if-and-only-if characterization of containing
# the named pattern as a topological minor; all four patterns have maximum
# degree three, where topological-minor and minor containment coincide.


def _triangle_graph():
    return Graph.from_edges([(0, 1), (1, 2), (0, 2)])


def _c4_graph():
    return Graph.from_edges([(0, 1), (1, 2), (2, 3), (0, 3)])


def _k4_graph():
    return Graph.from_edges(itertools.combinations(range(4), 2))


def _k23_graph():
    return Graph.from_edges([(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])


def _k5_graph():
    return Graph.from_edges(itertools.combinations(range(5), 2))


def _k33_graph():
    return Graph.from_edges((a, b) for a in range(3) for b in range(3, 6))


def _has_cycle(g):
    # m > n - c forces a cycle; equality means forest.
    comps = g.connected_components()
    return g.m > g.n - len(comps)


def _block_vertex_sets(g):
    """Vertex sets of the biconnected components, by iterative DFS."""
    index = {}
    low = {}
    blocks = []
    edge_stack = []
    counter = itertools.count()
    for root in g.vertices:
        if root in index:
            continue
        stack = [(root, None, iter(g.neighbors(root)))]
        index[root] = low[root] = next(counter)
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w not in index:
                    index[w] = low[w] = next(counter)
                    edge_stack.append((v, w))
                    stack.append((w, v, iter(g.neighbors(w))))
                    advanced = True
                    break
                if index[w] < index[v]:
                    edge_stack.append((v, w))
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= index[u]:
                    block = set()
                    while edge_stack:
                        a, b = edge_stack.pop()
                        block.add(a)
                        block.add(b)
                        if (a, b) == (u, v):
                            break
                    blocks.append(block)
    return blocks


def _peel_leaves(g):
    """Iteratively delete vertices of degree at most one.  Safe for any
    pattern with minimum degree two: a degree-one host vertex can never be
    needed by a model of such a pattern."""
    doomed = deque(v for v in g.vertices if g.degree(v) <= 1)
    alive = set(g.vertices)
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    gone = set()
    while doomed:
        v = doomed.popleft()
        if v in gone:
            continue
        gone.add(v)
        alive.discard(v)
        for w in adj[v]:
            adj[w].discard(v)
            if w not in gone and len(adj[w]) <= 1:
                doomed.append(w)
    edges = set()
    for v in alive:
        for w in adj[v]:
            if v < w:
                edges.add((v, w))
    return Graph(alive, edges)


def _series_parallel_core(g):
    """Reduce by deleting degree-<=1 vertices and smoothing degree-2
    vertices, collapsing any parallel edges that appear.  The reduction
    runs to a fixed point; the core is empty exactly when every block is
    series-parallel, i.e. when no K4 shape exists."""
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    queue = deque(v for v in g.vertices if len(adj[v]) <= 2)
    while queue:
        v = queue.popleft()
        if v not in adj:
            continue
        d = len(adj[v])
        if d > 2:
            continue
        if d <= 1:
            for w in adj.pop(v):
                adj[w].discard(v)
                if len(adj[w]) <= 2:
                    queue.append(w)
            continue
        a, b = adj.pop(v)
        adj[a].discard(v)
        adj[b].discard(v)
        # smoothing may create a parallel a-b edge: keep a single copy
        if b not in adj[a]:
            adj[a].add(b)
            adj[b].add(a)
        for w in (a, b):
            if len(adj[w]) <= 2:
                queue.append(w)
    return {v for v in adj if adj[v]}


def _count_internally_disjoint_long_paths(g, s, t, need):
    """Vertex-disjoint s-t paths of length at least two, by unit-capacity
    augmentation on the split digraph with the direct s-t edge removed."""
    nodes = {}
    for v in g.vertices:
        nodes[(v, 0)] = len(nodes)
        nodes[(v, 1)] = len(nodes)
    succ = {i: [] for i in nodes.values()}
    cap = {}

    def add(a, b, c):
        succ[a].append(b)
        succ[b].append(a)
        cap[(a, b)] = c
        cap.setdefault((b, a), 0)

    for v in g.vertices:
        c = need if v in (s, t) else 1
        add(nodes[(v, 0)], nodes[(v, 1)], c)
    for u, v in g.edges:
        if {u, v} == {s, t}:
            continue
        add(nodes[(u, 1)], nodes[(v, 0)], 1)
        add(nodes[(v, 1)], nodes[(u, 0)], 1)
    source, sink = nodes[(s, 1)], nodes[(t, 0)]
    flow = 0
    while flow < need:
        prev = {source: None}
        q = deque([source])
        while q:
            x = q.popleft()
            if x == sink:
                break
            for y in succ[x]:
                if y not in prev and cap.get((x, y), 0) > 0:
                    prev[y] = x
                    q.append(y)
        if sink not in prev:
            break
        y = sink
        while prev[y] is not None:
            x = prev[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1
    return flow


def _contains_fast(g, tag):
    if tag == "triangle":
        return _has_cycle(g)
    if tag == "c4":
        return any(len(b) >= 4 for b in _block_vertex_sets(g))
    if tag == "k4":
        return bool(_series_parallel_core(g))
    if tag == "k23":
        core = _peel_leaves(g)
        if core.m < 6:
            return False
        cands = sorted(v for v in core.vertices if core.degree(v) >= 3)
        for s, t in itertools.combinations(cands, 2):
            if _count_internally_disjoint_long_paths(core, s, t, 3) >= 3:
                return True
        return False
    raise TmhError("unknown fast containment tag %r" % tag)


_FAST_TAGS = (
    ("triangle", _triangle_graph),
    ("c4", _c4_graph),
    ("k4", _k4_graph),
    ("k23", _k23_graph),
)


def classify_pattern(h):
    """Tag patterns that have a direct structural containment test."""
    for tag, make in _FAST_TAGS:
        ref = make()
        if h.n == ref.n and h.m == ref.m and _isomorphic_small(h, ref):
            return tag
    return None


class PatternFamily:
    """A finite set of pattern graphs with cached search metadata."""

    __slots__ = ("patterns", "tags", "h", "g")

    def __init__(self, patterns):
        patterns = tuple(patterns)
        if not patterns:
            raise TmhError("a pattern family must contain at least one pattern")
        for p in patterns:
            if p.n == 0:
                raise TmhError("the empty pattern would make every host a hit")
        self.patterns = patterns
        self.tags = tuple(classify_pattern(p) for p in patterns)
        self.h = max(p.n for p in patterns)
        self.g = max(p.m for p in patterns)

    def __repr__(self):
        return "PatternFamily(%d patterns, h=%d)" % (len(self.patterns), self.h)


BUILTIN_PATTERNS = {
    "K3": _triangle_graph,
    "C4": _c4_graph,
    "K4": _k4_graph,
    "K23": _k23_graph,
    "K5": _k5_graph,
    "K33": _k33_graph,
}


def is_F_free(g, family, budget=None, use_fast_paths=True):
    """True when no pattern of the family has a topological-minor model in g."""
    budget = budget or default_budget()
    for pattern, tag in zip(family.patterns, family.tags):
        if use_fast_paths and tag is not None:
            if _contains_fast(g, tag):
                return False
        elif find_tm_model(g, pattern, budget=budget) is not None:
            return False
    return True


def pF_oracle(g, family, kmax, budget=None, use_fast_paths=True):
    """Smallest k <= kmax such that some k vertex deletions make g free of
    the family, together with the lexicographically least witness set.
    Returns (k, witness) or None when every set of size <= kmax fails."""
    budget = budget or default_budget()
    for k in range(kmax + 1):
        for s in itertools.combinations(g.vertices, k):
            if is_F_free(g.delete_vertices(s), family, budget=budget,
                         use_fast_paths=use_fast_paths):
                return k, tuple(s)
    return None


# -- boundaried graphs and folios -------------------------------------------


class BoundariedGraph:
    """A graph with an injectively labeled boundary subset."""

    __slots__ = ("graph", "labels", "_canon")

    def __init__(self, graph, labels):
        labels = dict(labels)
        for v, lab in labels.items():
            if v not in graph:
                raise TmhError("boundary vertex %r not in graph" % (v,))
            if not isinstance(lab, int) or lab < 1:
                raise TmhError("labels must be positive integers, got %r" % (lab,))
        if len(set(labels.values())) != len(labels):
            raise TmhError("boundary labeling must be injective")
        self.graph = graph
        self.labels = labels
        self._canon = None

    @property
    def boundary(self):
        return frozenset(self.labels)

    def canonical_form(self):
        """A hashable encoding invariant under label-respecting isomorphism.

        Boundary vertices are pinned by label; inner vertices are
        canonicalized by minimizing the edge encoding over all their
        orderings, which is affordable at folio scale."""
        if self._canon is not None:
            return self._canon
        g = self.graph
        inner = sorted(v for v in g.vertices if v not in self.labels)
        label_of = dict(self.labels)
        lab_set = tuple(sorted(self.labels.values()))

        def encode(perm):
            name = {v: ("i", i) for i, v in enumerate(perm)}
            for v, lab in label_of.items():
                name[v] = ("b", lab)
            return tuple(sorted(tuple(sorted((name[u], name[v]))) for u, v in g.edges))

        if len(inner) <= 1:
            best = encode(inner)
        else:
            best = min(encode(p) for p in itertools.permutations(inner))
        self._canon = (g.n, lab_set, len(inner), best)
        return self._canon

    def label_isomorphic(self, other):
        return self.canonical_form() == other.canonical_form()

    def __repr__(self):
        return "BoundariedGraph(n=%d, labels=%s)" % (
            self.graph.n, sorted(self.labels.values()))


def btm_contains(host, pattern, budget=None):
    """Does the host boundaried graph contain a model whose dissolution,
    restricted to the host boundary vertices it uses, reproduces the
    pattern with matching labels?

    Boundary vertices may appear in a model only as branch vertices, and a
    labeled pattern vertex must land exactly on the equally labeled host
    boundary vertex; unlabeled pattern vertices must use inner host
    vertices.
    """
    budget = budget or default_budget()
    host_by_label = {lab: v for v, lab in host.labels.items()}
    for lab in pattern.labels.values():
        if lab not in host_by_label:
            return False
    inner_hosts = [v for v in host.graph.vertices if v not in host.labels]
    candidates = {}
    for p in pattern.graph.vertices:
        if p in pattern.labels:
            candidates[p] = [host_by_label[pattern.labels[p]]]
        else:
            candidates[p] = inner_hosts
    pair = find_tm_model(
        host.graph, pattern.graph, budget=budget,
        candidates=candidates, forbidden_interior=host.boundary)
    return pair is not None


def enumerate_boundaried_graphs(t, h, max_enumeration=2_000_000):
    """All t-boundaried graphs on at most h vertices, one canonical
    representative each, in a deterministic order.

    The census is exponential in h; the guard raises rather than letting a
    call with large parameters run away.
    """
    if t < 0 or h < 0:
        raise TmhError("t and h must be non-negative")
    # price the raw sweep up front so oversized parameters fail fast
    # instead of after minutes of canonicalization
    total = sum(
        sum(math.comb(t, nb) for nb in range(min(t, n) + 1))
        * (1 << math.comb(n, 2))
        for n in range(h + 1))
    if total > max_enumeration:
        raise TmhError(
            "boundaried-graph census for t=%d h=%d exceeds %d graphs; "
            "parameters infeasible at desk scale" % (t, h, max_enumeration))
    seen = {}
    work = 0
    for n in range(h + 1):
        slots = list(itertools.combinations(range(n), 2))
        for nb in range(0, min(t, n) + 1):
            for label_choice in itertools.combinations(range(1, t + 1), nb):
                # labeled vertices are 0..nb-1 bearing label_choice in order
                labels = {i: lab for i, lab in enumerate(label_choice)}
                for edge_bits in range(1 << len(slots)):
                    work += 1
                    if work > max_enumeration:
                        raise TmhError(
                            "boundaried-graph census for t=%d h=%d exceeds %d graphs; "
                            "parameters infeasible at desk scale" % (t, h, max_enumeration))
                    edges = [slots[i] for i in range(len(slots)) if edge_bits >> i & 1]
                    bg = BoundariedGraph(Graph(range(n), edges), labels)
                    key = bg.canonical_form()
                    if key not in seen:
                        seen[key] = bg
    return [seen[k] for k in sorted(seen)]


_F3_CACHE = {}


def f3(t, h):
    """Number of pairwise non-label-isomorphic t-boundaried graphs on at
    most h vertices."""
    if (t, h) not in _F3_CACHE:
        _F3_CACHE[(t, h)] = len(enumerate_boundaried_graphs(t, h))
    return _F3_CACHE[(t, h)]


class Folio:
    """The set of detail-bounded representations a boundaried graph
    realizes: all members of the census that occur as dissolved models."""

    __slots__ = ("t", "h", "members", "_keys")

    def __init__(self, t, h, members):
        self.t = t
        self.h = h
        self.members = tuple(members)
        self._keys = frozenset(m.canonical_form() for m in self.members)

    @property
    def keys(self):
        return self._keys

    def __len__(self):
        return len(self.members)

    def issubset(self, other):
        return self._keys <= other._keys

    def __eq__(self, other):
        return (isinstance(other, Folio)
                and (self.t, self.h) == (other.t, other.h)
                and self._keys == other._keys)

    def __hash__(self):
        return hash((self.t, self.h, self._keys))

    def __repr__(self):
        return "Folio(t=%d, h=%d, %d members)" % (self.t, self.h, len(self.members))


def compute_folio(bg, t, h, w=None, check_width=False, budget=None):
    """Folio of a boundaried graph by filtering the census through the
    containment search.

    The width bound w is advisory: the exhaustive route works regardless,
    but callers carrying a decomposition can ask for the precondition to be
    verified (check_width) instead of trusted."""
    if h < 0:
        raise TmhError("folio detail bound must be non-negative")
    if check_width:
        if w is None:
            raise TmhError("check_width requires an explicit width bound")
        from .decomposition import exact_treewidth
        tw, _ = exact_treewidth(bg.graph)
        if tw > w:
            raise TmhError("boundaried graph has treewidth %d > bound %d" % (tw, w))
    budget = budget or default_budget()
    members = []
    for cand in enumerate_boundaried_graphs(t, h):
        if btm_contains(bg, cand, budget=budget):
            members.append(cand)
    return Folio(t, h, members)


def folio_via_model_enumeration(bg, t, h):
    """Independent folio route: enumerate subgraphs of the host directly,
    dissolve every valid branch-vertex choice, and collect the resulting
    representations.  Exponential in the host size; used to cross-check
    compute_folio on small hosts."""
    g = bg.graph
    if g.n > 8 or g.m > 14:
        raise TmhError("model enumeration route only runs on tiny hosts")
    reps = {}
    edge_list = g.sorted_edges()
    for keep_bits in range(1 << len(edge_list)):
        kept = [edge_list[i] for i in range(len(edge_list)) if keep_bits >> i & 1]
        used = set(v for e in kept for v in e)
        for extra_iso in _subsets(sorted(set(g.vertices) - used)):
            mvs = used | set(extra_iso)
            model = Graph(mvs, kept)
            forced = frozenset(v for v in mvs if v in bg.labels)
            optional = sorted(v for v in mvs if v not in forced)
            for t_extra in _subsets(optional):
                branches = forced | set(t_extra)
                if len(branches) > h:
                    continue
                if any(model.degree(v) != 2 for v in mvs - branches):
                    continue
                try:
                    pair = TmPair(model, branches)
                    dg = dissolve(pair)
                except TmhError:
                    continue
                if dg.n > h:
                    continue
                rep = BoundariedGraph(dg, {v: bg.labels[v] for v in forced})
                reps.setdefault(rep.canonical_form(), rep)
    return Folio(t, h, [reps[k] for k in sorted(reps)])


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


# -- confinement of a model within a railed annulus -------------------------


def check_confined(pair, annulus, s, rail_indices):
    """Is the model confined to the given rails across the middle band of
    the annulus?  Width s must be odd, as must the annulus depth; the band
    spans the s cycle levels centered on the middle cycle, so s=1 checks
    the middle cycle alone and s=r the whole annulus."""
    return annulus.confines(pair.model, s, rail_indices)
