"""Dependency analysis between monomials and the categorized form.

Two monomials of a posynomial are directly dependent when they share a
perturbation coordinate.  Equivalence classes are the connected components of
that relation; each posynomial is then split into classes of size one (M),
two (N) and three or more (P).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import GeometricProgram, Posynomial
from .uncertainty import PerturbationSet


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted((tuple(g) for g in out.values()), key=lambda g: g[0])


@dataclass(frozen=True)
class DependencyGraph:
    """Undirected graph over the term indices of one posynomial."""

    num_terms: int
    edges: frozenset[tuple[int, int]]

    def neighbors(self, k: int) -> set[int]:
        return {b if a == k else a for a, b in self.edges if k in (a, b)}


def build_dependency_graph(p: Posynomial, coupled: bool = False) -> DependencyGraph:
    """Edge ``(k1, k2)`` iff the perturbation supports of the two terms intersect.

    With ``coupled=True`` every pair of uncertain terms is joined; this is the
    relation to use when the perturbation set does not factor over coordinates
    (an ellipsoid ties all coordinates together through its norm).
    """
    supports = [t.support for t in p.terms]
    edges = set()
    for k1 in range(len(supports)):
        if not supports[k1]:
            continue
        for k2 in range(k1 + 1, len(supports)):
            if supports[k2] and (coupled or supports[k1] & supports[k2]):
                edges.add((k1, k2))
    return DependencyGraph(len(supports), frozenset(edges))


def partition(p: Posynomial, coupled: bool = False) -> tuple[tuple[int, ...], ...]:
    """Equivalence classes of terms, ordered by their smallest member."""
    graph = build_dependency_graph(p, coupled)
    uf = UnionFind(graph.num_terms)
    for a, b in graph.edges:
        uf.union(a, b)
    return tuple(uf.groups())


def consistently_dependent(p: Posynomial, cls: tuple[int, ...]) -> bool:
    """All coefficient columns agree in sign per coordinate and exponents are certain."""
    signs: dict[int, float] = {}
    for k in cls:
        t = p.terms[k]
        if t.a_cols:
            return False
        for l, v in t.b_cols.items():
            s = 1.0 if v > 0 else -1.0
            if signs.setdefault(l, s) != s:
                return False
    return True


@dataclass
class CategorizedProgram:
    """A program whose posynomials are split into independent classes.

    ``classes[i]`` lists the classes of inequality ``i``.  ``t_vars`` maps
    ``(i, j)`` to the auxiliary variable bounding class ``j`` of a posynomial
    that was split (``N_e > 1``); those posynomials carry the budget
    ``sum_j exp(t_ij) <= 1``.
    """

    gp: GeometricProgram
    classes: tuple[tuple[tuple[int, ...], ...], ...]
    coupled: bool = False
    t_vars: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def M(self) -> list[tuple[int, int]]:
        return self._by_size(lambda s: s == 1)

    @property
    def N(self) -> list[tuple[int, int]]:
        return self._by_size(lambda s: s == 2)

    @property
    def P(self) -> list[tuple[int, int]]:
        return self._by_size(lambda s: s >= 3)

    def _by_size(self, pred) -> list[tuple[int, int]]:
        return [(i, j) for i, cls in enumerate(self.classes) for j, c in enumerate(cls) if pred(len(c))]

    @property
    def budgets(self) -> list[int]:
        return [i for i, cls in enumerate(self.classes) if len(cls) > 1]

    @property
    def num_vars(self) -> int:
        return self.gp.num_vars + len(self.t_vars)

    def members(self, i: int, j: int):
        return [self.gp.inequalities[i].terms[k] for k in self.classes[i][j]]

    def exact_under(self, pset: PerturbationSet) -> bool:
        """Certificate that decoupling every class loses nothing.

        Holds when each class has at most one uncertain monomial, or when the set
        is a box and every class is consistently dependent.
        """
        for i, cls in enumerate(self.classes):
            p = self.gp.inequalities[i]
            for c in cls:
                if sum(1 for k in c if not p.terms[k].is_certain) <= 1:
                    continue
                if not (pset.is_box and consistently_dependent(p, c)):
                    return False
        return True


def categorize(gp: GeometricProgram | CategorizedProgram, pset: PerturbationSet | None = None,
               coupled: bool | None = None) -> CategorizedProgram:
    """Partition every inequality and allocate the per-class bound variables.

    ``coupled`` defaults to ``True`` for elliptical sets.  Applying this to an
    already categorized program returns it unchanged.
    """
    if isinstance(gp, CategorizedProgram):
        return gp
    if coupled is None:
        coupled = pset is not None and not pset.is_box
    classes = tuple(partition(p, coupled) for p in gp.inequalities)
    t_vars: dict[tuple[int, int], int] = {}
    nxt = gp.num_vars
    for i, cls in enumerate(classes):
        if len(cls) > 1:
            for j in range(len(cls)):
                t_vars[(i, j)] = nxt
                nxt += 1
    return CategorizedProgram(gp, classes, coupled, t_vars)
