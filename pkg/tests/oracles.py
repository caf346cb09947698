"""Independent brute-force oracles used to cross-check the engine.

Nothing here touches the package's simplex solver or pricing
recursions. Exact values come from vertex enumeration of the
martingale polytope via Gaussian elimination over ``Fraction``;
floating-point cross-checks come from a single global hedging LP
solved by scipy. Shared with the engine is only the immutable data
model (lattice, prices, kernels).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Set, Tuple

from robusthedge.model import Claim, MarketModel, Node
from robusthedge.supports import reachable

Matrix = List[List[Fraction]]


def rref(matrix: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot-column list, exact."""
    m = [row[:] for row in matrix]
    pivots: List[int] = []
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [v / pv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_unique(a: Matrix, b: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """The unique solution of A x = b, or None if none or many exist."""
    if not a:
        return None
    n = len(a[0])
    aug = [row[:] + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:  # pivot in the constant column: inconsistent
        return None
    if len(pivots) < n:  # free variables: not unique
        return None
    x = [Fraction(0)] * n
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return x


def martingale_rows(model: MarketModel, leaves: List[Node],
                    tree: Set[Node]) -> Tuple[Matrix, List[Fraction]]:
    """Equality system of the martingale polytope over the given leaves."""
    index = {leaf: i for i, leaf in enumerate(leaves)}
    a: Matrix = [[Fraction(1)] * len(leaves)]
    b: List[Fraction] = [Fraction(1)]
    for node in model.lattice.non_terminal_nodes():
        if node not in tree:
            continue
        t = len(node)
        for i in range(model.prices.assets):
            row = [Fraction(0)] * len(leaves)
            for leaf in leaves:
                if leaf[:t] == node:
                    row[index[leaf]] = model.delta_s(node, leaf[t])[i]
            a.append(row)
            b.append(Fraction(0))
    return a, b


def polytope_vertices(model: MarketModel,
                      tree: Set[Node]) -> List[Dict[Node, Fraction]]:
    """All vertices of {w >= 0, A w = b} by support-subset enumeration."""
    leaves = [l for l in model.lattice.leaves() if l in tree]
    a, b = martingale_rows(model, leaves, tree)
    n_rows = len(a)
    vertices: List[Dict[Node, Fraction]] = []
    seen: Set[Tuple[Fraction, ...]] = set()
    for size in range(1, min(len(leaves), n_rows) + 1):
        for support in combinations(range(len(leaves)), size):
            sub = [[row[j] for j in support] for row in a]
            x = solve_unique(sub, b)
            if x is None or any(v < 0 for v in x):
                continue
            full = [Fraction(0)] * len(leaves)
            for j, v in zip(support, x):
                full[j] = v
            key = tuple(full)
            if key not in seen:
                seen.add(key)
                vertices.append(dict(zip(leaves, full)))
    return vertices


def oracle_dual_value(model: MarketModel, claim: Claim,
                      tree: Optional[Set[Node]] = None) -> Optional[Fraction]:
    """Max expected payoff over the polytope, or None if it is empty."""
    tree = reachable(model) if tree is None else tree
    vertices = polytope_vertices(model, tree)
    if not vertices:
        return None
    return max(
        sum((w * claim.payoff[l] for l, w in v.items()), Fraction(0))
        for v in vertices
    )


def oracle_na(model: MarketModel, tree: Optional[Set[Node]] = None) -> bool:
    """No-arbitrage holds iff some polytope point charges every tree leaf,
    i.e. the union of vertex supports covers them all."""
    tree = reachable(model) if tree is None else tree
    leaves = {l for l in model.lattice.leaves() if l in tree}
    charged: Set[Node] = set()
    for v in polytope_vertices(model, tree):
        charged.update(l for l, w in v.items() if w > 0)
    return charged == leaves


def pattern_tree(model: MarketModel,
                 pattern: Dict[Node, Tuple[int, ...]]) -> Set[Node]:
    """Positive-mass nodes when each node uses the pattern's generators."""
    tree: Set[Node] = {()}
    frontier = [()]
    while frontier:
        node = frontier.pop()
        if len(node) >= model.lattice.horizon:
            continue
        gens = model.generators_at(node)
        chosen = [gens[i] for i in pattern[node]]
        for o in model.lattice.outcomes_after(node):
            if any(g.get(o, 0) > 0 for g in chosen):
                child = node + (o,)
                tree.add(child)
                frontier.append(child)
    return tree


def all_patterns(model: MarketModel) -> List[Dict[Node, Tuple[int, ...]]]:
    nodes = list(model.lattice.non_terminal_nodes())
    per_node = []
    for node in nodes:
        g = len(model.generators_at(node))
        per_node.append([
            tuple(i for i in range(g) if mask >> i & 1)
            for mask in range(1, 2 ** g)
        ])
    return [dict(zip(nodes, combo)) for combo in product(*per_node)]


def oracle_lower_value(model: MarketModel, claim: Claim) -> Optional[Fraction]:
    """Exhaustive prior-by-prior price: max over every support pattern of
    the pattern's dual value, skipping patterns with arbitrage."""
    best: Optional[Fraction] = None
    for pattern in all_patterns(model):
        tree = pattern_tree(model, pattern)
        if not oracle_na(model, tree):
            continue
        value = oracle_dual_value(model, claim, tree)
        if value is not None and (best is None or value > best):
            best = value
    return best


def oracle_primal_float(model: MarketModel, claim: Claim,
                        tree: Optional[Set[Node]] = None) -> float:
    """Cheapest super-replication cost as one global LP, solved in floats.

    Variables: initial capital plus one holding vector per non-terminal
    tree node; one domination constraint per tree leaf.
    """
    from scipy.optimize import linprog

    tree = reachable(model) if tree is None else tree
    nodes = [n for n in model.lattice.non_terminal_nodes() if n in tree]
    d = model.prices.assets
    offset = {n: 1 + i * d for i, n in enumerate(nodes)}
    n_vars = 1 + len(nodes) * d
    a_ub, b_ub = [], []
    for leaf in model.lattice.leaves():
        if leaf not in tree:
            continue
        row = [0.0] * n_vars
        row[0] = -1.0
        for t in range(len(leaf)):
            node = leaf[:t]
            if node not in offset:
                continue
            ds = model.delta_s(node, leaf[t])
            for i in range(d):
                row[offset[node] + i] -= float(ds[i])
        a_ub.append(row)
        b_ub.append(-float(claim.payoff[leaf]))
    c = [1.0] + [0.0] * (n_vars - 1)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * n_vars, method="highs")
    assert res.status == 0, f"float oracle LP failed: {res.message}"
    return float(res.fun)
