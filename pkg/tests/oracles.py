"""Slow, obviously-correct reference implementations used only by tests."""
import itertools


def lev_dp(a, b):
    """Full-table Wagner-Fischer distance."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[len(a)][len(b)]


def ned_dp(a, b):
    longest = max(len(a), len(b))
    return 0.0 if longest == 0 else lev_dp(a, b) / longest


def injections(m, n):
    """All maximum-cardinality matchings of an m x n bipartite graph, as sorted pair lists."""
    if m <= n:
        for perm in itertools.permutations(range(n), m):
            yield [(i, perm[i]) for i in range(m)]
    else:
        for perm in itertools.permutations(range(m), n):
            yield sorted((perm[j], j) for j in range(n))


def brute_assignment(costs):
    """Minimum total cost over all injections and the lexicographically
    smallest optimal pair list (costs compared with exact equality)."""
    m = len(costs)
    n = len(costs[0]) if m else 0
    best_cost, best_pairs = None, None
    for pairs in injections(m, n):
        total = sum(costs[i][j] for i, j in pairs)
        if best_cost is None or total < best_cost or (total == best_cost and pairs < best_pairs):
            best_cost, best_pairs = total, pairs
    return best_cost, best_pairs


def semantic_brute(target, units):
    """Semantic alignment by enumerating every partial matching (any size)."""
    n_t, n_p = len(target), len(units)
    if n_t == 0 and n_p == 0:
        return 1.0
    best = None
    for size in range(min(n_t, n_p) + 1):
        for rows in itertools.combinations(range(n_t), size):
            for cols in itertools.permutations(range(n_p), size):
                cost = sum(ned_dp(target[r], units[c]) for r, c in zip(rows, cols))
                cost += (n_t - size) + (n_p - size)
                if best is None or cost < best:
                    best = cost
    return min(1.0, max(0.0, 1.0 - best / max(n_t, n_p)))


def ctr_recall_brute(gt_units, pred_units):
    """Exact-token recall under the lexicographically smallest optimal matching,
    found by enumerating every maximum-cardinality matching in exact arithmetic."""
    from fractions import Fraction

    if not gt_units:
        return 1.0
    if not pred_units:
        return 0.0
    costs = [
        [Fraction(lev_dp(a, b), max(len(a), len(b)) or 1) for b in pred_units]
        for a in gt_units
    ]
    _, pairs = brute_assignment(costs)
    return sum(1 for i, j in pairs if costs[i][j] == 0) / len(gt_units)
