"""
Hungarian algorithm (shortest augmenting paths with dual potentials).

Among all optimal assignments the lexicographically smallest (row, col) set
is returned: after solving, the equality subgraph of the optimal duals holds
every optimal assignment, and rows are re-matched to their smallest feasible
column through alternating paths inside it.
"""

from typing import List, Optional, Tuple

import numpy as np

from xentrack.errors import AssignmentError

Pair = Tuple[int, int]


def _solve_square(cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    O(n^3) solver on an n x n matrix.
    Returns (row_to_col, u, v) with cost[i, j] - u[i] - v[j] >= 0, zero on the matching.
    """
    n = cost.shape[0]
    # 1-based potentials and matching; index 0 is the virtual column
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    col_owner = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        col_owner[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = col_owner[j0]
            free = ~used[1:]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0

            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            used_cols = np.nonzero(used)[0]
            u[col_owner[used_cols]] += delta
            v[used_cols] -= delta
            minv[1:][free] -= delta

            j0 = j1
            if col_owner[j0] == 0:
                break

        while j0 != 0:
            j1 = way[j0]
            col_owner[j0] = col_owner[j1]
            j0 = j1

    row_to_col = np.empty(n, dtype=np.int64)
    row_to_col[col_owner[1:] - 1] = np.arange(n)
    return row_to_col, u[1:], v[1:]


def _alternating_path(
    tight: np.ndarray,
    col_owner: np.ndarray,
    start_row: int,
    target_col: int,
    blocked: np.ndarray,
) -> Optional[List[Tuple[int, int]]]:
    """
    Breadth-first search from start_row to target_col over tight edges, moving
    through matched columns. Returns the (row, new_col) reassignments or None.
    Columns reached by a failed search are left marked in `blocked`.
    """
    parent = np.full(len(col_owner), -1, dtype=np.int64)
    frontier = np.array([start_row], dtype=np.int64)
    while frontier.size:
        reach = tight[frontier] & ~blocked
        cols = np.nonzero(reach.any(axis=0))[0]
        if cols.size == 0:
            return None
        parent[cols] = frontier[np.argmax(reach[:, cols], axis=0)]
        blocked[cols] = True
        if blocked[target_col] and parent[target_col] >= 0:
            moves = []
            col = target_col
            while True:
                row = int(parent[col])
                moves.append((row, col))
                if row == start_row:
                    return moves
                col = int(np.nonzero(col_owner == row)[0][0])
        frontier = col_owner[cols[cols != target_col]]
    return None


def _lexicographic_refine(cost: np.ndarray, row_to_col: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = cost.shape[0]
    tol = 1e-9 * max(1.0, float(np.abs(cost).max()))
    tight = (cost - u[:, None] - v[None, :]) <= tol

    row_to_col = row_to_col.copy()
    col_owner = np.empty(n, dtype=np.int64)
    col_owner[row_to_col] = np.arange(n)
    fixed = np.zeros(n, dtype=bool)

    for i in range(n):
        current = int(row_to_col[i])
        candidates = np.nonzero(tight[i, :current] & ~fixed[:current])[0]
        if candidates.size:
            blocked = fixed.copy()
            for j in candidates.tolist():
                if blocked[j]:
                    continue
                blocked[j] = True
                owner = int(col_owner[j])
                moves = _alternating_path(tight, col_owner, owner, current, blocked)
                if moves is None:
                    continue
                for row, col in moves:
                    row_to_col[row] = col
                    col_owner[col] = row
                row_to_col[i] = j
                col_owner[j] = i
                break
        fixed[row_to_col[i]] = True
    return row_to_col


def hungarian(cost: np.ndarray) -> List[Pair]:
    """
    Minimum-cost assignment of a rectangular matrix.
    Returns min(rows, cols) (row, col) pairs sorted by row; ties resolve to the
    lexicographically smallest pair set.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise AssignmentError(f"cost matrix must be 2-D, got shape {c.shape}")
    rows, cols = c.shape
    if rows == 0 or cols == 0:
        return []
    if not np.all(np.isfinite(c)):
        raise AssignmentError("cost matrix has non-finite entries")

    # Zero-cost padding: dummy rows/cols sort after real ones
    n = max(rows, cols)
    square = np.zeros((n, n))
    square[:rows, :cols] = c

    row_to_col, u, v = _solve_square(square)
    row_to_col = _lexicographic_refine(square, row_to_col, u, v)
    return [(i, int(row_to_col[i])) for i in range(rows) if row_to_col[i] < cols]


def assignment_cost(cost: np.ndarray, pairs: List[Pair]) -> float:
    c = np.asarray(cost, dtype=np.float64)
    return float(sum(c[i, j] for i, j in pairs))
