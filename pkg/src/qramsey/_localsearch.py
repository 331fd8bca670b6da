"""Steepest-ascent local search over vertex subsets with random restarts.

Moves are add / remove / swap.  The objective is a vectorised function of
(induced edge count, set size), so all candidate moves of one step are
scored in a handful of numpy operations.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Score = Callable[[np.ndarray, np.ndarray], np.ndarray]


class _State:
    def __init__(self, edges: np.ndarray, n: int, r: int, inside: np.ndarray):
        self.edges, self.n, self.r = edges, n, r
        self.inside = inside.copy()
        self.refresh()

    def refresh(self) -> None:
        E, n, r = self.edges, self.n, self.r
        S = self.inside
        self.size = int(S.sum())
        if len(E) == 0:
            self.e = 0
            self.deg = np.zeros(n, dtype=np.int64)
            self.near = np.zeros((0, r), dtype=np.int64)
            self.near_out = np.zeros(0, dtype=np.int64)
            return
        mem = S[E]
        cnt = mem.sum(axis=1)
        full = E[cnt == r]
        near_rows = cnt == r - 1
        near = E[near_rows]
        near_mem = mem[near_rows]
        out_vertex = near[~near_mem]
        self.e = len(full)
        self.deg = (np.bincount(full.ravel(), minlength=n)
                    + np.bincount(out_vertex, minlength=n)).astype(np.int64)
        self.near, self.near_mem, self.near_out = near, near_mem, out_vertex

    def pair_counts(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """P[u, v]: edges through u and v whose other vertices lie in S."""
        P = np.zeros((self.n, self.n), dtype=np.int64)
        if len(self.near_out):
            r1 = self.r - 1
            ins = self.near[self.near_mem].reshape(-1, r1)
            outs = np.repeat(self.near_out, r1)
            np.add.at(P, (ins.ravel(), outs), 1)
        return P[np.ix_(rows, cols)]


def climb(edges: np.ndarray, n: int, r: int, score: Score, t: int,
          rng: np.random.Generator, restarts: int,
          allowed: np.ndarray | None = None, max_steps: int | None = None,
          tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Return (indicator of the best set found, its score)."""
    if allowed is None:
        allowed = np.ones(n, dtype=bool)
    pool = np.flatnonzero(allowed)
    t = min(t, len(pool))
    if t < 1:
        return np.zeros(n, dtype=bool), float("-inf")
    if max_steps is None:
        max_steps = 4 * n + 10
    best_set, best_score = None, -np.inf
    for _ in range(restarts):
        size0 = int(rng.integers(1, t + 1))
        start = np.zeros(n, dtype=bool)
        start[rng.choice(pool, size=size0, replace=False)] = True
        S, val = _ascend(_State(edges, n, r, start), score, t, allowed, max_steps, tol)
        if val > best_score + tol:
            best_set, best_score = S, val
    return best_set, float(best_score)


def _ascend(st: _State, score: Score, t: int, allowed: np.ndarray,
            max_steps: int, tol: float) -> tuple[np.ndarray, float]:
    cur = float(score(np.array([st.e]), np.array([st.size]))[0])
    for _ in range(max_steps):
        S = st.inside
        ins = np.flatnonzero(S)
        outs = np.flatnonzero(allowed & ~S)
        best, move = cur + tol, None
        if st.size < t and len(outs):
            vals = score(st.e + st.deg[outs], np.full(len(outs), st.size + 1))
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, move = vals[i], ("add", outs[i])
        if st.size > 1:
            vals = score(st.e - st.deg[ins], np.full(len(ins), st.size - 1))
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, move = vals[i], ("remove", ins[i])
        if len(outs) and len(ins):
            P = st.pair_counts(ins, outs)
            e_new = st.e - st.deg[ins][:, None] + st.deg[outs][None, :] - P
            vals = score(e_new.ravel(), np.full(e_new.size, st.size))
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, move = vals[i], ("swap", ins[i // len(outs)], outs[i % len(outs)])
        if move is None:
            break
        if move[0] == "add":
            S[move[1]] = True
        elif move[0] == "remove":
            S[move[1]] = False
        else:
            S[move[1]] = False
            S[move[2]] = True
        st.refresh()
        cur = float(score(np.array([st.e]), np.array([st.size]))[0])
    return st.inside.copy(), cur
