"""Compiled max-plus chart kernels used for MAP decoding.

Each kernel mirrors the rule table of its algorithm: candidates for a cell are
visited in (rule id, split, label) order and only a strictly better value
replaces the incumbent, so backpointers match the generic engine exactly.
Rule ids are stored as ``ord(rule) - ord('a')``.

Layouts: the quadratic kernel stores its span tables by diagonal,
``table[width, i]`` for span ``(i, i + width)``, so each width-major sweep reads
contiguous memory. The CYK kernel keeps row-major ``table[i, j]`` tables, which
suit its split loops. All kernels read weights in the span-major layout
``wd[width, i, t]`` with labels as the fastest axis.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .deduction import COMPLETE, PARTIAL_LEFT, PARTIAL_RIGHT, RIGHT, Algorithm, Item

_A, _B, _C, _D, _E, _F, _G, _H, _I, _J, _K, _L, _M, _N, _O, _P = range(16)
NEG = -np.inf


@njit(cache=True)
def weights_by_width(w):
    """``out[width, i, t] = w[t, i, i + width]``."""
    T = w.shape[0]
    n = w.shape[1] - 1
    out = np.full((n + 1, n + 1, T), NEG)
    for width in range(1, n + 1):
        for i in range(n - width + 1):
            for t in range(T):
                out[width, i, t] = w[t, i, i + width]
    return out


@njit(cache=True)
def _best_label(wd, width, i, prefix):
    """First label maximising ``prefix + wd[width, i, t]``."""
    # indexing ``wd`` directly avoids building an array view per cell
    best = prefix + wd[width, i, 0]
    lab = 0
    for t in range(1, wd.shape[2]):
        v = prefix + wd[width, i, t]
        if v > best:
            best = v
            lab = t
    return best, lab


@njit(cache=True)
def _nested_right_states(cm, n, diag):
    right = np.full(n + 1, NEG)
    r_rule = np.full(n + 1, -1, np.int8)
    r_split = np.full(n + 1, -1, np.int64)
    right[0] = 0.0
    for j in range(1, n + 1):
        best = NEG
        rule = -1
        split = -1
        for i in range(j):  # (h)
            v = right[i] + (cm[j - i, i] if diag else cm[i, j])
            if rule == -1 or v > best:
                best = v
                rule = _H
                split = i
        v = right[j - 1]  # (i)
        if v > best:
            best = v
            rule = _I
            split = -1
        right[j] = best
        r_rule[j] = rule
        r_split[j] = split
    return right, r_rule, r_split


@njit(cache=True)
def viterbi_semi_markov(wd):
    n = wd.shape[0] - 1
    T = wd.shape[2]
    right = np.full(n + 1, NEG)
    r_rule = np.full(n + 1, -1, np.int8)
    r_split = np.full(n + 1, -1, np.int64)
    r_label = np.full(n + 1, -1, np.int64)
    right[0] = 0.0
    for j in range(1, n + 1):
        best = NEG
        rule = -1
        split = -1
        lab = -1
        for i in range(j):  # (a)
            for t in range(T):
                v = right[i] + wd[j - i, i, t]
                if rule == -1 or v > best:
                    best = v
                    rule = _A
                    split = i
                    lab = t
        v = right[j - 1]  # (b)
        if v > best:
            best = v
            rule = _B
            split = -1
            lab = -1
        right[j] = best
        r_rule[j] = rule
        r_split[j] = split
        r_label[j] = lab
    return right[n], r_rule, r_split, r_label


@njit(cache=True)
def viterbi_cyk(wd):
    n = wd.shape[0] - 1
    pr = np.full((n + 1, n + 1), NEG)
    cm = np.full((n + 1, n + 1), NEG)
    pr_rule = np.full((n + 1, n + 1), -1, np.int8)
    pr_split = np.full((n + 1, n + 1), -1, np.int64)
    c_label = np.full((n + 1, n + 1), -1, np.int64)
    for i in range(n):
        pr[i, i] = 0.0
    for width in range(1, n + 1):
        for i in range(n - width + 1):
            j = i + width
            best = NEG
            rule = -1
            split = -1
            for k in range(i + 1, j):  # (c)
                v = pr[i, k] + cm[k, j]
                if rule == -1 or v > best:
                    best = v
                    rule = _C
                    split = k
            v = pr[i, j - 1]  # (d)
            if rule == -1 or v > best:
                best = v
                rule = _D
                split = -1
            for k in range(i + 1, j):  # (e)
                v = cm[i, k] + cm[k, j]
                if v > best:
                    best = v
                    rule = _E
                    split = k
            if i < j - 1:  # (f)
                v = cm[i, j - 1]
                if v > best:
                    best = v
                    rule = _F
                    split = -1
            pr[i, j] = best
            pr_rule[i, j] = rule
            pr_split[i, j] = split
        for i in range(n - width + 1):
            j = i + width
            cm[i, j], c_label[i, j] = _best_label(wd, width, i, pr[i, j])  # (g)
    right, r_rule, r_split = _nested_right_states(cm, n, False)
    return right[n], r_rule, r_split, pr_rule, pr_split, c_label


@njit(cache=True)
def viterbi_quadratic(wd):
    n = wd.shape[0] - 1
    # span tables are indexed [width, i]; every cell with width >= 1 is written
    # before it is read. Partial scores only need the previous width, so they
    # live in rolling rows.
    cm = np.empty((n + 1, n + 1))
    pl_rule = np.empty((n + 1, n + 1), np.int8)
    pr_rule = np.empty((n + 1, n + 1), np.int8)
    c_label = np.empty((n + 1, n + 1), np.int32)
    cm[0] = NEG
    pl_prev = np.full(n + 1, NEG)
    pr_prev = np.zeros(n + 1)
    pl_cur = np.empty(n + 1)
    pr_cur = np.empty(n + 1)
    for width in range(1, n + 1):
        w1 = width - 1
        # candidates are compared branch-free; the first rule reaching the max wins
        for i in range(n - width + 1):
            if width > 2:
                vl = cm[1, i] + cm[w1, i + 1]  # (l)
                vm = cm[w1, i + 1]  # (m)
                vn = pl_prev[i + 1]  # (n)
                vo = cm[1, i] + vn  # (o)
                best = max(max(vl, vm), max(vn, vo))
                rule = _L if vl == best else _M if vm == best else _N if vn == best else _O
            elif width == 2:
                vn = pl_prev[i + 1]
                vo = cm[1, i] + vn
                best = max(vn, vo)
                rule = _N if vn == best else _O
            else:
                best = NEG
                rule = -1
            pl_cur[i] = best
            pl_rule[width, i] = rule
        for i in range(n - width + 1):
            vd = pr_prev[i]  # (d)
            vp = pl_cur[i]  # (p)
            if width > 1:
                last = cm[1, i + w1]
                vf = cm[w1, i]  # (f)
                vj = vd + last  # (j)
                vk = vf + last  # (k)
                best = max(max(max(vd, vf), max(vj, vk)), vp)
                if vd == best:
                    rule = _D
                elif vf == best:
                    rule = _F
                elif vj == best:
                    rule = _J
                elif vk == best:
                    rule = _K
                else:
                    rule = _P
            else:
                best = max(vd, vp)
                rule = _D if vd == best else _P
            pr_cur[i] = best
            pr_rule[width, i] = rule
        for i in range(n - width + 1):
            cm[width, i], c_label[width, i] = _best_label(wd, width, i, pr_cur[i])  # (g)
        pl_prev, pl_cur = pl_cur, pl_prev
        pr_prev, pr_cur = pr_cur, pr_prev
    right, r_rule, r_split = _nested_right_states(cm, n, True)
    return right[n], r_rule, r_split, pl_rule, pr_rule, c_label


@njit(cache=True)
def _collect_semi_markov(n, r_rule, r_split, r_label):
    out = np.empty((n, 3), np.int64)
    k = 0
    j = n
    while j > 0:
        if r_rule[j] == _A:
            i = r_split[j]
            out[k, 0] = r_label[j]
            out[k, 1] = i
            out[k, 2] = j
            k += 1
            j = i
        else:
            j -= 1
    return out[:k]


@njit(cache=True)
def _collect_nested(n, r_rule, r_split, pl_rule, pr_rule, pr_split, c_label, diag):
    """Mentions of the best derivation, walking partial chains iteratively.

    A derivation can hold O(n^2) partial items but at most 2n - 1 mentions, so
    only complete items go on the stack.
    """
    out = np.empty((2 * n + 1, 3), np.int64)
    stack = np.empty((2 * n + 1, 2), np.int64)
    top = 0
    k = 0
    j = n
    while j > 0:
        if r_rule[j] == _H:
            stack[top, 0] = r_split[j]
            stack[top, 1] = j
            top += 1
            j = r_split[j]
        else:
            j -= 1
    while top > 0:
        top -= 1
        i = stack[top, 0]
        j = stack[top, 1]
        out[k, 0] = c_label[j - i, i] if diag else c_label[i, j]
        out[k, 1] = i
        out[k, 2] = j
        k += 1
        left = False  # walking a partial-left chain
        a = i
        b = j
        while True:
            if left:
                rule = pl_rule[b - a, a] if diag else pl_rule[a, b]
                if rule == _L or rule == _O:
                    stack[top, 0] = a
                    stack[top, 1] = a + 1
                    top += 1
                if rule == _L or rule == _M:
                    stack[top, 0] = a + 1
                    stack[top, 1] = b
                    top += 1
                    break
                a += 1
                continue
            if a == b:
                break
            rule = pr_rule[b - a, a] if diag else pr_rule[a, b]
            if rule == _D:
                b -= 1
            elif rule == _C:
                s = pr_split[a, b]
                stack[top, 0] = s
                stack[top, 1] = b
                top += 1
                b = s
            elif rule == _E or rule == _F or rule == _K:
                s = pr_split[a, b] if rule == _E else b - 1
                if rule != _F:
                    stack[top, 0] = s
                    stack[top, 1] = b
                    top += 1
                stack[top, 0] = a
                stack[top, 1] = s
                top += 1
                break
            elif rule == _J:
                stack[top, 0] = b - 1
                stack[top, 1] = b
                top += 1
                b -= 1
            else:  # (p)
                left = True
    return out[:k]


def _name(code) -> str:
    return chr(ord("a") + int(code))


def _run(alg: Algorithm, wd: np.ndarray):
    if alg is Algorithm.SEMI_MARKOV:
        return viterbi_semi_markov(wd)
    if alg is Algorithm.CYK:
        return viterbi_cyk(wd)
    return viterbi_quadratic(wd)


def run_map(alg: Algorithm, wd: np.ndarray) -> tuple[float, np.ndarray]:
    """Best score and its mentions as an ``(k, 3)`` array of (label, left, right).

    ``wd`` is the span-major weight layout of ``WeightTable.by_width``.
    """
    n = wd.shape[0] - 1
    res = _run(alg, wd)
    if alg is Algorithm.SEMI_MARKOV:
        score, r_rule, r_split, r_label = res
        return score, _collect_semi_markov(n, r_rule, r_split, r_label)
    if alg is Algorithm.CYK:
        score, r_rule, r_split, pr_rule, pr_split, c_label = res
        return score, _collect_nested(n, r_rule, r_split, pr_rule, pr_rule, pr_split, c_label, False)
    score, r_rule, r_split, pl_rule, pr_rule, c_label = res
    return score, _collect_nested(n, r_rule, r_split, pl_rule, pr_rule, pr_rule, c_label, True)


def run_viterbi(alg: Algorithm, wd: np.ndarray):
    """Run the kernel for ``alg``; returns (score, backpointer lookup)."""
    res = _run(alg, wd)
    if alg is Algorithm.SEMI_MARKOV:
        score, r_rule, r_split, r_label = res

        def lookup(item: Item):
            j = item.i
            return _name(r_rule[j]), int(r_split[j]), int(r_label[j])

        return score, lookup

    if alg is Algorithm.CYK:
        score, r_rule, r_split, pr_rule, pr_split, c_label = res
        pl_rule = None

        def at(arr, i, j):
            return arr[i, j]
    else:
        score, r_rule, r_split, pl_rule, pr_rule, c_label = res
        pr_split = None

        def at(arr, i, j):
            return arr[j - i, i]

    def lookup(item: Item):
        kind, i, j = item.kind, item.i, item.j
        if kind == RIGHT:
            return _name(r_rule[i]), int(r_split[i]), -1
        if kind == COMPLETE:
            return "g", -1, int(at(c_label, i, j))
        if kind == PARTIAL_RIGHT:
            return _name(at(pr_rule, i, j)), (int(pr_split[i, j]) if pr_split is not None else -1), -1
        if kind == PARTIAL_LEFT:
            return _name(at(pl_rule, i, j)), -1, -1
        raise KeyError(item)

    return score, lookup
