"""Compiled peeling decoder for Monte Carlo runs.

Same semantics as :class:`ltripple.codec.DecoderState` in symbolic mode.
Buffered symbols are kept as (remaining degree, XOR of remaining neighbour
indices); when the degree drops to one the XOR is the last neighbour.
Random draws use numba's generator, reseeded per trial so a trial's result
depends only on its seed.
"""
import numpy as np
from numba import njit

FIFO, LIFO, RANDOM = 0, 1, 2
DISCIPLINE_CODES = {"fifo": FIFO, "lifo": LIFO, "random": RANDOM}


@njit(cache=True)
def _seed(seed):
    np.random.seed(seed)


@njit(cache=True)
def _draw_degree(cdf, k):
    u = np.random.random()
    lo, hi = 0, k - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo + 1


@njit(cache=True)
def _draw_symbol(cdf, k, perm, out):
    """Degree by inverse CDF, then a uniform d-subset via partial Fisher-Yates on ``perm``."""
    d = _draw_degree(cdf, k)
    for j in range(d):
        r = np.random.randint(j, k)
        t = perm[j]
        perm[j] = perm[r]
        perm[r] = t
        out[j] = perm[j]
    return d


@njit(cache=True)
def generate_symbols(seed, cdf, k, count):
    """Symbols exactly as :func:`decode_generated` draws them: (degrees, offsets, flat neighbours)."""
    _seed(seed)
    perm = np.arange(k)
    tmp = np.empty(k, dtype=np.int64)
    degs = np.empty(count, dtype=np.int64)
    offs = np.zeros(count + 1, dtype=np.int64)
    nbrs = np.empty(max(count * 4, 16), dtype=np.int64)
    for s in range(count):
        d = _draw_symbol(cdf, k, perm, tmp)
        degs[s] = d
        if offs[s] + d > nbrs.size:
            grown = np.empty(max(2 * nbrs.size, offs[s] + d), dtype=np.int64)
            grown[: offs[s]] = nbrs[: offs[s]]
            nbrs = grown
        nbrs[offs[s]: offs[s] + d] = tmp[:d]
        offs[s + 1] = offs[s] + d
    return degs, offs, nbrs[: offs[count]]


@njit(cache=True)
def _peel(k, cdf, seed, generate, n_max, eager, discipline,
          g_degs, g_offs, g_nbrs, ripple_by_L, release_L):
    """Run one decode.

    ``generate``: draw ``n_max`` symbols on the fly, else read the given ones.
    ``eager``: process after every arrival and stop once all inputs are
    recovered; otherwise push everything first and peel until the ripple
    empties.  ``ripple_by_L[L]`` receives the ripple size after the step that
    leaves ``L`` unprocessed (``L = k`` holds the size before processing in
    batch mode).  ``release_L[s]`` receives the L at which symbol ``s`` was
    reduced to degree one (-1 if never).

    Returns ``(n_success or -1, consumed, redundant, processed)``.
    """
    _seed(seed)
    perm = np.arange(k)
    tmp = np.empty(k, dtype=np.int64)

    recovered = np.zeros(k, dtype=np.bool_)
    processed = np.zeros(k, dtype=np.bool_)
    ripple = np.empty(k, dtype=np.int64)
    r_head = 0
    r_tail = 0

    sdeg = np.zeros(n_max, dtype=np.int64)
    sxor = np.zeros(n_max, dtype=np.int64)
    active = np.zeros(n_max, dtype=np.bool_)

    head = np.full(k, -1, dtype=np.int64)
    tail = np.full(k, -1, dtype=np.int64)
    cap_e = max(16 * k, 1024)
    esym = np.empty(cap_e, dtype=np.int64)
    enext = np.empty(cap_e, dtype=np.int64)
    n_e = 0

    n_rec = 0
    n_proc = 0
    redundant = 0
    consumed = 0
    n_success = -1

    s = 0
    while s < n_max:
        # ---- arrival
        if generate:
            d = _draw_symbol(cdf, k, perm, tmp)
        else:
            d = g_degs[s]
            for j in range(d):
                tmp[j] = g_nbrs[g_offs[s] + j]
        consumed += 1
        deg = 0
        x = 0
        for j in range(d):
            v = tmp[j]
            if not processed[v]:
                deg += 1
                x ^= v
        if deg == 0:
            redundant += 1
        elif deg == 1:
            release_L[s] = k - n_proc
            if recovered[x]:
                redundant += 1
            else:
                recovered[x] = True
                n_rec += 1
                ripple[r_tail] = x
                r_tail += 1
        else:
            sdeg[s] = deg
            sxor[s] = x
            active[s] = True
            if n_e + deg > cap_e:
                new_cap = max(2 * cap_e, n_e + deg)
                e2 = np.empty(new_cap, dtype=np.int64)
                e2[:n_e] = esym[:n_e]
                esym = e2
                e3 = np.empty(new_cap, dtype=np.int64)
                e3[:n_e] = enext[:n_e]
                enext = e3
                cap_e = new_cap
            for j in range(d):
                v = tmp[j]
                if not processed[v]:
                    # append, so incident symbols are visited in arrival order
                    esym[n_e] = s
                    enext[n_e] = -1
                    if head[v] == -1:
                        head[v] = n_e
                    else:
                        enext[tail[v]] = n_e
                    tail[v] = n_e
                    n_e += 1
        s += 1

        if eager and n_rec == k:
            n_success = consumed
            break
        if not eager and s < n_max:
            continue
        if not eager:
            ripple_by_L[k] = r_tail - r_head

        # ---- peel while the ripple is nonempty
        while r_tail > r_head:
            if discipline == FIFO:
                v = ripple[r_head]
                r_head += 1
            elif discipline == LIFO:
                r_tail -= 1
                v = ripple[r_tail]
            else:
                j = np.random.randint(r_head, r_tail)
                r_tail -= 1
                v = ripple[j]
                ripple[j] = ripple[r_tail]
            processed[v] = True
            n_proc += 1
            L = k - n_proc
            e = head[v]
            while e != -1:
                t = esym[e]
                if active[t]:
                    sdeg[t] -= 1
                    sxor[t] ^= v
                    if sdeg[t] == 1:
                        active[t] = False
                        u = sxor[t]
                        release_L[t] = L
                        if recovered[u]:
                            redundant += 1
                        else:
                            recovered[u] = True
                            n_rec += 1
                            ripple[r_tail] = u
                            r_tail += 1
                e = enext[e]
            head[v] = -1
            ripple_by_L[L] = r_tail - r_head
            if eager and n_rec == k:
                break
        if eager and n_rec == k:
            n_success = consumed
            break

    if not eager and n_rec == k:
        n_success = consumed
    return n_success, consumed, redundant, n_proc


_EMPTY = np.zeros(1, dtype=np.int64)


def decode_generated(k, cdf, seed, n_max, eager=True, discipline=FIFO, ripple_by_L=None, release_L=None):
    """Decode ``n_max`` freshly drawn symbols (incremental by default)."""
    if ripple_by_L is None:
        ripple_by_L = np.zeros(k + 1, dtype=np.int64)
    if release_L is None:
        release_L = np.full(n_max, -1, dtype=np.int64)
    return _peel(k, cdf, seed, True, n_max, eager, discipline, _EMPTY, _EMPTY, _EMPTY, ripple_by_L, release_L)


def decode_given(k, degs, offs, nbrs, eager=False, discipline=FIFO, seed=0, ripple_by_L=None, release_L=None):
    """Decode an explicit symbol list (batch by default)."""
    n = len(degs)
    if ripple_by_L is None:
        ripple_by_L = np.zeros(k + 1, dtype=np.int64)
    if release_L is None:
        release_L = np.full(n, -1, dtype=np.int64)
    cdf = np.ones(k)
    return _peel(k, cdf, seed, False, n, eager, discipline, degs, offs, nbrs, ripple_by_L, release_L)
