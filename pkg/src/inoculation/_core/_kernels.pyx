# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: components, flip tests and exhaustive profile scans.

Same contract as ``_pykernels``; all arithmetic is on int64-scaled costs and
the caller guarantees (via ``scaled_weights``) that nothing overflows.
"""
import numpy as np
from libc.stdlib cimport malloc, free

NAME = "cython"

ctypedef long long i64


cdef struct Scratch:
    i64 n
    i64 *comp
    i64 *sizes
    i64 *stack
    i64 *order
    i64 *mark
    i64 *psize
    i64 stamp


cdef int _alloc(Scratch *s, i64 n) except -1:
    cdef i64 k
    s.n = n
    s.comp = <i64 *> malloc((n + 1) * sizeof(i64))
    s.sizes = <i64 *> malloc((n + 1) * sizeof(i64))
    s.stack = <i64 *> malloc((n + 1) * sizeof(i64))
    s.order = <i64 *> malloc((n + 1) * sizeof(i64))
    s.mark = <i64 *> malloc((n + 1) * sizeof(i64))
    s.psize = <i64 *> malloc((n + 1) * sizeof(i64))
    if (s.comp == NULL or s.sizes == NULL or s.stack == NULL or s.order == NULL
            or s.mark == NULL or s.psize == NULL):
        _release(s)
        raise MemoryError()
    for k in range(n + 1):
        s.mark[k] = 0
    s.stamp = 0
    return 0


cdef void _release(Scratch *s) noexcept:
    free(s.comp)
    free(s.sizes)
    free(s.stack)
    free(s.order)
    free(s.mark)
    free(s.psize)


cdef i64 _components(const i64 *indptr, const i64 *indices, const signed char *bits,
                     i64 n, i64 *comp, i64 *sizes, i64 *stack) noexcept nogil:
    cdef i64 s, u, v, e, c = 0, top, size
    for s in range(n):
        comp[s] = -1
    for s in range(n):
        if bits[s] or comp[s] >= 0:
            continue
        comp[s] = c
        stack[0] = s
        top = 1
        size = 0
        while top > 0:
            top -= 1
            u = stack[top]
            size += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if not bits[v] and comp[v] < 0:
                    comp[v] = c
                    stack[top] = v
                    top += 1
        sizes[c] = size
        c += 1
    return c


cdef i64 _split_total(const i64 *indptr, const i64 *indices, const signed char *bits,
                      i64 i, Scratch *sc) noexcept nogil:
    """Sum over insecure neighbours of ``i`` of their component size with ``i`` secured."""
    cdef i64 e, f, j, u, v, top, cnt, m, total = 0
    sc.stamp += 1
    sc.mark[i] = sc.stamp
    for e in range(indptr[i], indptr[i + 1]):
        j = indices[e]
        if bits[j]:
            continue
        if sc.mark[j] == sc.stamp:
            total += sc.psize[j]
            continue
        sc.mark[j] = sc.stamp
        sc.stack[0] = j
        top = 1
        cnt = 0
        while top > 0:
            top -= 1
            u = sc.stack[top]
            sc.order[cnt] = u
            cnt += 1
            for f in range(indptr[u], indptr[u + 1]):
                v = indices[f]
                if not bits[v] and sc.mark[v] != sc.stamp:
                    sc.mark[v] = sc.stamp
                    sc.stack[top] = v
                    top += 1
        for m in range(cnt):
            sc.psize[sc.order[m]] = cnt
        total += cnt
    return total


cdef bint _wants_flip(const i64 *indptr, const i64 *indices, const signed char *bits,
                      const i64 *comp, const i64 *sizes, i64 i,
                      i64 w_sec, i64 w_loss, i64 f_num, i64 f_den, bint relative,
                      Scratch *sc) noexcept nogil:
    cdef i64 lo = indptr[i], hi = indptr[i + 1]
    cdef i64 own_scale = f_den * (hi - lo) if relative else f_den
    cdef i64 e, j, c, k
    cdef i64 n_sec = 0, n_ins = 0, merged = 1
    cdef i64 old_own, old_nb = 0, new_own, new_nb
    if bits[i]:
        # mark[] indexed by component id here, as a per-call seen set
        sc.stamp += 1
        for e in range(lo, hi):
            j = indices[e]
            if bits[j]:
                n_sec += 1
            else:
                n_ins += 1
                c = comp[j]
                old_nb += w_loss * sizes[c]
                if sc.mark[c] != sc.stamp:
                    sc.mark[c] = sc.stamp
                    merged += sizes[c]
        old_own = w_sec
        old_nb += n_sec * w_sec
        new_own = w_loss * merged
        new_nb = n_sec * w_sec + n_ins * w_loss * merged
    else:
        k = sizes[comp[i]]
        for e in range(lo, hi):
            if bits[indices[e]]:
                n_sec += 1
            else:
                n_ins += 1
        old_own = w_loss * k
        old_nb = n_sec * w_sec + n_ins * w_loss * k
        new_own = w_sec
        new_nb = n_sec * w_sec
        if n_ins:
            new_nb += w_loss * _split_total(indptr, indices, bits, i, sc)
    return own_scale * new_own + f_num * new_nb < own_scale * old_own + f_num * old_nb


def _as_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _as_bits(a):
    return np.ascontiguousarray(a, dtype=np.int8)


def components(indptr, indices, bits):
    cdef const i64[::1] ip = _as_i64(indptr)
    cdef const i64[::1] ix = np.append(_as_i64(indices), 0)
    cdef const signed char[::1] b = _as_bits(bits)
    cdef i64 n = b.shape[0]
    comp = np.empty(n, dtype=np.int64)
    sizes = np.empty(n + 1, dtype=np.int64)
    stack = np.empty(n + 1, dtype=np.int64)
    cdef i64[::1] cv = comp
    cdef i64[::1] sv = sizes
    cdef i64[::1] st = stack
    cdef i64 c = _components(&ip[0], &ix[0], &b[0],
                             n, &cv[0], &sv[0], &st[0])
    return comp.tolist(), sizes[:c].tolist()


def wants_flip(indptr, indices, bits, comp, sizes, i,
               w_sec, w_loss, f_num, f_den, relative):
    cdef const i64[::1] ip = _as_i64(indptr)
    cdef const i64[::1] ix = np.append(_as_i64(indices), 0)
    cdef const signed char[::1] b = _as_bits(bits)
    cdef const i64[::1] cv = _as_i64(comp)
    cdef i64[::1] sv = np.append(_as_i64(sizes), 0)
    cdef Scratch sc
    _alloc(&sc, b.shape[0])
    try:
        return bool(_wants_flip(&ip[0], &ix[0], &b[0],
                                &cv[0], &sv[0], i, w_sec, w_loss, f_num, f_den,
                                relative, &sc))
    finally:
        _release(&sc)


cdef i64 _first_improving(const i64 *ip, const i64 *ix, const signed char *b, i64 n,
                          i64 w_sec, i64 w_loss, i64 f_num, i64 f_den, bint relative,
                          Scratch *sc) noexcept nogil:
    cdef i64 i
    _components(ip, ix, b, n, sc.comp, sc.sizes, sc.stack)
    for i in range(n):
        if _wants_flip(ip, ix, b, sc.comp, sc.sizes, i,
                       w_sec, w_loss, f_num, f_den, relative, sc):
            return i
    return -1


def first_improving(indptr, indices, bits, w_sec, w_loss, f_num, f_den, relative):
    cdef const i64[::1] ip = _as_i64(indptr)
    cdef const i64[::1] ix = np.append(_as_i64(indices), 0)
    cdef const signed char[::1] b = _as_bits(bits)
    cdef Scratch sc
    _alloc(&sc, b.shape[0])
    try:
        return _first_improving(&ip[0], &ix[0], &b[0],
                                b.shape[0], w_sec, w_loss, f_num, f_den, relative, &sc)
    finally:
        _release(&sc)


def social_cost(indptr, indices, bits, w_sec, w_loss):
    comp, sizes = components(indptr, indices, bits)
    return int(np.count_nonzero(_as_bits(bits))) * w_sec + w_loss * sum(s * s for s in sizes)


cdef class Stepper:
    """Holds scratch buffers and a mutable profile for best-response dynamics.

    Components are recomputed lazily after each flip, never maintained
    incrementally.
    """
    cdef object _ip, _ix, _bits
    cdef i64 n
    cdef i64 w_sec, w_loss, f_num, f_den
    cdef bint relative, dirty
    cdef Scratch sc

    def __cinit__(self, indptr, indices, bits, w_sec, w_loss, f_num, f_den, relative):
        self._ip = _as_i64(indptr)
        self._ix = np.append(_as_i64(indices), 0)
        self._bits = _as_bits(bits).copy()
        self.n = self._bits.shape[0]
        self.w_sec, self.w_loss, self.f_num, self.f_den = w_sec, w_loss, f_num, f_den
        self.relative = relative
        self.dirty = True
        _alloc(&self.sc, self.n)

    def __dealloc__(self):
        _release(&self.sc)

    cdef void _refresh(self):
        cdef const i64[::1] ip = self._ip
        cdef const i64[::1] ix = self._ix
        cdef const signed char[::1] b = self._bits
        if self.dirty:
            _components(&ip[0], &ix[0], &b[0], self.n, self.sc.comp, self.sc.sizes,
                        self.sc.stack)
            self.dirty = False

    def wants_flip(self, i64 i):
        cdef const i64[::1] ip = self._ip
        cdef const i64[::1] ix = self._ix
        cdef const signed char[::1] b = self._bits
        self._refresh()
        return bool(_wants_flip(&ip[0], &ix[0], &b[0], self.sc.comp, self.sc.sizes, i,
                                self.w_sec, self.w_loss, self.f_num, self.f_den,
                                self.relative, &self.sc))

    def flip(self, i64 i):
        cdef signed char[::1] b = self._bits
        b[i] = 1 - b[i]
        self.dirty = True

    def bits(self):
        return [int(x) for x in self._bits]


def enumerate_range(indptr, indices, i64 n, i64 w_sec, i64 w_loss, i64 f_num, i64 f_den,
                    bint relative, i64 lo, i64 hi):
    cdef const i64[::1] ip = _as_i64(indptr)
    cdef const i64[::1] ix = np.append(_as_i64(indices), 0)
    bits_arr = np.zeros(n + 1, dtype=np.int8)
    cdef signed char[::1] b = bits_arr
    cdef Scratch sc
    cdef i64 mask, k, c, n_sec, cost, key
    cdef i64 opt_mask = -1, opt_cost = 0, opt_key = 0
    cdef bint stable, have_opt = False
    eq_masks = []
    eq_costs = []
    _alloc(&sc, n)
    try:
        for mask in range(lo, hi):
            n_sec = 0
            key = 0
            for k in range(n):
                b[k] = (mask >> k) & 1
                if b[k]:
                    n_sec += 1
                    key |= (<i64> 1) << (n - 1 - k)
            c = _components(&ip[0], &ix[0], &b[0], n, sc.comp, sc.sizes, sc.stack)
            cost = n_sec * w_sec
            for k in range(c):
                cost += w_loss * sc.sizes[k] * sc.sizes[k]
            if not have_opt or cost < opt_cost or (cost == opt_cost and key < opt_key):
                opt_mask, opt_cost, opt_key = mask, cost, key
                have_opt = True
            stable = True
            for k in range(n):
                if _wants_flip(&ip[0], &ix[0], &b[0], sc.comp, sc.sizes, k,
                               w_sec, w_loss, f_num, f_den, relative, &sc):
                    stable = False
                    break
            if stable:
                eq_masks.append(mask)
                eq_costs.append(cost)
    finally:
        _release(&sc)
    return eq_masks, eq_costs, opt_mask, (opt_cost if have_opt else None)
