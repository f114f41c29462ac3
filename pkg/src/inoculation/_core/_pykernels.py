"""Pure-Python kernels.

Mirrors the compiled ``_kernels`` module function for function. Costs are
integer-scaled (see :func:`inoculation._core.scaled_weights`), so every
comparison here is exact and Python's unbounded ints never overflow.
"""

NAME = "python"


def components(indptr, indices, bits):
    n = len(bits)
    comp = [-1] * n
    sizes = []
    stack = []
    for s in range(n):
        if bits[s] or comp[s] >= 0:
            continue
        c = len(sizes)
        comp[s] = c
        stack.append(s)
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if not bits[v] and comp[v] < 0:
                    comp[v] = c
                    stack.append(v)
        sizes.append(size)
    return comp, sizes


def _split_sizes(indptr, indices, bits, i):
    """Sizes of the pieces each insecure neighbor of ``i`` lands in once ``i`` is secured."""
    seen = {i: -1}
    out = []
    for e in range(indptr[i], indptr[i + 1]):
        j = indices[e]
        if bits[j]:
            continue
        if j in seen:
            out.append(out[seen[j]])
            continue
        piece = len(out)
        seen[j] = piece
        stack = [j]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for f in range(indptr[u], indptr[u + 1]):
                v = indices[f]
                if not bits[v] and v not in seen:
                    seen[v] = piece
                    stack.append(v)
        out.append(size)
    return out


def wants_flip(indptr, indices, bits, comp, sizes, i,
               w_sec, w_loss, f_num, f_den, relative):
    lo, hi = indptr[i], indptr[i + 1]
    deg = hi - lo
    own_scale = f_den * deg if relative else f_den
    if bits[i]:
        old_own = w_sec
        old_nb = 0
        merged = 1
        seen = set()
        n_sec = 0
        n_ins = 0
        for e in range(lo, hi):
            j = indices[e]
            if bits[j]:
                n_sec += 1
            else:
                n_ins += 1
                c = comp[j]
                old_nb += w_loss * sizes[c]
                if c not in seen:
                    seen.add(c)
                    merged += sizes[c]
        old_nb += n_sec * w_sec
        new_own = w_loss * merged
        new_nb = n_sec * w_sec + n_ins * w_loss * merged
    else:
        k = sizes[comp[i]]
        n_sec = 0
        n_ins = 0
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
            new_nb += w_loss * sum(_split_sizes(indptr, indices, bits, i))
    old = own_scale * old_own + f_num * old_nb
    new = own_scale * new_own + f_num * new_nb
    return new < old


def first_improving(indptr, indices, bits, w_sec, w_loss, f_num, f_den, relative):
    comp, sizes = components(indptr, indices, bits)
    for i in range(len(bits)):
        if wants_flip(indptr, indices, bits, comp, sizes, i,
                      w_sec, w_loss, f_num, f_den, relative):
            return i
    return -1


def social_cost(indptr, indices, bits, w_sec, w_loss):
    comp, sizes = components(indptr, indices, bits)
    n_sec = sum(bits)
    return n_sec * w_sec + w_loss * sum(s * s for s in sizes)


def _reverse_key(mask, n):
    key = 0
    for b in range(n):
        if mask >> b & 1:
            key |= 1 << (n - 1 - b)
    return key


def enumerate_range(indptr, indices, n, w_sec, w_loss, f_num, f_den, relative, lo, hi):
    """Scan profile masks ``lo <= mask < hi`` (bit ``i`` is ``a_i``).

    Returns ``(eq_masks, eq_costs, opt_mask, opt_cost)``. The optimum is the
    cheapest mask, ties going to the lexicographically smallest 0/1 string.
    """
    indptr = list(indptr)
    indices = list(indices)
    eq_masks = []
    eq_costs = []
    opt_mask = -1
    opt_cost = None
    opt_key = None
    for mask in range(lo, hi):
        bits = [mask >> b & 1 for b in range(n)]
        comp, sizes = components(indptr, indices, bits)
        cost = sum(bits) * w_sec + w_loss * sum(s * s for s in sizes)
        if opt_cost is None or cost <= opt_cost:
            key = _reverse_key(mask, n)
            if opt_cost is None or cost < opt_cost or key < opt_key:
                opt_mask, opt_cost, opt_key = mask, cost, key
        stable = True
        for i in range(n):
            if wants_flip(indptr, indices, bits, comp, sizes, i,
                          w_sec, w_loss, f_num, f_den, relative):
                stable = False
                break
        if stable:
            eq_masks.append(mask)
            eq_costs.append(cost)
    return eq_masks, eq_costs, opt_mask, opt_cost


class Stepper:
    """Mutable profile plus cached components for best-response dynamics."""

    def __init__(self, indptr, indices, bits, w_sec, w_loss, f_num, f_den, relative):
        self._ip = [int(x) for x in indptr]
        self._ix = [int(x) for x in indices]
        self._bits = [int(x) for x in bits]
        self._w = (w_sec, w_loss, f_num, f_den, relative)
        self._comp = None
        self._sizes = None

    def wants_flip(self, i):
        if self._comp is None:
            self._comp, self._sizes = components(self._ip, self._ix, self._bits)
        return wants_flip(self._ip, self._ix, self._bits, self._comp, self._sizes, i,
                          *self._w)

    def flip(self, i):
        self._bits[i] = 1 - self._bits[i]
        self._comp = None

    def bits(self):
        return list(self._bits)
