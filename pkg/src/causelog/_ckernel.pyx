# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel. Same interface and results as ``_pykernel.PyKernel``."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cdef enum:
    OP_ATOM = 0
    OP_NOT = 1
    OP_AND = 2
    OP_OR = 3


cdef int* _to_c(seq) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef int* out = <int*> malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = seq[i]
    return out


cdef inline bint _holds(const int* prog, int n_prog, const int* vals, char* stack) noexcept nogil:
    cdef int sp = 0
    cdef int t, op, a, b, i
    cdef char acc
    for t in range(n_prog):
        op = prog[3 * t]
        a = prog[3 * t + 1]
        b = prog[3 * t + 2]
        if op == OP_ATOM:
            stack[sp] = vals[a] == b
            sp += 1
        elif op == OP_NOT:
            stack[sp - 1] = not stack[sp - 1]
        elif op == OP_AND:
            acc = 1
            for i in range(sp - a, sp):
                acc = acc and stack[i]
            sp -= a
            stack[sp] = acc
            sp += 1
        else:
            acc = 0
            for i in range(sp - a, sp):
                acc = acc or stack[i]
            sp -= a
            stack[sp] = acc
            sp += 1
    return stack[sp - 1]


cdef class CKernel:
    cdef int n
    cdef int n_order
    cdef int* order
    cdef int* par_ptr
    cdef int* par_idx
    cdef int* par_stride
    cdef int* tab_ptr
    cdef int* table

    backend = "c"

    def __cinit__(self, compiled):
        self.n = len(compiled.names)
        self.n_order = len(compiled.order)
        self.order = _to_c(compiled.order)
        self.par_ptr = _to_c(compiled.par_ptr)
        self.par_idx = _to_c(compiled.par_idx)
        self.par_stride = _to_c(compiled.par_stride)
        self.tab_ptr = _to_c(compiled.tab_ptr)
        self.table = _to_c(compiled.table)

    def __dealloc__(self):
        free(self.order)
        free(self.par_ptr)
        free(self.par_idx)
        free(self.par_stride)
        free(self.tab_ptr)
        free(self.table)

    cdef void _evaluate(self, int* vals, const int* fixed) noexcept nogil:
        cdef int p, v, j, off
        for p in range(self.n_order):
            v = self.order[p]
            if fixed[v] >= 0:
                vals[v] = fixed[v]
                continue
            off = self.tab_ptr[p]
            for j in range(self.par_ptr[p], self.par_ptr[p + 1]):
                off += vals[self.par_idx[j]] * self.par_stride[j]
            vals[v] = self.table[off]

    def evaluate(self, values, fixed):
        cdef int* vals = _to_c(values)
        cdef int* fx = _to_c(fixed)
        try:
            self._evaluate(vals, fx)
            return [vals[i] for i in range(self.n)]
        finally:
            free(vals)
            free(fx)

    @staticmethod
    def holds(prog, values):
        cdef int* flat = _to_c([x for t in prog for x in t])
        cdef int* vals = _to_c(values)
        cdef char* stack = <char*> malloc(len(prog) + 1)
        try:
            return bool(_holds(flat, len(prog), vals, stack))
        finally:
            free(flat)
            free(vals)
            free(stack)

    def find_witness(self, actual, x_idx, alts, pool, int max_w, prog):
        cdef int n = self.n
        cdef int k_x = len(x_idx)
        cdef int n_alts = len(alts)
        cdef int n_pool = len(pool)
        cdef int n_prog = len(prog)
        cdef int* act = _to_c(actual)
        cdef int* xi = _to_c(x_idx)
        cdef int* alt = _to_c([v for row in alts for v in row])
        cdef int* pl = _to_c(pool)
        cdef int* pg = _to_c([x for t in prog for x in t])
        cdef int* fixed = <int*> malloc(n * sizeof(int))
        cdef int* vals = <int*> malloc(n * sizeof(int))
        cdef int* comb = <int*> malloc((n_pool + 1) * sizeof(int))
        cdef char* stack = <char*> malloc(n_prog + 1)
        cdef int i, j, k, r, top
        cdef int found_r = -1
        cdef int found_k = 0
        try:
            if max_w > n_pool:
                max_w = n_pool
            for i in range(n):
                fixed[i] = -1
            with nogil:
                for k in range(max_w + 1):
                    for i in range(k):
                        comb[i] = i
                    while True:
                        for i in range(k):
                            fixed[pl[comb[i]]] = act[pl[comb[i]]]
                        for r in range(n_alts):
                            for j in range(k_x):
                                fixed[xi[j]] = alt[r * k_x + j]
                            memcpy(vals, act, n * sizeof(int))
                            self._evaluate(vals, fixed)
                            if not _holds(pg, n_prog, vals, stack):
                                found_r = r
                                found_k = k
                                break
                        if found_r >= 0:
                            break
                        for i in range(k):
                            fixed[pl[comb[i]]] = -1
                        # next k-combination of range(n_pool) in lexicographic order
                        top = k - 1
                        while top >= 0 and comb[top] == n_pool - k + top:
                            top -= 1
                        if top < 0:
                            break
                        comb[top] += 1
                        for i in range(top + 1, k):
                            comb[i] = comb[i - 1] + 1
                    if found_r >= 0:
                        break
            if found_r < 0:
                return None
            return found_r, tuple(pool[comb[i]] for i in range(found_k))
        finally:
            free(act)
            free(xi)
            free(alt)
            free(pl)
            free(pg)
            free(fixed)
            free(vals)
            free(comb)
            free(stack)
