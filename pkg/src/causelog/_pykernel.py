"""Pure-Python search kernel (fallback when the compiled extension is absent).

Works on the integer encoding produced by ``CausalModel.compiled``. Formulas
are flattened to a postfix program of ``(op, a, b)`` triples:

* ``OP_ATOM`` pushes ``values[a] == b``
* ``OP_NOT`` negates the top of stack
* ``OP_AND`` / ``OP_OR`` fold the top ``a`` entries
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

OP_ATOM, OP_NOT, OP_AND, OP_OR = 0, 1, 2, 3


class PyKernel:
    backend = "python"

    def __init__(self, compiled):
        self.n = len(compiled.names)
        self.order = list(compiled.order)
        self.par_ptr = list(compiled.par_ptr)
        self.par_idx = list(compiled.par_idx)
        self.par_stride = list(compiled.par_stride)
        self.tab_ptr = list(compiled.tab_ptr)
        self.table = list(compiled.table)
        # per-position parent slices, precomputed once
        self._steps = [
            (
                v,
                tuple(zip(self.par_idx[self.par_ptr[p] : self.par_ptr[p + 1]],
                          self.par_stride[self.par_ptr[p] : self.par_ptr[p + 1]])),
                self.tab_ptr[p],
            )
            for p, v in enumerate(self.order)
        ]

    def evaluate(self, values: Sequence[int], fixed: Sequence[int]) -> list[int]:
        """Solve the model. ``values`` supplies exogenous entries; ``fixed[i] >= 0``
        pins variable ``i`` to that value (an intervention)."""
        vals = list(values)
        table = self.table
        for v, parents, base in self._steps:
            f = fixed[v]
            if f >= 0:
                vals[v] = f
                continue
            off = base
            for i, s in parents:
                off += vals[i] * s
            vals[v] = table[off]
        return vals

    @staticmethod
    def holds(prog: Sequence[tuple[int, int, int]], values: Sequence[int]) -> bool:
        stack: list[bool] = []
        for op, a, b in prog:
            if op == OP_ATOM:
                stack.append(values[a] == b)
            elif op == OP_NOT:
                stack[-1] = not stack[-1]
            elif op == OP_AND:
                args = stack[-a:]
                del stack[-a:]
                stack.append(all(args))
            else:
                args = stack[-a:]
                del stack[-a:]
                stack.append(any(args))
        return stack[-1]

    def find_witness(
        self,
        actual: Sequence[int],
        x_idx: Sequence[int],
        alts: Sequence[Sequence[int]],
        pool: Sequence[int],
        max_w: int,
        prog: Sequence[tuple[int, int, int]],
    ) -> tuple[int, tuple[int, ...]] | None:
        """First ``(alt row, W)`` with ``[X <- alt, W <- actual] not prog``.

        ``W`` ranges over subsets of ``pool`` by increasing size, then
        lexicographically; alternatives are tried in the given row order.
        """
        fixed = [-1] * self.n
        holds = self.holds
        evaluate = self.evaluate
        for k in range(min(max_w, len(pool)) + 1):
            for w in combinations(pool, k):
                for i in w:
                    fixed[i] = actual[i]
                for r, row in enumerate(alts):
                    for i, val in zip(x_idx, row):
                        fixed[i] = val
                    if not holds(prog, evaluate(actual, fixed)):
                        return r, w
                for i in w:
                    fixed[i] = -1
        return None
