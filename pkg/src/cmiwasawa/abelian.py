"""Finite abelian groups presented by generators and relations."""

from __future__ import annotations

from collections import deque

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def _insert_relation(basis, vec):
    """Add vec to a row-echelon integer lattice basis (list of rows, mutated)."""
    vec = list(vec)
    k = len(vec)
    for col in range(k):
        if vec[col] == 0:
            continue
        row = next((r for r in basis if _pivot(r) == col), None)
        if row is None:
            if vec[col] < 0:
                vec = [-x for x in vec]
            basis.append(vec)
            basis.sort(key=_pivot)
            return
        # gcd step on the pivot column
        a, b = row[col], vec[col]
        while b:
            q = a // b
            row, vec = vec, [x - q * y for x, y in zip(row, vec)]
            a, b = b, a - q * b
        if row[col] < 0:
            row = [-x for x in row]
        idx = next(i for i, r in enumerate(basis) if _pivot(r) == col)
        basis[idx] = row
    return


def _pivot(row):
    return next((i for i, x in enumerate(row) if x), len(row))


class AbelianGroup:
    """Z^k / L in Smith form, with a map from generator coordinates to invariants.

    Elements are tuples in prod Z/n_i (the invariant factors, 1s dropped).
    """

    def __init__(self, relations, k):
        self.k = k
        basis = []
        for r in relations:
            _insert_relation(basis, r)
        if len(basis) < k:
            raise ValueError("relations do not define a finite group")
        if k == 0:
            self._V, self._keep, self.invariants, self.relations = [], [], (), []
            return
        R = Matrix(basis)
        S, _, V = smith_normal_decomp(R, domain=ZZ)
        diag = [abs(int(S[i, i])) for i in range(k)]
        self._V = [[int(V[i, j]) for j in range(k)] for i in range(k)]
        self._keep = [i for i, n in enumerate(diag) if n != 1]
        self.invariants = tuple(diag[i] for i in self._keep)
        self.relations = [list(r) for r in basis]

    @property
    def order(self):
        out = 1
        for n in self.invariants:
            out *= n
        return out

    def reduce(self, vec):
        """Coordinates in generator basis -> invariant-factor element."""
        full = [sum(vec[i] * self._V[i][j] for i in range(self.k)) for j in range(self.k)]
        return tuple(full[j] % n for j, n in zip(self._keep, self.invariants))

    def add(self, a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, self.invariants))

    def neg(self, a):
        return tuple((-x) % n for x, n in zip(a, self.invariants))

    def scale(self, a, m):
        return tuple((x * m) % n for x, n in zip(a, self.invariants))

    def zero(self):
        return tuple(0 for _ in self.invariants)

    def elements(self):
        out = [()]
        for n in self.invariants:
            out = [e + (i,) for e in out for i in range(n)]
        return out

    def element_order(self, a):
        from math import gcd
        o = 1
        for x, n in zip(a, self.invariants):
            g = n // gcd(x, n)
            o = o * g // gcd(o, g)
        return o


class EnumeratedGroup:
    """A concrete finite abelian group enumerated by BFS from generators.

    ``mul`` combines two hashable elements; every element gets an exponent
    vector in the generators and collisions produce the relation lattice.
    """

    def __init__(self, identity, generators, mul):
        self.identity = identity
        self.generators = list(generators)
        self.mul = mul
        k = len(self.generators)
        vec = {identity: (0,) * k}
        relations = []
        queue = deque([identity])
        while queue:
            x = queue.popleft()
            vx = vec[x]
            for i, g in enumerate(self.generators):
                y = mul(x, g)
                vy = list(vx)
                vy[i] += 1
                if y in vec:
                    rel = [a - b for a, b in zip(vy, vec[y])]
                    if any(rel):
                        relations.append(rel)
                else:
                    vec[y] = tuple(vy)
                    queue.append(y)
        self._vec = vec
        self.group = AbelianGroup(relations, k)
        self.size = len(vec)
        assert self.group.order == self.size

    def dlog(self, x):
        try:
            v = self._vec[x]
        except KeyError:
            raise KeyError("element not in group") from None
        return self.group.reduce(v)

    def vector(self, x):
        return self._vec[x]

    def __iter__(self):
        return iter(self._vec)

    def __contains__(self, x):
        return x in self._vec
