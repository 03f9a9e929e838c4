"""Finitely generated abelian groups over exact integer matrices.

Elements of a presented group are integer column vectors over its
generators.  A relation matrix has one relation per row.  A morphism
``G -> H`` is a ``H.ngens x G.ngens`` matrix acting on column vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "Matrix",
    "smith_normal_form",
    "solve_integer",
    "integer_kernel",
    "FGAbelianGroup",
    "GroupMorphism",
    "IsoResult",
    "NotAMorphism",
    "NotWellDefined",
    "cokernel",
    "kernel",
    "image",
    "is_isomorphism",
    "induced_on_quotient",
    "subgroup_contains",
    "lattice_basis",
]


class NotAMorphism(ValueError):
    """A matrix fails to carry source relations into target relations."""


class NotWellDefined(ValueError):
    """A map does not descend to the requested quotients."""

    def __init__(self, message, generator=None):
        super().__init__(message)
        self.generator = generator


class Matrix:
    """Immutable integer matrix in row-major order."""

    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, data: Iterable[Sequence[int]] = (), rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entry count does not match shape {rows}x{cols}")
        self.rows, self.cols, self.data = rows, cols, data
        self._hash = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(((0,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(((int(i == j) for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def diag(cls, entries: Sequence[int], rows=None, cols=None) -> "Matrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(entries):
            out[i][i] = d
        return cls(out, rows, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "Matrix":
        return cls(zip(*columns), rows, len(columns)) if columns else cls.zeros(rows, 0)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def to_list(self):
        return [list(r) for r in self.data]

    @property
    def T(self) -> "Matrix":
        return Matrix(zip(*self.data), self.cols, self.rows) if self.rows else Matrix.zeros(self.cols, 0)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return Matrix(
            (tuple(sum(a * b for a, b in zip(r, c) if a) for c in cols) for r in self.data),
            self.rows, other.cols)

    def apply(self, v: Sequence[int]) -> tuple:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(r, v) if a) for r in self.data)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix((tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
                      self.rows, self.cols)

    def __neg__(self):
        return Matrix((tuple(-a for a in r) for r in self.data), self.rows, self.cols)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return Matrix((tuple(k * a for a in r) for r in self.data), self.rows, self.cols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return Matrix(self.data + other.data, self.rows + other.rows, self.cols)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return Matrix((a + b for a, b in zip(self.data, other.data)), self.rows,
                      self.cols + other.cols)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_list()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k]), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.data))
        return self._hash

    def __repr__(self):
        return f"Matrix({self.to_list()!r})"


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_lists(a: list[list[int]], rows: int, cols: int):
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row dst += k * row src
        ra, rs = a[dst], a[src]
        for j in range(cols):
            if rs[j]:
                ra[j] += k * rs[j]
        ua, us = u[dst], u[src]
        for j in range(rows):
            if us[j]:
                ua[j] += k * us[j]

    def add_col(dst, src, k):  # col dst += k * col src
        for r in a:
            if r[src]:
                r[dst] += k * r[src]
        for r in v:
            if r[src]:
                r[dst] += k * r[src]

    diag = []
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                return diag, u, v
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // piv
                    add_row(i, t, -q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // piv
                    add_col(j, t, -q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % piv), None)
            if bad is not None:
                add_row(t, bad[0], 1)
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        diag.append(a[t][t])
    return diag, u, v


def smith_normal_form(m: Matrix):
    """Return ``(D, U, V)`` with ``U @ m @ V == D``, ``U``, ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries, each dividing the next
    (zeros last).  Pivots are chosen by smallest absolute value.
    """
    diag, u, v = _snf_lists(m.to_list(), m.rows, m.cols)
    return (Matrix.diag(diag, m.rows, m.cols), Matrix(u, m.rows, m.rows),
            Matrix(v, m.cols, m.cols))


def _unimodular_inverse(u: list[list[int]]) -> list[list[int]]:
    n = len(u)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(u)]
    for c in range(n):
        # Euclid down the column until a single unit pivot remains
        while True:
            nz = [i for i in range(c, n) if aug[i][c]]
            piv = min(nz, key=lambda i: abs(aug[i][c]))
            aug[c], aug[piv] = aug[piv], aug[c]
            done = True
            for i in range(c + 1, n):
                if aug[i][c]:
                    q = aug[i][c] // aug[c][c]
                    aug[i] = [x - q * y for x, y in zip(aug[i], aug[c])]
                    if aug[i][c]:
                        done = False
            if done:
                break
        if aug[c][c] < 0:
            aug[c] = [-x for x in aug[c]]
        if aug[c][c] != 1:
            raise ValueError("matrix is not unimodular")
    for c in range(n - 1, -1, -1):
        for i in range(c):
            if aug[i][c]:
                q = aug[i][c]
                aug[i] = [x - q * y for x, y in zip(aug[i], aug[c])]
    return [r[n:] for r in aug]


class _SNF:
    """Cached Smith decomposition with the inverse of the row transform."""

    def __init__(self, m: Matrix):
        self.diag, u, v = _snf_lists(m.to_list(), m.rows, m.cols)
        self.rank = len(self.diag)
        self.u = Matrix(u, m.rows, m.rows)
        self.v = Matrix(v, m.cols, m.cols)
        self.rows, self.cols = m.rows, m.cols

    @cached_property
    def u_inv(self) -> Matrix:
        return Matrix(_unimodular_inverse(self.u.to_list()), self.rows, self.rows)


def solve_integer(a: Matrix, b: Sequence[int]):
    """An integer solution ``x`` of ``a x = b``, or ``None``."""
    s = _SNF(a)
    ub = s.u.apply(b)
    y = [0] * a.cols
    for i, d in enumerate(s.diag):
        if ub[i] % d:
            return None
        y[i] = ub[i] // d
    if any(ub[i] for i in range(s.rank, a.rows)):
        return None
    return s.v.apply(y)


def integer_kernel(a: Matrix) -> list[tuple]:
    """A basis of ``{x in Z^cols : a x = 0}``."""
    s = _SNF(a)
    return [s.v.column(j) for j in range(s.rank, a.cols)]


# ---------------------------------------------------------------------------
# Groups and morphisms


@dataclass(frozen=True, eq=False)
class FGAbelianGroup:
    """The group ``Z^ngens / (row span of relations)``."""

    ngens: int
    relations: Matrix = None
    _snf: _SNF = field(init=False, repr=False)

    def __post_init__(self):
        rel = self.relations
        if rel is None:
            rel = Matrix.zeros(0, self.ngens)
        elif not isinstance(rel, Matrix):
            rel = Matrix(rel, cols=self.ngens)
        if rel.cols != self.ngens:
            raise ValueError("relation matrix must have one column per generator")
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "_snf", _SNF(rel.T))

    @classmethod
    def free(cls, rank: int) -> "FGAbelianGroup":
        return cls(rank)

    @classmethod
    def from_invariants(cls, rank: int = 0, torsion: Sequence[int] = ()) -> "FGAbelianGroup":
        torsion = [d for d in torsion if d != 1]
        g = len(torsion) + rank
        return cls(g, Matrix.diag(torsion, len(torsion), g))

    @cached_property
    def _factors(self) -> tuple:
        """Per SNF coordinate modulus: ``d_i`` for torsion coordinates, 0 if free."""
        return tuple(self._snf.diag) + (0,) * (self.ngens - self._snf.rank)

    @cached_property
    def _keep(self) -> tuple:
        return tuple(i for i, d in enumerate(self._factors) if d != 1)

    @property
    def rank(self) -> int:
        return self.ngens - self._snf.rank

    @property
    def torsion(self) -> tuple:
        return tuple(d for d in self._snf.diag if d > 1)

    def canonical_form(self) -> tuple:
        return (self.rank, self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def order(self):
        return math.inf if self.rank else math.prod(self.torsion)

    def is_isomorphic(self, other: "FGAbelianGroup") -> bool:
        return self.canonical_form() == other.canonical_form()

    def coordinates(self, x: Sequence[int]) -> tuple:
        """Canonical coordinates: torsion parts reduced, then free parts."""
        y = self._snf.u.apply(x)
        out = []
        for i in self._keep:
            d = self._factors[i]
            out.append(y[i] % d if d else y[i])
        return tuple(out)

    def is_zero(self, x: Sequence[int]) -> bool:
        y = self._snf.u.apply(x)
        return all((y[i] % d == 0) if d else y[i] == 0 for i, d in enumerate(self._factors))

    def equal(self, x, y) -> bool:
        return self.is_zero([a - b for a, b in zip(x, y)])

    def canonical(self) -> tuple["FGAbelianGroup", "GroupMorphism", "GroupMorphism"]:
        """``(C, to, back)``: the SNF-diagonal group with inverse isomorphisms."""
        c = FGAbelianGroup.from_invariants(self.rank, self.torsion)
        u, uinv = self._snf.u, self._snf.u_inv
        to = Matrix((u.row(i) for i in self._keep), len(self._keep), self.ngens)
        back = Matrix.from_columns([uinv.column(i) for i in self._keep], self.ngens)
        return c, GroupMorphism(self, c, to), GroupMorphism(c, self, back)

    def elements(self):
        """Canonical representatives of every element (finite groups only)."""
        if self.rank:
            raise ValueError("infinite group")
        import itertools

        c, _, back = self.canonical()
        for coords in itertools.product(*(range(d) for d in self.torsion)):
            yield back.matrix.apply(coords)

    def to_json(self, presented: bool = False) -> dict:
        if presented:
            return {"generators": self.ngens, "relations": self.relations.to_list()}
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, doc: dict) -> "FGAbelianGroup":
        if "generators" in doc:
            g = int(doc["generators"])
            rel = doc.get("relations") or []
            return cls(g, Matrix(rel, len(rel), g))
        return cls.from_invariants(int(doc.get("rank", 0)), [int(d) for d in doc.get("torsion", [])])

    def __repr__(self):
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.rank
        return "FGAbelianGroup(" + (" + ".join(parts) if parts else "0") + ")"


@dataclass(frozen=True, eq=False)
class GroupMorphism:
    source: FGAbelianGroup
    target: FGAbelianGroup
    matrix: Matrix
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, Matrix):
            m = Matrix(m, self.target.ngens, self.source.ngens)
            object.__setattr__(self, "matrix", m)
        if m.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {m.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        if self.check:
            for r in self.source.relations.data:
                if not self.target.is_zero(m.apply(r)):
                    raise NotAMorphism(f"relation {list(r)} is not sent to zero")

    @classmethod
    def identity(cls, g: FGAbelianGroup) -> "GroupMorphism":
        return cls(g, g, Matrix.identity(g.ngens), check=False)

    @classmethod
    def zero(cls, src: FGAbelianGroup, tgt: FGAbelianGroup) -> "GroupMorphism":
        return cls(src, tgt, Matrix.zeros(tgt.ngens, src.ngens), check=False)

    def __call__(self, x: Sequence[int]) -> tuple:
        return self.matrix.apply(x)

    def __matmul__(self, other: "GroupMorphism") -> "GroupMorphism":
        """``self @ other`` is ``self`` after ``other``."""
        if other.target.ngens != self.source.ngens:
            raise ValueError("morphisms are not composable")
        return GroupMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other):
        return GroupMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        return GroupMorphism(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self):
        return GroupMorphism(self.source, self.target, -self.matrix, check=False)

    def __rmul__(self, k: int):
        return GroupMorphism(self.source, self.target, k * self.matrix, check=False)

    def is_zero(self) -> bool:
        return all(self.target.is_zero(c) for c in self.matrix.columns())

    def equals(self, other: "GroupMorphism") -> bool:
        return (self - other).is_zero()

    def difference(self, other: "GroupMorphism") -> list:
        """Canonical coordinates of ``(self - other)`` on each source generator."""
        d = (self - other).matrix
        return [list(self.target.coordinates(c)) for c in d.columns()]

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_list()}


def subgroup_contains(group: FGAbelianGroup, gens: Sequence[Sequence[int]], x) -> bool:
    """Whether ``x`` lies in the subgroup of ``group`` generated by ``gens``."""
    cols = [tuple(c) for c in gens] + [tuple(r) for r in group.relations.data]
    a = Matrix.from_columns(cols, group.ngens) if cols else Matrix.zeros(group.ngens, 0)
    return solve_integer(a, x) is not None


def cokernel(f: GroupMorphism):
    """``(Q, q)``: the canonical quotient ``target / image(f)`` and its projection."""
    t = f.target
    rel = t.relations.vstack(f.matrix.T) if f.source.ngens else t.relations
    presented = FGAbelianGroup(t.ngens, rel)
    c, to, _ = presented.canonical()
    return c, GroupMorphism(t, c, to.matrix, check=False)


def image(f: GroupMorphism) -> list[tuple]:
    return f.matrix.columns()


def kernel(f: GroupMorphism):
    """``(K, i)``: the kernel as a presented group with its inclusion."""
    s, t = f.source, f.target
    block = f.matrix.hstack(t.relations.T) if t.relations.rows else f.matrix
    gens = [v[: s.ngens] for v in integer_kernel(block)]
    if not gens:
        k = FGAbelianGroup(0)
        return k, GroupMorphism(k, s, Matrix.zeros(s.ngens, 0), check=False)
    inc = Matrix.from_columns(gens, s.ngens)
    block = inc.hstack(s.relations.T) if s.relations.rows else inc
    rels = [v[: len(gens)] for v in integer_kernel(block)]
    k = FGAbelianGroup(len(gens), Matrix(rels, len(rels), len(gens)))
    return k, GroupMorphism(k, s, inc, check=False)


@dataclass
class IsoResult:
    ok: bool
    inverse: GroupMorphism | None = None
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _preimage(f: GroupMorphism, y: Sequence[int]):
    t = f.target
    block = f.matrix.hstack(t.relations.T) if t.relations.rows else f.matrix
    x = solve_integer(block, y)
    return None if x is None else x[: f.source.ngens]


def is_isomorphism(f: GroupMorphism) -> IsoResult:
    """Bijectivity test; the witness is an inverse or a failing element."""
    q, proj = cokernel(f)
    if not q.is_trivial():
        presented = FGAbelianGroup(f.target.ngens, f.target.relations.vstack(f.matrix.T)
                                   if f.source.ngens else f.target.relations)
        _, _, back = presented.canonical()
        return IsoResult(False, witness=back.matrix.column(0), reason="not surjective")
    k, inc = kernel(f)
    for c in inc.matrix.columns():
        if not f.source.is_zero(c):
            return IsoResult(False, witness=c, reason="not injective")
    cols = [_preimage(f, [int(i == j) for i in range(f.target.ngens)])
            for j in range(f.target.ngens)]
    inv = GroupMorphism(f.target, f.source, Matrix.from_columns(cols, f.source.ngens)
                        if cols else Matrix.zeros(f.source.ngens, 0))
    return IsoResult(True, inverse=inv)


def induced_on_quotient(f: GroupMorphism, q_src: GroupMorphism,
                        q_tgt: GroupMorphism) -> GroupMorphism:
    """The unique ``g`` with ``g @ q_src == q_tgt @ f``.

    ``q_src`` and ``q_tgt`` must be surjective.  Raises
    :class:`NotWellDefined` with a kernel generator of ``q_src`` whose image
    survives in the target quotient.
    """
    qf = q_tgt @ f
    _, inc = kernel(q_src)
    for c in inc.matrix.columns():
        if not qf.target.is_zero(qf(c)):
            raise NotWellDefined(f"kernel generator {list(c)} is not sent to zero",
                                 generator=tuple(c))
    qs = q_src.target
    cols = []
    for j in range(qs.ngens):
        x = _preimage(q_src, [int(i == j) for i in range(qs.ngens)])
        if x is None:
            raise ValueError("source projection is not surjective")
        cols.append(qf(x))
    m = Matrix.from_columns(cols, q_tgt.target.ngens) if cols else Matrix.zeros(q_tgt.target.ngens, 0)
    return GroupMorphism(qs, q_tgt.target, m)


def lattice_basis(vectors: Iterable[Sequence[int]], ncols: int, modulus: int | None = None) -> Matrix:
    """Echelon basis of the lattice spanned by ``vectors``.

    With ``modulus`` E the lattice ``E Z^ncols`` is included as well, which
    keeps every off-pivot entry reduced below E.
    """
    pivots: dict[int, list[int]] = {}
    if modulus:
        for i in range(ncols):
            pivots[i] = [0] * i + [modulus] + [0] * (ncols - i - 1)

    def tail(v, col):
        if modulus:
            for j in range(col + 1, ncols):
                v[j] %= modulus
        return v

    for vec in vectors:
        v = [x % modulus for x in vec] if modulus else list(vec)
        for col in range(ncols):
            if not v[col]:
                continue
            p = pivots.get(col)
            if p is None:
                pivots[col] = v if v[col] > 0 else [-x for x in v]
                break
            a, b = p[col], v[col]
            g, s, t = _egcd(a, b)
            new_p = [s * x + t * y for x, y in zip(p, v)]
            v = [(b // g) * x - (a // g) * y for x, y in zip(p, v)]
            pivots[col] = tail(new_p, col)
            v = tail(v, col)
    rows = [pivots[c] for c in sorted(pivots)]
    return Matrix(rows, len(rows), ncols)


def _egcd(a: int, b: int):
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
