"""Exact graded linear algebra.

Vectors are sparse dicts ``key -> Fraction`` over the keys of a
``Basis``;  a ``GradedMap`` stores the image of every basis key and a
fixed degree shift.  Kernels, images, ranks and restricted inverses are
computed by fraction-free-ish Gaussian elimination on per-degree blocks
(everything here is small enough that dense elimination is fine).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

Vec = dict  # key -> Fraction, zero coefficients never stored
ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# sparse vector helpers


def vec_add(acc: Vec, other: Vec, coeff: Fraction = ONE) -> Vec:
    """In-place acc += coeff * other; returns acc."""
    if not coeff:
        return acc
    for k, v in other.items():
        nv = acc.get(k, ZERO) + coeff * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def vec_scale(v: Vec, coeff) -> Vec:
    coeff = Fraction(coeff)
    if not coeff:
        return {}
    return {k: coeff * c for k, c in v.items()}


def vec_sub(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    return vec_add(out, b, -ONE)


# ---------------------------------------------------------------------------
# bases and graded maps


class Basis:
    """Ordered basis of a graded vector space.

    ``keys`` is the canonical ordering; ``degree_of`` assigns an integer
    degree to each key.  Keys may be any hashable objects (bitmasks for
    exterior monomials, pairs for tensor products, labels for reduced
    spaces).
    """

    def __init__(self, keys: Iterable[Hashable], degree_of: Callable[[Hashable], int], name: str = ""):
        self.keys = list(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self._deg = degree_of
        self.name = name

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self.index

    def degree(self, key) -> int:
        return self._deg(key)

    def parity(self, key) -> int:
        return self._deg(key) & 1

    def degrees(self) -> list[int]:
        return sorted({self._deg(k) for k in self.keys})

    def keys_of_degree(self, d: int) -> list:
        return [k for k in self.keys if self._deg(k) == d]


@dataclass
class GradedMap:
    """Degree-homogeneous linear map, stored column-wise."""

    source: Basis
    target: Basis
    shift: int
    cols: dict = field(default_factory=dict)  # source key -> Vec over target keys

    def __post_init__(self):
        self.cols = {k: {t: Fraction(c) for t, c in col.items() if c}
                     for k, col in self.cols.items()}
        self.cols = {k: col for k, col in self.cols.items() if col}

    @classmethod
    def from_function(cls, source: Basis, target: Basis, shift: int, fn) -> "GradedMap":
        return cls(source, target, shift, {k: fn(k) for k in source.keys})

    @classmethod
    def identity(cls, basis: Basis) -> "GradedMap":
        return cls(basis, basis, 0, {k: {k: ONE} for k in basis.keys})

    @classmethod
    def zero(cls, source: Basis, target: Basis, shift: int) -> "GradedMap":
        return cls(source, target, shift, {})

    def column(self, key) -> Vec:
        return dict(self.cols.get(key, {}))

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            col = self.cols.get(k)
            if col:
                vec_add(out, col, c)
        return out

    def __call__(self, v: Vec) -> Vec:
        return self.apply(v)

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self o inner."""
        cols = {}
        for k, col in inner.cols.items():
            img = self.apply(col)
            if img:
                cols[k] = img
        return GradedMap(inner.source, self.target, self.shift + inner.shift, cols)

    def add(self, other: "GradedMap", coeff=ONE) -> "GradedMap":
        if other.shift != self.shift:
            raise ValueError("cannot add maps of different shifts")
        cols = {k: dict(col) for k, col in self.cols.items()}
        for k, col in other.cols.items():
            vec_add(cols.setdefault(k, {}), col, Fraction(coeff))
        return GradedMap(self.source, self.target, self.shift, cols)

    def scale(self, coeff) -> "GradedMap":
        return GradedMap(self.source, self.target, self.shift,
                         {k: vec_scale(col, coeff) for k, col in self.cols.items()})

    def is_zero(self) -> bool:
        return not any(self.cols.values())

    def __eq__(self, other):
        return (isinstance(other, GradedMap) and self.shift == other.shift
                and self.cols == other.cols)

    def check_homogeneous(self) -> list:
        """Keys whose image leaves the expected degree block."""
        bad = []
        for k, col in self.cols.items():
            want = self.source.degree(k) + self.shift
            for t in col:
                if self.target.degree(t) != want:
                    bad.append((k, t))
        return bad

    def block(self, degree: int):
        """Dense matrix of the degree block, with its row/column keys.

        Returns (row_keys, col_keys, rows) where rows[i][j] is the
        coefficient of row key i in the image of column key j.
        """
        col_keys = self.source.keys_of_degree(degree)
        row_keys = self.target.keys_of_degree(degree + self.shift)
        ridx = {k: i for i, k in enumerate(row_keys)}
        rows = [[ZERO] * len(col_keys) for _ in row_keys]
        for j, ck in enumerate(col_keys):
            for t, c in self.cols.get(ck, {}).items():
                rows[ridx[t]][j] = c
        return row_keys, col_keys, rows

    def to_json(self):
        cols = {}
        for k, col in sorted(self.cols.items(), key=lambda kv: self.source.index[kv[0]]):
            cols[str(k)] = [[str(t), str(c)] for t, c in
                            sorted(col.items(), key=lambda tv: self.target.index[tv[0]])]
        return {"shift": self.shift, "columns": cols}


# ---------------------------------------------------------------------------
# dense elimination


def rref(rows: list[list[Fraction]]):
    """Reduced row echelon form; returns (rref rows, pivot column list)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def mat_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(rows)
    m = [[Fraction(x) for x in r] for r in rows]
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        pv = m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def mat_inv(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    m = [[Fraction(x) for x in r] + [ONE if j == i else ZERO for j in range(n)]
         for i, r in enumerate(rows)]
    red, pivots = rref(m)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def solve_in_span(span_vecs: list[Vec], target: Vec, keys: list) -> list[Fraction] | None:
    """Coefficients expressing ``target`` in ``span_vecs``, or None.

    ``keys`` fixes the coordinate order used for elimination.
    """
    idx = {k: i for i, k in enumerate(keys)}
    ncols = len(span_vecs)
    rows = [[ZERO] * (ncols + 1) for _ in keys]
    for j, v in enumerate(span_vecs):
        for k, c in v.items():
            rows[idx[k]][j] = c
    for k, c in target.items():
        rows[idx[k]][ncols] = c
    red, pivots = rref(rows)
    if ncols in pivots:
        return None
    coeffs = [ZERO] * ncols
    for i, p in enumerate(pivots):
        coeffs[p] = red[i][ncols]
    return coeffs


class BlockCoordinates:
    """Coordinates of basis keys relative to a homogeneous spanning basis.

    ``vectors`` must be degree-homogeneous and form a basis of the space;
    the change of basis is inverted once per degree block, after which
    coordinate lookups are dictionary reads.
    """

    def __init__(self, space: Basis, vectors: list[Vec]):
        self.space = space
        self.vectors = vectors
        by_deg: dict = {}
        for idx, v in enumerate(vectors):
            degs = {space.degree(k) for k in v}
            if len(degs) != 1:
                raise ValueError("basis vectors must be homogeneous")
            by_deg.setdefault(degs.pop(), []).append(idx)
        self._coord: dict = {}
        for deg, idxs in by_deg.items():
            keys = space.keys_of_degree(deg)
            if len(idxs) != len(keys):
                raise ValueError("vectors do not form a basis in degree %d" % deg)
            mat = [[vectors[j].get(k, ZERO) for j in idxs] for k in keys]
            inv = mat_inv(mat)  # raises when not a basis
            for col, k in enumerate(keys):
                self._coord[k] = {idxs[row]: inv[row][col]
                                  for row in range(len(idxs)) if inv[row][col]}
        for deg in space.degrees():
            if deg not in by_deg and space.keys_of_degree(deg):
                raise ValueError("vectors do not form a basis in degree %d" % deg)

    def coordinates(self, key) -> Vec:
        """Sparse coordinates {vector index: coefficient} of a basis key."""
        return self._coord.get(key, {})


# ---------------------------------------------------------------------------
# kernel / image / rank and restricted inverses


@dataclass
class KernelImage:
    kernel: dict  # degree -> list of Vec over source keys
    image: dict   # degree -> list of Vec over target keys (degree of the *source* block)
    rank: dict    # degree -> int

    def kernel_dim(self, degree: int) -> int:
        return len(self.kernel.get(degree, []))

    def total_rank(self) -> int:
        return sum(self.rank.values())


def solve_kernel_image(m: GradedMap) -> KernelImage:
    """Exact kernel basis, image basis and rank of every degree block."""
    kernel = {}
    image = {}
    rank = {}
    for d in m.source.degrees():
        row_keys, col_keys, rows = m.block(d)
        if not col_keys:
            continue
        ncols = len(col_keys)
        red, pivots = rref(rows) if rows else ([], [])
        rank[d] = len(pivots)
        img = []
        for p in pivots:
            img.append({rk: rows[i][p] for i, rk in enumerate(row_keys) if rows[i][p]})
        image[d] = img
        ker = []
        free = [c for c in range(ncols) if c not in pivots]
        for fc in free:
            v = {col_keys[fc]: ONE}
            for i, p in enumerate(pivots):
                if red[i][fc]:
                    v[col_keys[p]] = -red[i][fc]
            ker.append(v)
        kernel[d] = ker
    return KernelImage(kernel, image, rank)


class Echelon:
    """Incremental exact Gaussian elimination over sparse vectors."""

    def __init__(self, key_pos):
        # key_pos: dict key -> position used to pick pivots
        self.key_pos = key_pos
        self.rows: dict = {}  # pivot key -> normalized Vec

    def reduce(self, v: Vec) -> Vec:
        out = dict(v)
        while out:
            piv = min(out, key=self.key_pos.__getitem__)
            row = self.rows.get(piv)
            if row is None:
                return out
            vec_add(out, row, -out[piv])
        return out

    def insert(self, v: Vec) -> bool:
        """Add v to the span; returns False when v was already in it."""
        res = self.reduce(v)
        if not res:
            return False
        piv = min(res, key=self.key_pos.__getitem__)
        self.rows[piv] = vec_scale(res, ONE / res[piv])
        return True

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    @property
    def rank(self) -> int:
        return len(self.rows)


def echelon_vectors(vecs: list[Vec], keys: list) -> list[Vec]:
    """Echelonized spanning set (drops dependent vectors), in ``keys`` order."""
    idx = {k: i for i, k in enumerate(keys)}
    rows = []
    for v in vecs:
        rows.append([v.get(k, ZERO) for k in keys])
    red, pivots = rref(rows) if rows else ([], [])
    out = []
    for i in range(len(pivots)):
        out.append({keys[j]: red[i][j] for j in range(len(keys)) if red[i][j]})
    return out


def restricted_inverse(m: GradedMap, domain: list[Vec], codomain: list[Vec],
                       complement: list[Vec] | None = None) -> GradedMap:
    """Inverse of ``m`` restricted to span(domain) -> span(codomain).

    Returns g with g(m(v)) = v for v in span(domain) and g = 0 on a
    complement of span(codomain): the supplied ``complement`` when given,
    otherwise the span of the first target basis keys that extend the
    codomain to a full basis (a deterministic choice).  Raises ValueError
    when the restriction is not a bijection onto the codomain span.
    """
    if len(domain) != len(codomain):
        raise ValueError("domain and codomain spans must have equal dimension")
    n = len(domain)
    tkeys = m.target.keys
    if complement is None:
        # extend the codomain to a full basis by standard target keys
        ech = Echelon(m.target.index)
        for v in codomain:
            ech.insert(v)
        extra_keys = [k for k in tkeys if ech.insert({k: ONE})]
        complement = [{k: ONE} for k in extra_keys]
    full = list(codomain) + list(complement)
    if len(full) != len(tkeys):
        raise ValueError("codomain plus complement is not a basis of the target")
    coords = BlockCoordinates(m.target, full)
    # images must be expressible in the codomain span, invertibly
    mat = [[ZERO] * n for _ in range(n)]
    for j, v in enumerate(domain):
        img = m.apply(v)
        acc: Vec = {}
        for key, c in img.items():
            vec_add(acc, coords.coordinates(key), c)
        if any(idx >= n for idx in acc):
            raise ValueError("restriction is not surjective onto the codomain span")
        for idx, x in acc.items():
            mat[idx][j] = x
    try:
        inv = mat_inv(mat) if n else []
    except ValueError:
        raise ValueError("restriction is not injective")
    # g(c_j) = sum_i inv[i][j] domain[i];  g = 0 on the complement
    gen_cols = []
    for j in range(n):
        col: Vec = {}
        for i in range(n):
            if inv[i][j]:
                vec_add(col, domain[i], inv[i][j])
        gen_cols.append(col)
    cols = {}
    for tk in tkeys:
        col: Vec = {}
        for j, cj in coords.coordinates(tk).items():
            if j < n:
                vec_add(col, gen_cols[j], cj)
        if col:
            cols[tk] = col
    return GradedMap(m.target, m.source, -m.shift, cols)
