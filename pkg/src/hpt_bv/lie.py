"""Finite-dimensional (optionally graded) Lie algebras given by structure constants.

Structure constants are stored as exact rationals in the convention
[e_i, e_j] = sum_k f_{ij}^k e_k (0-based indices internally, 1-based in
the JSON interchange format).  An optional internal integer degree per
basis vector turns all axioms into their graded versions, with parity =
degree mod 2.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import ONE, ZERO, Vec, mat_det, vec_add

Matrix = list  # list of list of Fraction


@dataclass
class LieAlgebraData:
    dim: int
    basis: list[str]
    degrees: list[int]
    brackets: dict  # (i, j) -> {k: Fraction}, sparse, both orders stored
    pairing: Matrix | None = None
    name: str = ""

    def __post_init__(self):
        self.brackets = {
            ij: {k: Fraction(c) for k, c in col.items() if c}
            for ij, col in self.brackets.items()
        }
        self.brackets = {ij: col for ij, col in self.brackets.items() if col}
        if self.pairing is not None:
            self.pairing = [[Fraction(x) for x in row] for row in self.pairing]

    def f(self, i: int, j: int) -> dict:
        return self.brackets.get((i, j), {})

    def parity(self, i: int) -> int:
        return self.degrees[i] & 1

    def is_graded(self) -> bool:
        return any(self.degrees)

    def bracket_vec(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for j, cb in b.items():
                vec_add(out, self.f(i, j), ca * cb)
        return out

    def ad_matrix(self, i: int) -> Matrix:
        """Matrix of ad_{e_i} acting on column vectors."""
        m = [[ZERO] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            for k, c in self.f(i, j).items():
                m[k][j] = c
        return m


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    entries: list = field(default_factory=list)

    def add(self, kind: str, indices, detail: str):
        self.entries.append({"kind": kind, "indices": list(indices), "detail": detail})

    @property
    def valid(self) -> bool:
        return not self.entries

    def to_json(self):
        return {"valid": self.valid, "violations": self.entries}


def validate_lie(g: LieAlgebraData) -> ValidationReport:
    """Check graded antisymmetry, graded Jacobi, and pairing sanity.

    Violations are reported with indices; an empty report means valid.
    """
    rep = ValidationReport()
    n = g.dim
    for i in range(n):
        for j in range(n):
            sgn = Fraction(-1) ** (g.parity(i) * g.parity(j))
            lhs = g.f(i, j)
            rhs = g.f(j, i)
            keys = set(lhs) | set(rhs)
            for k in keys:
                if lhs.get(k, ZERO) != -sgn * rhs.get(k, ZERO):
                    rep.add("antisymmetry", (i, j, k),
                            "f[%d,%d]^%d != -(-1)^(|i||j|) f[%d,%d]^%d" % (i, j, k, j, i, k))
            # degree compatibility of the bracket
            for k in lhs:
                if g.degrees[k] != g.degrees[i] + g.degrees[j]:
                    rep.add("grading", (i, j, k), "bracket does not add internal degrees")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                # graded Jacobi: (-1)^{|i||k|}[[i,j],k] + cyclic = 0
                acc: Vec = {}
                for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                    sgn = Fraction(-1) ** (g.parity(a) * g.parity(c))
                    inner = g.f(a, b)
                    for m, cf in inner.items():
                        vec_add(acc, g.f(m, c), sgn * cf)
                if acc:
                    rep.add("jacobi", (i, j, k), "graded Jacobi fails on basis triple")
    if g.pairing is not None:
        t = g.pairing
        for i in range(n):
            for j in range(n):
                sgn = Fraction(-1) ** (g.parity(i) * g.parity(j))
                if t[i][j] != sgn * t[j][i]:
                    rep.add("pairing-symmetry", (i, j), "pairing is not graded symmetric")
        if mat_det(t) == 0:
            rep.add("pairing-degenerate", (), "pairing matrix is singular")
    return rep


def pairing_is_invariant(g: LieAlgebraData, t: Matrix | None = None) -> bool:
    """Whether t([x,y],z) + (-1)^{|x||y|} t(y,[x,z]) = 0 on all basis triples."""
    t = g.pairing if t is None else t
    if t is None:
        return False
    n = g.dim
    for x in range(n):
        for y in range(n):
            for z in range(n):
                s = ZERO
                for m, c in g.f(x, y).items():
                    s += c * t[m][z]
                sgn = Fraction(-1) ** (g.parity(x) * g.parity(y))
                for m, c in g.f(x, z).items():
                    s += sgn * c * t[y][m]
                if s:
                    return False
    return True


def killing_form(g: LieAlgebraData) -> Matrix:
    """t_{ab} = sum_{k,l} f_{ak}^l f_{bl}^k (trace of ad_a ad_b)."""
    n = g.dim
    t = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = ZERO
            for k in range(n):
                for l, c in g.f(a, k).items():
                    s += c * g.f(b, l).get(k, ZERO)
            t[a][b] = s
    return t


def is_unimodular(g: LieAlgebraData):
    """(flag, trace vector) with trace_a = sum_b f_{ab}^b."""
    traces = []
    for a in range(g.dim):
        s = ZERO
        for b in range(g.dim):
            s += g.f(a, b).get(b, ZERO)
        traces.append(s)
    return all(x == 0 for x in traces), traces


# ---------------------------------------------------------------------------
# built-in algebras


def _su2() -> LieAlgebraData:
    eps = {}
    for (i, j, k), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((1, 0, 2), -1), ((2, 1, 0), -1), ((0, 2, 1), -1)):
        eps.setdefault((i, j), {})[k] = Fraction(s)
    return LieAlgebraData(3, ["e1", "e2", "e3"], [0, 0, 0], eps, None, "su2")


def _mat_unit(i, j):
    return tuple(tuple(ONE if (r, c) == (i, j) else ZERO for c in range(3)) for r in range(3))


def _mat_comb(*terms):
    out = [[ZERO] * 3 for _ in range(3)]
    for coeff, m in terms:
        for r in range(3):
            for c in range(3):
                out[r][c] += coeff * m[r][c]
    return tuple(tuple(row) for row in out)


def su3_cartan_weyl_matrices():
    """The eight 3x3 matrices generating sl(3) in the Cartan-Weyl presentation."""
    e = _mat_unit
    return [
        _mat_comb((ONE, e(0, 0)), (-ONE, e(1, 1))),
        _mat_comb((ONE, e(1, 1)), (-ONE, e(2, 2))),
        e(0, 1),
        _mat_comb((-ONE, e(1, 2))),
        _mat_comb((-ONE, e(0, 2))),
        e(1, 0),
        _mat_comb((-ONE, e(2, 1))),
        e(2, 0),
    ]


def _expand_in_cartan_weyl(m) -> list[Fraction]:
    """Coefficients of a traceless 3x3 matrix in the Cartan-Weyl basis."""
    c = [ZERO] * 8
    c[2] = m[0][1]
    c[3] = -m[1][2]
    c[4] = -m[0][2]
    c[5] = m[1][0]
    c[6] = -m[2][1]
    c[7] = m[2][0]
    c[0] = m[0][0]
    c[1] = -m[2][2]
    mats = su3_cartan_weyl_matrices()
    recon = [[ZERO] * 3 for _ in range(3)]
    for i in range(8):
        if not c[i]:
            continue
        for r in range(3):
            for col in range(3):
                recon[r][col] += c[i] * mats[i][r][col]
    if tuple(tuple(row) for row in recon) != tuple(tuple(row) for row in m):
        raise ValueError("matrix is not in the span of the Cartan-Weyl basis")
    return c


def _su3() -> LieAlgebraData:
    mats = su3_cartan_weyl_matrices()

    def mul(a, b):
        return tuple(tuple(sum(a[r][k] * b[k][c] for k in range(3)) for c in range(3))
                     for r in range(3))

    brackets = {}
    for i in range(8):
        for j in range(8):
            ab = mul(mats[i], mats[j])
            ba = mul(mats[j], mats[i])
            comm = tuple(tuple(ab[r][c] - ba[r][c] for c in range(3)) for r in range(3))
            col = {k: v for k, v in enumerate(_expand_in_cartan_weyl(comm)) if v}
            if col:
                brackets[(i, j)] = col
    return LieAlgebraData(8, ["e%d" % (i + 1) for i in range(8)], [0] * 8, brackets, None, "su3")


def _abelian(n: int) -> LieAlgebraData:
    return LieAlgebraData(n, ["e%d" % (i + 1) for i in range(n)], [0] * n, {}, None,
                          "abelian(%d)" % n)


def _affine2() -> LieAlgebraData:
    brackets = {(0, 1): {1: ONE}, (1, 0): {1: -ONE}}
    return LieAlgebraData(2, ["x", "y"], [0, 0], brackets, None, "affine2")


_ABELIAN_RE = re.compile(r"^abelian\((\d+)\)$")


def builtin(name: str) -> LieAlgebraData:
    """Construct a named algebra: su2, su3, abelian(n), affine2."""
    if name == "su2":
        return _su2()
    if name == "su3":
        return _su3()
    if name == "affine2":
        return _affine2()
    m = _ABELIAN_RE.match(name.replace(" ", ""))
    if m:
        n = int(m.group(1))
        if n < 1:
            raise ValueError("abelian dimension must be positive")
        return _abelian(n)
    raise ValueError("unknown built-in Lie algebra %r" % name)


def graded_double(g0: LieAlgebraData, shift: int) -> LieAlgebraData:
    """g0 + g0*[shift] with the coadjoint bracket and the canonical pairing.

    Basis vectors 0..n-1 are g0 (degree 0), n..2n-1 the dual copy in
    internal degree -shift; the pairing matches the two blocks, so it
    vanishes except on pairs of total degree -shift.
    """
    if g0.is_graded():
        raise ValueError("graded_double expects an ungraded base algebra")
    rep = validate_lie(g0)
    if not rep.valid:
        raise ValueError("graded_double expects a valid Lie algebra")
    n = g0.dim
    brackets = {}
    for (i, j), col in g0.brackets.items():
        brackets[(i, j)] = dict(col)
    # coadjoint action: [e_i, c^b] = -sum_j f_{ij}^b c^j
    for i in range(n):
        for b in range(n):
            col = {}
            for jj in range(n):
                c = g0.f(i, jj).get(b, ZERO)
                if c:
                    col[n + jj] = -c
            if col:
                brackets[(i, n + b)] = col
                brackets[(n + b, i)] = {k: -v for k, v in col.items()}
    pairing = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        pairing[i][n + i] = ONE
        pairing[n + i][i] = ONE
    basis = list(g0.basis) + [s + "*" for s in g0.basis]
    degrees = [0] * n + [-shift] * n
    return LieAlgebraData(2 * n, basis, degrees, brackets, pairing,
                          "double(%s,%d)" % (g0.name or "g0", shift))


def pairing_degree(g: LieAlgebraData) -> int | None:
    """The degree s with t(x, y) = 0 unless deg x + deg y = -s, if consistent."""
    if g.pairing is None:
        return None
    seen = set()
    for i in range(g.dim):
        for j in range(g.dim):
            if g.pairing[i][j]:
                seen.add(-(g.degrees[i] + g.degrees[j]))
    if not seen:
        return None
    if len(seen) > 1:
        return None
    return seen.pop()


# ---------------------------------------------------------------------------
# JSON interchange (1-based indices, fraction strings)


def _frac_str(x: Fraction) -> str:
    return str(x)


def to_json(g: LieAlgebraData) -> dict:
    brackets = []
    for i in range(g.dim):
        for j in range(g.dim):
            col = g.f(i, j)
            if col:
                brackets.append([i + 1, j + 1,
                                 [[k + 1, _frac_str(c)] for k, c in sorted(col.items())]])
    out = {"dim": g.dim, "basis": list(g.basis), "degrees": list(g.degrees),
           "brackets": brackets}
    if g.pairing is not None:
        entries = []
        for i in range(g.dim):
            for j in range(g.dim):
                if g.pairing[i][j]:
                    entries.append([i + 1, j + 1, _frac_str(g.pairing[i][j])])
        out["pairing"] = entries
    return out


def from_json(data: dict) -> LieAlgebraData:
    try:
        n = int(data["dim"])
        basis = list(data.get("basis") or ["e%d" % (i + 1) for i in range(n)])
        degrees = [int(x) for x in (data.get("degrees") or [0] * n)]
        brackets = {}
        for i, j, col in data.get("brackets", []):
            brackets[(int(i) - 1, int(j) - 1)] = {int(k) - 1: Fraction(c) for k, c in col}
        pairing = None
        if data.get("pairing") is not None:
            pairing = [[ZERO] * n for _ in range(n)]
            for i, j, c in data["pairing"]:
                pairing[int(i) - 1][int(j) - 1] = Fraction(c)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValueError("malformed Lie algebra JSON: %s" % exc) from exc
    if len(basis) != n or len(degrees) != n:
        raise ValueError("basis/degrees length does not match dim")
    return LieAlgebraData(n, basis, degrees, brackets, pairing, str(data.get("name", "")))


def load(path: str) -> LieAlgebraData:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(json.load(fh))
