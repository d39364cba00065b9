"""Special deformation retracts and their verification.

An SDR packs the maps of a homotopy equivalence

        k (( (V, d)  <-->p/e-->  (W, d_W)

subject to p e = 1, e p = 1 - d k - k d and the side conditions
p k = 0, k e = 0, k k = 0.  Three constructions are provided:

* the trivial retract (W = V, k = 0);
* the retract determined by a subspace I on which <-, d-> is
  non-degenerate, with W the orthogonal of I + dI for the integral
  pairing and k the inverse of d : I -> dI;
* the canonical retract onto the invariant forms of a reductive
  algebra, with k = (inverse of d del + del d) o del.

``verify_sdr`` and ``verify_cyclic`` re-check every identity on every
basis vector and return witnesses for any failure, so constructed
retracts are certified rather than trusted.

Sign conventions recorded here and used by ``verify_cyclic``: parities
are taken after the degree shift that makes the pairing odd (for the
scalar complex this means parity(form) = |form| + 1 mod 2), and the
graded adjoint is defined by  <A a, b> = (-1)^{|A||a|} <a, A* b>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ce import CeComplex
from .linalg import (Basis, BlockCoordinates, Echelon, GradedMap, ONE, Vec, ZERO,
                     echelon_vectors, restricted_inverse, rref, vec_add)
from .multivector import MultiVector, mono_degree

ADJOINT_CONVENTION = "<A a, b> = (-1)^{|A||a|} <a, adj(A) b>, parities shifted"


class SdrData:
    """The sextuple (d, d_W, p, e, k) with its spaces and pairing metadata."""

    def __init__(self, space: Basis, d: GradedMap, w_basis: Basis, d_w: GradedMap,
                 p: GradedMap, e: GradedMap, k: GradedMap, pairing=None, meta=None):
        self.space = space
        self.d = d
        self.w_basis = w_basis
        self.d_w = d_w
        self.p = p
        self.e = e
        self.k = k
        self.pairing = pairing
        self.meta = dict(meta or {})

    def parity(self, key) -> int:
        """Parity of an ambient key in the shifted grading used for pairings."""
        return (self.space.degree(key) + self.meta.get("parity_shift", 0)) & 1

    def w_parity(self, wkey) -> int:
        return (self.w_basis.degree(wkey) + self.meta.get("parity_shift", 0)) & 1

    def w_dims_by_degree(self) -> dict:
        out: dict = {}
        for k in self.w_basis.keys:
            d = self.w_basis.degree(k)
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {
            "w_dims_by_degree": {str(k): v for k, v in self.w_dims_by_degree().items()},
            "p": self.p.to_json(),
            "e": self.e.to_json(),
            "k": self.k.to_json(),
            "d_w": self.d_w.to_json(),
            "meta": {k: str(v) for k, v in self.meta.items()},
        }


# ---------------------------------------------------------------------------
# constructions


def trivial_sdr(ce: CeComplex) -> SdrData:
    basis = ce.basis
    ident_p = GradedMap.identity(basis)
    k = GradedMap.zero(basis, basis, -1)
    return SdrData(basis, ce.d, basis, ce.d, ident_p, GradedMap.identity(basis), k,
                   pairing=ce.pairing_keys,
                   meta={"kind": "trivial", "parity_shift": 1,
                         "adjoint_convention": ADJOINT_CONVENTION})


def _homogeneous_degree(space: Basis, v: Vec) -> int:
    degs = {space.degree(k) for k in v}
    if len(degs) != 1:
        raise ValueError("subspace vectors must be homogeneous")
    return degs.pop()


def isotrope_sdr(ce: CeComplex, iso_vectors: list[Vec]) -> SdrData:
    """Retract determined by a subspace on which <-, d-> is non-degenerate.

    ``iso_vectors`` are ambient vectors (mask -> coefficient); linearly
    dependent input is echelon-reduced first and the reduction is noted
    in the metadata rather than treated as an error.
    """
    basis = ce.basis
    keys = basis.keys
    reduced = echelon_vectors(iso_vectors, keys)
    was_reduced = len(reduced) != len(iso_vectors)
    if not reduced:
        s = trivial_sdr(ce)
        s.meta["kind"] = "isotrope(dim 0)"
        return s
    iso = reduced
    d_images = [ce.d.apply(v) for v in iso]
    di = echelon_vectors(d_images, keys)
    if len(di) != len(iso):
        raise ValueError("d is not injective on the subspace (I meets ker d)")
    both = echelon_vectors(iso + d_images, keys)
    if len(both) != 2 * len(iso):
        raise ValueError("I and dI are not independent")

    # symplectic complement of I + dI, degree by degree
    span = iso + d_images
    w_vectors: list[Vec] = []
    for deg in range(ce.dim + 1):
        dkeys = basis.keys_of_degree(deg)
        rows = []
        for u in span:
            row = [sum((c * ce.pairing_keys(kk, ku) for ku, c in u.items()), ZERO)
                   for kk in dkeys]
            if any(row):
                rows.append(row)
        if not rows:
            w_vectors.extend({kk: ONE} for kk in dkeys)
            continue
        red, pivots = rref(rows)
        free = [c for c in range(len(dkeys)) if c not in pivots]
        for fc in free:
            v = {dkeys[fc]: ONE}
            for i, pv in enumerate(pivots):
                if red[i][fc]:
                    v[dkeys[pv]] = -red[i][fc]
            w_vectors.append({kk: c for kk, c in v.items() if c})
    if len(w_vectors) + 2 * len(iso) != len(keys):
        raise ValueError("<-, d-> is degenerate on I: complement has wrong dimension")
    allvecs = iso + d_images + w_vectors
    rows = [[v.get(kk, ZERO) for kk in keys] for v in allvecs]
    if len(rref(rows)[1]) != len(keys):
        raise ValueError("<-, d-> is degenerate on I: decomposition is not direct")

    s = _sdr_from_splitting(ce, w_vectors, iso, d_images,
                            kind="isotrope(dim %d)" % len(iso))
    if was_reduced:
        s.meta["input_reduced"] = "dependent isotrope input was echelon-reduced"
    s.meta["complement"] = "symplectic orthogonal of I + dI for the integral pairing"
    return s


def meinrenken_sdr(ce: CeComplex) -> SdrData:
    """Canonical retract onto the invariant forms of a reductive algebra."""
    inv, imd, imdel = ce.reductive_decomposition
    inv_list = [v for deg in sorted(inv) for v in inv[deg]]
    rest = [v for deg in sorted(imd) for v in imd[deg]] + \
           [v for deg in sorted(imdel) for v in imdel[deg]]
    k_d = restricted_inverse(ce.laplacian, rest, rest, complement=inv_list)
    k = k_d.compose(ce.codifferential)
    s = _sdr_from_splitting(ce, inv_list, None, None, kind="meinrenken", rest=rest, k=k)
    s.meta["transport_scale"] = ce.transport_scale
    return s


def _sdr_from_splitting(ce: CeComplex, w_vectors: list[Vec], iso, d_images,
                        kind: str = "", rest=None, k: GradedMap | None = None) -> SdrData:
    """Assemble p, e, k, d_W from an ambient splitting V = W + (the rest)."""
    basis = ce.basis
    keys = basis.keys
    wdegs = [_homogeneous_degree(basis, v) for v in w_vectors]
    wkeys = list(range(len(w_vectors)))
    w_basis = Basis(wkeys, lambda i, wd=wdegs: wd[i], "W")
    e = GradedMap(w_basis, basis, 0, {i: dict(w_vectors[i]) for i in wkeys})

    if rest is None:
        rest = list(iso) + list(d_images)
    full = w_vectors + rest
    coords = BlockCoordinates(basis, full)
    nw = len(w_vectors)
    # p: coordinates of each ambient key along W in the splitting
    p_cols = {}
    for kk in keys:
        col = {i: c for i, c in coords.coordinates(kk).items() if i < nw}
        if col:
            p_cols[kk] = col
    p = GradedMap(basis, w_basis, 0, p_cols)

    if k is None:
        # k = (d|_I)^{-1} on dI, zero on W and I
        n = len(iso)
        from .linalg import mat_inv
        # matrix of d : I -> dI in the splitting coordinates
        mat = [[ZERO] * n for _ in range(n)]
        for j, v in enumerate(iso):
            img = ce.d.apply(v)
            for key, c in img.items():
                for idx, x in coords.coordinates(key).items():
                    if nw + n <= idx < nw + 2 * n:
                        mat[idx - nw - n][j] += c * x
        minv = mat_inv(mat) if n else []
        gen_cols = []
        for j in range(n):
            col: Vec = {}
            for i in range(n):
                if minv[i][j]:
                    vec_add(col, iso[i], minv[i][j])
            gen_cols.append(col)
        k_cols = {}
        for kk in keys:
            col: Vec = {}
            for idx, cj in coords.coordinates(kk).items():
                if nw + n <= idx < nw + 2 * n:
                    vec_add(col, gen_cols[idx - nw - n], cj)
            if col:
                k_cols[kk] = col
        k = GradedMap(basis, basis, -1, k_cols)

    d_w = p.compose(ce.d).compose(e)
    return SdrData(basis, ce.d, w_basis, d_w, p, e, k,
                   pairing=ce.pairing_keys,
                   meta={"kind": kind, "parity_shift": 1,
                         "adjoint_convention": ADJOINT_CONVENTION})


# ---------------------------------------------------------------------------
# verification


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, failures: list):
        self.checks.append({"check": name, "passed": not failures,
                            "witnesses": failures[:5]})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks}


def _map_failures(m: GradedMap, basis: Basis, label=str) -> list:
    out = []
    for key in basis.keys:
        col = m.column(key)
        if col:
            out.append({"input": label(key), "residual": {label(t): str(c) for t, c in col.items()}})
    return out


def verify_sdr(s: SdrData) -> CheckReport:
    """Exact check of the five retract identities on every basis vector."""
    rep = CheckReport()
    wl = lambda x: str(x)
    pe = s.p.compose(s.e)
    rep.add("p o e = id_W", _map_failures(pe.add(GradedMap.identity(s.w_basis), -ONE), s.w_basis, wl))
    ep = s.e.compose(s.p)
    dk = s.d.compose(s.k)
    kd = s.k.compose(s.d)
    lhs = ep.add(GradedMap.identity(s.space), -ONE).add(dk).add(kd)
    rep.add("e o p = id - dk - kd", _map_failures(lhs, s.space, wl))
    rep.add("p o k = 0", _map_failures(s.p.compose(s.k), s.space, wl))
    rep.add("k o e = 0", _map_failures(s.k.compose(s.e), s.w_basis, wl))
    rep.add("k o k = 0", _map_failures(s.k.compose(s.k), s.space, wl))
    # chain-map sanity: p d = d_W p and d e = e d_W
    rep.add("p o d = d_W o p", _map_failures(s.p.compose(s.d).add(s.d_w.compose(s.p), -ONE),
                                             s.space, wl))
    rep.add("d o e = e o d_W", _map_failures(s.d.compose(s.e).add(s.e.compose(s.d_w), -ONE),
                                             s.w_basis, wl))
    return rep


def verify_cyclic(s: SdrData, pairing=None) -> CheckReport:
    """Check compatibility of the retract with the (shifted) pairing.

    Verifies d-skew-adjointness of the pairing, self-adjointness of k,
    adjointness of e and p, and isotropy of im k, under the recorded
    adjoint convention.
    """
    pairing = pairing or s.pairing
    if pairing is None:
        raise ValueError("no pairing available for cyclicity checks")
    rep = CheckReport()
    keys = s.space.keys
    par = s.parity

    # the pairing of basis keys is very sparse; tabulate its support once
    partners: dict = {a: {} for a in keys}
    for a in keys:
        for b in keys:
            v = pairing(a, b)
            if v:
                partners[a][b] = v

    def pair_vec_key(v: Vec, b) -> Fraction:
        return sum((c * partners[t].get(b, ZERO) for t, c in v.items()), ZERO)

    def pair_key_vec(a, v: Vec) -> Fraction:
        pa = partners[a]
        return sum((pa.get(t, ZERO) * c for t, c in v.items()), ZERO)

    def pair_vec_vec(v1: Vec, v2: Vec) -> Fraction:
        total = ZERO
        for t1, c1 in v1.items():
            p1 = partners[t1]
            for t2, c2 in v2.items():
                x = p1.get(t2)
                if x:
                    total += c1 * c2 * x
        return total

    fails = []
    for a in keys:
        da = s.d.column(a)
        sgn = -ONE if par(a) else ONE
        for b in keys:
            val = pair_vec_key(da, b) + sgn * pair_key_vec(a, s.d.column(b))
            if val:
                fails.append({"pair": (str(a), str(b)), "residual": str(val)})
    rep.add("<d a, b> + (-1)^|a| <a, d b> = 0", fails)

    fails = []
    for a in keys:
        ka = s.k.column(a)
        sgn = -ONE if par(a) else ONE
        for b in keys:
            val = pair_vec_key(ka, b) - sgn * pair_key_vec(a, s.k.column(b))
            if val:
                fails.append({"pair": (str(a), str(b)), "residual": str(val)})
    rep.add("k self-adjoint: <k a, b> = (-1)^|a| <a, k b>", fails)

    fails = []
    ep = s.e.compose(s.p)
    for w in s.w_basis.keys:
        ew = s.e.column(w)
        for a in keys:
            val = pair_vec_key(ew, a) - pair_vec_vec(ew, ep.column(a))
            if val:
                fails.append({"pair": (str(w), str(a)), "residual": str(val)})
    rep.add("e = adjoint of p on W", fails)

    fails = []
    kcols = [(a, s.k.column(a)) for a in keys if s.k.column(a)]
    for a, ka in kcols:
        for b, kb in kcols:
            val = pair_vec_vec(ka, kb)
            if val:
                fails.append({"pair": (str(a), str(b)), "residual": str(val)})
    rep.add("im k isotropic: <k a, k b> = 0", fails)
    return rep


def image_closed_under_wedge(s: SdrData, product=None):
    """(flag, witness) for closure of the e-image under the ambient product.

    ``product`` defaults to the exterior product on mask keys; for
    retracts of a coefficient dgla pass the bracket instead.
    """
    if product is None:
        dim = _ambient_mask_dim(s)

        def product(x: Vec, y: Vec) -> Vec:
            return MultiVector(dim, x).wedge(MultiVector(dim, y)).terms

    span = Echelon(s.space.index)
    for w in s.w_basis.keys:
        span.insert(s.e.column(w))
    for i, w1 in enumerate(s.w_basis.keys):
        for w2 in s.w_basis.keys[i:]:
            prod = product(s.e.column(w1), s.e.column(w2))
            if not prod:
                continue
            if not span.contains(prod):
                return False, {"pair": (str(w1), str(w2)),
                               "product": {str(k): str(c) for k, c in prod.items()}}
    return True, None


def _ambient_mask_dim(s: SdrData) -> int:
    top = max(k for k in s.space.keys if isinstance(k, int))
    return top.bit_length()
