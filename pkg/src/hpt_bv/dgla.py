"""Forms with values in an external quadratic Lie algebra.

Tensoring the exterior complex of a source algebra s with a coefficient
algebra g yields a differential graded Lie algebra on which all
homotopy-transfer machinery runs.  Basis keys are pairs (mask, i) of an
exterior monomial and a g-basis index; the total (ghost) degree of a
monomial is

    gh = form degree - 1 + internal degree of the g-component,

and parities in every Koszul sign are ghost parities.

The bracket is stored in the shifted convention in which it is a graded
*symmetric* degree +1 operation:

    b(x (x) a, y (x) b) = (-1)^{|x|+|a|} (-1)^{|a| |y|} (x ^ y) (x) [a,b]

with |x|, |y| form degrees and |a| the internal degree.  (Equivalently,
b is (-1)^{unshifted degree of the first argument} times the usual
tensor-product bracket; with this normalization the induced binary
bracket on degree-0 cohomology classes is the plain Lie bracket.)

The degree -1 pairing couples the integral pairing on forms with the
pairing on g; it only exists when the g-pairing degree equals
dim(s) - 3, which the constructor checks.
"""

from __future__ import annotations

from fractions import Fraction

from .ce import CeComplex
from .lie import LieAlgebraData, pairing_degree, pairing_is_invariant, validate_lie
from .linalg import Basis, GradedMap, ONE, Vec, ZERO, vec_add
from .multivector import mono_degree, mono_str, wedge_monos
from .sdr import ADJOINT_CONVENTION, SdrData


class DglaSpace:
    def __init__(self, ce: CeComplex, g: LieAlgebraData, require_pairing: bool = False):
        rep = validate_lie(g)
        if not rep.valid:
            raise ValueError("invalid coefficient algebra: %s" % rep.entries[:3])
        self.ce = ce
        self.g = g
        self.dim_form = ce.dim
        keys = [(mask, i) for mask in ce.basis.keys for i in range(g.dim)]
        self.basis = Basis(keys, self.ghost_degree_key, "E_g")
        self.pairing_ok = self._check_pairing_degree()
        if require_pairing and not self.pairing_ok:
            raise ValueError(
                "degree mismatch: the coefficient pairing must have degree %d "
                "for a source of dimension %d (found %s)"
                % (self.dim_form - 3, self.dim_form, pairing_degree(g)))

    # -- degrees -------------------------------------------------------------

    def ghost_degree_key(self, key) -> int:
        mask, i = key
        return mono_degree(mask) - 1 + self.g.degrees[i]

    def parity(self, key) -> int:
        return self.ghost_degree_key(key) & 1

    def unshifted_degree(self, key) -> int:
        mask, i = key
        return mono_degree(mask) + self.g.degrees[i]

    def _check_pairing_degree(self) -> bool:
        if self.g.pairing is None:
            return False
        pd = pairing_degree(self.g)
        return pd == self.dim_form - 3

    # -- differential ----------------------------------------------------------

    @property
    def d(self) -> GradedMap:
        if not hasattr(self, "_d"):
            cols = {}
            for (mask, i) in self.basis.keys:
                col = {(m2, i): c for m2, c in self.ce.d.column(mask).items()}
                if col:
                    cols[(mask, i)] = col
            self._d = GradedMap(self.basis, self.basis, 1, cols)
        return self._d

    # -- bracket ----------------------------------------------------------------

    def bracket_keys(self, k1, k2) -> Vec:
        """Shifted-symmetric bracket of two basis monomials."""
        (m1, a), (m2, b) = k1, k2
        w = wedge_monos(m1, m2)
        if w is None:
            return {}
        s, m = w
        lie = self.g.f(a, b)
        if not lie:
            return {}
        exp = self.unshifted_degree(k1) + self.g.degrees[a] * mono_degree(m2)
        sgn = -ONE if exp & 1 else ONE
        return {(m, c): sgn * s * coeff for c, coeff in lie.items()}

    def bracket(self, v1: Vec, v2: Vec) -> Vec:
        out: Vec = {}
        for k1, c1 in v1.items():
            for k2, c2 in v2.items():
                vec_add(out, self.bracket_keys(k1, k2), c1 * c2)
        return out

    # -- pairing ------------------------------------------------------------------

    def bv_pairing_keys(self, k1, k2) -> Fraction:
        if not self.pairing_ok:
            raise ValueError("coefficient algebra carries no pairing of the required degree")
        (m1, a), (m2, b) = k1, k2
        t = self.g.pairing[a][b]
        if not t:
            return ZERO
        w = wedge_monos(m1, m2)
        if w is None or w[1] != self.ce.top_mask:
            return ZERO
        exp = mono_degree(m1) + self.g.degrees[a] * mono_degree(m2)
        sgn = -ONE if exp & 1 else ONE
        return sgn * w[0] * t

    def bv_pairing(self, v1: Vec, v2: Vec) -> Fraction:
        total = ZERO
        for k1, c1 in v1.items():
            for k2, c2 in v2.items():
                total += c1 * c2 * self.bv_pairing_keys(k1, k2)
        return total

    # -- serialization ---------------------------------------------------------------

    def element_to_json(self, v: Vec) -> list:
        out = []
        for (mask, i) in sorted(v, key=self.basis.index.__getitem__):
            out.append([[j + 1 for j in range(self.dim_form) if (mask >> j) & 1],
                        i + 1, str(v[(mask, i)])])
        return out

    def element_str(self, v: Vec) -> str:
        if not v:
            return "0"
        parts = []
        for (mask, i) in sorted(v, key=self.basis.index.__getitem__):
            c = v[(mask, i)]
            body = "%s(x)%s" % (mono_str(mask), self.g.basis[i])
            parts.append(body if c == 1 else "%s*%s" % (c, body))
        return " + ".join(parts)


def ghost_degree(space: DglaSpace, key) -> int:
    return space.ghost_degree_key(key)


def tensor_sdr(s: SdrData, space: DglaSpace) -> SdrData:
    """Extend a retract of the scalar complex to g-valued forms (maps (x) id)."""
    g = space.g
    basis = space.basis
    wkeys = [(w, i) for w in s.w_basis.keys for i in range(g.dim)]

    def wdeg(key):
        w, i = key
        return s.w_basis.degree(w) - 1 + g.degrees[i]

    w_basis = Basis(wkeys, wdeg, "W_g")

    def extend(m: GradedMap, src: Basis, dst: Basis) -> GradedMap:
        cols = {}
        for key in src.keys:
            base, i = key
            col = {(t, i): c for t, c in m.column(base).items()}
            if col:
                cols[key] = col
        return GradedMap(src, dst, m.shift, cols)

    p = extend(s.p, basis, w_basis)
    e = extend(s.e, w_basis, basis)
    k = extend(s.k, basis, basis)
    d_w = extend(s.d_w, w_basis, w_basis)
    pairing = space.bv_pairing_keys if space.pairing_ok else None
    meta = {"kind": "%s (x) %s" % (s.meta.get("kind", "sdr"), g.name or "g"),
            "parity_shift": 0,
            "adjoint_convention": ADJOINT_CONVENTION}
    return SdrData(basis, space.d, w_basis, d_w, p, e, k, pairing=pairing, meta=meta)


def bracket_closure_product(space: DglaSpace):
    """Product argument for image_closed_under_wedge on coefficient retracts."""
    return space.bracket
