"""The Chevalley-Eilenberg cdga of a Lie algebra, with its operator zoo.

For a Lie algebra s with structure constants f_{ij}^k the complex is the
exterior algebra on the dual generators e^1..e^d with the degree +1
differential fixed on generators by

    d e^k = sum_{i<j} f_{ij}^k e^i e^j

(the normalization making d e^3 = e^1 e^2 for the epsilon presentation
of su(2)).  On top of d the class provides the integral pairing against
the reference top form e^1...e^d, the coadjoint action, the invariant
subcomplex, cohomology, a Hodge star for a rational metric, and the
second-order Koszul codifferential obtained by transporting the bracket
to the dual through an ad-invariant pairing.

The transport pairing is rescaled once, at construction, so that the
codifferential agrees with +/- (star d star) degree by degree; the scale
and the per-degree sign table are recorded and reported rather than
assumed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import gcd

from .lie import LieAlgebraData, is_unimodular, killing_form, pairing_is_invariant, validate_lie
from .linalg import (Basis, GradedMap, KernelImage, ONE, Vec, ZERO, echelon_vectors, mat_det,
                     mat_inv, rref, solve_kernel_image, vec_add)
from .multivector import MultiVector, all_monomials, mono_degree, mono_indices, mono_str, wedge_monos


class CeComplex:
    def __init__(self, lie: LieAlgebraData, transport=None):
        if lie.is_graded():
            raise ValueError("the exterior complex is built over an ungraded algebra")
        rep = validate_lie(lie)
        if not rep.valid:
            raise ValueError("invalid Lie algebra data: %s" % rep.entries[:3])
        self.lie = lie
        self.dim = lie.dim
        self.top_mask = (1 << self.dim) - 1
        self.basis = Basis(all_monomials(self.dim), mono_degree, "Lambda(%s)" % (lie.name or "s"))
        self._given_transport = transport

    # -- differential -----------------------------------------------------

    @cached_property
    def d(self) -> GradedMap:
        gen_images = {}
        for k in range(self.dim):
            img: Vec = {}
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    c = self.lie.f(i, j).get(k, ZERO)
                    if c:
                        img[(1 << i) | (1 << j)] = c
            gen_images[k] = img

        def d_mono(mask: int) -> Vec:
            out: Vec = {}
            idxs = mono_indices(mask)
            for pos, i in enumerate(idxs):
                rest = mask ^ (1 << i)
                sgn = -ONE if pos & 1 else ONE
                for m2, c in gen_images[i].items():
                    w = wedge_monos(m2, rest)
                    if w is None:
                        continue
                    s, m = w
                    vec_add(out, {m: sgn * s * c})
            return out

        d = GradedMap.from_function(self.basis, self.basis, 1, d_mono)
        if not d.compose(d).is_zero():
            raise AssertionError("d^2 != 0 for valid Lie data; conventions broken")
        return d

    def d_mv(self, a: MultiVector) -> MultiVector:
        return MultiVector(self.dim, self.d.apply(a.terms))

    # -- integral pairing --------------------------------------------------

    def integral(self, a: MultiVector) -> Fraction:
        """Coefficient of the reference top form e^1...e^d."""
        return a.coefficient(self.top_mask)

    def integral_pairing(self, a: MultiVector, b: MultiVector) -> Fraction:
        """<a, b> = (-1)^{|a|} * integral of a ^ b, extended bilinearly."""
        total = ZERO
        for k in sorted(a.degrees()):
            part = a.degree_part(k)
            sgn = -ONE if k & 1 else ONE
            total += sgn * self.integral(part.wedge(b))
        return total

    def pairing_keys(self, m1: int, m2: int) -> Fraction:
        """Integral pairing of two basis monomials."""
        w = wedge_monos(m1, m2)
        if w is None or w[1] != self.top_mask:
            return ZERO
        sgn = -ONE if mono_degree(m1) & 1 else ONE
        return sgn * w[0]

    # -- coadjoint action and invariants ------------------------------------

    @cached_property
    def lie_derivatives(self) -> list[GradedMap]:
        ops = []
        for x in range(self.dim):
            gen_img = {}
            for k in range(self.dim):
                img: Vec = {}
                for j in range(self.dim):
                    c = self.lie.f(x, j).get(k, ZERO)
                    if c:
                        img[1 << j] = -c
                gen_img[k] = img

            def act(mask: int, gen_img=gen_img) -> Vec:
                out: Vec = {}
                idxs = mono_indices(mask)
                for pos, i in enumerate(idxs):
                    prefix = sum(1 << idxs[t] for t in range(pos))
                    suffix = sum(1 << idxs[t] for t in range(pos + 1, len(idxs)))
                    for m2, c in gen_img[i].items():
                        w1 = wedge_monos(prefix, m2)
                        if w1 is None:
                            continue
                        s1, ma = w1
                        w2 = wedge_monos(ma, suffix)
                        if w2 is None:
                            continue
                        s2, m = w2
                        vec_add(out, {m: s1 * s2 * c})
                return out

            ops.append(GradedMap.from_function(self.basis, self.basis, 0, act))
        return ops

    def lie_derivative(self, x: int, a: MultiVector) -> MultiVector:
        return MultiVector(self.dim, self.lie_derivatives[x].apply(a.terms))

    @cached_property
    def invariants(self) -> dict:
        """Joint kernel of the coadjoint action, one vector list per degree."""
        out = {}
        for deg in range(self.dim + 1):
            keys = self.basis.keys_of_degree(deg)
            if not keys:
                continue
            rows = []
            for op in self.lie_derivatives:
                _, _, block = op.block(deg)
                rows.extend(block)
            if not rows:
                out[deg] = [{k: ONE} for k in keys]
                continue
            red, pivots = rref(rows)
            free = [c for c in range(len(keys)) if c not in pivots]
            vecs = []
            for fc in free:
                v = {keys[fc]: ONE}
                for i, p in enumerate(pivots):
                    if red[i][fc]:
                        v[keys[p]] = -red[i][fc]
                vecs.append(v)
            out[deg] = vecs
        return out

    def invariant_dims(self) -> list[int]:
        return [len(self.invariants.get(k, [])) for k in range(self.dim + 1)]

    # -- cohomology ---------------------------------------------------------

    @cached_property
    def d_kernel_image(self) -> KernelImage:
        return solve_kernel_image(self.d)

    @cached_property
    def cohomology(self) -> dict:
        """degree -> list of representative vectors (cocycles spanning H)."""
        ki = self.d_kernel_image
        reps = {}
        for deg in range(self.dim + 1):
            keys = self.basis.keys_of_degree(deg)
            ker = ki.kernel.get(deg, [])
            img = ki.image.get(deg - 1, [])
            hdim = len(ker) - len(img)
            inv = self.invariants.get(deg, [])
            if len(inv) == hdim and self._subspace_ok(inv, img, keys, deg):
                reps[deg] = inv
                continue
            # generic representatives: kernel vectors independent modulo the image
            chosen = list(img)
            out = []
            rows = [[v.get(k, ZERO) for k in keys] for v in chosen]
            rk = len(rref(rows)[1]) if rows else 0
            for v in ker:
                cand = rows + [[v.get(k, ZERO) for k in keys]]
                if len(rref(cand)[1]) > rk:
                    rows = cand
                    rk += 1
                    out.append(v)
            reps[deg] = out
        return reps

    def _subspace_ok(self, inv, img, keys, deg) -> bool:
        # invariants must be closed and independent from the image
        for v in inv:
            if self.d.apply(v):
                return False
        rows = [[v.get(k, ZERO) for k in keys] for v in img + inv]
        return (len(rref(rows)[1]) if rows else 0) == len(img) + len(inv)

    def cohomology_dims(self) -> list[int]:
        return [len(self.cohomology.get(k, [])) for k in range(self.dim + 1)]

    # -- transport pairing and codifferential --------------------------------

    @cached_property
    def gram(self):
        """Ad-invariant nondegenerate pairing on s used for transport and star."""
        if self._given_transport is not None:
            g = [[Fraction(x) for x in row] for row in self._given_transport]
            if mat_det(g) == 0:
                raise ValueError("supplied transport pairing is degenerate")
            if not pairing_is_invariant(self.lie, g):
                raise ValueError("supplied transport pairing is not ad-invariant")
            return g
        ident = [[ONE if i == j else ZERO for j in range(self.dim)] for i in range(self.dim)]
        if pairing_is_invariant(self.lie, ident):
            return ident
        kf = killing_form(self.lie)
        if mat_det(kf) == 0:
            raise ValueError("no ad-invariant nondegenerate pairing available "
                             "(identity not invariant, Killing form degenerate)")
        # clear the common content so su(3) lands on the trace form
        denoms = [c.denominator for row in kf for c in row if c]
        nums = [abs(c.numerator) for row in kf for c in row if c]
        g0 = gcd(*nums) if len(nums) > 1 else nums[0]
        scale = Fraction(max(denoms), g0) if denoms else ONE
        return [[c * scale for c in row] for row in kf]

    @cached_property
    def _gram_inv(self):
        return mat_inv(self.gram)

    @cached_property
    def star(self) -> GradedMap:
        """Hodge star for the inverse-gram metric on the dual generators."""
        return self.star_for(self._gram_inv)

    def star_for(self, gram_dual) -> GradedMap:
        from itertools import combinations

        def star_mono(mask: int) -> Vec:
            S = mono_indices(mask)
            k = len(S)
            out: Vec = {}
            for U in combinations(range(self.dim), k):
                if k == 0:
                    minor = ONE
                else:
                    minor = mat_det([[gram_dual[u][s] for s in S] for u in U])
                if not minor:
                    continue
                umask = sum(1 << u for u in U)
                comp = self.top_mask ^ umask
                w = wedge_monos(umask, comp)
                out[comp] = out.get(comp, ZERO) + w[0] * minor
            return {m: c for m, c in out.items() if c}

        return GradedMap.from_function(self.basis, self.basis, 0, star_mono)

    def hodge_star(self, a: MultiVector) -> MultiVector:
        out: Vec = {}
        for k in sorted(a.degrees()):
            part = a.degree_part(k)
            vec_add(out, self.star.apply(part.terms))
        return MultiVector(self.dim, out)

    def _codifferential_for(self, transport) -> GradedMap:
        tinv = mat_inv(transport)
        n = self.dim
        # dual bracket [e^i, e^j]* in generator coordinates
        dual_bracket = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc: Vec = {}
                for a in range(n):
                    cia = tinv[i][a]
                    if not cia:
                        continue
                    for b in range(n):
                        cjb = tinv[j][b]
                        if not cjb:
                            continue
                        for cc, fc in self.lie.f(a, b).items():
                            for dd in range(n):
                                tcd = transport[cc][dd]
                                if tcd:
                                    vec_add(acc, {dd: cia * cjb * fc * tcd})
                dual_bracket[i][j] = acc

        def del_mono(mask: int) -> Vec:
            out: Vec = {}
            idxs = mono_indices(mask)
            k = len(idxs)
            for ai in range(k):
                for bi in range(ai + 1, k):
                    i, j = idxs[ai], idxs[bi]
                    rest = mask ^ (1 << i) ^ (1 << j)
                    sgn = -ONE if (ai + bi + 1) & 1 else ONE
                    for dd, c in dual_bracket[i][j].items():
                        w = wedge_monos(1 << dd, rest)
                        if w is None:
                            continue
                        s, m = w
                        vec_add(out, {m: sgn * s * c})
            return out

        return GradedMap.from_function(self.basis, self.basis, -1, del_mono)

    @cached_property
    def _transport_and_sigma(self):
        """Scale the transport so the codifferential is +/- star d star.

        Returns (transport matrix, scale relative to gram, sigma table,
        raw ratio table).  When the raw ratios do not share a common
        magnitude the scale stays 1 and sigma keeps the raw ratios; the
        report makes that visible instead of hiding it.
        """
        raw = self._codifferential_for(self.gram)
        sds = self.star.compose(self.d).compose(self.star)
        ratios = {}
        consistent = True
        for deg in range(self.dim + 1):
            r = None
            for mask in self.basis.keys_of_degree(deg):
                v1 = raw.column(mask)
                v2 = sds.column(mask)
                for key in set(v1) | set(v2):
                    a, b = v1.get(key, ZERO), v2.get(key, ZERO)
                    if b == 0:
                        if a != 0:
                            consistent = False
                        continue
                    rr = a / b
                    if r is None:
                        r = rr
                    elif r != rr:
                        consistent = False
            ratios[deg] = r
        mags = {abs(r) for r in ratios.values() if r is not None}
        if consistent and len(mags) == 1:
            scale = mags.pop()
            transport = [[scale * x for x in row] for row in self.gram]
            sigma = {deg: (None if r is None else r / scale) for deg, r in ratios.items()}
        else:
            scale = ONE
            transport = self.gram
            sigma = ratios
        return transport, scale, sigma, ratios

    @property
    def transport(self):
        return self._transport_and_sigma[0]

    @property
    def transport_scale(self) -> Fraction:
        """Multiple applied to the base gram to normalize the sigma table."""
        return self._transport_and_sigma[1]

    @cached_property
    def codifferential(self) -> GradedMap:
        transport, scale, _, _ = self._transport_and_sigma
        delta = self._codifferential_for(transport)
        if not delta.compose(delta).is_zero():
            raise AssertionError("codifferential does not square to zero")
        return delta

    def codifferential_mv(self, a: MultiVector) -> MultiVector:
        return MultiVector(self.dim, self.codifferential.apply(a.terms))

    @property
    def sigma_table(self) -> dict:
        """Per-degree sign with codifferential = sigma(k) * star d star."""
        return self._transport_and_sigma[2]

    @cached_property
    def laplacian(self) -> GradedMap:
        """D = d del + del d (degree 0)."""
        dl = self.codifferential
        return self.d.compose(dl).add(dl.compose(self.d))

    # -- reductive decomposition ---------------------------------------------

    @cached_property
    def reductive_decomposition(self):
        """(invariants, im d, im del) with the direct-sum property verified."""
        inv = {deg: list(vs) for deg, vs in self.invariants.items()}
        ki_d = solve_kernel_image(self.d)
        ki_del = solve_kernel_image(self.codifferential)
        imd = {}
        for deg, vecs in ki_d.image.items():
            imd[deg + 1] = vecs
        imdel = {}
        for deg, vecs in ki_del.image.items():
            imdel[deg - 1] = vecs
        total_inv = sum(len(v) for v in inv.values())
        total_d = sum(len(v) for v in imd.values())
        total_del = sum(len(v) for v in imdel.values())
        if total_d != total_del:
            raise ValueError("im d and im del have different dimensions; "
                             "decomposition is not direct")
        for deg in range(self.dim + 1):
            keys = self.basis.keys_of_degree(deg)
            vecs = inv.get(deg, []) + imd.get(deg, []) + imdel.get(deg, [])
            if len(vecs) != len(keys):
                raise ValueError("decomposition dimensions do not add up in degree %d" % deg)
            rows = [[v.get(k, ZERO) for k in keys] for v in vecs]
            if len(rref(rows)[1]) != len(keys):
                raise ValueError("decomposition is not direct in degree %d" % deg)
        return inv, imd, imdel

    def reductive_dims(self):
        inv, imd, imdel = self.reductive_decomposition
        return (sum(len(v) for v in inv.values()),
                sum(len(v) for v in imd.values()),
                sum(len(v) for v in imdel.values()))

    # -- reporting ------------------------------------------------------------

    def report(self, with_operators: bool = False) -> dict:
        out = {
            "algebra": self.lie.name or "custom",
            "dim": self.dim,
            "cohomology_dims": self.cohomology_dims(),
            "invariant_dims": self.invariant_dims(),
            "representatives": {
                str(deg): [self._vec_str(v) for v in vs]
                for deg, vs in sorted(self.cohomology.items()) if vs
            },
            "unimodular": is_unimodular(self.lie)[0],
        }
        try:
            _, scale, sigma, _ = self._transport_and_sigma
            out["transport_scale"] = str(scale)
            out["sigma_table"] = {str(k): (None if s is None else str(s))
                                  for k, s in sigma.items()}
            inv, imd, imdel = self.reductive_decomposition
            out["decomposition_dims"] = list(self.reductive_dims())
        except ValueError as exc:
            out["codifferential"] = "unavailable: %s" % exc
        if with_operators:
            out["d"] = self.d.to_json()
        return out

    def _vec_str(self, v: Vec) -> str:
        return str(MultiVector(self.dim, v))


def ce_differential(lie: LieAlgebraData) -> GradedMap:
    return CeComplex(lie).d


def mono_label(mask: int) -> str:
    return mono_str(mask)
