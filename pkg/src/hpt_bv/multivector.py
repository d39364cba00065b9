"""Sparse exterior-algebra elements over the rationals.

A basis monomial e^{i1}...e^{ik} with i1 < ... < ik is encoded as the
bitmask with those bits set; the empty mask is the unit of degree 0.
Coefficients are exact ``fractions.Fraction`` values and zero
coefficients are never stored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

Scalar = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def mono_degree(mask: int) -> int:
    return bin(mask).count("1")


def mono_indices(mask: int) -> list[int]:
    """0-based generator indices of a monomial, ascending."""
    out = []
    i = 0
    m = mask
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def mono_from_indices(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def wedge_monos(a: int, b: int) -> tuple[int, int] | None:
    """(sign, merged mask) for e_a ^ e_b, or None when an index repeats.

    The sign is that of the permutation sorting the concatenation of the
    two ascending index lists.
    """
    if a & b:
        return None
    sign = 1
    m = b
    i = 0
    while m:
        if m & 1:
            if mono_degree(a >> (i + 1)) & 1:
                sign = -sign
        m >>= 1
        i += 1
    return sign, a | b


def mono_str(mask: int, names=None) -> str:
    if mask == 0:
        return "1"
    if names is None:
        return "".join("e%d" % (i + 1) for i in mono_indices(mask))
    return "".join(names[i] for i in mono_indices(mask))


@dataclass
class MultiVector:
    """Sparse element of the exterior algebra on ``dim`` generators."""

    dim: int
    terms: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {m: Fraction(c) for m, c in self.terms.items() if c}

    @classmethod
    def zero(cls, dim: int) -> "MultiVector":
        return cls(dim, {})

    @classmethod
    def unit(cls, dim: int) -> "MultiVector":
        return cls(dim, {0: ONE})

    @classmethod
    def generator(cls, dim: int, i: int) -> "MultiVector":
        """The degree-1 generator e^{i+1} (0-based index i)."""
        if not 0 <= i < dim:
            raise ValueError("generator index out of range")
        return cls(dim, {1 << i: ONE})

    @classmethod
    def monomial(cls, dim: int, mask: int, coeff: Scalar = ONE) -> "MultiVector":
        if mask >> dim:
            raise ValueError("monomial does not fit ambient dimension")
        return cls(dim, {mask: Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mask: int) -> Fraction:
        return self.terms.get(mask, ZERO)

    def degrees(self) -> set[int]:
        return {mono_degree(m) for m in self.terms}

    def degree_part(self, k: int) -> "MultiVector":
        return MultiVector(self.dim, {m: c for m, c in self.terms.items() if mono_degree(m) == k})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, ZERO) + c
            if nc:
                terms[m] = nc
            else:
                terms.pop(m, None)
        return MultiVector(self.dim, terms)

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        return self + (-other)

    def __neg__(self) -> "MultiVector":
        return MultiVector(self.dim, {m: -c for m, c in self.terms.items()})

    def scale(self, c: Scalar) -> "MultiVector":
        c = Fraction(c)
        if not c:
            return MultiVector.zero(self.dim)
        return MultiVector(self.dim, {m: c * v for m, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        terms: dict[int, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                w = wedge_monos(m1, m2)
                if w is None:
                    continue
                s, m = w
                nc = terms.get(m, ZERO) + s * c1 * c2
                if nc:
                    terms[m] = nc
                else:
                    terms.pop(m, None)
        return MultiVector(self.dim, terms)

    def __xor__(self, other):
        return self.wedge(other)

    def _check(self, other: "MultiVector"):
        if self.dim != other.dim:
            raise ValueError("ambient dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __eq__(self, other):
        return isinstance(other, MultiVector) and self.dim == other.dim and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (mono_degree(m), m)):
            c = self.terms[m]
            mono = mono_str(m)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%s*%s" % (c, mono))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    __repr__ = __str__


def all_monomials(dim: int, degree: int | None = None):
    """Masks of all monomials, optionally restricted to one degree."""
    if degree is None:
        return list(range(1 << dim))
    return [mono_from_indices(c) for c in combinations(range(dim), degree)]


_TERM_RE = re.compile(r"^([+-]?\d*(?:/\d+)?)\s*e(\d+)$")


def parse_one_form(text: str, dim: int) -> MultiVector:
    """Parse a linear combination of generators, e.g. ``"e1+e2"`` or ``"2e1-3/2e3"``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty one-form expression")
    s = s.replace("-", "+-")
    out = MultiVector.zero(dim)
    for chunk in s.split("+"):
        if not chunk:
            continue
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError("cannot parse one-form term %r" % chunk)
        coeff_s, idx_s = m.groups()
        if coeff_s in ("", "+"):
            coeff = ONE
        elif coeff_s == "-":
            coeff = -ONE
        else:
            coeff = Fraction(coeff_s)
        i = int(idx_s) - 1
        if not 0 <= i < dim:
            raise ValueError("generator e%s out of range for dimension %d" % (idx_s, dim))
        out = out + MultiVector.generator(dim, i).scale(coeff)
    return out
