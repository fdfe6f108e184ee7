"""Exact arithmetic in a Z2-graded commutative polynomial algebra.

The algebra K[x_1..x_m, th_1..th_n] has m even generators and n odd
(Grassmann) generators with th_j^2 = 0 and th_i*th_j = -th_j*th_i.
Coefficients are exact rationals.

A monomial is a pair (exponents, mask): a tuple of m non-negative even
exponents and a bitmask over the n odd generators.  Odd factors are kept
in ascending index order; the sign of any reordering is absorbed into
the coefficient when a product is formed.  A polynomial maps monomials
to nonzero Fraction coefficients (the zero polynomial has no terms).

Variables are addressed by a single index: 0..m-1 are the even
generators, m..m+n-1 the odd ones.

Odd partial derivatives act from the left:  d/dth (th*f) = f for even f,
and the graded Leibniz rule d(ab) = d(a)b + (-1)^{|d||a|} a d(b) holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg

Monomial = Tuple[Tuple[int, ...], int]

EVEN = 0
ODD = 1

_EVEN_DEFAULTS = ("x", "y", "z")


def _default_names(m: int, n: int) -> Tuple[str, ...]:
    if m <= 3:
        evens = list(_EVEN_DEFAULTS[:m])
    else:
        evens = [f"x{i + 1}" for i in range(m)]
    if n <= 1:
        odds = ["th"][:n]
    else:
        odds = [f"th{j + 1}" for j in range(n)]
    return tuple(evens + odds)


@dataclass(frozen=True)
class AlgebraSignature:
    """Shape of the algebra: m even and n odd generators, with names."""

    m: int
    n: int
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("variable counts must be non-negative")
        if not self.names:
            object.__setattr__(self, "names", _default_names(self.m, self.n))
        if len(self.names) != self.m + self.n:
            raise ValueError("need one name per variable")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be distinct")

    @property
    def nvars(self) -> int:
        return self.m + self.n

    def parity(self, v: int) -> int:
        """Parity of variable v (and of the derivation d/dv)."""
        if not 0 <= v < self.nvars:
            raise ValueError(f"unknown variable index {v}")
        return EVEN if v < self.m else ODD

    def name(self, v: int) -> str:
        return self.names[v]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None


def mono_degree(mono: Monomial) -> int:
    """Total degree, counting each odd generator once."""
    exps, mask = mono
    return sum(exps) + bin(mask).count("1")


def mono_parity(mono: Monomial) -> int:
    return bin(mono[1]).count("1") & 1


def mono_mul(a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
    """Product of monomials: (sign, monomial), or None when it vanishes.

    The sign comes from moving b's odd factors into ascending position
    past a's odd factors (each odd-odd transposition contributes -1).
    """
    ea, ma = a
    eb, mb = b
    if ma & mb:
        return None
    # count pairs (i in ma, j in mb) with i > j: these are the crossings
    sign = 1
    rest = ma
    while rest:
        low = rest & -rest
        i = low.bit_length() - 1
        if mb & ((1 << i) - 1):
            if bin(mb & ((1 << i) - 1)).count("1") & 1:
                sign = -sign
        rest ^= low
    exps = tuple(p + q for p, q in zip(ea, eb))
    return sign, (exps, ma | mb)


def _sort_key(mono: Monomial):
    exps, mask = mono
    return (-mono_degree(mono), tuple(-e for e in exps), mask)


class GradedPolynomial:
    """Sparse polynomial with Fraction coefficients in a graded algebra.

    Values are immutable by convention: no method mutates self, and the
    term dict must not be modified after construction.
    """

    __slots__ = ("sig", "terms")

    def __init__(self, sig: AlgebraSignature, terms: Dict[Monomial, Fraction]):
        self.sig = sig
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(sig: AlgebraSignature) -> "GradedPolynomial":
        return GradedPolynomial(sig, {})

    @staticmethod
    def constant(sig: AlgebraSignature, c) -> "GradedPolynomial":
        c = Fraction(c)
        if c == 0:
            return GradedPolynomial.zero(sig)
        return GradedPolynomial(sig, {((0,) * sig.m, 0): c})

    @staticmethod
    def one(sig: AlgebraSignature) -> "GradedPolynomial":
        return GradedPolynomial.constant(sig, 1)

    @staticmethod
    def variable(sig: AlgebraSignature, v: int) -> "GradedPolynomial":
        if sig.parity(v) == EVEN:
            exps = tuple(1 if i == v else 0 for i in range(sig.m))
            return GradedPolynomial(sig, {(exps, 0): Fraction(1)})
        mask = 1 << (v - sig.m)
        return GradedPolynomial(sig, {((0,) * sig.m, mask): Fraction(1)})

    @staticmethod
    def from_name(sig: AlgebraSignature, name: str) -> "GradedPolynomial":
        return GradedPolynomial.variable(sig, sig.index(name))

    # -- ring structure ----------------------------------------------------

    def _check(self, other: "GradedPolynomial") -> None:
        if self.sig != other.sig:
            raise ValueError("signature mismatch")

    def __add__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return GradedPolynomial(self.sig, out)

    def __sub__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) - c
        return GradedPolynomial(self.sig, out)

    def __neg__(self) -> "GradedPolynomial":
        return GradedPolynomial(self.sig, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "GradedPolynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                prod = mono_mul(ma, mb)
                if prod is None:
                    continue
                sign, mono = prod
                out[mono] = out.get(mono, Fraction(0)) + sign * ca * cb
        return GradedPolynomial(self.sig, out)

    def __rmul__(self, other) -> "GradedPolynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "GradedPolynomial":
        c = Fraction(c)
        return GradedPolynomial(self.sig, {m: c * x for m, x in self.terms.items()})

    def __pow__(self, k: int) -> "GradedPolynomial":
        if k < 0:
            raise ValueError("negative power")
        out = GradedPolynomial.one(self.sig)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GradedPolynomial.constant(self.sig, other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    # -- grading -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree (odd generators count 1); zero polynomial gives -1."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def parity(self) -> Optional[int]:
        """EVEN or ODD if all terms agree mod 2, else None (inhomogeneous)."""
        ps = {mono_parity(m) for m in self.terms}
        if len(ps) == 1:
            return ps.pop()
        if not ps:
            return EVEN
        return None

    def parity_part(self, p: int) -> "GradedPolynomial":
        return GradedPolynomial(
            self.sig, {m: c for m, c in self.terms.items() if mono_parity(m) == p}
        )

    def degree_part(self, e: int) -> "GradedPolynomial":
        return GradedPolynomial(
            self.sig, {m: c for m, c in self.terms.items() if mono_degree(m) == e}
        )

    def degrees(self) -> List[int]:
        return sorted({mono_degree(m) for m in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    # -- derivations and substitution ---------------------------------------

    def partial(self, v: int) -> "GradedPolynomial":
        """Left partial derivative with respect to variable v."""
        p = self.sig.parity(v)
        out: Dict[Monomial, Fraction] = {}
        if p == EVEN:
            for (exps, mask), c in self.terms.items():
                e = exps[v]
                if e == 0:
                    continue
                ne = exps[:v] + (e - 1,) + exps[v + 1:]
                mono = (ne, mask)
                out[mono] = out.get(mono, Fraction(0)) + e * c
        else:
            j = v - self.sig.m
            bit = 1 << j
            for (exps, mask), c in self.terms.items():
                if not mask & bit:
                    continue
                # moving d/dth_j past the odd factors below index j flips the sign
                below = bin(mask & (bit - 1)).count("1")
                sign = -1 if below & 1 else 1
                mono = (exps, mask ^ bit)
                out[mono] = out.get(mono, Fraction(0)) + sign * c
        return GradedPolynomial(self.sig, out)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def substitute(self, images: Sequence["GradedPolynomial"]) -> "GradedPolynomial":
        """Algebra morphism sending variable i to images[i]."""
        if len(images) != self.sig.nvars:
            raise ValueError("need an image for every variable")
        sig = images[0].sig if images else self.sig
        out = GradedPolynomial.zero(sig)
        for (exps, mask), c in self.terms.items():
            term = GradedPolynomial.constant(sig, c)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * images[i]
            j = 0
            rest = mask
            while rest:
                if rest & 1:
                    term = term * images[self.sig.m + j]
                rest >>= 1
                j += 1
            out = out + term
        return out

    def __str__(self) -> str:
        return poly_str(self)

    def __repr__(self) -> str:
        return f"GradedPolynomial({poly_str(self)!r})"


def poly_str(f: GradedPolynomial) -> str:
    """Canonical ASCII form, e.g. '3/4*x^2*th - x'; reparses to the same value."""
    if not f.terms:
        return "0"
    sig = f.sig
    pieces = []
    for mono in sorted(f.terms, key=_sort_key):
        c = f.terms[mono]
        exps, mask = mono
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(sig.name(i))
            elif e > 1:
                factors.append(f"{sig.name(i)}^{e}")
        for j in range(sig.n):
            if mask >> j & 1:
                factors.append(sig.name(sig.m + j))
        body = "*".join(factors)
        coeff = abs(c)
        if body and coeff == 1:
            text = body
        elif body:
            text = f"{coeff}*{body}"
        else:
            text = str(coeff)
        pieces.append(("- " if c < 0 else "+ ") + text)
    head = pieces[0][2:] if pieces[0].startswith("+ ") else "-" + pieces[0][2:]
    return " ".join([head] + pieces[1:])


def substitute_linear(
    f: GradedPolynomial,
    even_matrix: Optional[Sequence[Sequence[Fraction]]] = None,
    even_shift: Optional[Sequence[Fraction]] = None,
    odd_matrix: Optional[Sequence[Sequence[Fraction]]] = None,
) -> GradedPolynomial:
    """Apply the algebra automorphism x_i -> sum_j A[i][j] x_j + B[i],
    th_a -> sum_b C[a][b] th_b.

    The linear parts must be invertible so the map is an automorphism.
    """
    sig = f.sig
    A = [[Fraction(x) for x in row] for row in even_matrix] if even_matrix is not None else None
    B = [Fraction(x) for x in even_shift] if even_shift is not None else [Fraction(0)] * sig.m
    C = [[Fraction(x) for x in row] for row in odd_matrix] if odd_matrix is not None else None
    if A is not None and (len(A) != sig.m or any(len(r) != sig.m for r in A)):
        raise ValueError("even matrix has wrong shape")
    if C is not None and (len(C) != sig.n or any(len(r) != sig.n for r in C)):
        raise ValueError("odd matrix has wrong shape")
    if len(B) != sig.m:
        raise ValueError("even shift has wrong length")
    if A is not None and linalg.det(A) == 0:
        raise ValueError("even part is not invertible")
    if C is not None and linalg.det(C) == 0:
        raise ValueError("odd part is not invertible")

    images: List[GradedPolynomial] = []
    for i in range(sig.m):
        img = GradedPolynomial.constant(sig, B[i])
        for j in range(sig.m):
            a = A[i][j] if A is not None else Fraction(i == j)
            if a:
                img = img + GradedPolynomial.variable(sig, j).scale(a)
        images.append(img)
    for a_idx in range(sig.n):
        img = GradedPolynomial.zero(sig)
        for b_idx in range(sig.n):
            c = C[a_idx][b_idx] if C is not None else Fraction(a_idx == b_idx)
            if c:
                img = img + GradedPolynomial.variable(sig, sig.m + b_idx).scale(c)
        images.append(img)
    return f.substitute(images)


def _univariate_coeffs(f: GradedPolynomial) -> Tuple[Optional[int], List[Fraction]]:
    """Return (variable index, dense coefficient list) for a 1-even-variable poly."""
    var = None
    for (exps, mask) in f.terms:
        if mask:
            raise ValueError("polynomial is not purely even")
        for i, e in enumerate(exps):
            if e > 0:
                if var is None:
                    var = i
                elif var != i:
                    raise ValueError("polynomial is multivariate")
    if var is None:
        d = f.terms.get(((0,) * f.sig.m, 0), Fraction(0))
        return None, [d] if d else []
    deg = max(exps[var] for (exps, _) in f.terms)
    coeffs = [Fraction(0)] * (deg + 1)
    for (exps, _), c in f.terms.items():
        coeffs[exps[var]] = c
    return var, coeffs


def gcd_univariate(a: GradedPolynomial, b: GradedPolynomial) -> GradedPolynomial:
    """Monic gcd of two polynomials in one (shared) even variable."""
    if a.sig != b.sig:
        raise ValueError("signature mismatch")
    va, ca = _univariate_coeffs(a)
    vb, cb = _univariate_coeffs(b)
    if va is not None and vb is not None and va != vb:
        raise ValueError("polynomials use different variables")
    var = va if va is not None else vb

    def trim(c: List[Fraction]) -> List[Fraction]:
        while c and c[-1] == 0:
            c.pop()
        return c

    ca, cb = trim(list(ca)), trim(list(cb))
    while cb:
        # remainder of ca mod cb
        r = list(ca)
        while len(r) >= len(cb) and r:
            f = r[-1] / cb[-1]
            shift = len(r) - len(cb)
            for i, x in enumerate(cb):
                r[i + shift] -= f * x
            trim(r)
        ca, cb = cb, r
    if not ca:
        return GradedPolynomial.zero(a.sig)
    lead = ca[-1]
    ca = [x / lead for x in ca]
    if var is None:
        return GradedPolynomial.one(a.sig)
    out: Dict[Monomial, Fraction] = {}
    for e, c in enumerate(ca):
        if c:
            exps = tuple(e if i == var else 0 for i in range(a.sig.m))
            out[(exps, 0)] = c
    return GradedPolynomial(a.sig, out)
