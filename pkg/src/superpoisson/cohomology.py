"""Brute-force bigraded Poisson cohomology.

Cochains are graded by (exterior size n, total Z2 parity, internal
degree e), where the internal degree is the total polynomial degree of
the coefficient (odd generators count 1) and the total parity is
exterior degree plus coefficient parity mod 2.  Each slice is a finite
dimensional vector space with a deterministic monomial basis, and the
coboundary D = {psi, .} of an internally homogeneous single-size
codifferential maps slices to slices: size goes up by k-1 and internal
degree by d-1, where psi has k factors and coefficient degree d.

For codifferentials mixing sizes or internal degrees D is only
filtration-compatible.  Those are handled on finite truncations with
coefficient degree <= e_max: cocycles are exact (images are computed
symbolically, untruncated), coboundaries are D-images of truncated
primitives that land in the slice exactly, and every slice is reported
together with a convergence flag comparing the e_max and e_max-1
truncations.

The `deformation_convention` switch drops coboundaries sourced in
0-cochains when the target is odd, where the usual interpretation of
coboundaries as infinitesimal automorphisms breaks down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import EVEN, ODD, AlgebraSignature, GradedPolynomial, Monomial, mono_degree, mono_parity
from .linalg import IncrementalEchelon, Vector, nullspace, rank
from .multiderivation import (
    ExtMonomial,
    MultiDerivation,
    ext_parity,
    ext_size,
    modified_bracket,
)

BasisElement = Tuple[ExtMonomial, Monomial]


@dataclass(frozen=True)
class SliceSpec:
    """One finite-dimensional block of the cochain complex."""

    sig: AlgebraSignature
    n: int
    parity: int
    e: int

    def __post_init__(self):
        if self.n < 0 or self.e < 0:
            raise ValueError("invalid slice spec")
        if self.parity not in (EVEN, ODD):
            raise ValueError("parity must be 0 or 1")


def _compositions(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """Weak compositions of `total` into `parts` slots, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def exterior_monomials(sig: AlgebraSignature, n: int) -> List[ExtMonomial]:
    out = []
    for mask in range(1 << sig.m):
        s = bin(mask).count("1")
        if s > n:
            continue
        for odd in _compositions(n - s, sig.n):
            out.append((mask, odd))
    return sorted(out, key=lambda e: (e[0], e[1]))


def coefficient_monomials(sig: AlgebraSignature, e: int) -> List[Monomial]:
    out = []
    for mask in range(1 << sig.n):
        deg_left = e - bin(mask).count("1")
        if deg_left < 0:
            continue
        for exps in _compositions(deg_left, sig.m):
            out.append((exps, mask))
    return sorted(out, key=lambda m: (m[1], m[0]))


def slice_basis(spec: SliceSpec) -> List[BasisElement]:
    """Deterministic monomial basis of the (n, parity, e) cochain slice."""
    out = []
    for ext in exterior_monomials(spec.sig, spec.n):
        for mono in coefficient_monomials(spec.sig, spec.e):
            total = (spec.n - 1 + ext_parity(ext) + mono_parity(mono)) & 1
            if total == spec.parity:
                out.append((ext, mono))
    return out


def basis_element(sig: AlgebraSignature, elem: BasisElement) -> MultiDerivation:
    ext, mono = elem
    return MultiDerivation(sig, {ext: GradedPolynomial(sig, {mono: Fraction(1)})})


def from_vector(sig: AlgebraSignature, basis: Sequence[BasisElement], vec: Sequence[Fraction]) -> MultiDerivation:
    terms: Dict[ExtMonomial, GradedPolynomial] = {}
    polys: Dict[ExtMonomial, Dict[Monomial, Fraction]] = {}
    for (ext, mono), c in zip(basis, vec):
        if c:
            polys.setdefault(ext, {})[mono] = c
    for ext, d in polys.items():
        terms[ext] = GradedPolynomial(sig, d)
    return MultiDerivation(sig, terms)


def _homogeneity(psi: MultiDerivation) -> Tuple[int, int, int]:
    """(size, coefficient degree, total parity) of an internally homogeneous psi."""
    sizes = psi.exterior_sizes()
    if len(sizes) != 1:
        raise ValueError("codifferential mixes exterior degrees; use the filtered table")
    degs = set()
    for ext, poly in psi.terms.items():
        degs.update(mono_degree(m) for m in poly.terms)
    if len(degs) != 1:
        raise ValueError("codifferential is not internally homogeneous; use the filtered table")
    par = psi.total_parity()
    if par is None:
        raise ValueError("codifferential is not parity homogeneous")
    return sizes[0], degs.pop(), par


def d_matrix(psi: MultiDerivation, spec: SliceSpec) -> Tuple[List[List[Fraction]], SliceSpec]:
    """Matrix of D = {psi, .} from the given slice, with its target spec.

    Rows index the target slice basis, columns the source basis.
    """
    k, d, par = _homogeneity(psi)
    target = SliceSpec(spec.sig, spec.n + k - 1, (spec.parity + par) & 1, spec.e + d - 1)
    src = slice_basis(spec)
    tgt = slice_basis(target)
    index = {elem: i for i, elem in enumerate(tgt)}
    mat = [[Fraction(0)] * len(src) for _ in range(len(tgt))]
    for c, elem in enumerate(src):
        image = modified_bracket(psi, basis_element(spec.sig, elem))
        for ext, mono, coeff in image.flat_terms():
            r = index.get((ext, mono))
            if r is None:
                raise ValueError("image escapes the target slice; psi is not homogeneous")
            mat[r][c] = coeff
    return mat, target


@dataclass
class SliceCohomology:
    spec: SliceSpec
    dim_space: int
    dim_Z: int
    dim_B: int
    representatives: List[MultiDerivation]
    converged: bool = True

    @property
    def dim_H(self) -> int:
        return self.dim_Z - self.dim_B


def _pick_representatives(
    sig: AlgebraSignature,
    basis: Sequence[BasisElement],
    boundary_vecs: Sequence[Vector],
    cocycle_vecs: Sequence[Vector],
) -> List[MultiDerivation]:
    ech = IncrementalEchelon()
    for v in boundary_vecs:
        ech.add(v)
    reps = []
    for v in cocycle_vecs:
        if ech.add(v):
            reps.append(from_vector(sig, basis, v))
    return reps


def slice_cohomology(
    psi: MultiDerivation, spec: SliceSpec, deformation_convention: bool = False
) -> SliceCohomology:
    """Exact kernel/image dimensions and representatives on one slice."""
    k, d, _ = _homogeneity(psi)
    src = slice_basis(spec)
    out_mat, _ = d_matrix(psi, spec)
    cocycles = nullspace(out_mat, len(src))

    boundary_vecs: List[Vector] = []
    n_in = spec.n - k + 1
    e_in = spec.e - d + 1
    drop = deformation_convention and spec.parity == ODD and n_in == 0
    if n_in >= 0 and e_in >= 0 and not drop:
        par_in = (spec.parity + (psi.total_parity() or 0)) & 1
        spec_in = SliceSpec(spec.sig, n_in, par_in, e_in)
        in_mat, tgt = d_matrix(psi, spec_in)
        cols = len(slice_basis(spec_in))
        boundary_vecs = [[in_mat[r][c] for r in range(len(in_mat))] for c in range(cols)]
    reps = _pick_representatives(spec.sig, src, boundary_vecs, cocycles)
    dim_B = rank(boundary_vecs) if boundary_vecs else 0
    return SliceCohomology(spec, len(src), len(cocycles), dim_B, reps)


@dataclass
class CohomologyTable:
    sig: AlgebraSignature
    entries: Dict[Tuple[int, int, int], SliceCohomology] = field(default_factory=dict)

    def dims(self, n: int, parity: int, e: int) -> Optional[int]:
        entry = self.entries.get((n, parity, e))
        return entry.dim_H if entry is not None else None

    def total_dim(self, n: int, parity: int) -> int:
        return sum(v.dim_H for (nn, p, _), v in self.entries.items() if nn == n and p == parity)


def cohomology_table(
    psi: MultiDerivation,
    n_max: int,
    e_max: int,
    parity: Optional[int] = None,
    deformation_convention: bool = False,
) -> CohomologyTable:
    """Cohomology dimensions for all slices n <= n_max, e <= e_max.

    Dispatches to exact per-slice computation when psi preserves the
    bigrading, and to the filtered truncation otherwise.
    """
    if n_max < 0 or e_max < 0:
        raise ValueError("bounds must be non-negative")
    parities = (EVEN, ODD) if parity is None else (parity,)
    try:
        _homogeneity(psi)
        homogeneous = True
    except ValueError:
        homogeneous = False
    table = CohomologyTable(psi.sig)
    if homogeneous:
        for n in range(n_max + 1):
            for p in parities:
                for e in range(e_max + 1):
                    spec = SliceSpec(psi.sig, n, p, e)
                    table.entries[(n, p, e)] = slice_cohomology(psi, spec, deformation_convention)
        return table
    fine = _filtered_dims(psi, n_max, e_max, parities, deformation_convention)
    coarse = _filtered_dims(psi, n_max, e_max - 1, parities, deformation_convention) if e_max > 0 else {}
    for key, entry in fine.items():
        n, p, e = key
        prev = coarse.get(key)
        entry.converged = prev is not None and (prev.dim_Z, prev.dim_B) == (entry.dim_Z, entry.dim_B)
        table.entries[key] = entry
    return table


def _filtered_dims(
    psi: MultiDerivation,
    n_max: int,
    e_cut: int,
    parities: Sequence[int],
    deformation_convention: bool,
) -> Dict[Tuple[int, int, int], SliceCohomology]:
    """One truncation pass of the filtered computation.

    A cochain of the truncation is a sum of slice elements with n up to
    a window bound and coefficient degree <= e_cut.  Cocycle spaces use
    the exact symbolic image; the coboundary space of a slice is the
    intersection of D(truncation) with that slice, so a coboundary's
    primitive may mix several slices as long as the other image
    components cancel exactly.
    """
    sig = psi.sig
    par_psi = psi.total_parity()
    if par_psi != ODD:
        raise ValueError("filtered table needs an odd codifferential")
    max_k = max(psi.exterior_sizes())
    n_window = n_max + max_k

    # source data per parity: list of (slice key, basis element, image multiderivation)
    sources: Dict[int, List[Tuple[Tuple[int, int, int], BasisElement, MultiDerivation]]] = {
        EVEN: [],
        ODD: [],
    }
    for n in range(n_window + 1):
        for p in (EVEN, ODD):
            for e in range(e_cut + 1):
                for elem in slice_basis(SliceSpec(sig, n, p, e)):
                    img = modified_bracket(psi, basis_element(sig, elem))
                    sources[p].append(((n, p, e), elem, img))

    out: Dict[Tuple[int, int, int], SliceCohomology] = {}
    image_cache: Dict[Tuple[int, bool], Tuple[List[Dict], List]] = {}

    def image_vectors(src_parity: int, drop_zero_cochains: bool):
        key = (src_parity, drop_zero_cochains)
        if key not in image_cache:
            vecs = []
            for (n, p, e), elem, img in sources[src_parity]:
                if drop_zero_cochains and n == 0:
                    continue
                if img.is_zero():
                    continue
                vecs.append({(ext, mono): c for ext, mono, c in img.flat_terms()})
            coords = sorted({c for v in vecs for c in v}, key=lambda t: (ext_size(t[0]), t[0], t[1]))
            index = {c: i for i, c in enumerate(coords)}
            dense = []
            ech = IncrementalEchelon()
            for v in vecs:
                row = [Fraction(0)] * len(coords)
                for c, val in v.items():
                    row[index[c]] = val
                if ech.add(row):
                    dense.append(ech.rows[-1])
            image_cache[key] = (dense, coords)
        return image_cache[key]

    for n in range(n_max + 1):
        for p in parities:
            for e in range(e_cut + 1):
                spec = SliceSpec(sig, n, p, e)
                basis = slice_basis(spec)
                if not basis:
                    out[(n, p, e)] = SliceCohomology(spec, 0, 0, 0, [])
                    continue
                # exact cocycles in this slice
                images = [modified_bracket(psi, basis_element(sig, b)) for b in basis]
                coords = sorted(
                    {(ext, mono) for img in images for ext, mono, _ in img.flat_terms()},
                    key=lambda t: (ext_size(t[0]), t[0], t[1]),
                )
                cindex = {c: i for i, c in enumerate(coords)}
                mat = [[Fraction(0)] * len(basis) for _ in coords]
                for col, img in enumerate(images):
                    for ext, mono, val in img.flat_terms():
                        mat[cindex[(ext, mono)]][col] = val
                cocycles = nullspace(mat, len(basis))

                # coboundaries landing exactly in this slice
                drop = deformation_convention and p == ODD
                img_basis, img_coords = image_vectors((p + 1) & 1, drop)
                in_slice = set(
                    i
                    for i, (ext, mono) in enumerate(img_coords)
                    if ext_size(ext) == n
                    and mono_degree(mono) == e
                    and ((ext_size(ext) - 1 + ext_parity(ext) + mono_parity(mono)) & 1) == p
                )
                outside = [i for i in range(len(img_coords)) if i not in in_slice]
                # combos of image vectors vanishing outside the slice
                proj = [[v[i] for v in img_basis] for i in outside]
                combos = nullspace(proj, len(img_basis))
                slice_pos = {c: j for j, c in enumerate(basis)}
                boundary_vecs = []
                for combo in combos:
                    vec = [Fraction(0)] * len(basis)
                    for ci, coeff in enumerate(combo):
                        if coeff == 0:
                            continue
                        v = img_basis[ci]
                        for i in in_slice:
                            ext, mono = img_coords[i]
                            vec[slice_pos[(ext, mono)]] += coeff * v[i]
                    boundary_vecs.append(vec)
                dim_B = rank(boundary_vecs) if boundary_vecs else 0
                reps = _pick_representatives(sig, basis, boundary_vecs, cocycles)
                out[(n, p, e)] = SliceCohomology(spec, len(basis), len(cocycles), dim_B, reps)
    return out
