"""Minimal projective resolutions, Ext groups, and universal extensions.

Resolutions are minimal: each step is the projective cover of the previous
kernel, so differentials land in radicals and Ext dimensions read off
canonically.  Ext classes are represented by cocycles P_n -> N reduced
against the coboundary space with a fixed RREF-canonical complement, which
makes class equality a representation equality for a fixed resolution.

The module also houses an independent brute-force Ext^1 oracle over finite
fields: extensions 0 -> N -> E -> M -> 0 with fixed identifications are
exactly the block lower-triangular action tables

    act_E(b) = [[act_N(b), 0], [C(b), act_M(b)]]

whose off-diagonal blocks satisfy C(ab) = C(a) act_N(b) + act_M(a) C(b),
counted modulo the blocks of the form h act_N(a) - act_M(a) h.  The oracle
enumerates all block assignments exhaustively and never touches the
resolution machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .linalg import Matrix, Subspace
from .modules import (
    ModuleMap,
    RightModule,
    cokernel,
    direct_sum,
    hom_basis,
    identity_map,
    kernel,
    lift_through_surjection,
    projective_cover,
    structural_series,
    zero_map,
    zero_module,
)


@dataclass(frozen=True)
class Resolution:
    """P_n -> ... -> P_0 -> M -> 0 (exact), with minimal P_i."""

    module: RightModule
    terms: tuple[RightModule, ...]          # P_0, ..., P_n
    differentials: tuple[ModuleMap, ...]    # d_i: P_i -> P_{i-1} for i >= 1
    augmentation: ModuleMap                 # P_0 -> M

    def term(self, i: int) -> RightModule:
        if i < len(self.terms):
            return self.terms[i]
        return zero_module(self.module.algebra)

    def differential(self, i: int) -> ModuleMap:
        """d_i: P_i -> P_{i-1} (zero map once the resolution has stopped)."""
        if 1 <= i <= len(self.differentials):
            return self.differentials[i - 1]
        return zero_map(self.term(i), self.term(i - 1))


@lru_cache(maxsize=None)
def projective_resolution(m: RightModule, length: int) -> Resolution:
    """Minimal projective resolution out to homological degree ``length``."""
    cov = projective_cover(m)
    terms = [cov.projective]
    diffs: list[ModuleMap] = []
    aug = cov.cover_map
    prev_cover = cov
    current = m
    for i in range(1, length + 1):
        ker_mod, ker_incl = kernel(prev_cover.cover_map)
        if ker_mod.dim == 0:
            break
        cov_i = projective_cover(ker_mod)
        terms.append(cov_i.projective)
        diffs.append(cov_i.cover_map.then(ker_incl))
        prev_cover = cov_i
        current = ker_mod
    return Resolution(module=m, terms=tuple(terms), differentials=tuple(diffs), augmentation=aug)


@dataclass(frozen=True)
class ExtClass:
    """Degree-n class represented by a reduced cocycle P_n -> target."""

    degree: int
    source: RightModule
    target: RightModule
    cocycle: ModuleMap  # P_degree -> target, reduced modulo coboundaries


@dataclass(frozen=True)
class ExtSpace:
    degree: int
    source: RightModule
    target: RightModule
    dim: int
    classes: tuple[ExtClass, ...]
    cocycle_space: Subspace     # in flattened Hom(P_n, target) coordinates
    coboundary_space: Subspace


def _flatten(f: ModuleMap) -> tuple:
    return f.mat.entries


def _unflatten(flat, p: RightModule, n: RightModule) -> ModuleMap:
    F = p.algebra.field
    return ModuleMap(p, n, Matrix(F, p.dim, n.dim, tuple(flat)))


def ext(m: RightModule, n: RightModule, degree: int) -> ExtSpace:
    """Ext^degree(m, n) as cohomology of Hom(P_*, n).

    Degree 0 agrees with the hom space (checked in tests); classes there are
    represented by their factorizations through the augmentation.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    F = m.algebra.field
    res = projective_resolution(m, degree + 1)
    p_n = res.term(degree)
    if p_n.dim == 0 or n.dim == 0:
        zero_sub = Subspace.zero(F, p_n.dim * n.dim)
        return ExtSpace(degree, m, n, 0, (), zero_sub, zero_sub)
    homs = hom_basis(p_n, n)
    ambient = p_n.dim * n.dim

    d_in = res.differential(degree + 1)  # P_{n+1} -> P_n
    cocycle_vecs = []
    for h in homs:
        if d_in.source.dim == 0 or d_in.then(h).is_zero:
            cocycle_vecs.append(_flatten(h))
    cocycles = Subspace.span(F, cocycle_vecs, ambient) if cocycle_vecs else Subspace.zero(F, ambient)

    cob_vecs = []
    if degree >= 1:
        d_here = res.differential(degree)  # P_n -> P_{n-1}
        for g in hom_basis(res.term(degree - 1), n):
            cob_vecs.append(_flatten(d_here.then(g)))
    coboundaries = Subspace.span(F, cob_vecs, ambient) if cob_vecs else Subspace.zero(F, ambient)

    # canonical complement: reduce each cocycle basis vector mod coboundaries,
    # take the RREF of the reductions, lift back through the section
    classes: list[ExtClass] = []
    if cocycles.dim > 0:
        proj, sec = coboundaries.quotient_maps()
        reduced = [proj.apply_row(cocycles.basis.row(i)) for i in range(cocycles.dim)]
        red_space = Subspace.span(F, reduced, proj.cols)
        for i in range(red_space.dim):
            lifted = sec.apply_row(red_space.basis.row(i))
            classes.append(ExtClass(degree, m, n, _unflatten(lifted, p_n, n)))
    dim = len(classes)
    return ExtSpace(degree, m, n, dim, tuple(classes), cocycles, coboundaries)


def ext_dim(m: RightModule, n: RightModule, degree: int) -> int:
    if degree == 0:
        return len(hom_basis(m, n))
    return ext(m, n, degree).dim


def reduce_cocycle(space: ExtSpace, f: ModuleMap) -> tuple:
    """Coordinates of the class of cocycle ``f`` in the ExtSpace basis."""
    F = f.source.algebra.field
    flat = _flatten(f)
    proj, _ = space.coboundary_space.quotient_maps()
    reduced = proj.apply_row(flat)
    if space.dim == 0:
        assert all(x == F.zero for x in reduced), "nonzero class in a zero Ext space"
        return ()
    basis_rows = [proj.apply_row(_flatten(c.cocycle)) for c in space.classes]
    B = Matrix.from_rows(F, basis_rows, cols=proj.cols)
    sol = B.solve_left(Matrix.from_rows(F, [reduced], cols=proj.cols))
    assert sol is not None, "cocycle is not a class in this Ext space"
    return sol.row(0)


@dataclass(frozen=True)
class ShortExactSequence:
    sub: RightModule
    middle: RightModule
    quotient: RightModule
    inclusion: ModuleMap   # sub -> middle
    projection: ModuleMap  # middle -> quotient

    def verify(self) -> bool:
        return (
            self.inclusion.is_injective()
            and self.projection.is_surjective()
            and self.inclusion.then(self.projection).is_zero
            and self.sub.dim + self.quotient.dim == self.middle.dim
        )


def _cocycle_to_kernel_map(res: Resolution, f: ModuleMap) -> ModuleMap:
    """Factor a degree-1 cocycle P_1 -> N through P_1 ->> K = ker(aug)."""
    ker_mod, ker_incl = kernel(res.augmentation)
    d1 = res.differential(1)
    # d1 = (P_1 ->> K) ; incl: recover the epi onto K
    epi_mat = ker_incl.mat.solve_left(d1.mat)
    assert epi_mat is not None
    epi = ModuleMap(d1.source, ker_mod, epi_mat)
    fbar_mat = epi.mat.solve_right(f.mat)
    assert fbar_mat is not None, "cocycle does not factor through the kernel"
    return ModuleMap(ker_mod, f.target, fbar_mat)


def _pushout_extension(res: Resolution, fbar: ModuleMap, ker_incl: ModuleMap) -> ShortExactSequence:
    """Pushout of K -> P_0 along fbar: K -> T, giving 0 -> T -> E -> M -> 0."""
    m = res.module
    T = fbar.target
    p0 = res.term(0)
    A = m.algebra
    F = A.field
    big, injs, _ = direct_sum([T, p0])
    glue = ModuleMap(
        fbar.source,
        big,
        fbar.mat.hstack(-ker_incl.mat),
    )
    e_mod, coker_proj = cokernel(glue)
    incl = injs[0].then(coker_proj)
    # E -> M: descend (t, p) |-> aug(p); solve through the cokernel projection
    lifted = coker_proj.mat.solve_right(
        Matrix.zero(F, T.dim, m.dim).stack(res.augmentation.mat)
    )
    assert lifted is not None
    onto = ModuleMap(e_mod, m, lifted)
    ses = ShortExactSequence(sub=T, middle=e_mod, quotient=m, inclusion=incl, projection=onto)
    assert ses.verify(), "pushout did not produce a short exact sequence"
    return ses


def realize_ext1(cls: ExtClass) -> ShortExactSequence:
    """Short exact sequence with connecting class equal to ``cls``."""
    if cls.degree != 1:
        raise ValueError("only degree-1 classes are realizable as extensions")
    res = projective_resolution(cls.source, 2)
    ker_mod, ker_incl = kernel(res.augmentation)
    fbar = _cocycle_to_kernel_map(res, cls.cocycle)
    return _pushout_extension(res, fbar, ker_incl)


def extract_ext1(ses: ShortExactSequence) -> ExtClass:
    """Connecting class of 0 -> N -> E -> M -> 0 in Ext^1(M, N)."""
    m, n = ses.quotient, ses.sub
    res = projective_resolution(m, 2)
    space = ext(m, n, 1)
    # lift the augmentation through the projection (projectivity of P_0)
    l0 = lift_through_surjection(res.augmentation, ses.projection)
    g = res.differential(1).then(l0)  # lands in the image of the inclusion
    gprime_mat = ses.inclusion.mat.solve_left(g.mat)
    assert gprime_mat is not None, "connecting map left the submodule"
    cocycle = ModuleMap(res.term(1), n, gprime_mat)
    coords = reduce_cocycle(space, cocycle)
    return make_class(space, coords)


def make_class(space: ExtSpace, coords) -> ExtClass:
    F = space.source.algebra.field
    res = projective_resolution(space.source, space.degree + 1)
    p_n = res.term(space.degree)
    mat = Matrix.zero(F, p_n.dim, space.target.dim)
    for c, cls in zip(coords, space.classes):
        if c != F.zero:
            mat = mat + cls.cocycle.mat.scale(c)
    return ExtClass(space.degree, space.source, space.target, ModuleMap(p_n, space.target, mat))


def classes_equal(space: ExtSpace, a: ExtClass, b: ExtClass) -> bool:
    return reduce_cocycle(space, a.cocycle) == reduce_cocycle(space, b.cocycle)


@dataclass(frozen=True)
class UniversalExtension:
    ses: ShortExactSequence      # 0 -> sum of B_i^{d_i} -> E -> M -> 0
    multiplicities: tuple[int, ...]
    middle: RightModule


def universal_extension(m: RightModule, targets: list[RightModule]) -> UniversalExtension:
    """Extension of m by each B_i^{dim Ext^1(m, B_i)} killing the connecting classes.

    Each target must have a local endomorphism ring; under the split
    assumption it is enough that it has a simple top (or is itself simple),
    which is what gets checked.  The induced maps
    Hom(sum B_i^{d_i}, B_j) -> Ext^1(m, B_j) are surjective; asserted.
    """
    A = m.algebra
    F = A.field
    for b in targets:
        if b.dim == 0:
            raise ValueError("zero module is not a valid extension target")
        if b.dim > 1 and structural_series(b).top.dim != 1 and len(hom_basis(b, b)) != 1:
            raise ValueError("extension target lacks a local endomorphism ring certificate")
    spaces = [ext(m, b, 1) for b in targets]
    mults = tuple(s.dim for s in spaces)
    if all(d == 0 for d in mults):
        ident = identity_map(m)
        z = zero_module(A)
        ses = ShortExactSequence(z, m, m, zero_map(z, m), ident)
        return UniversalExtension(ses=ses, multiplicities=mults, middle=m)

    res = projective_resolution(m, 2)
    ker_mod, ker_incl = kernel(res.augmentation)
    fbars: list[ModuleMap] = []
    blocks: list[RightModule] = []
    for b, space in zip(targets, spaces):
        for cls in space.classes:
            fbars.append(_cocycle_to_kernel_map(res, cls.cocycle))
            blocks.append(b)
    T, injs, projs = direct_sum(blocks)
    stacked = None
    for fb, inj in zip(fbars, injs):
        piece = fb.then(inj)
        stacked = piece if stacked is None else stacked + piece
    ses = _pushout_extension(res, stacked, ker_incl)

    # surjectivity of Hom(T, B_j) -> Ext^1(m, B_j) via the connecting map
    for b, space in zip(targets, spaces):
        if space.dim == 0:
            continue
        rank_rows = []
        for h in hom_basis(T, b):
            connecting = _connecting_class(ses, res, h)
            rank_rows.append(reduce_cocycle(space, connecting))
        rk = Matrix.from_rows(F, rank_rows, cols=space.dim).rank() if rank_rows else 0
        assert rk == space.dim, "universal extension failed to surject onto Ext^1"
    return UniversalExtension(ses=ses, multiplicities=mults, middle=ses.middle)


def _connecting_class(ses: ShortExactSequence, res: Resolution, h: ModuleMap) -> ModuleMap:
    """Cocycle of the pushout of ``ses`` along h: sub -> B."""
    l0 = lift_through_surjection(res.augmentation, ses.projection)
    g = res.differential(1).then(l0)
    gprime_mat = ses.inclusion.mat.solve_left(g.mat)
    assert gprime_mat is not None
    to_sub = ModuleMap(res.term(1), ses.sub, gprime_mat)
    return to_sub.then(h)


# -- independent Ext^1 oracle ---------------------------------------------------


ORACLE_BIT_CAP = 22


def ext1_dimension_by_enumeration(m: RightModule, n: RightModule) -> int:
    """Count extension classes 0 -> n -> E -> m -> 0 by exhaustive enumeration.

    Finite fields only; the search space is p^(dim m * dim n * dim A), so this
    is strictly a small-instance oracle.
    """
    A = m.algebra
    F = A.field
    if not F.is_finite:
        raise ValueError("enumeration oracle needs a finite field")
    dm, dn, da = m.dim, n.dim, A.dim
    if dm == 0 or dn == 0:
        return 0
    nbits = dm * dn * da
    if nbits > ORACLE_BIT_CAP:
        raise ValueError(f"oracle search space too large ({nbits} coordinates)")

    def blocks_from(flat) -> list[Matrix]:
        out = []
        for k in range(da):
            chunk = flat[k * dm * dn : (k + 1) * dm * dn]
            out.append(Matrix(F, dm, dn, tuple(F.of(x) for x in chunk)))
        return out

    def is_cocycle(C: list[Matrix]) -> bool:
        # unit must act as the identity on E
        unit_block = Matrix.zero(F, dm, dn)
        for k, c in enumerate(A.unit):
            if c != F.zero:
                unit_block = unit_block + C[k].scale(c)
        if not unit_block.is_zero:
            return False
        for i in range(da):
            for j in range(da):
                lhs = C[i] @ n.action[j] + m.action[i] @ C[j]
                rhs = Matrix.zero(F, dm, dn)
                for k, c in enumerate(A.mult[i][j]):
                    if c != F.zero:
                        rhs = rhs + C[k].scale(c)
                if lhs != rhs:
                    return False
        return True

    ncocycles = 0
    for flat in itertools.product(range(F.p), repeat=nbits):
        if is_cocycle(blocks_from(flat)):
            ncocycles += 1

    # coboundaries: C_h(a) = h @ act_n(a) - act_m(a) @ h
    cob = set()
    for hflat in itertools.product(range(F.p), repeat=dm * dn):
        h = Matrix(F, dm, dn, tuple(F.of(x) for x in hflat))
        key = tuple(
            (h @ n.action[k] - m.action[k] @ h).entries for k in range(da)
        )
        cob.add(key)
    ncob = len(cob)

    classes = ncocycles // ncob
    # classes = p^dim Ext^1
    d = 0
    while F.p ** d < classes:
        d += 1
    assert F.p ** d == classes, "cocycle count is not a power of the field size"
    return d
