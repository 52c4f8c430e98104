"""Finite-dimensional right modules over a split basic algebra.

A ``RightModule`` of dimension d stores one d x d matrix per algebra basis
element; elements are row vectors and ``v * b_k = v @ action[k]``, so the
assignment ``b_k -> action[k]`` is multiplicative with no order flip.  A
``ModuleMap`` stores its matrix with shape (source dim) x (target dim) and
acts by ``v |-> v @ mat``; composition "f then g" is ``f.mat @ g.mat``.

Everything is immutable and every constructor is deterministic (canonical
RREF bases throughout), so structural equality of modules is meaningful
and modules can be used as cache keys.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .algebra import Algebra, opposite
from .linalg import Matrix, Subspace, intertwiner_basis


@dataclass(frozen=True)
class RightModule:
    algebra: Algebra
    dim: int
    action: tuple[Matrix, ...]

    def action_of(self, a: Sequence) -> Matrix:
        """Action matrix of an arbitrary algebra element (coordinate vector)."""
        F = self.algebra.field
        out = Matrix.zero(F, self.dim, self.dim)
        for k, c in enumerate(a):
            if c != F.zero:
                out = out + self.action[k].scale(c)
        return out

    def is_zero(self) -> bool:
        return self.dim == 0

    def vertex_dims(self) -> tuple[int, ...]:
        """Dimension of M e_v for each vertex, in vertex order."""
        return tuple(
            self.action[i].rank() for i in self.algebra.idempotent_indices
        )


@dataclass(frozen=True)
class ModuleMap:
    source: RightModule
    target: RightModule
    mat: Matrix  # source.dim x target.dim

    def then(self, other: "ModuleMap") -> "ModuleMap":
        if self.target != other.source:
            raise ValueError("maps not composable")
        return ModuleMap(self.source, other.target, self.mat @ other.mat)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        assert self.source == other.source and self.target == other.target
        return ModuleMap(self.source, self.target, self.mat + other.mat)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        assert self.source == other.source and self.target == other.target
        return ModuleMap(self.source, self.target, self.mat - other.mat)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.mat.scale(c))

    @property
    def is_zero(self) -> bool:
        return self.mat.is_zero

    def rank(self) -> int:
        return self.mat.rank()

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and self.rank() == self.source.dim


def identity_map(m: RightModule) -> ModuleMap:
    return ModuleMap(m, m, Matrix.identity(m.algebra.field, m.dim))


def zero_map(m: RightModule, n: RightModule) -> ModuleMap:
    return ModuleMap(m, n, Matrix.zero(m.algebra.field, m.dim, n.dim))


def module_from_action(algebra: Algebra, action: Sequence[Matrix], check: bool = True) -> RightModule:
    action = tuple(action)
    if len(action) != algebra.dim:
        raise ValueError("need one action matrix per algebra basis element")
    dim = action[0].rows if action else 0
    m = RightModule(algebra, dim, action)
    if check and dim > 0:
        _check_module(m)
    return m


def _check_module(m: RightModule) -> None:
    A = m.algebra
    F = A.field
    ident = Matrix.identity(F, m.dim)
    if m.action_of(A.unit) != ident:
        raise ValueError("unit does not act as the identity")
    for i in range(A.dim):
        for j in range(A.dim):
            if m.action[i] @ m.action[j] != m.action_of(A.mult[i][j]):
                raise ValueError(
                    f"action not multiplicative on ({A.basis_labels[i]}, {A.basis_labels[j]})"
                )


def zero_module(algebra: Algebra) -> RightModule:
    F = algebra.field
    return RightModule(algebra, 0, tuple(Matrix.zero(F, 0, 0) for _ in range(algebra.dim)))


def regular_module(algebra: Algebra) -> RightModule:
    """The algebra as a right module over itself."""
    mats = [algebra.right_mult_matrix(algebra.basis_vec(k)) for k in range(algebra.dim)]
    return RightModule(algebra, algebra.dim, tuple(mats))


def submodule(m: RightModule, space: Subspace) -> tuple[RightModule, ModuleMap]:
    """Module structure on an action-closed subspace, with its inclusion."""
    if space.ambient != m.dim:
        raise ValueError("ambient mismatch")
    F = m.algebra.field
    B = space.basis
    mats = []
    for k in range(m.algebra.dim):
        img = B @ m.action[k]
        X = B.solve_left(img)
        if X is None:
            raise ValueError("subspace not closed under the action")
        mats.append(X)
    sub = RightModule(m.algebra, space.dim, tuple(mats))
    return sub, ModuleMap(sub, m, B)


def quotient_module(m: RightModule, space: Subspace) -> tuple[RightModule, ModuleMap]:
    """Quotient by an action-closed subspace, with its projection."""
    F = m.algebra.field
    proj, sec = space.quotient_maps()
    mats = [sec @ m.action[k] @ proj for k in range(m.algebra.dim)]
    quo = RightModule(m.algebra, proj.cols, tuple(mats))
    return quo, ModuleMap(m, quo, proj)


def kernel(f: ModuleMap) -> tuple[RightModule, ModuleMap]:
    return submodule(f.source, f.mat.left_kernel())


def image(f: ModuleMap) -> tuple[RightModule, ModuleMap, ModuleMap]:
    """Image with its (epi from source, mono to target) factorization."""
    space = f.mat.row_space()
    img, incl = submodule(f.target, space)
    X = space.basis.solve_left(f.mat)
    assert X is not None
    epi = ModuleMap(f.source, img, X)
    return img, epi, incl


def cokernel(f: ModuleMap) -> tuple[RightModule, ModuleMap]:
    return quotient_module(f.target, f.mat.row_space())


def direct_sum(mods: Sequence[RightModule]) -> tuple[RightModule, list[ModuleMap], list[ModuleMap]]:
    if not mods:
        raise ValueError("direct_sum of nothing: pass the algebra's zero module instead")
    A = mods[0].algebra
    F = A.field
    dims = [m.dim for m in mods]
    total = sum(dims)
    offsets = [sum(dims[:i]) for i in range(len(mods))]
    mats = []
    for k in range(A.dim):
        rows = []
        for mi, m in enumerate(mods):
            for r in range(m.dim):
                row = [F.zero] * total
                src = m.action[k].row(r)
                for c, x in enumerate(src):
                    row[offsets[mi] + c] = x
                rows.append(tuple(row))
        mats.append(Matrix.from_rows(F, rows, cols=total))
    big = RightModule(A, total, tuple(mats))
    injs, projs = [], []
    for mi, m in enumerate(mods):
        inj_rows = []
        for r in range(m.dim):
            row = [F.zero] * total
            row[offsets[mi] + r] = F.one
            inj_rows.append(tuple(row))
        injs.append(ModuleMap(m, big, Matrix.from_rows(F, inj_rows, cols=total)))
        proj_rows = []
        for r in range(total):
            row = [F.zero] * m.dim
            if offsets[mi] <= r < offsets[mi] + m.dim:
                row[r - offsets[mi]] = F.one
            proj_rows.append(tuple(row))
        projs.append(ModuleMap(big, m, Matrix.from_rows(F, proj_rows, cols=m.dim)))
    return big, injs, projs


# -- hom spaces --------------------------------------------------------------


def hom_basis(m: RightModule, n: RightModule) -> list[ModuleMap]:
    """RREF-canonical basis of the space of module maps m -> n.

    A matrix X intertwines iff action_m(g) @ X = X @ action_n(g) for every
    algebra generator g; generators suffice because intertwining is closed
    under products and linear combinations.
    """
    if m.algebra != n.algebra:
        raise ValueError("modules over different algebras")
    A = m.algebra
    F = A.field
    dm, dn = m.dim, n.dim
    if dm == 0 or dn == 0:
        return []
    gens = A.generating_vectors()
    pairs = [(m.action_of(g), n.action_of(g)) for g in gens]
    return [ModuleMap(m, n, mat) for mat in intertwiner_basis(F, pairs, dm, dn)]


def hom_dim(m: RightModule, n: RightModule) -> int:
    return len(hom_basis(m, n))


def lift_through_surjection(f: ModuleMap, epi: ModuleMap) -> ModuleMap:
    """A module map h with h ; epi = f, found inside Hom(f.source, epi.source).

    Exists whenever f.source is projective and epi is surjective (and in any
    other situation where the caller knows a lift exists); raises otherwise.
    A plain linear solve is not enough here because the lift is generally
    not unique, and an arbitrary linear solution need not intertwine.
    """
    if f.target != epi.target:
        raise ValueError("lift target mismatch")
    F = f.source.algebra.field
    hb = hom_basis(f.source, epi.source)
    if not hb:
        if f.is_zero:
            return zero_map(f.source, epi.source)
        raise ValueError("no lift exists: hom space is zero")
    rows = [h.then(epi).mat.entries for h in hb]
    T = Matrix.from_rows(F, rows, cols=f.source.dim * f.target.dim)
    sol = T.solve_left(Matrix.from_rows(F, [f.mat.entries], cols=T.cols))
    if sol is None:
        raise ValueError("no lift exists through the given surjection")
    out = zero_map(f.source, epi.source)
    for c, h in zip(sol.row(0), hb):
        if c != F.zero:
            out = out + h.scale(c)
    return out


# -- radical, top, socle ------------------------------------------------------


def radical_subspace(m: RightModule) -> Subspace:
    A = m.algebra
    F = A.field
    vecs = []
    for r in range(A.radical.dim):
        mat = m.action_of(A.radical.basis.row(r))
        vecs.extend(mat.row_list())
    return Subspace.span(F, vecs, m.dim) if vecs else Subspace.zero(F, m.dim)


def socle_subspace(m: RightModule) -> Subspace:
    A = m.algebra
    F = A.field
    if A.radical.dim == 0 or m.dim == 0:
        return Subspace.full(F, m.dim)
    stacked = None
    for r in range(A.radical.dim):
        mat = m.action_of(A.radical.basis.row(r))
        stacked = mat if stacked is None else stacked.hstack(mat)
    return stacked.left_kernel()


@dataclass(frozen=True)
class StructuralSeries:
    radical: Subspace
    top: RightModule
    top_projection: ModuleMap
    socle: Subspace


def structural_series(m: RightModule) -> StructuralSeries:
    rad = radical_subspace(m)
    top, proj = quotient_module(m, rad)
    return StructuralSeries(radical=rad, top=top, top_projection=proj, socle=socle_subspace(m))


# -- distinguished modules ----------------------------------------------------


def projective_module(algebra: Algebra, vertex: str) -> tuple[RightModule, ModuleMap]:
    """P(v) = e_v A as a submodule of the regular module."""
    reg = regular_module(algebra)
    ev = algebra.idempotent_vec(vertex)
    space = algebra.left_mult_matrix(ev).row_space()
    return submodule(reg, space)


def simple_module(algebra: Algebra, vertex: str) -> RightModule:
    """S(v): the top of P(v)."""
    p, _ = projective_module(algebra, vertex)
    return structural_series(p).top


def dual_module(m: RightModule) -> RightModule:
    """Vector-space dual, a right module over the opposite algebra."""
    return RightModule(opposite(m.algebra), m.dim, tuple(a.transpose() for a in m.action))


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.target), dual_module(f.source), f.mat.transpose())


def injective_module(algebra: Algebra, vertex: str) -> RightModule:
    """I(v) = D(e_v A^op)."""
    p_op, _ = projective_module(opposite(algebra), vertex)
    return dual_module(p_op)


@dataclass(frozen=True)
class Cells:
    """The distinguished modules of an algebra in vertex order."""

    regular: RightModule
    projectives: tuple[RightModule, ...]
    simples: tuple[RightModule, ...]
    injectives: tuple[RightModule, ...]


def cells(algebra: Algebra) -> Cells:
    """Regular module plus all P(v), S(v), I(v).

    Indecomposability of each P(v) is certified by the hom-dimension
    pattern dim Hom(P(v), S(w)) = [v = w].
    """
    projs = []
    simps = []
    injs = []
    for v in algebra.vertex_names:
        projs.append(projective_module(algebra, v)[0])
        simps.append(simple_module(algebra, v))
        injs.append(injective_module(algebra, v))
    for v, p in zip(algebra.vertex_names, projs):
        for w, s in zip(algebra.vertex_names, simps):
            want = 1 if v == w else 0
            got = len(hom_basis(p, s))
            if got != want:
                raise ValueError(
                    f"cover pattern broken: dim Hom(P({v}), S({w})) = {got}, expected {want}"
                )
    return Cells(
        regular=regular_module(algebra),
        projectives=tuple(projs),
        simples=tuple(simps),
        injectives=tuple(injs),
    )


# -- covers and envelopes ------------------------------------------------------


def element_map_from_projective(
    pv: RightModule, incl_rows: Matrix, target: RightModule, u: Sequence
) -> Matrix:
    """Matrix of the map P(v) -> target sending the generator e_v to u.

    ``incl_rows`` gives P(v)'s basis as elements of the algebra; row t is an
    algebra element x, and the map sends x to u * x.
    """
    out_rows = []
    for t in range(incl_rows.rows):
        act = target.action_of(incl_rows.row(t))
        out_rows.append(act.apply_row(u))
    return Matrix.from_rows(target.algebra.field, out_rows, cols=target.dim)


@dataclass(frozen=True)
class Cover:
    projective: RightModule
    cover_map: ModuleMap
    summands: tuple[tuple[str, int], ...]  # (vertex, multiplicity)


def projective_cover(m: RightModule) -> Cover:
    """Minimal projective cover, built by lifting a basis of the top."""
    A = m.algebra
    F = A.field
    if m.dim == 0:
        z = zero_module(A)
        return Cover(z, ModuleMap(z, m, Matrix.zero(F, 0, 0)), ())
    series = structural_series(m)
    top, proj = series.top, series.top_projection

    pieces: list[tuple[str, tuple]] = []  # (vertex, generator image u in m)
    for v in A.vertex_names:
        ev = A.idempotent_vec(v)
        me_v = m.action_of(ev)
        picked = Subspace.zero(F, top.dim)
        target_dim = top.action_of(ev).rank()
        for r in range(me_v.rows):
            if picked.dim == target_dim:
                break
            u = me_v.row(r)
            tu = proj.mat.apply_row(u)
            if any(x != F.zero for x in tu) and not picked.contains(tu):
                picked = picked.sum(Subspace.span(F, [tu], top.dim))
                pieces.append((v, u))
        assert picked.dim == target_dim, "top basis lifting failed"

    summand_mods = []
    blocks = []
    counts: dict[str, int] = {}
    for v, u in pieces:
        pv, incl = projective_module(A, v)
        summand_mods.append(pv)
        blocks.append(element_map_from_projective(pv, incl.mat, m, u))
        counts[v] = counts.get(v, 0) + 1
    if not summand_mods:
        z = zero_module(A)
        return Cover(z, ModuleMap(z, m, Matrix.zero(F, 0, m.dim)), ())
    big, injs, _ = direct_sum(summand_mods)
    rows = []
    for blk in blocks:
        rows.extend(blk.row_list())
    phi = ModuleMap(big, m, Matrix.from_rows(F, rows, cols=m.dim))
    assert phi.is_surjective(), "cover map not surjective"
    ker_space = phi.mat.left_kernel()
    assert radical_subspace(big).contains_space(ker_space), "cover not essential"
    summands = tuple((v, counts[v]) for v in A.vertex_names if v in counts)
    return Cover(big, phi, summands)


@dataclass(frozen=True)
class Envelope:
    injective: RightModule
    envelope_map: ModuleMap


def injective_envelope(m: RightModule) -> Envelope:
    """Computed as the dual of the projective cover over the opposite algebra."""
    dm = dual_module(m)
    cov = projective_cover(dm)
    iota = dual_map(cov.cover_map)  # D(D(m)) -> D(P); D(D(m)) == m on the nose
    assert iota.source == m
    return Envelope(injective=iota.target, envelope_map=iota)


# -- isomorphism testing --------------------------------------------------------


class UndecidedIsomorphism(RuntimeError):
    """Heuristic search exhausted without a certificate either way."""


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    certificate: ModuleMap | None  # explicit iso when YES
    reason: str                    # distinguishing invariant or search note


ISO_EXHAUSTION_CAP = 4096
ISO_RANDOM_TRIES = 500


def is_isomorphic(m: RightModule, n: RightModule) -> IsoResult:
    if m.algebra != n.algebra:
        raise ValueError("modules over different algebras")
    F = m.algebra.field
    if m.dim != n.dim:
        return IsoResult(False, None, f"total dimensions differ: {m.dim} != {n.dim}")
    if m.dim == 0:
        return IsoResult(True, ModuleMap(m, n, Matrix.zero(F, 0, 0)), "zero modules")
    if m.vertex_dims() != n.vertex_dims():
        return IsoResult(
            False, None,
            f"dimension vectors differ: {m.vertex_dims()} != {n.vertex_dims()}",
        )
    if m == n:
        return IsoResult(True, identity_map(m), "equal representations")
    hmn = hom_basis(m, n)
    hnm = hom_basis(n, m)
    if len(hmn) != len(hnm):
        return IsoResult(
            False, None,
            f"hom spaces asymmetric: dim Hom(m,n)={len(hmn)}, dim Hom(n,m)={len(hnm)}",
        )
    if not hmn:
        return IsoResult(False, None, "Hom(m,n) = 0")

    def check(coeffs) -> ModuleMap | None:
        mat = Matrix.zero(F, m.dim, n.dim)
        for c, h in zip(coeffs, hmn):
            if c != F.zero:
                mat = mat + h.mat.scale(c)
        if mat.rank() == m.dim:
            return ModuleMap(m, n, mat)
        return None

    # deterministic scan: single basis elements, then pairwise sums
    for i in range(len(hmn)):
        cand = check([F.one if j == i else F.zero for j in range(len(hmn))])
        if cand:
            return IsoResult(True, cand, "basis element")
    for i, j in itertools.combinations(range(len(hmn)), 2):
        coeffs = [F.zero] * len(hmn)
        coeffs[i] = coeffs[j] = F.one
        cand = check(coeffs)
        if cand:
            return IsoResult(True, cand, "sum of basis elements")

    if F.is_finite and F.p ** len(hmn) <= ISO_EXHAUSTION_CAP:
        for coeffs in itertools.product(range(F.p), repeat=len(hmn)):
            if all(c == 0 for c in coeffs):
                continue
            cand = check(coeffs)
            if cand:
                return IsoResult(True, cand, "exhaustive search")
        return IsoResult(False, None, "exhaustive search over Hom(m,n) found no isomorphism")

    rng = random.Random(0xC0FFEE + m.dim * 7919 + len(hmn))
    for _ in range(ISO_RANDOM_TRIES):
        coeffs = [F.of(rng.randint(-3, 3)) for _ in range(len(hmn))]
        cand = check(coeffs)
        if cand:
            return IsoResult(True, cand, "pseudorandom combination")
    raise UndecidedIsomorphism(
        "invariants agree but no invertible combination found within the retry bound"
    )
