"""Recollements of abelian categories, concretely and generically.

``make_idempotent_recollement`` builds the six-functor package attached to
an idempotent e = sum of vertex idempotents of a split basic algebra A:

    mod-(A/AeA)  --embed-->  mod-A  --restrict-->  mod-(eAe)

with (i_left -| i_embed -| i_right) and (j_lower -| j_restrict -| j_roof)
adjoint triples:

    i_embed     inflation along A ->> A/AeA
    i_left      M |-> M/(M e A)              (largest quotient killed by e)
    i_right     M |-> {m : m e A = 0}        (largest submodule killed by e)
    j_restrict  M |-> M e                     over the corner algebra eAe
    j_lower     X |-> X (x)_{eAe} eA
    j_roof      X |-> Hom_{eAe}(Ae, X)

``verify_recollement``, ``intermediate_extension``, ``canonical_ses`` and
``cover_transport`` are generic: they only use the category interface, so
the Macpherson-Vilonen instance reuses them unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from .algebra import Algebra, CornerData, QuotientData, corner_algebra, quotient_by_idempotent_ideal
from .category import (
    Functor,
    ModuleCategory,
    exact_at,
    factor_through_mono,
    is_epi,
    is_mono,
    mor_eq,
)
from .linalg import Matrix, Subspace, intertwiner_basis
from .modules import ModuleMap, RightModule, projective_cover


@dataclass
class Recollement:
    """Six functors plus the unit/counit components of both adjoint triples.

    Unit/counit naming: for an adjunction (L -| R), ``unit``: id -> R L and
    ``counit``: L R -> id.  Here:

    * ``unit_quot(X): X -> i_embed(i_left(X))``   [(i_left -| i_embed) unit]
    * ``counit_quot(Z): i_left(i_embed(Z)) -> Z``
    * ``unit_sub(Z): Z -> i_right(i_embed(Z))``   [(i_embed -| i_right) unit]
    * ``counit_sub(X): i_embed(i_right(X)) -> X``
    * ``unit_jl(U): U -> j_restrict(j_lower(U))`` [(j_lower -| j_restrict) unit]
    * ``counit_jl(X): j_lower(j_restrict(X)) -> X``
    * ``unit_jr(X): X -> j_roof(j_restrict(X))``  [(j_restrict -| j_roof) unit]
    * ``counit_jr(U): j_restrict(j_roof(U)) -> U``
    """

    cat_z: object
    cat_c: object
    cat_u: object
    i_embed: Functor
    i_left: Functor
    i_right: Functor
    j_restrict: Functor
    j_lower: Functor
    j_roof: Functor
    unit_quot: Callable
    counit_quot: Callable
    unit_sub: Callable
    counit_sub: Callable
    unit_jl: Callable
    counit_jl: Callable
    unit_jr: Callable
    counit_jr: Callable
    label: str = ""
    degenerate: str | None = None  # "zero-U" (e=0) or "zero-Z" (e=1)
    extras: dict = dc_field(default_factory=dict)


@dataclass(frozen=True)
class IdempotentRecollementData:
    algebra: Algebra
    vertices: tuple[str, ...]
    e: tuple
    corner: CornerData
    quotient: QuotientData
    e_a: Matrix  # basis rows of eA inside A
    a_e: Matrix  # basis rows of Ae inside A


def idempotent_recollement_data(a: Algebra, vertices: Sequence[str]) -> IdempotentRecollementData:
    vs = tuple(vertices)
    e = a.idempotent_sum(vs)
    corner = corner_algebra(a, vs) if vs else None
    quotient = quotient_by_idempotent_ideal(a, vs)
    e_a = a.left_mult_matrix(e).row_space().basis
    a_e = a.right_mult_matrix(e).row_space().basis
    return IdempotentRecollementData(
        algebra=a, vertices=vs, e=e, corner=corner, quotient=quotient, e_a=e_a, a_e=a_e
    )


def make_idempotent_recollement(a: Algebra, vertices: Sequence[str]) -> Recollement:
    """The recollement of mod-A defined by e = sum of the given vertex idempotents."""
    data = idempotent_recollement_data(a, vertices)
    F = a.field
    e = data.e
    corner = data.corner
    quot = data.quotient
    q_alg = quot.algebra
    if corner is not None:
        gamma = corner.algebra
    else:
        # e = 0: the U side is the zero category, realized as modules over
        # the zero algebra (quotient by the unit ideal)
        gamma = quotient_by_idempotent_ideal(a, list(a.vertex_names)).algebra

    cat_c = ModuleCategory(a)
    cat_z = ModuleCategory(q_alg)
    cat_u = ModuleCategory(gamma)

    degenerate = None
    if not data.vertices:
        degenerate = "zero-U"
    elif len(data.vertices) == len(a.vertex_names):
        degenerate = "zero-Z"

    de = data.e_a.rows
    na = data.a_e.rows

    # precomputed action tables on the bimodules eA and Ae
    if corner is not None:
        gamma_in_a = [corner.embed.row(s) for s in range(gamma.dim)]
    else:
        gamma_in_a = []

    def _coords_in(basis: Matrix, vecs: Matrix) -> Matrix:
        sol = basis.solve_left(vecs)
        assert sol is not None, "vector left the bimodule span"
        return sol

    # left action of corner basis on eA / right action of corner basis on Ae
    left_gamma_on_ea = []
    right_gamma_on_ae = []
    for s in range(gamma.dim if corner is not None else 0):
        gs = gamma_in_a[s]
        rows = [a.mul_vec(gs, data.e_a.row(j)) for j in range(de)]
        left_gamma_on_ea.append(_coords_in(data.e_a, Matrix.from_rows(F, rows, cols=a.dim)))
        rows = [a.mul_vec(data.a_e.row(t), gs) for t in range(na)]
        right_gamma_on_ae.append(_coords_in(data.a_e, Matrix.from_rows(F, rows, cols=a.dim)))

    # right action of A basis on eA / left action of A basis on Ae
    right_a_on_ea = []
    left_a_on_ae = []
    for k in range(a.dim):
        bk = a.basis_vec(k)
        rows = [a.mul_vec(data.e_a.row(j), bk) for j in range(de)]
        right_a_on_ea.append(_coords_in(data.e_a, Matrix.from_rows(F, rows, cols=a.dim)))
        rows = [a.mul_vec(bk, data.a_e.row(t)) for t in range(na)]
        left_a_on_ae.append(_coords_in(data.a_e, Matrix.from_rows(F, rows, cols=a.dim)))

    e_in_ea = _coords_in(data.e_a, Matrix.from_rows(F, [e], cols=a.dim)).row(0) if de else ()
    e_in_ae = _coords_in(data.a_e, Matrix.from_rows(F, [e], cols=a.dim)).row(0) if na else ()

    # ---- object/morphism constructions -----------------------------------

    def restrict_space(m: RightModule) -> Subspace:
        return m.action_of(e).row_space()

    def j_restrict_obj(m: RightModule) -> RightModule:
        B = restrict_space(m).basis
        acts = []
        for s in range(gamma.dim):
            img = B @ m.action_of(gamma_in_a[s])
            X = B.solve_left(img)
            assert X is not None
            acts.append(X)
        return RightModule(gamma, B.rows, tuple(acts))

    def j_restrict_mor(f: ModuleMap) -> ModuleMap:
        BM = restrict_space(f.source).basis
        BN = restrict_space(f.target).basis
        mat = BN.solve_left(BM @ f.mat)
        assert mat is not None
        return ModuleMap(j_restrict_obj(f.source), j_restrict_obj(f.target), mat)

    def i_embed_obj(z: RightModule) -> RightModule:
        acts = [z.action_of(quot.projection.row(k)) for k in range(a.dim)]
        return RightModule(a, z.dim, tuple(acts))

    def i_embed_mor(f: ModuleMap) -> ModuleMap:
        return ModuleMap(i_embed_obj(f.source), i_embed_obj(f.target), f.mat)

    def killed_space(m: RightModule) -> Subspace:
        # M e A, spanned by (rows of act(e)) @ act(b_k)
        act_e = m.action_of(e)
        vecs = []
        for k in range(a.dim):
            prod = act_e @ m.action[k]
            vecs.extend(prod.row_list())
        return Subspace.span(F, vecs, m.dim) if vecs else Subspace.zero(F, m.dim)

    def i_left_obj(m: RightModule) -> RightModule:
        W = killed_space(m)
        projW, secW = W.quotient_maps()
        acts = []
        for k in range(q_alg.dim):
            lift = quot.section.row(k)
            acts.append(secW @ m.action_of(lift) @ projW)
        return RightModule(q_alg, projW.cols, tuple(acts))

    def i_left_mor(f: ModuleMap) -> ModuleMap:
        WM, WN = killed_space(f.source), killed_space(f.target)
        _, secM = WM.quotient_maps()
        projN, _ = WN.quotient_maps()
        return ModuleMap(i_left_obj(f.source), i_left_obj(f.target), secM @ f.mat @ projN)

    def sub_space(m: RightModule) -> Subspace:
        # {v : v (b e) = 0 for all b}
        if m.dim == 0:
            return Subspace.zero(F, 0)
        act_e = m.action_of(e)
        stacked = None
        for k in range(a.dim):
            mat = m.action[k] @ act_e
            stacked = mat if stacked is None else stacked.hstack(mat)
        return stacked.left_kernel()

    def i_right_obj(m: RightModule) -> RightModule:
        S = sub_space(m)
        B = S.basis
        acts = []
        for k in range(q_alg.dim):
            lift = quot.section.row(k)
            img = B @ m.action_of(lift)
            X = B.solve_left(img)
            assert X is not None
            acts.append(X)
        return RightModule(q_alg, B.rows, tuple(acts))

    def i_right_mor(f: ModuleMap) -> ModuleMap:
        BM = sub_space(f.source).basis
        BN = sub_space(f.target).basis
        mat = BN.solve_left(BM @ f.mat)
        assert mat is not None
        return ModuleMap(i_right_obj(f.source), i_right_obj(f.target), mat)

    # j_lower: X (x)_Gamma eA as a quotient of X (x)_k eA
    def tensor_relations(x: RightModule) -> Subspace:
        dx = x.dim
        vecs = []
        for i in range(dx):
            for s in range(gamma.dim):
                xs = x.action[s].row(i)
                ls = left_gamma_on_ea[s]
                for j in range(de):
                    vec = [F.zero] * (dx * de)
                    for i2, c in enumerate(xs):
                        if c != F.zero:
                            vec[i2 * de + j] = F.add(vec[i2 * de + j], c)
                    for j2 in range(de):
                        c = ls[j, j2]
                        if c != F.zero:
                            vec[i * de + j2] = F.sub(vec[i * de + j2], c)
                    vecs.append(tuple(vec))
        return Subspace.span(F, vecs, dx * de) if vecs else Subspace.zero(F, dx * de)

    def tensor_action_v(x: RightModule, k: int) -> Matrix:
        dx = x.dim
        rows = []
        for i in range(dx):
            for j in range(de):
                row = [F.zero] * (dx * de)
                rk = right_a_on_ea[k]
                for j2 in range(de):
                    c = rk[j, j2]
                    if c != F.zero:
                        row[i * de + j2] = c
                rows.append(tuple(row))
        return Matrix.from_rows(F, rows, cols=dx * de)

    def j_lower_obj(x: RightModule) -> RightModule:
        W = tensor_relations(x)
        projT, secT = W.quotient_maps()
        acts = [secT @ tensor_action_v(x, k) @ projT for k in range(a.dim)]
        return RightModule(a, projT.cols, tuple(acts))

    def j_lower_mor(f: ModuleMap) -> ModuleMap:
        x, y = f.source, f.target
        dx, dy = x.dim, y.dim
        rows = []
        for i in range(dx):
            for j in range(de):
                row = [F.zero] * (dy * de)
                for i2 in range(dy):
                    c = f.mat[i, i2]
                    if c != F.zero:
                        row[i2 * de + j] = c
                rows.append(tuple(row))
        big = Matrix.from_rows(F, rows, cols=dy * de)
        _, secX = tensor_relations(x).quotient_maps()
        projY, _ = tensor_relations(y).quotient_maps()
        return ModuleMap(j_lower_obj(x), j_lower_obj(y), secX @ big @ projY)

    # j_roof: Hom_Gamma(Ae, X), stored via the flattened intertwiner basis
    def roof_basis(x: RightModule) -> list[Matrix]:
        pairs = [(right_gamma_on_ae[s], x.action[s]) for s in range(gamma.dim)]
        return intertwiner_basis(F, pairs, na, x.dim)

    def _roof_coords(basis: list[Matrix], mats: list[Matrix], x: RightModule) -> Matrix:
        if not basis:
            return Matrix.from_rows(F, [], cols=0) if not mats else Matrix.zero(F, len(mats), 0)
        flat_basis = Matrix.from_rows(F, [b.entries for b in basis], cols=na * x.dim)
        flat_targets = Matrix.from_rows(F, [m.entries for m in mats], cols=na * x.dim)
        sol = flat_basis.solve_left(flat_targets)
        assert sol is not None, "map left the hom space"
        return sol

    def j_roof_obj(x: RightModule) -> RightModule:
        basis = roof_basis(x)
        dj = len(basis)
        acts = []
        for k in range(a.dim):
            imgs = [left_a_on_ae[k] @ phi for phi in basis]
            acts.append(_roof_coords(basis, imgs, x) if dj else Matrix.zero(F, 0, 0))
        return RightModule(a, dj, tuple(acts))

    def j_roof_mor(f: ModuleMap) -> ModuleMap:
        bx = roof_basis(f.source)
        by = roof_basis(f.target)
        imgs = [phi @ f.mat for phi in bx]
        mat = _roof_coords(by, imgs, f.target) if by else Matrix.zero(F, len(bx), 0)
        return ModuleMap(j_roof_obj(f.source), j_roof_obj(f.target), mat)

    # ---- units and counits -------------------------------------------------

    def unit_quot(m: RightModule) -> ModuleMap:
        projW, _ = killed_space(m).quotient_maps()
        return ModuleMap(m, i_embed_obj(i_left_obj(m)), projW)

    def counit_quot(z: RightModule) -> ModuleMap:
        src = i_left_obj(i_embed_obj(z))
        assert src == z, "i_left . i_embed is the identity on the nose here"
        return ModuleMap(src, z, Matrix.identity(F, z.dim))

    def unit_sub(z: RightModule) -> ModuleMap:
        tgt = i_right_obj(i_embed_obj(z))
        assert tgt == z
        return ModuleMap(z, tgt, Matrix.identity(F, z.dim))

    def counit_sub(m: RightModule) -> ModuleMap:
        S = sub_space(m)
        return ModuleMap(i_embed_obj(i_right_obj(m)), m, S.basis)

    def unit_jl(x: RightModule) -> ModuleMap:
        # x |-> class(x (x) e) inside (j_lower x) e
        tgt_parent = j_lower_obj(x)
        tgt = j_restrict_obj(tgt_parent)
        B = restrict_space(tgt_parent).basis
        projT, _ = tensor_relations(x).quotient_maps()
        rows = []
        for i in range(x.dim):
            vec = [F.zero] * (x.dim * de)
            for j, c in enumerate(e_in_ea):
                if c != F.zero:
                    vec[i * de + j] = c
            vrow = Matrix.from_rows(F, [tuple(vec)], cols=x.dim * de) @ projT
            rows.append(vrow.row(0))
        down = Matrix.from_rows(F, rows, cols=projT.cols)
        mat = B.solve_left(down)
        assert mat is not None, "unit image left the restricted subspace"
        return ModuleMap(x, tgt, mat)

    def counit_jl(m: RightModule) -> ModuleMap:
        # class(v (x) m_j) |-> v * m_j
        src_u = j_restrict_obj(m)
        BM = restrict_space(m).basis
        dx = src_u.dim
        rows = []
        for i in range(dx):
            v = BM.row(i)
            for j in range(de):
                act = m.action_of(data.e_a.row(j))
                rows.append(act.apply_row(v))
        big = Matrix.from_rows(F, rows, cols=m.dim)
        W = tensor_relations(src_u)
        assert (W.basis @ big).is_zero, "counit not well defined on the tensor quotient"
        _, secT = W.quotient_maps()
        return ModuleMap(j_lower_obj(src_u), m, secT @ big)

    def unit_jr(m: RightModule) -> ModuleMap:
        # m |-> (ae |-> m*(ae)) in Hom_Gamma(Ae, Me)
        mu = j_restrict_obj(m)
        BM = restrict_space(m).basis
        basis = roof_basis(mu)
        mats = []
        for i in range(m.dim):
            rows = []
            for t in range(na):
                vec = m.action_of(data.a_e.row(t)).row(i)  # e_i * (Ae row t)
                coords = BM.solve_left(Matrix.from_rows(F, [vec], cols=m.dim))
                assert coords is not None
                rows.append(coords.row(0))
            mats.append(Matrix.from_rows(F, rows, cols=mu.dim))
        mat = _roof_coords(basis, mats, mu) if basis else Matrix.zero(F, m.dim, 0)
        return ModuleMap(m, j_roof_obj(mu), mat)

    def counit_jr(x: RightModule) -> ModuleMap:
        # phi |-> phi(e)
        roof = j_roof_obj(x)
        basis = roof_basis(x)
        src = j_restrict_obj(roof)
        B = restrict_space(roof).basis
        rows = []
        for r in range(src.dim):
            coeffs = B.row(r)
            val = [F.zero] * x.dim
            for c, phi in zip(coeffs, basis):
                if c != F.zero:
                    contrib = Matrix.from_rows(F, [e_in_ae], cols=na) @ phi
                    for idx, xval in enumerate(contrib.row(0)):
                        val[idx] = F.add(val[idx], F.mul(c, xval))
            rows.append(tuple(val))
        return ModuleMap(src, x, Matrix.from_rows(F, rows, cols=x.dim))

    label = f"e=({'+'.join(data.vertices) if data.vertices else '0'}) in {'x'.join(a.vertex_names)}"
    return Recollement(
        cat_z=cat_z,
        cat_c=cat_c,
        cat_u=cat_u,
        i_embed=Functor("i_embed", cat_z, cat_c, i_embed_obj, i_embed_mor),
        i_left=Functor("i_left", cat_c, cat_z, i_left_obj, i_left_mor),
        i_right=Functor("i_right", cat_c, cat_z, i_right_obj, i_right_mor),
        j_restrict=Functor("j_restrict", cat_c, cat_u, j_restrict_obj, j_restrict_mor),
        j_lower=Functor("j_lower", cat_u, cat_c, j_lower_obj, j_lower_mor),
        j_roof=Functor("j_roof", cat_u, cat_c, j_roof_obj, j_roof_mor),
        unit_quot=unit_quot,
        counit_quot=counit_quot,
        unit_sub=unit_sub,
        counit_sub=counit_sub,
        unit_jl=unit_jl,
        counit_jl=counit_jl,
        unit_jr=unit_jr,
        counit_jr=counit_jr,
        label=label,
        degenerate=degenerate,
        extras={"idempotent_data": data},
    )


# ---------------------------------------------------------------------------
# generic verification and derived constructions


@dataclass(frozen=True)
class CheckResult:
    axiom: str
    subject: str
    ok: bool
    note: str = ""


@dataclass(frozen=True)
class RecollementReport:
    label: str
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.ok]


def verify_recollement(
    r: Recollement,
    center_samples: Sequence[tuple[str, object]],
    z_samples: Sequence[tuple[str, object]] | None = None,
    u_samples: Sequence[tuple[str, object]] | None = None,
) -> RecollementReport:
    """Check (R1)-(R4) on the given sample objects.

    The axioms quantify over all objects; this runs them on a finite sample
    list (named in the report).  Defaults: the Z/U samples are the images
    of the center samples under i_left and j_restrict.
    """
    out: list[CheckResult] = []
    if z_samples is None:
        z_samples = [(f"i_left({n})", r.i_left(x)) for n, x in center_samples]
    if u_samples is None:
        u_samples = [(f"j_restrict({n})", r.j_restrict(x)) for n, x in center_samples]

    def record(axiom, subject, thunk, note=""):
        # a corrupted functor package may fail to even typecheck; that is a
        # check failure, not a crash of the verifier
        try:
            ok = bool(thunk())
            err = ""
        except Exception as exc:  # noqa: BLE001
            ok = False
            err = f"raised {type(exc).__name__}: {exc}"
        out.append(CheckResult(axiom, subject, ok, err or note))

    # (R1) triangle identities, 2 per adjunction
    for name, x in center_samples:
        record("R1:i_left-|i_embed", name, lambda x=x: mor_eq(
            r.i_left.map(r.unit_quot(x)).then(r.counit_quot(r.i_left(x))),
            r.cat_z.identity(r.i_left(x))))
        record("R1:i_embed-|i_right", name, lambda x=x: mor_eq(
            r.unit_sub(r.i_right(x)).then(r.i_right.map(r.counit_sub(x))),
            r.cat_z.identity(r.i_right(x))))
        record("R1:j_lower-|j_restrict", name, lambda x=x: mor_eq(
            r.unit_jl(r.j_restrict(x)).then(r.j_restrict.map(r.counit_jl(x))),
            r.cat_u.identity(r.j_restrict(x))))
        record("R1:j_restrict-|j_roof", name, lambda x=x: mor_eq(
            r.j_restrict.map(r.unit_jr(x)).then(r.counit_jr(r.j_restrict(x))),
            r.cat_u.identity(r.j_restrict(x))))
    for name, z in z_samples:
        record("R1:i_left-|i_embed", name, lambda z=z: mor_eq(
            r.unit_quot(r.i_embed(z)).then(r.i_embed.map(r.counit_quot(z))),
            r.cat_c.identity(r.i_embed(z))))
        record("R1:i_embed-|i_right", name, lambda z=z: mor_eq(
            r.i_embed.map(r.unit_sub(z)).then(r.counit_sub(r.i_embed(z))),
            r.cat_c.identity(r.i_embed(z))))
    for name, u in u_samples:
        record("R1:j_lower-|j_restrict", name, lambda u=u: mor_eq(
            r.j_lower.map(r.unit_jl(u)).then(r.counit_jl(r.j_lower(u))),
            r.cat_c.identity(r.j_lower(u))))
        record("R1:j_restrict-|j_roof", name, lambda u=u: mor_eq(
            r.unit_jr(r.j_roof(u)).then(r.j_roof.map(r.counit_jr(u))),
            r.cat_c.identity(r.j_roof(u))))

    # (R2) fully faithful embeddings via unit/counit isomorphisms
    for name, z in z_samples:
        record("R2:i_left.i_embed=id", name, lambda z=z: (
            lambda f: is_mono(r.cat_z, f) and is_epi(r.cat_z, f))(r.counit_quot(z)))
        record("R2:i_right.i_embed=id", name, lambda z=z: (
            lambda f: is_mono(r.cat_z, f) and is_epi(r.cat_z, f))(r.unit_sub(z)))
    for name, u in u_samples:
        record("R2:j_restrict.j_lower=id", name, lambda u=u: (
            lambda f: is_mono(r.cat_u, f) and is_epi(r.cat_u, f))(r.unit_jl(u)))
        record("R2:j_restrict.j_roof=id", name, lambda u=u: (
            lambda f: is_mono(r.cat_u, f) and is_epi(r.cat_u, f))(r.counit_jr(u)))

    # (R3) j_restrict i_embed = 0 and the adjoint consequences
    for name, z in z_samples:
        record("R3:j_restrict.i_embed=0", name,
               lambda z=z: r.cat_u.is_zero_obj(r.j_restrict(r.i_embed(z))))
    for name, u in u_samples:
        record("R3:i_left.j_lower=0", name,
               lambda u=u: r.cat_z.is_zero_obj(r.i_left(r.j_lower(u))))
        record("R3:i_right.j_roof=0", name,
               lambda u=u: r.cat_z.is_zero_obj(r.i_right(r.j_roof(u))))

    # (R4) the two adjunction exact sequences, with end conditions
    for name, x in center_samples:
        def seq1(x=x):
            eps = r.counit_jl(x)  # j_lower j_restrict X -> X
            eta = r.unit_quot(x)  # X -> i_embed i_left X
            return eps.then(eta).is_zero and exact_at(r.cat_c, eps, eta) and is_epi(r.cat_c, eta)

        record("R4:jl->X->il->0", name, seq1)

        def kin(x=x):
            k_obj, _ = r.cat_c.kernel(r.counit_jl(x))
            return r.cat_u.is_zero_obj(r.j_restrict(k_obj))

        record("R4:K in image(i_embed)", name, kin,
               "kernel of the counit is killed by j_restrict")

        def seq2(x=x):
            mu = r.counit_sub(x)  # i_embed i_right X -> X
            nu = r.unit_jr(x)     # X -> j_roof j_restrict X
            return mu.then(nu).is_zero and exact_at(r.cat_c, mu, nu) and is_mono(r.cat_c, mu)

        record("R4:0->ir->X->jr", name, seq2)

        def kout(x=x):
            c_obj, _ = r.cat_c.cokernel(r.unit_jr(x))
            return r.cat_u.is_zero_obj(r.j_restrict(c_obj))

        record("R4:K' in image(i_embed)", name, kout,
               "cokernel of the unit is killed by j_restrict")
    return RecollementReport(label=r.label, results=tuple(out))


@dataclass(frozen=True)
class IntermediateExtension:
    obj: object                 # the image j_!* x in the center category
    from_lower: object          # epi  j_lower(x) ->> j_!* x
    into_roof: object           # mono j_!* x -> j_roof(x)


def intermediate_extension(r: Recollement, x) -> IntermediateExtension:
    """Image of the canonical map j_lower(x) -> j_roof(x).

    The canonical map is the adjoint transpose of the identity: invert the
    counit j_restrict(j_roof(x)) -> x, transpose along (j_lower -| j_restrict).
    Asserts i_left/i_right kill the image and j_restrict returns x.
    """
    cat = r.cat_c
    counit = r.counit_jr(x)  # j_restrict(j_roof x) -> x, an iso by (R2)
    inv = _invert(r.cat_u, counit)
    canon = r.j_lower.map(inv).then(r.counit_jl(r.j_roof(x)))
    img, epi, mono = cat.image(canon)
    assert r.cat_z.is_zero_obj(r.i_left(img)), "intermediate extension has a Z quotient"
    assert r.cat_z.is_zero_obj(r.i_right(img)), "intermediate extension has a Z subobject"
    back = r.j_restrict(img)
    iso, _, _ = r.cat_u.is_isomorphic(back, x)
    assert iso, "j_restrict does not recover the argument"
    return IntermediateExtension(obj=img, from_lower=epi, into_roof=mono)


def _invert(cat, f):
    """Inverse of an isomorphism, via the hom space."""
    basis = cat.hom_basis(f.target, f.source)
    from .category import factor_combination

    composed = [g.then(f) for g in basis]
    coeffs = factor_combination(cat, composed, cat.identity(f.target))
    assert coeffs is not None, "morphism is not invertible"
    out = cat.zero_mor(f.target, f.source)
    for c, g in zip(coeffs, basis):
        if c != cat.field.zero:
            out = out + g.scale(c)
    assert mor_eq(out.then(f), cat.identity(f.target))
    assert mor_eq(f.then(out), cat.identity(f.source))
    return out


@dataclass(frozen=True)
class CanonicalSES:
    left: object    # mono
    right: object   # epi
    sub: object
    middle: object
    quotient: object


class SidePreconditionError(ValueError):
    """The object has a nonzero quotient/subobject on the Z side."""


def canonical_ses(r: Recollement, m, side: str) -> CanonicalSES:
    """The canonical short exact sequence around j_!* j_restrict m.

    side="no-Z-quotients"  (i_left m = 0):  0 -> i_embed i_right m -> m -> j_!* j^* m -> 0
    side="no-Z-subobjects" (i_right m = 0): 0 -> j_!* j^* m -> m -> i_embed i_left m -> 0
    """
    cat = r.cat_c
    ie = intermediate_extension(r, r.j_restrict(m))
    if side == "no-Z-quotients":
        bad = r.i_left(m)
        if not r.cat_z.is_zero_obj(bad):
            raise SidePreconditionError(f"nonzero largest Z-quotient of dimension {r.cat_z.dim(bad)}")
        left = r.counit_sub(m)
        # factor the unit m -> j_roof j^* m through the image
        h = factor_through_mono(cat, r.unit_jr(m), ie.into_roof)
        assert h is not None, "unit does not factor through the intermediate extension"
        ses = CanonicalSES(left=left, right=h, sub=left.source, middle=m, quotient=ie.obj)
    elif side == "no-Z-subobjects":
        bad = r.i_right(m)
        if not r.cat_z.is_zero_obj(bad):
            raise SidePreconditionError(f"nonzero largest Z-subobject of dimension {r.cat_z.dim(bad)}")
        right = r.unit_quot(m)
        # counit_jl factors as (j_lower j^* m ->> j_!*) ; (j_!* -> m)
        h = _descend_through_epi(cat, r.counit_jl(m), ie.from_lower)
        assert h is not None, "counit does not descend through the intermediate extension"
        ses = CanonicalSES(left=h, right=right, sub=ie.obj, middle=m, quotient=right.target)
    else:
        raise ValueError(f"unknown side {side!r}")
    assert is_mono(cat, ses.left) and is_epi(cat, ses.right)
    assert ses.left.then(ses.right).is_zero
    assert cat.dim(ses.sub) + cat.dim(ses.quotient) == cat.dim(ses.middle)
    return ses


def _descend_through_epi(cat, f, epi):
    """g with epi ; g = f (unique since epi is surjective)."""
    basis = cat.hom_basis(epi.target, f.target)
    if not basis:
        if f.is_zero:
            return cat.zero_mor(epi.target, f.target)
        return None
    composed = [epi.then(g) for g in basis]
    from .category import factor_combination

    coeffs = factor_combination(cat, composed, f)
    if coeffs is None:
        return None
    out = cat.zero_mor(epi.target, f.target)
    for c, g in zip(coeffs, basis):
        if c != cat.field.zero:
            out = out + g.scale(c)
    return out


@dataclass(frozen=True)
class CoverTransport:
    cover: object       # j_lower(p), projective in the center category
    cover_map: object   # j_lower(p) ->> j_!*(x)
    matches_direct: bool | None  # comparison with the directly computed cover


def cover_transport(r: Recollement, x, p_cover) -> CoverTransport:
    """Transport a U-side projective cover p ->> x to a cover of j_!*(x).

    ``p_cover`` is the covering morphism in the U category.  j_lower is the
    left adjoint of the exact j_restrict, so it preserves projectives; the
    composite j_lower(p) -> j_lower(x) ->> j_!*(x) is an essential
    surjection.  When the center category supports direct covers (module
    categories), the result is cross-checked against one.
    """
    cat = r.cat_c
    ie = intermediate_extension(r, x)
    composite = r.j_lower.map(p_cover).then(ie.from_lower)
    assert is_epi(cat, composite), "transported map is not surjective"
    matches = None
    if isinstance(cat, ModuleCategory):
        direct = projective_cover(ie.obj)
        ok, _, _ = cat.is_isomorphic(direct.projective, composite.source)
        matches = ok
        assert ok, "transported cover disagrees with the direct projective cover"
    return CoverTransport(cover=composite.source, cover_map=composite, matches_direct=matches)
