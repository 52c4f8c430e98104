"""The Macpherson-Vilonen gluing of two module categories.

Input: algebras R (the closed side) and S (the open side), an (S, R)
bimodule M realizing the right exact functor F = (-) (x)_S M, an (R, S)
bimodule N realizing the left exact functor G = Hom_S(N, -), and a pairing
theta: M (x)_R N -> S.  The pairing induces the natural transformation

    eps_X : F(X) -> G(X),    eps_X(x (x) m)(n) = x . theta(m (x) n),

and the glued category has objects (X_U, X_Z, alpha, beta) with
beta . alpha = eps_{X_U}.  Kernels and cokernels are componentwise with
induced connecting maps (G preserves the kernels, F the cokernels).  The
category implements the same computable-category surface as module
categories, so the generic recollement machinery runs on it unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebra import Algebra
from .linalg import Matrix, Subspace, intertwiner_basis
from .modules import ModuleMap, RightModule, simple_module, zero_module
from .recollement import Recollement
from .category import Functor, ModuleCategory


class MVDataError(ValueError):
    pass


@dataclass(frozen=True)
class Bimodule:
    """A (left_algebra, right_algebra)-bimodule on row vectors.

    ``right_action[k]`` is multiplicative as usual; the left action composes
    through the opposite order (apply the right factor first), and the two
    actions commute.
    """

    left_algebra: Algebra
    right_algebra: Algebra
    dim: int
    left_action: tuple[Matrix, ...]
    right_action: tuple[Matrix, ...]

    def left_of(self, vec: Sequence) -> Matrix:
        F = self.left_algebra.field
        out = Matrix.zero(F, self.dim, self.dim)
        for k, c in enumerate(vec):
            if c != F.zero:
                out = out + self.left_action[k].scale(c)
        return out

    def right_of(self, vec: Sequence) -> Matrix:
        F = self.right_algebra.field
        out = Matrix.zero(F, self.dim, self.dim)
        for k, c in enumerate(vec):
            if c != F.zero:
                out = out + self.right_action[k].scale(c)
        return out


def validate_bimodule(b: Bimodule) -> None:
    L, R = b.left_algebra, b.right_algebra
    F = L.field
    ident = Matrix.identity(F, b.dim)
    if b.left_of(L.unit) != ident or b.right_of(R.unit) != ident:
        raise MVDataError("units must act as the identity on the bimodule")
    for i in range(R.dim):
        for j in range(R.dim):
            if b.right_action[i] @ b.right_action[j] != b.right_of(R.mult[i][j]):
                raise MVDataError("right action is not multiplicative")
    for i in range(L.dim):
        for j in range(L.dim):
            # (s s') . v applies s' first in row convention
            if b.left_action[j] @ b.left_action[i] != b.left_of(L.mult[i][j]):
                raise MVDataError("left action is not multiplicative")
    for i in range(L.dim):
        for j in range(R.dim):
            if b.left_action[i] @ b.right_action[j] != b.right_action[j] @ b.left_action[i]:
                raise MVDataError("left and right actions do not commute")


@dataclass(frozen=True)
class MVData:
    z_algebra: Algebra   # R
    u_algebra: Algebra   # S
    m: Bimodule          # left S, right R
    n: Bimodule          # left R, right S
    theta: Matrix        # (dim m * dim n) x dim S

    def __post_init__(self):
        if self.m.left_algebra != self.u_algebra or self.m.right_algebra != self.z_algebra:
            raise MVDataError("m must be a (u_algebra, z_algebra)-bimodule")
        if self.n.left_algebra != self.z_algebra or self.n.right_algebra != self.u_algebra:
            raise MVDataError("n must be a (z_algebra, u_algebra)-bimodule")
        if self.theta.rows != self.m.dim * self.n.dim or self.theta.cols != self.u_algebra.dim:
            raise MVDataError("theta has the wrong shape")


def validate_mv_data(d: MVData) -> None:
    """Bimodule axioms, balance of theta over R, and S-S equivariance."""
    validate_bimodule(d.m)
    validate_bimodule(d.n)
    F = d.u_algebra.field
    dm, dn = d.m.dim, d.n.dim

    def theta_val(mi_vec, nj_vec) -> tuple:
        # bilinear extension of theta on coordinate pairs
        out = [F.zero] * d.u_algebra.dim
        for i, ci in enumerate(mi_vec):
            if ci == F.zero:
                continue
            for j, cj in enumerate(nj_vec):
                if cj == F.zero:
                    continue
                row = d.theta.row(i * dn + j)
                c = F.mul(ci, cj)
                out = [F.add(x, F.mul(c, y)) for x, y in zip(out, row)]
        return tuple(out)

    def unit_vec(n, k):
        return tuple(F.one if t == k else F.zero for t in range(n))

    for r in range(d.z_algebra.dim):
        rv = d.z_algebra.basis_vec(r)
        mr = d.m.right_of(rv)
        rn = d.n.left_of(rv)
        for i in range(dm):
            for j in range(dn):
                lhs = theta_val(mr.row(i), unit_vec(dn, j))
                rhs = theta_val(unit_vec(dm, i), rn.apply_row(unit_vec(dn, j)))
                if lhs != rhs:
                    raise MVDataError("theta is not balanced over the closed-side algebra")
    for sidx in range(d.u_algebra.dim):
        sv = d.u_algebra.basis_vec(sidx)
        ls = d.m.left_of(sv)
        rs = d.n.right_of(sv)
        for i in range(dm):
            for j in range(dn):
                lhs = theta_val(ls.apply_row(unit_vec(dm, i)), unit_vec(dn, j))
                rhs = d.u_algebra.mul_vec(sv, theta_val(unit_vec(dm, i), unit_vec(dn, j)))
                if lhs != rhs:
                    raise MVDataError("theta is not left equivariant")
                lhs = theta_val(unit_vec(dm, i), rs.apply_row(unit_vec(dn, j)))
                rhs = d.u_algebra.mul_vec(theta_val(unit_vec(dm, i), unit_vec(dn, j)), sv)
                if lhs != rhs:
                    raise MVDataError("theta is not right equivariant")


# ---------------------------------------------------------------------------
# the two functors and the natural transformation


class MVFunctors:
    """F = (-) (x)_S M and G = Hom_S(N, -), with eps: F -> G from theta."""

    def __init__(self, data: MVData):
        self.data = data
        self.F_field = data.u_algebra.field

    # tensor functor -------------------------------------------------------

    def _tensor_relations(self, x: RightModule) -> Subspace:
        d = self.data
        F = self.F_field
        dx, dm = x.dim, d.m.dim
        vecs = []
        for i in range(dx):
            for s in range(d.u_algebra.dim):
                xs = x.action[s].row(i)
                ls = d.m.left_action[s]
                for j in range(dm):
                    vec = [F.zero] * (dx * dm)
                    for i2, c in enumerate(xs):
                        if c != F.zero:
                            vec[i2 * dm + j] = F.add(vec[i2 * dm + j], c)
                    for j2 in range(dm):
                        c = ls[j, j2]
                        if c != F.zero:
                            vec[i * dm + j2] = F.sub(vec[i * dm + j2], c)
                    vecs.append(tuple(vec))
        return Subspace.span(F, vecs, dx * dm) if vecs else Subspace.zero(F, dx * dm)

    def F_obj(self, x: RightModule) -> RightModule:
        d = self.data
        F = self.F_field
        dx, dm = x.dim, d.m.dim
        projT, secT = self._tensor_relations(x).quotient_maps()
        acts = []
        for k in range(d.z_algebra.dim):
            rk = d.m.right_action[k]
            rows = []
            for i in range(dx):
                for j in range(dm):
                    row = [F.zero] * (dx * dm)
                    for j2 in range(dm):
                        c = rk[j, j2]
                        if c != F.zero:
                            row[i * dm + j2] = c
                    rows.append(tuple(row))
            big = Matrix.from_rows(F, rows, cols=dx * dm)
            acts.append(secT @ big @ projT)
        return RightModule(d.z_algebra, projT.cols, tuple(acts))

    def F_mor(self, f: ModuleMap) -> ModuleMap:
        d = self.data
        F = self.F_field
        dm = d.m.dim
        dx, dy = f.source.dim, f.target.dim
        rows = []
        for i in range(dx):
            for j in range(dm):
                row = [F.zero] * (dy * dm)
                for i2 in range(dy):
                    c = f.mat[i, i2]
                    if c != F.zero:
                        row[i2 * dm + j] = c
                rows.append(tuple(row))
        big = Matrix.from_rows(F, rows, cols=dy * dm)
        _, secX = self._tensor_relations(f.source).quotient_maps()
        projY, _ = self._tensor_relations(f.target).quotient_maps()
        return ModuleMap(self.F_obj(f.source), self.F_obj(f.target), secX @ big @ projY)

    # hom functor -----------------------------------------------------------

    def _hom_basis_mats(self, x: RightModule) -> list[Matrix]:
        d = self.data
        pairs = [
            (d.n.right_action[s], x.action[s]) for s in range(d.u_algebra.dim)
        ]
        return intertwiner_basis(self.F_field, pairs, d.n.dim, x.dim)

    def _hom_coords(self, basis: list[Matrix], mats: list[Matrix], x: RightModule) -> Matrix:
        F = self.F_field
        dn = self.data.n.dim
        if not basis:
            return Matrix.from_rows(F, [], cols=0) if not mats else Matrix.zero(F, len(mats), 0)
        flat_basis = Matrix.from_rows(F, [b.entries for b in basis], cols=dn * x.dim)
        flat_targets = Matrix.from_rows(F, [m.entries for m in mats], cols=dn * x.dim)
        sol = flat_basis.solve_left(flat_targets)
        assert sol is not None, "map left the hom space"
        return sol

    def G_obj(self, x: RightModule) -> RightModule:
        d = self.data
        F = self.F_field
        basis = self._hom_basis_mats(x)
        dg = len(basis)
        acts = []
        for k in range(d.z_algebra.dim):
            imgs = [d.n.left_action[k] @ phi for phi in basis]
            acts.append(self._hom_coords(basis, imgs, x) if dg else Matrix.zero(F, 0, 0))
        return RightModule(d.z_algebra, dg, tuple(acts))

    def G_mor(self, f: ModuleMap) -> ModuleMap:
        bx = self._hom_basis_mats(f.source)
        by = self._hom_basis_mats(f.target)
        imgs = [phi @ f.mat for phi in bx]
        mat = self._hom_coords(by, imgs, f.target) if by else Matrix.zero(self.F_field, len(bx), 0)
        return ModuleMap(self.G_obj(f.source), self.G_obj(f.target), mat)

    # the natural transformation ---------------------------------------------

    def eps(self, x: RightModule) -> ModuleMap:
        d = self.data
        F = self.F_field
        dx, dm, dn = x.dim, d.m.dim, d.n.dim
        basis = self._hom_basis_mats(x)
        mats = []
        for i in range(dx):
            for j in range(dm):
                rows = []
                for t in range(dn):
                    sval = d.theta.row(j * dn + t)
                    rows.append(x.action_of(sval).row(i))
                mats.append(Matrix.from_rows(F, rows, cols=dx))
        v_mat_rows = self._hom_coords(basis, mats, x) if basis else Matrix.zero(F, dx * dm, 0)
        W = self._tensor_relations(x)
        if W.dim and basis:
            assert (W.basis @ v_mat_rows).is_zero, "eps not well defined on the tensor quotient"
        _, secT = W.quotient_maps()
        return ModuleMap(self.F_obj(x), self.G_obj(x), secT @ v_mat_rows)

    def check_naturality(self, maps: Sequence[ModuleMap]) -> None:
        for f in maps:
            lhs = self.F_mor(f).then(self.eps(f.target))
            rhs = self.eps(f.source).then(self.G_mor(f))
            if not (lhs - rhs).is_zero:
                raise MVDataError("eps fails naturality on a sample morphism")


# ---------------------------------------------------------------------------
# objects, morphisms, category


@dataclass(frozen=True)
class MVObject:
    x_u: RightModule
    x_z: RightModule
    alpha: ModuleMap  # F(x_u) -> x_z
    beta: ModuleMap   # x_z -> G(x_u)


@dataclass(frozen=True)
class MVMorphism:
    source: MVObject
    target: MVObject
    f_u: ModuleMap
    f_z: ModuleMap

    def then(self, other: "MVMorphism") -> "MVMorphism":
        assert self.target == other.source, "maps not composable"
        return MVMorphism(self.source, other.target, self.f_u.then(other.f_u), self.f_z.then(other.f_z))

    def __add__(self, other: "MVMorphism") -> "MVMorphism":
        return MVMorphism(self.source, self.target, self.f_u + other.f_u, self.f_z + other.f_z)

    def __sub__(self, other: "MVMorphism") -> "MVMorphism":
        return MVMorphism(self.source, self.target, self.f_u - other.f_u, self.f_z - other.f_z)

    def scale(self, c) -> "MVMorphism":
        return MVMorphism(self.source, self.target, self.f_u.scale(c), self.f_z.scale(c))

    @property
    def is_zero(self) -> bool:
        return self.f_u.is_zero and self.f_z.is_zero


class MVCategory:
    """The glued abelian category, as a computable category handle."""

    def __init__(self, data: MVData, check: bool = True):
        if check:
            validate_mv_data(data)
        self.data = data
        self.fun = MVFunctors(data)
        self.field = data.u_algebra.field
        self.cat_u = ModuleCategory(data.u_algebra)
        self.cat_z = ModuleCategory(data.z_algebra)

    # object helpers --------------------------------------------------------

    def make_object(self, x_u, x_z, alpha, beta, check: bool = True) -> MVObject:
        obj = MVObject(x_u, x_z, alpha, beta)
        if check:
            eps = self.fun.eps(x_u)
            if not (alpha.then(beta) - eps).is_zero:
                raise MVDataError("beta . alpha differs from eps: not a glued object")
        return obj

    def zero_obj(self) -> MVObject:
        zu = zero_module(self.data.u_algebra)
        zz = zero_module(self.data.z_algebra)
        fz = self.fun.F_obj(zu)
        gz = self.fun.G_obj(zu)
        return MVObject(
            zu, zz,
            ModuleMap(fz, zz, Matrix.zero(self.field, fz.dim, 0)),
            ModuleMap(zz, gz, Matrix.zero(self.field, 0, gz.dim)),
        )

    def dim(self, x: MVObject) -> int:
        return x.x_u.dim + x.x_z.dim

    def is_zero_obj(self, x: MVObject) -> bool:
        return self.dim(x) == 0

    # morphisms ---------------------------------------------------------------

    def identity(self, x: MVObject) -> MVMorphism:
        from .modules import identity_map

        return MVMorphism(x, x, identity_map(x.x_u), identity_map(x.x_z))

    def zero_mor(self, x: MVObject, y: MVObject) -> MVMorphism:
        from .modules import zero_map

        return MVMorphism(x, y, zero_map(x.x_u, y.x_u), zero_map(x.x_z, y.x_z))

    def mor_coords(self, f: MVMorphism) -> tuple:
        return f.f_u.mat.entries + f.f_z.mat.entries

    def hom_basis(self, x: MVObject, y: MVObject) -> list[MVMorphism]:
        from .modules import hom_basis as module_hom

        hu = module_hom(x.x_u, y.x_u)
        hz = module_hom(x.x_z, y.x_z)
        nu, nz = len(hu), len(hz)
        if nu + nz == 0:
            return []
        F = self.field
        # prism defect is linear in (f_u, f_z); solve for its kernel
        rows = []
        for k in range(nu + nz):
            if k < nu:
                fu, fz = hu[k], None
                d1 = self.fun.F_mor(fu).then(y.alpha)
                d2 = x.beta.then(self.fun.G_mor(fu))
            else:
                fu, fz = None, hz[k - nu]
                d1 = x.alpha.then(fz).scale(F.neg(F.one))
                d2 = fz.then(y.beta).scale(F.neg(F.one))
            rows.append(d1.mat.entries + d2.mat.entries)
        ncols = len(rows[0]) if rows else 0
        T = Matrix.from_rows(F, rows, cols=ncols)
        ker = T.left_kernel()
        from .modules import zero_map

        out = []
        for i in range(ker.dim):
            coeffs = ker.basis.row(i)
            fu = None
            for c, h in zip(coeffs[:nu], hu):
                if c != F.zero:
                    fu = h.scale(c) if fu is None else fu + h.scale(c)
            fz = None
            for c, h in zip(coeffs[nu:], hz):
                if c != F.zero:
                    fz = h.scale(c) if fz is None else fz + h.scale(c)
            out.append(
                MVMorphism(
                    x, y,
                    fu if fu is not None else zero_map(x.x_u, y.x_u),
                    fz if fz is not None else zero_map(x.x_z, y.x_z),
                )
            )
        return out

    # kernels, cokernels, images ------------------------------------------------

    def kernel(self, f: MVMorphism) -> tuple[MVObject, MVMorphism]:
        from .modules import kernel as module_kernel

        ku, iu = module_kernel(f.f_u)
        kz, iz = module_kernel(f.f_z)
        # alpha restricts: F(ku) -> kz  (image lands in ker f_z)
        a_mat = iz.mat.solve_left(self.fun.F_mor(iu).then(f.source.alpha).mat)
        assert a_mat is not None, "alpha does not restrict to the kernel"
        alpha_k = ModuleMap(self.fun.F_obj(ku), kz, a_mat)
        # beta corestricts through the mono G(ku) -> G(x_u)
        g_iu = self.fun.G_mor(iu)
        b_mat = g_iu.mat.solve_left(iz.then(f.source.beta).mat)
        assert b_mat is not None, "beta does not corestrict to the kernel"
        beta_k = ModuleMap(kz, self.fun.G_obj(ku), b_mat)
        k_obj = self.make_object(ku, kz, alpha_k, beta_k)
        return k_obj, MVMorphism(k_obj, f.source, iu, iz)

    def cokernel(self, f: MVMorphism) -> tuple[MVObject, MVMorphism]:
        from .modules import cokernel as module_cokernel

        cu, pu = module_cokernel(f.f_u)
        cz, pz = module_cokernel(f.f_z)
        f_pu = self.fun.F_mor(pu)
        a_mat = f_pu.mat.solve_right(f.target.alpha.then(pz).mat)
        assert a_mat is not None, "alpha does not descend to the cokernel"
        alpha_c = ModuleMap(self.fun.F_obj(cu), cz, a_mat)
        b_mat = pz.mat.solve_right(f.target.beta.then(self.fun.G_mor(pu)).mat)
        assert b_mat is not None, "beta does not descend to the cokernel"
        beta_c = ModuleMap(cz, self.fun.G_obj(cu), b_mat)
        c_obj = self.make_object(cu, cz, alpha_c, beta_c)
        return c_obj, MVMorphism(f.target, c_obj, pu, pz)

    def image(self, f: MVMorphism) -> tuple[MVObject, MVMorphism, MVMorphism]:
        from .modules import image as module_image

        iu_obj, eu, mu = module_image(f.f_u)
        iz_obj, ez, mz = module_image(f.f_z)
        f_eu = self.fun.F_mor(eu)
        a_mat = f_eu.mat.solve_right(f.source.alpha.then(ez).mat)
        assert a_mat is not None
        alpha_i = ModuleMap(self.fun.F_obj(iu_obj), iz_obj, a_mat)
        g_mu = self.fun.G_mor(mu)
        b_mat = g_mu.mat.solve_left(mz.then(f.target.beta).mat)
        assert b_mat is not None
        beta_i = ModuleMap(iz_obj, self.fun.G_obj(iu_obj), b_mat)
        i_obj = self.make_object(iu_obj, iz_obj, alpha_i, beta_i)
        return i_obj, MVMorphism(f.source, i_obj, eu, ez), MVMorphism(i_obj, f.target, mu, mz)

    def direct_sum(self, xs: Sequence[MVObject]):
        """Componentwise sum; the connecting maps are solved through the
        canonical additivity isomorphisms of the two functors."""
        from .modules import direct_sum as module_sum

        if not xs:
            z = self.zero_obj()
            return z, [], []
        if len(xs) == 1:
            x = xs[0]
            return x, [self.identity(x)], [self.identity(x)]
        F = self.field
        big_u, inj_u, proj_u = module_sum([x.x_u for x in xs])
        big_z, inj_z, proj_z = module_sum([x.x_z for x in xs])
        f_big = self.fun.F_obj(big_u)
        g_big = self.fun.G_obj(big_u)
        # alpha: F(inj_i) ; alpha = alpha_i ; inj_z_i, stacked and solved
        lhs = None
        rhs = None
        for x, iu, iz in zip(xs, inj_u, inj_z):
            f_iu = self.fun.F_mor(iu)
            lhs = f_iu.mat if lhs is None else lhs.stack(f_iu.mat)
            block = x.alpha.then(iz).mat
            rhs = block if rhs is None else rhs.stack(block)
        if f_big.dim == 0 or big_z.dim == 0:
            alpha_mat = Matrix.zero(F, f_big.dim, big_z.dim)
        else:
            alpha_mat = lhs.solve_right(rhs)
            assert alpha_mat is not None, "additivity solve for alpha failed"
        alpha = ModuleMap(f_big, big_z, alpha_mat)
        # beta: beta ; G(proj_i) = proj_z_i ; beta_i, hstacked and solved
        lhs_h = None
        rhs_h = None
        for x, pu, pz in zip(xs, proj_u, proj_z):
            g_pu = self.fun.G_mor(pu)
            lhs_h = g_pu.mat if lhs_h is None else lhs_h.hstack(g_pu.mat)
            block = pz.then(x.beta).mat
            rhs_h = block if rhs_h is None else rhs_h.hstack(block)
        if big_z.dim == 0 or g_big.dim == 0:
            beta_mat = Matrix.zero(F, big_z.dim, g_big.dim)
        else:
            beta_mat = lhs_h.solve_left(rhs_h)
            assert beta_mat is not None, "additivity solve for beta failed"
        beta = ModuleMap(big_z, g_big, beta_mat)
        total = self.make_object(big_u, big_z, alpha, beta)
        injs = [MVMorphism(x, total, iu, iz) for x, iu, iz in zip(xs, inj_u, inj_z)]
        projs = [MVMorphism(total, x, pu, pz) for x, pu, pz in zip(xs, proj_u, proj_z)]
        return total, injs, projs

    def is_isomorphic(self, x: MVObject, y: MVObject):
        if (x.x_u.dim, x.x_z.dim) != (y.x_u.dim, y.x_z.dim):
            return False, None, "component dimensions differ"
        basis = self.hom_basis(x, y)
        if not basis:
            return (self.dim(x) == 0), (self.identity(x) if self.dim(x) == 0 else None), "hom space zero"
        F = self.field

        def try_coeffs(coeffs):
            f = self.zero_mor(x, y)
            for c, h in zip(coeffs, basis):
                if c != F.zero:
                    f = f + h.scale(c)
            if f.f_u.rank() == x.x_u.dim and f.f_z.rank() == x.x_z.dim:
                return f
            return None

        for i in range(len(basis)):
            got = try_coeffs([F.one if j == i else F.zero for j in range(len(basis))])
            if got:
                return True, got, "basis element"
        if F.is_finite and F.p ** len(basis) <= 4096:
            for coeffs in itertools.product(range(F.p), repeat=len(basis)):
                got = try_coeffs([F.of(c) for c in coeffs])
                if got:
                    return True, got, "exhaustive search"
            return False, None, "exhaustive search found no isomorphism"
        return False, None, "no isomorphism among basis elements (heuristic)"


# ---------------------------------------------------------------------------
# the recollement


def mv_recollement(data: MVData, check: bool = True) -> Recollement:
    cat = MVCategory(data, check=check)
    fun = cat.fun
    F = cat.field
    cat_z = cat.cat_z
    cat_u = cat.cat_u

    from .modules import identity_map, zero_map

    def i_embed_obj(z: RightModule) -> MVObject:
        zu = zero_module(data.u_algebra)
        fz = fun.F_obj(zu)
        gz = fun.G_obj(zu)
        return MVObject(
            zu, z,
            ModuleMap(fz, z, Matrix.zero(F, fz.dim, z.dim)),
            ModuleMap(z, gz, Matrix.zero(F, z.dim, gz.dim)),
        )

    def i_embed_mor(f: ModuleMap) -> MVMorphism:
        src, tgt = i_embed_obj(f.source), i_embed_obj(f.target)
        return MVMorphism(src, tgt, zero_map(src.x_u, tgt.x_u), f)

    def i_left_obj(x: MVObject) -> RightModule:
        from .modules import cokernel as module_cokernel

        return module_cokernel(x.alpha)[0]

    def i_left_mor(f: MVMorphism) -> ModuleMap:
        from .modules import cokernel as module_cokernel

        _, p_src = module_cokernel(f.source.alpha)
        c_tgt, p_tgt = module_cokernel(f.target.alpha)
        mat = p_src.mat.solve_right(f.f_z.then(p_tgt).mat)
        assert mat is not None
        return ModuleMap(p_src.target, c_tgt, mat)

    def i_right_obj(x: MVObject) -> RightModule:
        from .modules import kernel as module_kernel

        return module_kernel(x.beta)[0]

    def i_right_mor(f: MVMorphism) -> ModuleMap:
        from .modules import kernel as module_kernel

        k_src, i_src = module_kernel(f.source.beta)
        k_tgt, i_tgt = module_kernel(f.target.beta)
        mat = i_tgt.mat.solve_left(i_src.then(f.f_z).mat)
        assert mat is not None
        return ModuleMap(k_src, k_tgt, mat)

    def j_restrict_obj(x: MVObject) -> RightModule:
        return x.x_u

    def j_restrict_mor(f: MVMorphism) -> ModuleMap:
        return f.f_u

    def j_lower_obj(u: RightModule) -> MVObject:
        fu = fun.F_obj(u)
        return MVObject(u, fu, identity_map(fu), fun.eps(u))

    def j_lower_mor(f: ModuleMap) -> MVMorphism:
        return MVMorphism(j_lower_obj(f.source), j_lower_obj(f.target), f, fun.F_mor(f))

    def j_roof_obj(u: RightModule) -> MVObject:
        gu = fun.G_obj(u)
        return MVObject(u, gu, fun.eps(u), identity_map(gu))

    def j_roof_mor(f: ModuleMap) -> MVMorphism:
        return MVMorphism(j_roof_obj(f.source), j_roof_obj(f.target), f, fun.G_mor(f))

    # units and counits (all componentwise canonical)
    def unit_quot(x: MVObject) -> MVMorphism:
        from .modules import cokernel as module_cokernel

        c, p = module_cokernel(x.alpha)
        return MVMorphism(x, i_embed_obj(c), zero_map(x.x_u, zero_module(data.u_algebra)), p)

    def counit_quot(z: RightModule) -> ModuleMap:
        src = i_left_obj(i_embed_obj(z))
        assert src == z
        return identity_map(z)

    def unit_sub(z: RightModule) -> ModuleMap:
        tgt = i_right_obj(i_embed_obj(z))
        assert tgt == z
        return identity_map(z)

    def counit_sub(x: MVObject) -> MVMorphism:
        from .modules import kernel as module_kernel

        k, i = module_kernel(x.beta)
        return MVMorphism(i_embed_obj(k), x, zero_map(zero_module(data.u_algebra), x.x_u), i)

    def unit_jl(u: RightModule) -> ModuleMap:
        assert j_restrict_obj(j_lower_obj(u)) == u
        return identity_map(u)

    def counit_jl(x: MVObject) -> MVMorphism:
        return MVMorphism(j_lower_obj(x.x_u), x, identity_map(x.x_u), x.alpha)

    def unit_jr(x: MVObject) -> MVMorphism:
        return MVMorphism(x, j_roof_obj(x.x_u), identity_map(x.x_u), x.beta)

    def counit_jr(u: RightModule) -> ModuleMap:
        assert j_restrict_obj(j_roof_obj(u)) == u
        return identity_map(u)

    return Recollement(
        cat_z=cat_z,
        cat_c=cat,
        cat_u=cat_u,
        i_embed=Functor("i_embed", cat_z, cat, i_embed_obj, i_embed_mor),
        i_left=Functor("i_left", cat, cat_z, i_left_obj, i_left_mor),
        i_right=Functor("i_right", cat, cat_z, i_right_obj, i_right_mor),
        j_restrict=Functor("j_restrict", cat, cat_u, j_restrict_obj, j_restrict_mor),
        j_lower=Functor("j_lower", cat_u, cat, j_lower_obj, j_lower_mor),
        j_roof=Functor("j_roof", cat_u, cat, j_roof_obj, j_roof_mor),
        unit_quot=unit_quot,
        counit_quot=counit_quot,
        unit_sub=unit_sub,
        counit_sub=counit_sub,
        unit_jl=unit_jl,
        counit_jl=counit_jl,
        unit_jr=unit_jr,
        counit_jr=counit_jr,
        label="Macpherson-Vilonen gluing",
        extras={"mv_data": data, "mv_category": cat},
    )


def mv_intermediate_table(cat: MVCategory, u: RightModule) -> MVObject:
    """j_!* by the closed formula: (X_U, im eps, corestricted eps, inclusion)."""
    from .modules import image as module_image

    eps = cat.fun.eps(u)
    img, epi, mono = module_image(eps)
    return cat.make_object(u, img, epi, mono)


def i_exact_retract(x: MVObject) -> RightModule:
    """The exact retraction of the closed embedding: (X_U, X_Z, a, b) -> X_Z."""
    return x.x_z


def mv_simples(data: MVData, check: bool = True) -> list[tuple[str, MVObject]]:
    """All simples: the embedded closed-side simples plus the intermediate
    extensions of the open-side simples.  Simplicity and pairwise
    non-isomorphism are asserted."""
    cat = MVCategory(data, check=check)
    out: list[tuple[str, MVObject]] = []
    r = mv_recollement(data, check=False)
    for v in data.z_algebra.vertex_names:
        obj = r.i_embed(simple_module(data.z_algebra, v))
        assert _mv_is_simple(cat, r, obj), f"embedded simple at {v} is not simple"
        out.append((f"i_embed(S_z({v}))", obj))
    from .recollement import intermediate_extension

    for w in data.u_algebra.vertex_names:
        ie = intermediate_extension(r, simple_module(data.u_algebra, w))
        obj = ie.obj
        table = mv_intermediate_table(cat, simple_module(data.u_algebra, w))
        ok, _, _ = cat.is_isomorphic(obj, table)
        assert ok, "generic intermediate extension disagrees with the closed formula"
        assert _mv_is_simple(cat, r, obj), f"intermediate extension at {w} is not simple"
        out.append((f"j_!*(S_u({w}))", obj))
    for (n1, a), (n2, b) in itertools.combinations(out, 2):
        iso, _, _ = cat.is_isomorphic(a, b)
        assert not iso, f"simples {n1} and {n2} are isomorphic"
    return out


def _mv_is_simple(cat: MVCategory, r: Recollement, t: MVObject) -> bool:
    """Simplicity through the recollement classification: either a simple
    closed-side object with zero open part, or a simple open restriction
    with t isomorphic to its intermediate extension."""
    from .recollement import intermediate_extension

    if cat.is_zero_obj(t):
        return False
    if t.x_u.dim == 0:
        return t.x_z.dim == 1  # split basic: simples are one-dimensional
    if t.x_u.dim != 1:
        return False
    ie = intermediate_extension(r, t.x_u)
    ok, _, _ = cat.is_isomorphic(t, ie.obj)
    return ok


def mv_subobject_pairs(cat: MVCategory, t: MVObject):
    """Exhaustive subobject enumeration over small finite fields.

    A subobject is a pair of action-closed subspaces (W_u, W_z) such that
    alpha carries the tensor image of W_u into W_z and beta carries W_z
    into the hom image of W_u.  Strictly an oracle for tiny objects.
    """
    from .modules import submodule

    F = cat.field
    if not F.is_finite:
        raise ValueError("subobject enumeration needs a finite field")

    def all_submodule_spaces(mod):
        dims = mod.dim
        if F.p ** (dims * dims) > 2 ** 16:
            raise ValueError("object too large for subobject enumeration")
        seen = set()
        out = []
        for rows in itertools.product(itertools.product(range(F.p), repeat=dims), repeat=dims):
            space = Subspace.span(F, [tuple(F.of(x) for x in r) for r in rows], dims)
            if space in seen:
                continue
            seen.add(space)
            closed = True
            for k in range(mod.algebra.dim):
                img = space.basis @ mod.action[k]
                if not all(space.contains(img.row(i)) for i in range(img.rows)):
                    closed = False
                    break
            if closed:
                out.append(space)
        return out

    pairs = []
    for wu in all_submodule_spaces(t.x_u):
        for wz in all_submodule_spaces(t.x_z):
            sub_u, iu = submodule(t.x_u, wu)
            f_iu = cat.fun.F_mor(iu)
            # alpha(F(W_u)) inside W_z
            carried = f_iu.then(t.alpha)
            if not all(wz.contains(carried.mat.row(i)) for i in range(carried.mat.rows)):
                continue
            # beta(W_z) inside the image of G(W_u)
            g_iu = cat.fun.G_mor(iu)
            img_rows = g_iu.mat.row_space()
            ok = True
            for i in range(wz.dim):
                v = Matrix.from_rows(F, [wz.basis.row(i)], cols=t.x_z.dim) @ t.beta.mat
                if not img_rows.contains(v.row(0)):
                    ok = False
                    break
            if ok:
                pairs.append((wu, wz))
    return pairs


def mv_data_from_spec(spec, field) -> MVData:
    """Build MVData from the parsed file block (see specfile.MVSpec)."""
    from .algebra import build_bound_quiver_algebra

    z_alg = build_bound_quiver_algebra(spec.z_presentation, field)
    u_alg = build_bound_quiver_algebra(spec.u_presentation, field)

    def build_bimodule(bspec, left_alg, right_alg) -> Bimodule:
        dim = bspec.dim

        def mats(raw: dict, alg: Algebra, which: str) -> tuple[Matrix, ...]:
            out = []
            for label in alg.basis_labels:
                if label not in raw:
                    raise MVDataError(f"missing {which} action matrix for basis element {label}")
                rows = raw[label]
                if len(rows) != dim:
                    raise MVDataError(f"{which} action for {label}: expected {dim} rows")
                out.append(Matrix.from_rows(field, rows, cols=dim))
            unknown = set(raw) - set(alg.basis_labels)
            if unknown:
                raise MVDataError(f"{which} action names unknown basis elements {sorted(unknown)}")
            return tuple(out)

        b = Bimodule(
            left_algebra=left_alg,
            right_algebra=right_alg,
            dim=dim,
            left_action=mats(bspec.left, left_alg, "left"),
            right_action=mats(bspec.right, right_alg, "right"),
        )
        validate_bimodule(b)
        return b

    m = build_bimodule(spec.m, u_alg, z_alg)
    n = build_bimodule(spec.n, z_alg, u_alg)
    theta_rows = spec.theta
    if len(theta_rows) != m.dim * n.dim:
        raise MVDataError(f"theta: expected {m.dim * n.dim} rows, got {len(theta_rows)}")
    theta = Matrix.from_rows(field, theta_rows, cols=u_alg.dim)
    data = MVData(z_algebra=z_alg, u_algebra=u_alg, m=m, n=n, theta=theta)
    validate_mv_data(data)
    return data
