"""Decision procedures on stratifications.

* exactness of the one-sided extension functors at a stratum (via
  projectivity of the corner bimodules, with positive cover certificates
  and negative lost-exactness witnesses),
* the Ext-comparison map along a Serre inclusion (explicit resolution
  lifting, not dimension counting),
* k-homological stratifications,
* the sign-stratified decision, by the homological criterion and by direct
  filtration search on both the projective and injective sides,
* bounded-degree Ext-vanishing tables between the sign-standard and
  sign-costandard families,
* highest-weight detection by structure and by the axioms, cross-checked.

Every negative verdict carries a finite witness.  Route disagreement is a
falsification event: it is reported, never auto-resolved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import Algebra, opposite
from .homological import ext, ext_dim, projective_resolution, reduce_cocycle
from .linalg import Matrix
from .modules import (
    ModuleMap,
    RightModule,
    hom_basis,
    injective_module,
    kernel,
    lift_through_surjection,
    projective_cover,
    projective_module,
    simple_module,
    structural_series,
)
from .strat import (
    Poset,
    Stratification,
    StratificationError,
    filtration_search,
    inflate_module,
)


# -- exactness of the one-sided extension functors ---------------------------


@dataclass(frozen=True)
class ExactnessVerdict:
    stratum: str
    side: str                  # "j_!" or "j_*"
    exact: bool
    reason: str
    witness: dict | None       # lost-exactness data when not exact


def _corner_bimodule_left(s: Stratification, lam: str) -> RightModule:
    """fB as a right module over the opposite stratum algebra (= left module)."""
    b = s.lower_algebra(s.poset.down(lam))
    gamma = s.stratum(lam)
    f = b.algebra.idempotent_sum(s.vertices_of(lam))
    rows = b.algebra.left_mult_matrix(f).row_space().basis
    gop = opposite(gamma.algebra)
    acts = []
    for sidx in range(gop.dim):
        ghat = gamma.embed.row(sidx)
        imgs = [b.algebra.mul_vec(ghat, rows.row(t)) for t in range(rows.rows)]
        sol = rows.solve_left(Matrix.from_rows(b.algebra.field, imgs, cols=b.algebra.dim))
        assert sol is not None
        acts.append(sol)
    return RightModule(gop, rows.rows, tuple(acts))


def _corner_bimodule_right(s: Stratification, lam: str) -> RightModule:
    """Bf as a right module over the stratum algebra."""
    b = s.lower_algebra(s.poset.down(lam))
    gamma = s.stratum(lam)
    f = b.algebra.idempotent_sum(s.vertices_of(lam))
    rows = b.algebra.right_mult_matrix(f).row_space().basis
    acts = []
    for sidx in range(gamma.algebra.dim):
        ghat = gamma.embed.row(sidx)
        imgs = [b.algebra.mul_vec(rows.row(t), ghat) for t in range(rows.rows)]
        sol = rows.solve_left(Matrix.from_rows(b.algebra.field, imgs, cols=b.algebra.dim))
        assert sol is not None
        acts.append(sol)
    return RightModule(gamma.algebra, rows.rows, tuple(acts))


def _is_projective(m: RightModule) -> tuple[bool, int]:
    cov = projective_cover(m)
    return cov.projective.dim == m.dim, cov.projective.dim


def exactness_check(s: Stratification, lam: str, side: str) -> ExactnessVerdict:
    """Is j_!^lam (side="j_!") or j_*^lam (side="j_*") exact?

    j_! = - (x)_Gamma fB is exact iff fB is projective as a left
    Gamma-module; j_* = Hom_Gamma(Bf, -) is exact iff Bf is projective as a
    right Gamma-module.  A positive verdict carries the cover-dimension
    certificate; a negative one exhibits a stratum short exact sequence on
    which the functor loses exactness.
    """
    gamma = s.stratum(lam).algebra
    if side == "j_!":
        bim = _corner_bimodule_left(s, lam)
    elif side == "j_*":
        bim = _corner_bimodule_right(s, lam)
    else:
        raise ValueError(f"unknown side {side!r}")
    proj, cover_dim = _is_projective(bim)
    if proj:
        return ExactnessVerdict(
            stratum=lam, side=side, exact=True,
            reason=f"corner bimodule of dimension {bim.dim} equals its projective cover",
            witness=None,
        )
    witness = _lost_exactness_witness(s, lam, side)
    assert witness is not None, "non-projective bimodule must lose exactness on some stratum cover"
    return ExactnessVerdict(
        stratum=lam, side=side, exact=False,
        reason=f"corner bimodule has dimension {bim.dim} but its cover has dimension {cover_dim}",
        witness=witness,
    )


def _lost_exactness_witness(s: Stratification, lam: str, side: str) -> dict | None:
    """Apply the functor to a stratum cover sequence and exhibit the defect."""
    gamma = s.stratum(lam).algebra
    r = s.principal_recollement(lam)
    for u in gamma.vertex_names:
        l_u = simple_module(gamma, u)
        cov = projective_cover(l_u)
        k_mod, _ = kernel(cov.cover_map)
        if side == "j_!":
            dims = (r.j_lower(k_mod).dim, r.j_lower(cov.projective).dim, r.j_lower(l_u).dim)
            # right exactness always holds; the defect is at the kernel end
            defect = dims[0] - dims[1] + dims[2]
        else:
            dims = (r.j_roof(k_mod).dim, r.j_roof(cov.projective).dim, r.j_roof(l_u).dim)
            # left exactness always holds; the defect is at the cokernel end
            defect = dims[1] - dims[0] - dims[2]
        if defect != 0:
            return {
                "stratum_simple": u,
                "sequence_dims": {"kernel": k_mod.dim, "cover": cov.projective.dim, "simple": l_u.dim},
                "image_dims": {"kernel": dims[0], "cover": dims[1], "simple": dims[2]},
                "euler_defect": defect,
            }
    return None


# -- Ext comparison along a Serre inclusion -----------------------------------


@dataclass(frozen=True)
class ExtComparison:
    degree: int
    dim_source: int
    dim_target: int
    rank: int

    @property
    def is_isomorphism(self) -> bool:
        return self.dim_source == self.dim_target == self.rank


def _inflation_lift(s: Stratification, inner: frozenset, outer: frozenset) -> Matrix:
    """Rows: image in A_inner of each basis element of A_outer."""
    return s.lower_algebra(outer).section @ s.lower_algebra(inner).projection


def ext_comparison(
    s: Stratification,
    inner: frozenset,
    outer: frozenset,
    x: RightModule,
    y: RightModule,
    degree: int,
) -> ExtComparison:
    """The canonical map Ext^n_{A_inner}(X, Y) -> Ext^n_{A_outer}(iX, iY).

    Realized by lifting a chain map from the minimal outer resolution of
    the inflation to the inflated inner resolution, then pulling cocycles
    back.  Degrees 0 and 1 must be isomorphisms (Serre subcategory); that
    is asserted, not reported.
    """
    inner, outer = frozenset(inner), frozenset(outer)
    if not inner <= outer:
        raise ValueError("inner must be contained in outer")
    lift = _inflation_lift(s, inner, outer)
    outer_alg = s.lower_algebra(outer).algebra

    def inflate(mod):
        return inflate_module(outer_alg, lift, mod)

    def inflate_map_(f: ModuleMap) -> ModuleMap:
        return ModuleMap(inflate(f.source), inflate(f.target), f.mat)

    ix, iy = inflate(x), inflate(y)
    res_in = projective_resolution(x, degree + 1)
    res_out = projective_resolution(ix, degree + 1)

    # chain map u_k: outer P_k -> inflated inner P_k over the identity
    u: list[ModuleMap] = []
    u0 = lift_through_surjection(res_out.augmentation, inflate_map_(res_in.augmentation))
    u.append(u0)
    for k in range(1, degree + 1):
        target_map = res_out.differential(k).then(u[k - 1])
        dk_in = inflate_map_(res_in.differential(k))
        uk = _lift_through_map(target_map, dk_in)
        u.append(uk)

    space_in = ext(x, y, degree)
    space_out = ext(ix, iy, degree)
    rows = []
    for cls in space_in.classes:
        pulled = u[degree].then(inflate_map_(cls.cocycle))
        rows.append(reduce_cocycle(space_out, pulled))
    F = s.algebra.field
    rank = Matrix.from_rows(F, rows, cols=space_out.dim).rank() if rows else 0
    cmp = ExtComparison(degree=degree, dim_source=space_in.dim, dim_target=space_out.dim, rank=rank)
    if degree <= 1 and not cmp.is_isomorphism:
        raise StratificationError(
            f"Ext comparison in degree {degree} failed to be an isomorphism: "
            f"{cmp.dim_source} -> {cmp.dim_target} with rank {cmp.rank}"
        )
    return cmp


def _lift_through_map(f: ModuleMap, through: ModuleMap) -> ModuleMap:
    """h with h ; through = f, searched in the hom space (f.source projective)."""
    hb = hom_basis(f.source, through.source)
    F = f.source.algebra.field
    if not hb:
        assert f.is_zero, "no lift exists"
        from .modules import zero_map

        return zero_map(f.source, through.source)
    rows = [h.then(through).mat.entries for h in hb]
    T = Matrix.from_rows(F, rows, cols=f.source.dim * f.target.dim)
    sol = T.solve_left(Matrix.from_rows(F, [f.mat.entries], cols=T.cols))
    assert sol is not None, "comparison lift does not exist"
    out = hb[0].scale(F.zero)
    for c, h in zip(sol.row(0), hb):
        if c != F.zero:
            out = out + h.scale(c)
    return out


# -- k-homological stratifications --------------------------------------------


@dataclass(frozen=True)
class HomologicalVerdict:
    k: int
    holds: bool
    witness: dict | None
    checked_pairs: int
    note: str
    # one row per comparison: (lower set, stratum, source dims, degree,
    # dim source, dim target, rank)
    table: tuple[tuple, ...] = ()


def is_k_homological(
    s: Stratification, k: int, n_max: int | None = None, deep: bool = False
) -> HomologicalVerdict:
    """Every recollement in the stratification data is k-homological.

    Per (lower set, maximal element) pair, the comparison is tested on all
    pairs of simples of the inner lower-set algebra for degrees up to k;
    passage from simples to all finite-length objects is by long-exact-
    sequence induction (recorded, and re-run on the projectives and
    injectives when ``deep``).  With ``n_max`` set, additionally checks
    the vanishing Ext^n(iP, iI) = 0 for 1 <= n <= n_max.
    """
    checked = 0
    table: list[tuple] = []
    for outer in s.poset.lower_sets():
        for lam in s.poset.maximal_in(outer):
            inner = outer - {lam}
            inner_alg = s.lower_algebra(inner).algebra
            if inner_alg.dim == 0:
                continue
            sample_pairs = []
            simples = [simple_module(inner_alg, v) for v in inner_alg.vertex_names]
            sample_pairs.extend(itertools.product(simples, simples))
            if deep:
                projs = [projective_module(inner_alg, v)[0] for v in inner_alg.vertex_names]
                injs = [injective_module(inner_alg, v) for v in inner_alg.vertex_names]
                sample_pairs.extend(itertools.product(projs, injs))
            for x, y in sample_pairs:
                for n in range(k + 1):
                    cmp = ext_comparison(s, inner, outer, x, y, n)
                    checked += 1
                    table.append((tuple(sorted(outer)), lam, (x.dim, y.dim), n,
                                  cmp.dim_source, cmp.dim_target, cmp.rank))
                    if not cmp.is_isomorphism:
                        return HomologicalVerdict(
                            k=k,
                            holds=False,
                            witness={
                                "lower_set": sorted(outer),
                                "stratum": lam,
                                "source_dims": (x.dim, y.dim),
                                "degree": n,
                                "dims": (cmp.dim_source, cmp.dim_target),
                                "rank": cmp.rank,
                            },
                            checked_pairs=checked,
                            note="comparison fails on a pair of inner simples",
                            table=tuple(table),
                        )
            if n_max is not None:
                lift = _inflation_lift(s, inner, outer)
                outer_alg = s.lower_algebra(outer).algebra
                for v in inner_alg.vertex_names:
                    for w in inner_alg.vertex_names:
                        ip = inflate_module(outer_alg, lift, projective_module(inner_alg, v)[0])
                        ii = inflate_module(outer_alg, lift, injective_module(inner_alg, w))
                        for n in range(1, n_max + 1):
                            if ext_dim(ip, ii, n) != 0:
                                return HomologicalVerdict(
                                    k=k, holds=False,
                                    witness={
                                        "lower_set": sorted(outer), "stratum": lam,
                                        "projective_at": v, "injective_at": w, "degree": n,
                                    },
                                    checked_pairs=checked,
                                    note="auxiliary vanishing Ext^n(iP, iI) fails",
                                )
    note = (
        "comparison checked on inner simples; extension to all finite-length "
        "objects is by induction on composition series"
    )
    if deep:
        note += "; also re-checked on inner projectives against injectives"
    return HomologicalVerdict(k=k, holds=True, witness=None, checked_pairs=checked,
                              note=note, table=tuple(table))


# -- sign-stratified decision ---------------------------------------------------


def sign_patterns(poset: Poset) -> list[dict[str, str]]:
    if len(poset.elements) > 8:
        raise ValueError("refusing to enumerate sign patterns on more than 8 strata")
    out = []
    for bits in itertools.product("+-", repeat=len(poset.elements)):
        out.append(dict(zip(poset.elements, bits)))
    return out


@dataclass(frozen=True)
class RouteVerdict:
    verdict: bool
    witness: dict | None


@dataclass(frozen=True)
class EpsilonStratifiedResult:
    epsilon: tuple[tuple[str, str], ...]
    theorem_route: RouteVerdict | None
    direct_delta: RouteVerdict | None
    direct_nabla: RouteVerdict | None
    agreement: bool

    @property
    def verdict(self) -> bool:
        for r in (self.theorem_route, self.direct_delta, self.direct_nabla):
            if r is not None:
                return r.verdict
        raise ValueError("no route was run")


def _theorem_route(s: Stratification, eps: dict[str, str]) -> RouteVerdict:
    for lam in s.poset.elements:
        side = "j_*" if eps[lam] == "+" else "j_!"
        ev = exactness_check(s, lam, side)
        if not ev.exact:
            return RouteVerdict(False, {"failure": "exactness", "stratum": lam,
                                        "side": side, "witness": ev.witness})
    hv = is_k_homological(s, 2)
    if not hv.holds:
        return RouteVerdict(False, {"failure": "2-homological", "witness": hv.witness})
    return RouteVerdict(True, None)


def _direct_delta_route(s: Stratification, eps: dict[str, str], oracle: bool) -> RouteVerdict:
    fams = s.standard_objects()
    for b in s.algebra.vertex_names:
        allowed = [
            (f"std_eps({c})", fams[c].eps_standard(eps[s.rho[c]]))
            for c in s.algebra.vertex_names
            if s.poset.leq(s.rho[b], s.rho[c])
        ]
        p_b, _ = projective_module(s.algebra, b)
        cert = filtration_search(p_b, allowed, mode="exact-layers", oracle=oracle)
        if cert is None:
            return RouteVerdict(False, {"failure": "no sign-standard filtration",
                                        "projective_at": b})
    return RouteVerdict(True, None)


def _opposite_stratification(s: Stratification) -> Stratification:
    return Stratification(opposite(s.algebra), s.poset, s.rho, s.epsilon, check=False)


def _direct_nabla_route(s: Stratification, eps: dict[str, str], oracle: bool) -> RouteVerdict:
    """Injective side, computed as the projective side over the opposite
    algebra: the duality functor swaps the families and flips the sign."""
    sop = _opposite_stratification(s)
    flipped = {lam: ("-" if sign == "+" else "+") for lam, sign in eps.items()}
    res = _direct_delta_route(sop, flipped, oracle)
    if res.verdict:
        return res
    witness = dict(res.witness or {})
    witness["failure"] = "no sign-costandard filtration"
    witness["injective_at"] = witness.pop("projective_at", None)
    return RouteVerdict(False, witness)


def is_epsilon_stratified(
    s: Stratification,
    eps: dict[str, str],
    routes: tuple[str, ...] = ("theorem", "direct-delta", "direct-nabla"),
    oracle: bool | None = None,
) -> EpsilonStratifiedResult:
    if oracle is None:
        oracle = s.algebra.field.is_finite
    theorem = delta = nabla = None
    if "theorem" in routes:
        theorem = _theorem_route(s, eps)
    if "direct-delta" in routes:
        delta = _direct_delta_route(s, eps, oracle)
    if "direct-nabla" in routes:
        nabla = _direct_nabla_route(s, eps, oracle)
    verdicts = {r.verdict for r in (theorem, delta, nabla) if r is not None}
    return EpsilonStratifiedResult(
        epsilon=tuple(sorted(eps.items())),
        theorem_route=theorem,
        direct_delta=delta,
        direct_nabla=nabla,
        agreement=len(verdicts) == 1,
    )


# -- the split lemma for projectives over 2-homological recollements ------------


@dataclass(frozen=True)
class SplitCheckResult:
    exact: bool
    dims: tuple[int, int, int]   # (j_! j^* P, P, i_* i^* P)
    obstruction: str | None


def lemma_split_check(s: Stratification, lam: str, p: RightModule) -> SplitCheckResult:
    """For maximal lam: is 0 -> j_! j^* P -> P -> i_* i^* P -> 0 exact?

    Holds whenever the recollement is 2-homological and P is projective; a
    dimension mismatch is returned as the obstruction otherwise.
    """
    full = frozenset(s.poset.elements)
    if lam not in s.poset.maximal_in(full):
        raise ValueError(f"{lam} is not maximal")
    r = s.layer_recollement(full, lam)
    eps = r.counit_jl(p)
    eta = r.unit_quot(p)
    dims = (eps.source.dim, p.dim, eta.target.dim)
    if dims[0] + dims[2] != dims[1]:
        return SplitCheckResult(
            exact=False, dims=dims,
            obstruction=f"dim j_! j^* P + dim i_* i^* P = {dims[0]} + {dims[2]} != {dims[1]} = dim P",
        )
    ok = (
        eps.is_injective()
        and eta.is_surjective()
        and eps.then(eta).is_zero
        and eps.rank() == kernel(eta)[1].source.dim
    )
    return SplitCheckResult(exact=ok, dims=dims, obstruction=None if ok else "sequence not exact")


# -- bounded Ext-vanishing table -------------------------------------------------


def bs_vanishing_table(
    s: Stratification, eps: dict[str, str], n_max: int
) -> dict[tuple[str, str, int], int]:
    """dim Ext^n(std_eps(b), costd_eps(b')) for all pairs and 0 <= n <= n_max."""
    fams = s.standard_objects()
    table: dict[tuple[str, str, int], int] = {}
    for b in s.algebra.vertex_names:
        for c in s.algebra.vertex_names:
            delta = fams[b].eps_standard(eps[s.rho[b]])
            nabla = fams[c].eps_costandard(eps[s.rho[c]])
            for n in range(n_max + 1):
                table[(b, c, n)] = ext_dim(delta, nabla, n)
    return table


# -- highest weight detection -----------------------------------------------------


@dataclass(frozen=True)
class HighestWeightResult:
    structure_route: RouteVerdict
    axiom_route: RouteVerdict
    agreement: bool

    @property
    def verdict(self) -> bool:
        return self.structure_route.verdict


def is_highest_weight(
    algebra: Algebra,
    poset: Poset,
    rho: dict[str, str],
    oracle: bool | None = None,
    strat: Stratification | None = None,
) -> HighestWeightResult:
    """Highest-weight detection by two routes that must agree.

    Structure route: every stratum algebra is one-dimensional (split form
    of semisimple strata) and the stratification is 2-homological.  Axiom
    route: build the per-stratum standard objects Delta_lam = j_! of the
    stratum simple and check the four classical axioms, with the kernel
    filtrations searched exhaustively over finite fields.
    """
    s = strat if strat is not None else Stratification(algebra, poset, rho, check=True)
    if oracle is None:
        oracle = algebra.field.is_finite

    # route A: structure
    bad = None
    for lam in poset.elements:
        d = s.stratum(lam).algebra.dim
        if d != 1:
            bad = {"stratum": lam, "stratum_dim": d}
            break
    if bad is not None:
        structure = RouteVerdict(False, {"failure": "stratum not one-dimensional", **bad})
    else:
        hv = is_k_homological(s, 2)
        structure = (
            RouteVerdict(True, None)
            if hv.holds
            else RouteVerdict(False, {"failure": "2-homological", "witness": hv.witness})
        )

    axiom = _axiom_route(s, oracle)
    agreement = structure.verdict == axiom.verdict
    return HighestWeightResult(structure_route=structure, axiom_route=axiom, agreement=agreement)


def _axiom_route(s: Stratification, oracle: bool) -> RouteVerdict:
    poset = s.poset
    per_stratum = {lam: s.vertices_of(lam) for lam in poset.elements}
    if any(len(vs) != 1 for vs in per_stratum.values()):
        lam = next(lam for lam, vs in per_stratum.items() if len(vs) != 1)
        return RouteVerdict(False, {
            "failure": "stratum has more than one simple; no Lambda-indexed standard family",
            "stratum": lam,
        })
    fams = s.standard_objects()
    delta = {lam: fams[per_stratum[lam][0]].proper_std for lam in poset.elements}

    # (HW1): dim End(Delta_lam) = 1
    for lam, d in delta.items():
        if len(hom_basis(d, d)) != 1:
            return RouteVerdict(False, {"failure": "HW1", "stratum": lam,
                                        "end_dim": len(hom_basis(d, d))})
    # (HW2): Hom(Delta_lam, Delta_mu) = 0 when lam > mu
    for lam in poset.elements:
        for mu in poset.elements:
            if poset.lt(mu, lam) and hom_basis(delta[lam], delta[mu]):
                return RouteVerdict(False, {"failure": "HW2", "pair": (lam, mu)})
    # (HW3): the kernel of P_lam ->> Delta_lam is filtered by higher standards
    for lam in poset.elements:
        b = per_stratum[lam][0]
        p_b, _ = projective_module(s.algebra, b)
        epi = _surjection_onto_local(p_b, delta[lam])
        if epi is None:
            return RouteVerdict(False, {"failure": "HW3", "stratum": lam,
                                        "note": "no surjection onto the standard object"})
        u_mod, _ = kernel(epi)
        allowed = [
            (f"std({mu})", delta[mu]) for mu in poset.elements if poset.lt(lam, mu)
        ]
        cert = filtration_search(u_mod, allowed, mode="exact-layers", oracle=oracle)
        if cert is None:
            return RouteVerdict(False, {"failure": "HW3", "stratum": lam,
                                        "kernel_dim": u_mod.dim})
    # (HW4): the covers generate: every simple is a quotient of some P_lam
    tops = set()
    for lam in poset.elements:
        b = per_stratum[lam][0]
        tops.add(b)
    if tops != set(s.algebra.vertex_names):
        return RouteVerdict(False, {"failure": "HW4"})
    return RouteVerdict(True, None)


def _surjection_onto_local(source: RightModule, target: RightModule) -> ModuleMap | None:
    """A surjection source ->> target for target with simple top, if any."""
    top_proj = structural_series(target).top_projection
    for h in hom_basis(source, target):
        if not h.then(top_proj).is_zero:
            return h
    return None
