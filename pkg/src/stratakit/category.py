"""The computable-abelian-category interface and its module-category instance.

The recollement engine is generic: it only talks to categories through the
small method surface below (plus the morphism conventions: every morphism
has ``source``/``target``/``then``/``+``/``-``/``scale``/``is_zero``).
``ModuleCategory`` wraps right modules over a fixed algebra; the
Macpherson-Vilonen category implements the same surface for glued tuples.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra
from .linalg import Matrix
from .modules import (
    ModuleMap,
    RightModule,
    cokernel,
    direct_sum,
    hom_basis,
    identity_map,
    image,
    injective_module,
    is_isomorphic,
    kernel,
    projective_module,
    simple_module,
    zero_map,
    zero_module,
)


class ModuleCategory:
    """mod-A for a fixed split basic algebra A."""

    def __init__(self, algebra: Algebra):
        self.algebra = algebra
        self.field = algebra.field

    # objects -----------------------------------------------------------

    def dim(self, x: RightModule) -> int:
        return x.dim

    def is_zero_obj(self, x: RightModule) -> bool:
        return x.dim == 0

    def zero_obj(self) -> RightModule:
        return zero_module(self.algebra)

    def direct_sum(self, xs):
        if not xs:
            z = self.zero_obj()
            return z, [], []
        return direct_sum(list(xs))

    # morphisms ----------------------------------------------------------

    def identity(self, x: RightModule) -> ModuleMap:
        return identity_map(x)

    def zero_mor(self, x: RightModule, y: RightModule) -> ModuleMap:
        return zero_map(x, y)

    def hom_basis(self, x: RightModule, y: RightModule):
        return hom_basis(x, y)

    def mor_coords(self, f: ModuleMap) -> tuple:
        return f.mat.entries

    def kernel(self, f: ModuleMap):
        return kernel(f)

    def cokernel(self, f: ModuleMap):
        return cokernel(f)

    def image(self, f: ModuleMap):
        return image(f)

    def is_isomorphic(self, x: RightModule, y: RightModule):
        res = is_isomorphic(x, y)
        return res.isomorphic, res.certificate, res.reason

    # generating family ----------------------------------------------------

    def standard_samples(self) -> list[tuple[str, RightModule]]:
        """Simples, indecomposable projectives, indecomposable injectives."""
        out = []
        for v in self.algebra.vertex_names:
            out.append((f"S({v})", simple_module(self.algebra, v)))
        for v in self.algebra.vertex_names:
            out.append((f"P({v})", projective_module(self.algebra, v)[0]))
        for v in self.algebra.vertex_names:
            out.append((f"I({v})", injective_module(self.algebra, v)))
        return out


@dataclass
class Functor:
    """A computable functor: deterministic callables on objects/morphisms."""

    name: str
    source: object
    target: object
    on_obj: object  # callable obj -> obj
    on_mor: object  # callable mor -> mor

    def __call__(self, x):
        return self.on_obj(x)

    def map(self, f):
        return self.on_mor(f)


def is_mono(cat, f) -> bool:
    return cat.dim(cat.kernel(f)[0]) == 0


def is_epi(cat, f) -> bool:
    return cat.dim(cat.cokernel(f)[0]) == 0


def mor_eq(f, g) -> bool:
    return (f - g).is_zero


def exact_at(cat, f, g) -> bool:
    """Exactness of X -f-> Y -g-> Z at Y (image = kernel via dimensions)."""
    if not f.then(g).is_zero:
        return False
    img = cat.image(f)[0]
    ker = cat.kernel(g)[0]
    return cat.dim(img) == cat.dim(ker)


def factor_combination(cat, maps, target):
    """Coefficients c with sum(c_i * maps_i) = target, or None."""
    F = cat.field
    if not maps:
        return () if target.is_zero else None
    rows = [cat.mor_coords(m) for m in maps]
    ncols = len(rows[0])
    T = Matrix.from_rows(F, rows, cols=ncols)
    goal = Matrix.from_rows(F, [cat.mor_coords(target)], cols=ncols)
    sol = T.solve_left(goal)
    return None if sol is None else sol.row(0)


def lift_through_epi(cat, f, epi):
    """h with h ; epi = f, searched inside hom(f.source, epi.source)."""
    basis = cat.hom_basis(f.source, epi.source)
    if not basis:
        if f.is_zero:
            return cat.zero_mor(f.source, epi.source)
        return None
    composed = [h.then(epi) for h in basis]
    coeffs = factor_combination(cat, composed, f)
    if coeffs is None:
        return None
    out = cat.zero_mor(f.source, epi.source)
    for c, h in zip(coeffs, basis):
        if c != cat.field.zero:
            out = out + h.scale(c)
    return out


def factor_through_mono(cat, f, mono):
    """g with g ; mono = f (unique when it exists; mono is injective)."""
    basis = cat.hom_basis(f.source, mono.source)
    if not basis:
        if f.is_zero:
            return cat.zero_mor(f.source, mono.source)
        return None
    composed = [h.then(mono) for h in basis]
    coeffs = factor_combination(cat, composed, f)
    if coeffs is None:
        return None
    out = cat.zero_mor(f.source, mono.source)
    for c, h in zip(coeffs, basis):
        if c != cat.field.zero:
            out = out + h.scale(c)
    return out
