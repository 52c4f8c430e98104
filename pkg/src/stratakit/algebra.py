"""Split basic finite-dimensional algebras presented by bound quivers.

An ``Algebra`` here is a finite-dimensional algebra over an exact field,
given by a multiplication table on a distinguished basis, together with a
complete set of primitive orthogonal idempotents (the *vertex* idempotents,
each of which is itself a basis element) and a basis of the Jacobson
radical.  The algebras we construct are *split basic*: the quotient by the
radical is a product of copies of the ground field, one per vertex.

The main constructor builds such an algebra from a quiver with admissible
relations.  Paths compose left to right (``a*b`` means "a then b") and all
modules elsewhere in the package are right modules, so the regular module's
action matrices are exactly the right-multiplication slices of the table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .linalg import Field, Matrix, Subspace


class NonAdmissibleError(ValueError):
    """A relation touches paths of length < 2."""


class PossiblyInfiniteError(ValueError):
    """Path spans failed to stabilize below the length bound."""


class AlgebraError(ValueError):
    """Construction produced inconsistent data."""


DEFAULT_LENGTH_BOUND = 32
PATH_CAP = 20000


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]  # (name, source, target)

    def __post_init__(self) -> None:
        names = [v for v in self.vertices] + [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("vertex/arrow names must be unique")
        vs = set(self.vertices)
        for name, s, t in self.arrows:
            if s not in vs or t not in vs:
                raise ValueError(f"arrow {name}: endpoint not a vertex")
        if not self.vertices:
            raise ValueError("quiver needs at least one vertex")

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)

    def arrow_index(self, name: str) -> int:
        for i, (n, _, _) in enumerate(self.arrows):
            if n == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class Presentation:
    quiver: Quiver
    # each relation: tuple of (coefficient, arrow-index tuple); coefficients
    # are raw (int/str/Fraction) and coerced by the builder
    relations: tuple[tuple[tuple[object, tuple[int, ...]], ...], ...]

    @staticmethod
    def from_names(quiver: Quiver, relations: Sequence[Sequence[tuple[object, Sequence[str]]]]) -> "Presentation":
        rels = []
        for rel in relations:
            terms = []
            for coeff, path_names in rel:
                terms.append((coeff, tuple(quiver.arrow_index(n) for n in path_names)))
            rels.append(tuple(terms))
        return Presentation(quiver, tuple(rels))


# a path is (source vertex index, tuple of arrow indices)
Path = tuple[int, tuple[int, ...]]


def _path_target(quiver: Quiver, p: Path) -> int:
    v, arrows = p
    if not arrows:
        return v
    return quiver.vertex_index(quiver.arrows[arrows[-1]][2])


def _path_label(quiver: Quiver, p: Path) -> str:
    v, arrows = p
    if not arrows:
        return f"e_{quiver.vertices[v]}"
    return "*".join(quiver.arrows[i][0] for i in arrows)


@dataclass(frozen=True)
class Algebra:
    """Finite-dimensional split basic algebra via structure constants.

    ``mult[i][j]`` is the coordinate vector of ``b_i * b_j``.  The vertex
    idempotents are the basis elements at ``idempotent_indices`` (aligned
    with ``vertex_names``), and ``radical`` spans the Jacobson radical.
    ``generators`` (optional) is a set of elements known to generate the
    algebra; linear conditions such as "intertwines the action" only need
    to be imposed on generators.
    """

    field: Field
    basis_labels: tuple[str, ...]
    mult: tuple[tuple[tuple, ...], ...]
    unit: tuple
    idempotent_indices: tuple[int, ...]
    vertex_names: tuple[str, ...]
    radical: Subspace
    generators: tuple[tuple, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def nvertices(self) -> int:
        return len(self.idempotent_indices)

    def zero_vec(self) -> tuple:
        return (self.field.zero,) * self.dim

    def basis_vec(self, i: int) -> tuple:
        z = self.field.zero
        return tuple(self.field.one if j == i else z for j in range(self.dim))

    def idempotent_vec(self, vertex: str) -> tuple:
        i = self.vertex_names.index(vertex)
        return self.basis_vec(self.idempotent_indices[i])

    def idempotent_sum(self, vertices: Sequence[str]) -> tuple:
        F = self.field
        out = list(self.zero_vec())
        for v in vertices:
            ev = self.idempotent_vec(v)
            out = [F.add(x, y) for x, y in zip(out, ev)]
        return tuple(out)

    def mul_vec(self, x: Sequence, y: Sequence) -> tuple:
        F = self.field
        out = [F.zero] * self.dim
        for i, xi in enumerate(x):
            if xi == F.zero:
                continue
            for j, yj in enumerate(y):
                if yj == F.zero:
                    continue
                c = F.mul(xi, yj)
                row = self.mult[i][j]
                for k, m in enumerate(row):
                    if m != F.zero:
                        out[k] = F.add(out[k], F.mul(c, m))
        return tuple(out)

    def right_mult_matrix(self, a: Sequence) -> Matrix:
        """Matrix of x |-> x*a on row vectors."""
        rows = [self.mul_vec(self.basis_vec(i), a) for i in range(self.dim)]
        return Matrix.from_rows(self.field, rows, cols=self.dim)

    def left_mult_matrix(self, a: Sequence) -> Matrix:
        """Matrix of x |-> a*x on row vectors."""
        rows = [self.mul_vec(a, self.basis_vec(i)) for i in range(self.dim)]
        return Matrix.from_rows(self.field, rows, cols=self.dim)

    def generating_vectors(self) -> tuple[tuple, ...]:
        if self.generators is not None:
            return self.generators
        return tuple(self.basis_vec(i) for i in range(self.dim))


def build_bound_quiver_algebra(
    pres: Presentation,
    field: Field,
    length_bound: int = DEFAULT_LENGTH_BOUND,
    path_cap: int = PATH_CAP,
) -> Algebra:
    """Build the path algebra of the quiver modulo the relation ideal.

    Relations must be admissible: every term is a composable path of length
    at least 2 and each relation is homogeneous in (source, target).  The
    basis consists of the path classes that survive reduction, ordered by
    (length, lexicographic arrow sequence); the construction is
    deterministic.  Raises ``PossiblyInfiniteError`` if the surviving path
    classes do not stabilize below ``length_bound``.
    """
    quiver = pres.quiver
    F = field
    nv = len(quiver.vertices)

    # validate relations
    parsed: list[list[tuple[object, Path]]] = []
    for ridx, rel in enumerate(pres.relations):
        terms: list[tuple[object, Path]] = []
        sig = None
        for coeff, arrows in rel:
            c = F.of(coeff)
            if c == F.zero:
                continue
            if len(arrows) < 2:
                raise NonAdmissibleError(
                    f"relation {ridx}: term of length {len(arrows)} (< 2)"
                )
            src = quiver.vertex_index(quiver.arrows[arrows[0]][1])
            here = src
            for a in arrows:
                if quiver.vertex_index(quiver.arrows[a][1]) != here:
                    raise ValueError(f"relation {ridx}: non-composable path")
                here = quiver.vertex_index(quiver.arrows[a][2])
            if sig is None:
                sig = (src, here)
            elif sig != (src, here):
                raise ValueError(f"relation {ridx}: terms not homogeneous in (source, target)")
            terms.append((c, (src, tuple(arrows))))
        if terms:
            parsed.append(terms)

    max_rel_len = max((len(p[1]) for rel in parsed for _, p in rel), default=2)

    # arrows by source vertex, in index order (keeps enumeration lexicographic)
    out_arrows: list[list[int]] = [[] for _ in range(nv)]
    for ai, (_, s, _) in enumerate(quiver.arrows):
        out_arrows[quiver.vertex_index(s)].append(ai)

    def enumerate_paths(upto: int) -> list[list[Path]]:
        by_len: list[list[Path]] = [[(v, ()) for v in range(nv)]]
        total = nv
        for ln in range(1, upto + 1):
            nxt: list[Path] = []
            for (src, arrows) in by_len[ln - 1]:
                tgt = _path_target(quiver, (src, arrows))
                for a in out_arrows[tgt]:
                    nxt.append((src, arrows + (a,)))
            total += len(nxt)
            if total > path_cap:
                raise PossiblyInfiniteError(
                    f"more than {path_cap} paths below length {upto}"
                )
            by_len.append(nxt)
        return by_len

    level = max(2, max_rel_len)
    while True:
        by_len = enumerate_paths(level)
        paths: list[Path] = [p for chunk in by_len for p in chunk]
        # coordinates ordered longest-first so pivots rewrite long into short
        order = sorted(range(len(paths)), key=lambda i: (-len(paths[i][1]), paths[i]))
        coord_of = {paths[i]: pos for pos, i in enumerate(order)}
        ncoords = len(paths)

        # span of x * r * y over all composable paths x, y within the level
        gens: list[tuple] = []
        for rel in parsed:
            rlen = max(len(p[1]) for _, p in rel)
            rsrc = rel[0][1][0]
            rtgt = _path_target(quiver, rel[0][1])
            for xlen in range(0, level - rlen + 1):
                for x in by_len[xlen]:
                    if _path_target(quiver, x) != rsrc:
                        continue
                    for ylen in range(0, level - rlen - xlen + 1):
                        for y in by_len[ylen]:
                            if y[0] != rtgt:
                                continue
                            vec = [F.zero] * ncoords
                            for c, (psrc, parr) in rel:
                                comp = (x[0], x[1] + parr + y[1])
                                vec[coord_of[comp]] = F.add(vec[coord_of[comp]], c)
                            gens.append(tuple(vec))
        ideal = Subspace.span(F, gens, ncoords) if gens else Subspace.zero(F, ncoords)

        pivots = set()
        for i in range(ideal.dim):
            row = ideal.basis.row(i)
            pivots.add(next(j for j, x in enumerate(row) if x != F.zero))
        live = [paths[i] for pos, i in enumerate(order) if pos not in pivots]
        s = max((len(p[1]) for p in live), default=0)

        if level >= 2 * s + max_rel_len:
            break
        nxt = max(2 * s + max_rel_len, level + 1)
        if nxt > length_bound:
            raise PossiblyInfiniteError(
                f"path classes still growing at length {level} (bound {length_bound})"
            )
        level = nxt

    basis_paths = sorted(live, key=lambda p: (len(p[1]), p))
    index_of = {p: i for i, p in enumerate(basis_paths)}
    dim = len(basis_paths)

    def reduce_path(p: Path) -> tuple:
        """Class of path p in basis-path coordinates."""
        vec = [F.zero] * ncoords
        vec[coord_of[p]] = F.one
        for i in range(ideal.dim):
            row = ideal.basis.row(i)
            pc = next(j for j, x in enumerate(row) if x != F.zero)
            if vec[pc] != F.zero:
                f = vec[pc]
                vec = [F.sub(a, F.mul(f, b)) for a, b in zip(vec, row)]
        out = [F.zero] * dim
        for pos, i in enumerate(order):
            if vec[pos] != F.zero:
                out[index_of[paths[i]]] = vec[pos]
        return tuple(out)

    zero = (F.zero,) * dim
    mult_rows = []
    for p in basis_paths:
        row = []
        for q in basis_paths:
            if _path_target(quiver, p) != q[0]:
                row.append(zero)
            else:
                row.append(reduce_path((p[0], p[1] + q[1])))
        mult_rows.append(tuple(row))

    unit = [F.zero] * dim
    idem_indices = []
    for v in range(nv):
        i = index_of[(v, ())]
        idem_indices.append(i)
        unit[i] = F.one

    rad_vecs = [basis_paths[i] for i in range(dim) if len(basis_paths[i][1]) >= 1]
    rad = Subspace.span(
        F,
        [tuple(F.one if j == index_of[p] else F.zero for j in range(dim)) for p in rad_vecs],
        dim,
    )

    gens = []
    for i in idem_indices:
        gens.append(tuple(F.one if j == i else F.zero for j in range(dim)))
    for p in basis_paths:
        if len(p[1]) == 1:
            gens.append(tuple(F.one if j == index_of[p] else F.zero for j in range(dim)))

    alg = Algebra(
        field=F,
        basis_labels=tuple(_path_label(quiver, p) for p in basis_paths),
        mult=tuple(mult_rows),
        unit=tuple(unit),
        idempotent_indices=tuple(idem_indices),
        vertex_names=quiver.vertices,
        radical=rad,
        generators=tuple(gens),
    )
    report = validate_algebra(alg)
    if not report.ok:
        raise AlgebraError(
            "bound quiver construction failed validation "
            f"(raise the length bound?): {report.issues}"
        )
    return alg


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[tuple[str, str], ...]  # (check name, witness)


def validate_algebra(a: Algebra) -> ValidationReport:
    """Check every structural invariant of an Algebra."""
    F = a.field
    issues: list[tuple[str, str]] = []

    def vec_eq(x, y) -> bool:
        return tuple(x) == tuple(y)

    for i in range(a.dim):
        b = a.basis_vec(i)
        if not vec_eq(a.mul_vec(a.unit, b), b) or not vec_eq(a.mul_vec(b, a.unit), b):
            issues.append(("unit", f"unit fails on basis element {a.basis_labels[i]}"))
            break

    done = False
    for i in range(a.dim):
        if done:
            break
        bi = a.basis_vec(i)
        for j in range(a.dim):
            if done:
                break
            bj = a.basis_vec(j)
            ij = a.mul_vec(bi, bj)
            for k in range(a.dim):
                bk = a.basis_vec(k)
                lhs = a.mul_vec(ij, bk)
                rhs = a.mul_vec(bi, a.mul_vec(bj, bk))
                if not vec_eq(lhs, rhs):
                    issues.append(
                        ("associativity",
                         f"({a.basis_labels[i]}*{a.basis_labels[j]})*{a.basis_labels[k]}"
                         f" != {a.basis_labels[i]}*({a.basis_labels[j]}*{a.basis_labels[k]})")
                    )
                    done = True
                    break

    idems = [a.basis_vec(i) for i in a.idempotent_indices]
    total = a.zero_vec()
    for v, e in zip(a.vertex_names, idems):
        if not vec_eq(a.mul_vec(e, e), e):
            issues.append(("idempotent", f"e_{v} is not idempotent"))
        total = tuple(F.add(x, y) for x, y in zip(total, e))
    for (v, e), (w, f) in itertools.combinations(zip(a.vertex_names, idems), 2):
        if not all(x == F.zero for x in a.mul_vec(e, f)) or not all(
            x == F.zero for x in a.mul_vec(f, e)
        ):
            issues.append(("orthogonality", f"e_{v} * e_{w} != 0"))
    if not vec_eq(total, a.unit):
        issues.append(("idempotent-sum", "vertex idempotents do not sum to the unit"))

    # radical: two-sided ideal, nilpotent
    rad = a.radical
    if rad.ambient != a.dim:
        issues.append(("radical", "ambient dimension mismatch"))
    else:
        for r in range(rad.dim):
            rv = rad.basis.row(r)
            for i in range(a.dim):
                b = a.basis_vec(i)
                if not rad.contains(a.mul_vec(rv, b)):
                    issues.append(("radical-ideal", f"rad*{a.basis_labels[i]} leaves the radical"))
                    break
                if not rad.contains(a.mul_vec(b, rv)):
                    issues.append(("radical-ideal", f"{a.basis_labels[i]}*rad leaves the radical"))
                    break
            else:
                continue
            break
        power = rad
        k = 1
        while power.dim > 0 and k <= a.dim:
            vecs = []
            for i in range(power.dim):
                for j in range(rad.dim):
                    vecs.append(a.mul_vec(power.basis.row(i), rad.basis.row(j)))
            power = Subspace.span(F, vecs, a.dim)
            k += 1
        if power.dim > 0:
            issues.append(("radical-nilpotent", f"rad^{k} still nonzero"))

    # split semisimple quotient: e_v (A/rad) e_w is k for v=w, 0 otherwise
    proj, _ = a.radical.quotient_maps()
    for vi, v in enumerate(a.vertex_names):
        ev = idems[vi]
        for wi, w in enumerate(a.vertex_names):
            ew = idems[wi]
            vecs = [a.mul_vec(a.mul_vec(ev, a.basis_vec(i)), ew) for i in range(a.dim)]
            pushed = [proj.apply_row(x) for x in vecs]
            img = Subspace.span(F, pushed, proj.cols)
            want = 1 if vi == wi else 0
            if img.dim != want:
                issues.append(
                    ("split-semisimple",
                     f"dim e_{v}(A/rad)e_{w} = {img.dim}, expected {want}")
                )
    return ValidationReport(ok=not issues, issues=tuple(issues))


@dataclass(frozen=True)
class CornerData:
    algebra: Algebra
    embed: Matrix          # corner dim x parent dim: corner basis as parent vectors
    idempotent: tuple      # the idempotent e in the parent algebra
    parent: Algebra


def corner_algebra(a: Algebra, vertices: Sequence[str]) -> CornerData:
    """The corner algebra eAe for e the sum of the named vertex idempotents."""
    subset = list(vertices)
    if not subset or any(v not in a.vertex_names for v in subset) or len(set(subset)) != len(subset):
        raise ValueError(f"not a vertex subset: {vertices!r}")
    F = a.field
    e = a.idempotent_sum(subset)

    basis_rows: list[tuple] = []
    labels: list[str] = []
    span = Subspace.zero(F, a.dim)
    for v in subset:
        ev = a.idempotent_vec(v)
        basis_rows.append(ev)
        labels.append(f"e_{v}")
        span = span.sum(Subspace.span(F, [ev], a.dim))
    for i in range(a.dim):
        cand = a.mul_vec(a.mul_vec(e, a.basis_vec(i)), e)
        if any(x != F.zero for x in cand) and not span.contains(cand):
            basis_rows.append(cand)
            labels.append(a.basis_labels[i])
            span = span.sum(Subspace.span(F, [cand], a.dim))
    embed = Matrix.from_rows(F, basis_rows, cols=a.dim)
    cdim = embed.rows

    def coords(vec: tuple) -> tuple:
        sol = embed.solve_left(Matrix.from_rows(F, [vec], cols=a.dim))
        if sol is None:
            raise AlgebraError("corner product left the corner span")
        return sol.row(0)

    mult_rows = []
    for i in range(cdim):
        row = []
        for j in range(cdim):
            row.append(coords(a.mul_vec(basis_rows[i], basis_rows[j])))
        mult_rows.append(tuple(row))

    rad_vecs = []
    for r in range(a.radical.dim):
        rv = a.radical.basis.row(r)
        rad_vecs.append(coords(a.mul_vec(a.mul_vec(e, rv), e)))
    rad = Subspace.span(F, rad_vecs, cdim)

    alg = Algebra(
        field=F,
        basis_labels=tuple(labels),
        mult=tuple(mult_rows),
        unit=coords(e),
        idempotent_indices=tuple(range(len(subset))),
        vertex_names=tuple(subset),
        radical=rad,
        generators=None,
    )
    report = validate_algebra(alg)
    if not report.ok:
        raise AlgebraError(f"corner algebra failed validation: {report.issues}")
    return CornerData(algebra=alg, embed=embed, idempotent=e, parent=a)


@dataclass(frozen=True)
class QuotientData:
    algebra: Algebra
    projection: Matrix     # parent dim x quotient dim
    section: Matrix        # quotient dim x parent dim
    ideal: Subspace
    parent: Algebra


def quotient_by_idempotent_ideal(a: Algebra, vertices: Sequence[str]) -> QuotientData:
    """The quotient A/AeA for e the sum of the named vertex idempotents.

    The projection is an algebra surjection; the section picks coordinate
    representatives (a linear, not multiplicative, splitting).
    """
    subset = list(vertices)
    if any(v not in a.vertex_names for v in subset) or len(set(subset)) != len(subset):
        raise ValueError(f"not a vertex subset: {vertices!r}")
    F = a.field
    e = a.idempotent_sum(subset)

    vecs = []
    for i in range(a.dim):
        bie = a.mul_vec(a.basis_vec(i), e)
        if all(x == F.zero for x in bie):
            continue
        for j in range(a.dim):
            v = a.mul_vec(bie, a.basis_vec(j))
            if any(x != F.zero for x in v):
                vecs.append(v)
    ideal = Subspace.span(F, vecs, a.dim) if vecs else Subspace.zero(F, a.dim)

    # ideal stability (single pass suffices; assert it)
    for r in range(ideal.dim):
        rv = ideal.basis.row(r)
        for i in range(a.dim):
            if not ideal.contains(a.mul_vec(rv, a.basis_vec(i))) or not ideal.contains(
                a.mul_vec(a.basis_vec(i), rv)
            ):
                raise AlgebraError("idempotent ideal span not stable")

    proj, sec = ideal.quotient_maps()
    qdim = proj.cols
    if qdim == 0:
        zero_alg = Algebra(
            field=F,
            basis_labels=(),
            mult=(),
            unit=(),
            idempotent_indices=(),
            vertex_names=(),
            radical=Subspace.zero(F, 0),
            generators=(),
        )
        return QuotientData(zero_alg, proj, sec, ideal, a)

    def push(vec: tuple) -> tuple:
        return (Matrix.from_rows(F, [vec], cols=a.dim) @ proj).row(0)

    surviving = [v for v in a.vertex_names if v not in subset]
    idem_indices = []
    for v in surviving:
        img = push(a.idempotent_vec(v))
        ones = [k for k, x in enumerate(img) if x != F.zero]
        if len(ones) != 1 or img[ones[0]] != F.one or not all(
            x == F.zero for k, x in enumerate(img) if k != ones[0]
        ):
            raise AlgebraError(f"idempotent e_{v} does not survive as a basis class")
        idem_indices.append(ones[0])

    labels = []
    for k in range(qdim):
        rep = sec.row(k)
        i = next(j for j, x in enumerate(rep) if x != F.zero)
        labels.append(a.basis_labels[i])

    mult_rows = []
    for i in range(qdim):
        xi = sec.row(i)
        row = []
        for j in range(qdim):
            row.append(push(a.mul_vec(xi, sec.row(j))))
        mult_rows.append(tuple(row))

    rad = Subspace.span(
        F, [push(a.radical.basis.row(r)) for r in range(a.radical.dim)], qdim
    )

    gens = None
    if a.generators is not None:
        gens = tuple(push(g) for g in a.generators)

    alg = Algebra(
        field=F,
        basis_labels=tuple(labels),
        mult=tuple(mult_rows),
        unit=push(a.unit),
        idempotent_indices=tuple(idem_indices),
        vertex_names=tuple(surviving),
        radical=rad,
        generators=gens,
    )
    report = validate_algebra(alg)
    if not report.ok:
        raise AlgebraError(f"quotient algebra failed validation: {report.issues}")
    return QuotientData(algebra=alg, projection=proj, section=sec, ideal=ideal, parent=a)


def opposite(a: Algebra) -> Algebra:
    """Same space, reversed multiplication."""
    mult = tuple(tuple(a.mult[j][i] for j in range(a.dim)) for i in range(a.dim))
    return Algebra(
        field=a.field,
        basis_labels=a.basis_labels,
        mult=mult,
        unit=a.unit,
        idempotent_indices=a.idempotent_indices,
        vertex_names=a.vertex_names,
        radical=a.radical,
        generators=a.generators,
    )
