"""Exact rational H-polytopes.

An HPolytope is the bounded full-dimensional set {m : <m, u_F> >= -a_F}
with primitive integer inward normals u_F and rational supports a_F.  Facets
index torus-invariant divisors, so redundant inequalities are rejected at
construction rather than dropped.

Volumes are lattice-normalized: the measure on a facet is induced by the
rank-(n-1) lattice of integer vectors in the facet direction, which makes
facet volume equal to the degree of the corresponding divisor against the
polytope's ample class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg, serialize
from .errors import (
    DimensionMismatch,
    EmptyPolytope,
    InputError,
    NotFullDimensional,
    RedundantInequality,
    Unbounded,
)
from .lattice import primitive_content

IntVec = tuple[int, ...]
QVec = tuple[Fraction, ...]
Constraint = tuple[IntVec, Fraction]  # <m, u> >= -a stored as (u, a)


# ---------------------------------------------------------------------------
# raw halfspace-system helpers (shared with the Minkowski solver, which must
# evaluate volumes of systems that are not yet valid polytopes)


def hsystem_vertices(n: int, cons: Sequence[Constraint]) -> list[QVec]:
    """Vertices of {m : <m,u> >= -a}, by exact solves over all n-subsets.

    Assumes the system is bounded; redundant inequalities are harmless.
    """
    verts: set[QVec] = set()
    for subset in combinations(range(len(cons)), n):
        mat = [cons[i][0] for i in subset]
        rhs = [-cons[i][1] for i in subset]
        x = linalg.solve_square(mat, rhs)
        if x is None:
            continue
        if all(linalg.dot(x, u) >= -a for u, a in cons):
            verts.add(x)
    return sorted(verts)


def _lattice_gap(v: Sequence[Fraction], con: Constraint) -> Fraction:
    """Lattice distance from v to the constraint hyperplane (primitive
    normalization)."""
    u, a = con
    prim, g = primitive_content(u)
    return (linalg.dot(v, u) + a) / g


def _volume_rec(k: int, cons: list[Constraint], verts: list[QVec]) -> Fraction:
    """Lattice-normalized k-volume by coning from a vertex over the facets.

    vol = (1/k) * sum_F gap(v0, F) * vol_{k-1}(F); tolerant of redundant
    constraints (their recursive volume is 0) and of lower-dimensional input
    (returns 0).  k = 0 is a point, of volume 1.
    """
    if k == 0:
        return Fraction(1)
    if len(verts) < k + 1:
        return Fraction(0)
    v0 = verts[0]
    seen: set[tuple[IntVec, Fraction]] = set()
    total = Fraction(0)
    for u, a in cons:
        prim, g = primitive_content(u)
        key = (prim, Fraction(a) / g)
        if key in seen:
            continue
        seen.add(key)
        gap = linalg.dot(v0, prim) + key[1]
        if gap == 0:
            continue
        tight = [v for v in verts if linalg.dot(v, prim) + key[1] == 0]
        if len(tight) < k:
            continue
        basis = linalg.integer_kernel([prim], k)
        bt = linalg.transpose(basis)
        p0 = tight[0]
        coords = []
        for v in tight:
            diff = linalg.vec_sub(v, p0)
            x = linalg.solve_general(bt, diff)
            if x is None:  # cannot happen for points on the hyperplane
                raise AssertionError("facet vertex outside facet lattice span")
            coords.append(x)
        sub_cons: list[Constraint] = []
        for w, c in cons:
            wprim, wg = primitive_content(w) if any(w) else ((), 0)
            if not any(w) or (wprim == prim and Fraction(c) / wg == key[1]):
                continue
            w2 = tuple(int(linalg.dot(b, w)) for b in basis)
            if not any(w2):
                continue
            c2 = Fraction(c) + linalg.dot(p0, w)
            p2, g2 = primitive_content(w2)
            sub_cons.append((p2, c2 / g2))
        total += gap * _volume_rec(k - 1, sub_cons, sorted(set(coords)))
    return total / k


def hsystem_volume_data(
    n: int, cons: Sequence[Constraint]
) -> tuple[Fraction, list[Fraction], list[QVec]]:
    """(volume, per-constraint facet volumes, vertices) of a bounded
    halfspace system, without validity requirements."""
    cons = [(tuple(int(x) for x in u), Fraction(a)) for u, a in cons]
    verts = hsystem_vertices(n, cons)
    vol = _volume_rec(n, cons, verts)
    latvols = []
    for i, (u, a) in enumerate(cons):
        prim, g = primitive_content(u)
        ap = Fraction(a) / g
        tight = [v for v in verts if linalg.dot(v, prim) + ap == 0]
        if n == 1:
            latvols.append(Fraction(1) if tight else Fraction(0))
            continue
        if len(tight) < n - 1:
            latvols.append(Fraction(0))
            continue
        basis = linalg.integer_kernel([prim], n)
        bt = linalg.transpose(basis)
        p0 = tight[0]
        coords = sorted({linalg.solve_general(bt, linalg.vec_sub(v, p0)) for v in tight})
        sub_cons: list[Constraint] = []
        for j, (w, c) in enumerate(cons):
            if j == i:
                continue
            w2 = tuple(int(linalg.dot(b, w)) for b in basis)
            if not any(w2):
                continue
            c2 = Fraction(c) + linalg.dot(p0, w)
            p2, g2 = primitive_content(w2)
            sub_cons.append((p2, c2 / g2))
        latvols.append(_volume_rec(n - 1, sub_cons, coords))
    return vol, latvols, verts


def positively_spanning(n: int, normals: Sequence[IntVec]) -> bool:
    """True iff the normals positively span RR^n, i.e. the recession cone of
    any associated halfspace system is trivial (bounded polytopes)."""
    ineqs = [(u, Fraction(0), False) for u in normals]
    for i in range(n):
        for sign in (1, -1):
            eq = tuple(sign if j == i else 0 for j in range(n))
            if linalg.feasible_point(n, [(eq, Fraction(1))], ineqs) is not None:
                return False
    return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisorClass:
    """Formal rational combination sum_F c_F * D_F over facet indices."""

    coefficients: tuple[tuple[int, Fraction], ...]

    @staticmethod
    def from_dict(d: Mapping[int, object]) -> "DivisorClass":
        items = tuple(sorted((int(k), Fraction(v)) for k, v in d.items() if Fraction(v) != 0))
        return DivisorClass(items)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coefficients)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        d = self.as_dict()
        for k, v in other.coefficients:
            d[k] = d.get(k, Fraction(0)) + v
        return DivisorClass.from_dict(d)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple((k, -v) for k, v in self.coefficients))

    def scale(self, c) -> "DivisorClass":
        c = Fraction(c)
        return DivisorClass.from_dict({k: c * v for k, v in self.coefficients})

    def to_json_dict(self) -> dict:
        return {str(k): serialize.frac_to_str(v) for k, v in self.coefficients}

    @staticmethod
    def from_json_dict(obj) -> "DivisorClass":
        if not isinstance(obj, dict):
            raise InputError("divisor class must be a JSON object")
        return DivisorClass.from_dict(
            {int(k): serialize.frac_from_obj(v) for k, v in obj.items()})


@dataclass(frozen=True)
class Face:
    """A face of an HPolytope: the facets containing it, its dimension, a
    relative-interior witness (vertex barycenter), and its vertices."""

    active_facets: frozenset[int]
    dim: int
    relint_point: QVec
    vertex_ids: tuple[int, ...]

    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.active_facets))


class HPolytope:
    """Bounded full-dimensional rational polytope in halfspace form."""

    def __init__(self, n: int, facets: Iterable[tuple[Sequence[int], object]]):
        facs: list[Constraint] = []
        for u, a in facets:
            uv = tuple(int(x) for x in u)
            if len(uv) != n:
                raise DimensionMismatch(f"normal {uv} in dimension {n}")
            if not any(uv):
                raise InputError("zero facet normal")
            prim, g = primitive_content(uv)
            if g != 1:
                raise InputError(f"facet normal {uv} is not primitive")
            facs.append((uv, Fraction(a)))
        if n < 1:
            raise DimensionMismatch("polytope dimension must be >= 1")
        if len({u for u, _ in facs}) != len(facs):
            raise InputError("duplicate facet normals")
        self.n = n
        self.facets: tuple[Constraint, ...] = tuple(facs)
        self._validate()

    # -- construction-time invariants ------------------------------------

    def _validate(self) -> None:
        normals = [u for u, _ in self.facets]
        if not positively_spanning(self.n, normals):
            raise Unbounded("facet normals do not positively span; polytope unbounded")
        strict = [(u, -a, True) for u, a in self.facets]
        if linalg.feasible_point(self.n, [], strict) is None:
            loose = [(u, -a, False) for u, a in self.facets]
            if linalg.feasible_point(self.n, [], loose) is None:
                raise EmptyPolytope("inconsistent supports: empty polytope")
            raise NotFullDimensional("polytope has empty interior")
        for i, (u, a) in enumerate(self.facets):
            others = [(w, -c, True) for j, (w, c) in enumerate(self.facets) if j != i]
            if linalg.feasible_point(self.n, [(u, -a)], others) is None:
                raise RedundantInequality(
                    f"inequality {i} (normal {u}) does not define a facet")

    # -- basic geometry ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, HPolytope) and self.n == other.n \
            and self.facets == other.facets

    def __hash__(self):
        return hash((self.n, self.facets))

    def __repr__(self):
        return f"HPolytope(n={self.n}, facets={len(self.facets)})"

    @property
    def num_facets(self) -> int:
        return len(self.facets)

    @cached_property
    def vertices(self) -> tuple[QVec, ...]:
        return tuple(hsystem_vertices(self.n, self.facets))

    def support_vector(self) -> QVec:
        return tuple(a for _, a in self.facets)

    def contains(self, m: Sequence) -> bool:
        mv = linalg.frac_vec(m)
        return all(linalg.dot(mv, u) >= -a for u, a in self.facets)

    def active_set(self, m: Sequence) -> frozenset[int]:
        mv = linalg.frac_vec(m)
        return frozenset(i for i, (u, a) in enumerate(self.facets)
                         if linalg.dot(mv, u) == -a)

    @cached_property
    def face_lattice(self) -> tuple[Face, ...]:
        """All faces, dimensions 0..n, as closures of vertex sets.

        Faces are exactly the intersections of facets (plus the polytope
        itself), computed as the intersection closure of the facets' vertex
        sets.
        """
        verts = self.vertices
        active = [self.active_set(v) for v in verts]
        facet_sets = []
        for i in range(len(self.facets)):
            facet_sets.append(frozenset(k for k, av in enumerate(active) if i in av))
        all_verts = frozenset(range(len(verts)))
        found: set[frozenset[int]] = {all_verts, *facet_sets}
        frontier = set(found)
        while frontier:
            new: set[frozenset[int]] = set()
            for s in frontier:
                for f in facet_sets:
                    t = s & f
                    if t and t not in found:
                        new.add(t)
            found |= new
            frontier = new
        faces = []
        for vset in found:
            ids = tuple(sorted(vset))
            pts = [verts[i] for i in ids]
            common = frozenset.intersection(*[active[i] for i in ids])
            dim = linalg.rank([linalg.vec_sub(p, pts[0]) for p in pts[1:]]) if len(pts) > 1 else 0
            bary = tuple(sum(p[j] for p in pts) / len(pts) for j in range(self.n))
            faces.append(Face(common, dim, bary, ids))
        faces.sort(key=lambda f: (f.dim, f.key()))
        return tuple(faces)

    # -- volumes and degrees ----------------------------------------------

    @cached_property
    def _volume_data(self) -> tuple[Fraction, list[Fraction]]:
        vol, latvols, _ = hsystem_volume_data(self.n, self.facets)
        return vol, latvols

    def volume(self) -> Fraction:
        """Lattice-normalized n-volume (unit cube has volume 1)."""
        return self._volume_data[0]

    def facet_latvol(self, i: int) -> Fraction:
        """Lattice (n-1)-volume of facet i; a point facet (n = 1) counts 1."""
        if not 0 <= i < len(self.facets):
            raise InputError(f"no facet with index {i}")
        return self._volume_data[1][i]

    def latvols(self) -> tuple[Fraction, ...]:
        return tuple(self._volume_data[1])

    def degree(self, divisor: DivisorClass) -> Fraction:
        """deg_P(D) = sum_F c_F * latvol(F) against this polytope's class."""
        total = Fraction(0)
        for k, c in divisor.coefficients:
            if not 0 <= k < len(self.facets):
                raise InputError(f"divisor coefficient on unknown facet {k}")
            total += c * self.facet_latvol(k)
        return total

    def anticanonical(self) -> DivisorClass:
        return DivisorClass.from_dict({i: 1 for i in range(len(self.facets))})

    # -- transforms ---------------------------------------------------------

    def translate(self, t: Sequence) -> "HPolytope":
        tv = linalg.frac_vec(t)
        if len(tv) != self.n:
            raise DimensionMismatch("translation vector of wrong length")
        return HPolytope(self.n, [(u, a - linalg.dot(tv, u)) for u, a in self.facets])

    def dilate(self, k) -> "HPolytope":
        k = Fraction(k)
        if k <= 0:
            raise InputError("dilation factor must be positive")
        return HPolytope(self.n, [(u, k * a) for u, a in self.facets])

    def vertex_barycenter(self) -> QVec:
        verts = self.vertices
        return tuple(sum(v[j] for v in verts) / len(verts) for j in range(self.n))

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "facets": [
                {"normal": list(u), "support": serialize.frac_to_str(a)}
                for u, a in self.facets
            ],
        }

    @staticmethod
    def from_json_dict(obj) -> "HPolytope":
        if not isinstance(obj, dict) or "n" not in obj or "facets" not in obj:
            raise InputError('polytope JSON must have keys "n" and "facets"')
        n = serialize.int_from_obj(obj["n"])
        if not isinstance(obj["facets"], list):
            raise InputError("facets must be a list")
        facs = []
        for f in obj["facets"]:
            if not isinstance(f, dict) or "normal" not in f or "support" not in f:
                raise InputError('facet entries need "normal" and "support"')
            facs.append((serialize.int_vector(f["normal"], n),
                         serialize.frac_from_obj(f["support"])))
        return HPolytope(n, facs)


def same_normal_fan(p: HPolytope, q: HPolytope) -> bool:
    """Whether the two polytopes induce the same complete normal fan.

    Maximal cones are the normal cones at vertices; each is determined by
    the set of primitive normals of the facets through the vertex, so fans
    are compared as sets of those normal sets.
    """
    if p.n != q.n:
        raise DimensionMismatch("polytopes in different lattices")

    def max_cones(poly: HPolytope) -> set[frozenset[IntVec]]:
        out = set()
        for v in poly.vertices:
            out.add(frozenset(poly.facets[i][0] for i in poly.active_set(v)))
        return out

    return max_cones(p) == max_cones(q)
