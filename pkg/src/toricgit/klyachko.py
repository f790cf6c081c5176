"""Torus-equivariant reflexive sheaves as families of filtrations.

A sheaf of rank r over a polytope with d facets is a vector space QQ^r with
one increasing filtration per facet, stored sparsely by its jumps: a list
(i, V) with strictly increasing integers i and strictly nested subspaces V,
the last of which is QQ^r.  Below the first jump the filtration is 0.

Subspaces are canonicalized by reduced row echelon bases so that equality,
intersection and sum are deterministic.  The ground field is QQ; witnesses
defined only over an extension field are out of reach and verdicts record
that restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import linalg, serialize
from .errors import DimensionMismatch, FacetMismatch, InputError
from .polytope import DivisorClass, Face, HPolytope

QVec = tuple[Fraction, ...]


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of QQ^ambient with a reduced-row-echelon basis."""

    ambient: int
    rows: tuple[QVec, ...]

    @staticmethod
    def span(ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [linalg.frac_vec(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise DimensionMismatch("vector length != ambient dimension")
        reduced, _ = linalg.rref(vecs)
        return Subspace(ambient, tuple(tuple(r) for r in reduced))

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, ())

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace(ambient, linalg.identity_mat(ambient))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def is_zero(self) -> bool:
        return not self.rows

    def is_full(self) -> bool:
        return len(self.rows) == self.ambient

    def pivots(self) -> list[int]:
        out = []
        for row in self.rows:
            out.append(next(j for j, x in enumerate(row) if x != 0))
        return out

    def _residual(self, v: Sequence) -> Optional[list[Fraction]]:
        """v reduced against the echelon basis; None when v lies inside."""
        vv = [Fraction(x) for x in v]
        for row in self.rows:
            p = next(j for j, x in enumerate(row) if x != 0)
            c = vv[p]
            if c:
                vv = [a - c * b for a, b in zip(vv, row)]
        return None if not any(vv) else vv

    def contains_vector(self, v: Sequence) -> bool:
        return self._residual(v) is None

    def contains(self, other: "Subspace") -> bool:
        if other.ambient != self.ambient:
            raise DimensionMismatch("subspaces of different ambient spaces")
        if other.dim > self.dim:
            return False
        return all(self._residual(row) is None for row in other.rows)

    def add(self, other: "Subspace") -> "Subspace":
        if other.ambient != self.ambient:
            raise DimensionMismatch("subspaces of different ambient spaces")
        if self.dim <= other.dim and other.contains(self):
            return other
        if other.dim <= self.dim and self.contains(other):
            return self
        return Subspace.span(self.ambient, [*self.rows, *other.rows])

    def intersect(self, other: "Subspace") -> "Subspace":
        if other.ambient != self.ambient:
            raise DimensionMismatch("subspaces of different ambient spaces")
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.ambient)
        if self.dim <= other.dim and other.contains(self):
            return self
        if other.dim <= self.dim and self.contains(other):
            return other
        if self.dim == 1 or other.dim == 1:
            return Subspace.zero(self.ambient)
        # x = y*A = z*B: solve [A^T | -B^T] (y,z)^T = 0
        a, b = self.rows, other.rows
        cols = len(a) + len(b)
        system = [
            tuple(list(col_a) + [-x for x in col_b])
            for col_a, col_b in zip(zip(*a), zip(*b))
        ]
        kernel = linalg.nullspace(system, cols)
        vecs = []
        for k in kernel:
            y = k[: len(a)]
            vec = tuple(
                sum(y[i] * a[i][j] for i in range(len(a))) for j in range(self.ambient)
            )
            vecs.append(vec)
        return Subspace.span(self.ambient, vecs)

    def image_under(self, matrix: Sequence[Sequence]) -> "Subspace":
        """Image of this subspace under the linear map given row-wise by a
        target_dim x ambient matrix."""
        tgt = len(matrix)
        vecs = [linalg.mat_vec(matrix, row) for row in self.rows]
        return Subspace.span(tgt, vecs)

    def coordinates_in(self, big: "Subspace") -> "Subspace":
        """This subspace rewritten in the RREF-basis coordinates of ``big``
        (requires self <= big); result lives in QQ^{big.dim}."""
        if not big.contains(self):
            raise InputError("subspace is not contained in the claimed superspace")
        piv = big.pivots()
        rows = [tuple(r[p] for p in piv) for r in self.rows]
        return Subspace.span(big.dim, rows)

    def to_json(self) -> list:
        return [[serialize.frac_to_str(x) for x in row] for row in self.rows]


Filtration = tuple[tuple[int, Subspace], ...]


def _check_filtration(rank: int, jumps: Sequence[tuple[int, Subspace]]) -> Filtration:
    if not jumps:
        raise InputError("empty filtration")
    prev_i: Optional[int] = None
    prev_v = Subspace.zero(rank)
    for i, v in jumps:
        if v.ambient != rank:
            raise DimensionMismatch("filtration subspace of wrong ambient dimension")
        if prev_i is not None and i <= prev_i:
            raise InputError("jump indices must strictly increase")
        if not (v.contains(prev_v) and v.dim > prev_v.dim):
            raise InputError("filtration subspaces must strictly increase")
        prev_i, prev_v = i, v
    if not prev_v.is_full():
        raise InputError("last filtration step must be the full space")
    return tuple((int(i), v) for i, v in jumps)


def _compress(rank: int, steps: Sequence[tuple[int, Subspace]]) -> Filtration:
    """Drop repeated values from an increasing step function, keeping the
    first index at which each new value appears."""
    out: list[tuple[int, Subspace]] = []
    prev = Subspace.zero(rank)
    for i, v in steps:
        if v.dim > prev.dim:
            out.append((i, v))
            prev = v
    return tuple(out)


@dataclass(frozen=True)
class FiltrationSheaf:
    """Klyachko data: rank plus one sparse filtration per facet index."""

    rank: int
    filtrations: tuple[Filtration, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise InputError("sheaf rank must be >= 1")
        object.__setattr__(
            self,
            "filtrations",
            tuple(_check_filtration(self.rank, f) for f in self.filtrations),
        )

    @property
    def num_facets(self) -> int:
        return len(self.filtrations)

    def value_at(self, facet: int, i: int) -> Subspace:
        """E^F(i): the last jump subspace at index <= i (zero below all)."""
        current = Subspace.zero(self.rank)
        for j, v in self.filtrations[facet]:
            if j > i:
                break
            current = v
        return current

    def jump_indices(self, facet: int) -> tuple[int, ...]:
        return tuple(i for i, _ in self.filtrations[facet])

    def first_index(self, facet: int) -> int:
        """i_F: the smallest i with E^F(i) != 0."""
        return self.filtrations[facet][0][0]

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "rank": self.rank,
            "filtrations": {
                str(f): [{"i": i, "basis": v.to_json()} for i, v in filt]
                for f, filt in enumerate(self.filtrations)
            },
        }

    @staticmethod
    def from_json_dict(obj) -> "FiltrationSheaf":
        if not isinstance(obj, dict) or "rank" not in obj or "filtrations" not in obj:
            raise InputError('sheaf JSON must have keys "rank" and "filtrations"')
        rank = serialize.int_from_obj(obj["rank"])
        raw = obj["filtrations"]
        if not isinstance(raw, dict):
            raise InputError("filtrations must be an object keyed by facet id")
        try:
            keys = sorted(int(k) for k in raw)
        except ValueError as exc:
            raise InputError("facet ids must be integers") from exc
        if keys != list(range(len(keys))):
            raise InputError("facet ids must be 0..d-1")
        filts = []
        for k in keys:
            jumps = []
            for entry in raw[str(k)]:
                if not isinstance(entry, dict) or "i" not in entry or "basis" not in entry:
                    raise InputError('jump entries need "i" and "basis"')
                basis = [
                    [serialize.frac_from_obj(x) for x in row] for row in entry["basis"]
                ]
                jumps.append((serialize.int_from_obj(entry["i"]),
                              Subspace.span(rank, basis)))
            filts.append(tuple(jumps))
        return FiltrationSheaf(rank, tuple(filts))


def line_bundle(num_facets: int, coeffs: Mapping[int, int]) -> FiltrationSheaf:
    """Rank-1 sheaf of the divisor sum_F c_F D_F: the facet-F filtration
    jumps from 0 to the line exactly at -c_F."""
    full = Subspace.full(1)
    filts = []
    for f in range(num_facets):
        c = int(coeffs.get(f, 0))
        filts.append(((-c, full),))
    return FiltrationSheaf(1, tuple(filts))


def structure_sheaf(num_facets: int) -> FiltrationSheaf:
    return line_bundle(num_facets, {})


# ---------------------------------------------------------------------------
# operations


def dimension_jumps(sheaf: FiltrationSheaf, facet: int) -> dict[int, int]:
    """e^F(i) = dim E^F(i-1) - dim E^F(i), nonzero only at jumps; the values
    are negative and total -rank."""
    out = {}
    prev_dim = 0
    for i, v in sheaf.filtrations[facet]:
        out[i] = prev_dim - v.dim
        prev_dim = v.dim
    return out


def det_indices(sheaf: FiltrationSheaf) -> tuple[int, ...]:
    """i_F(det) = -sum_i i*e^F(i) per facet; for rank 1 this is the jump."""
    out = []
    for f in range(sheaf.num_facets):
        out.append(-sum(i * e for i, e in dimension_jumps(sheaf, f).items()))
    return tuple(out)


def first_chern(sheaf: FiltrationSheaf) -> DivisorClass:
    """c1 as the Weil divisor class sum_F -i_F(det) D_F."""
    return DivisorClass.from_dict(
        {f: -i for f, i in enumerate(det_indices(sheaf))})


def subsheaf(sheaf: FiltrationSheaf, w: Subspace) -> FiltrationSheaf:
    """The equivariant subsheaf cut out by a subspace W: filtrations
    W n E^F(i), re-coordinatized to QQ^{dim W}."""
    if w.ambient != sheaf.rank:
        raise DimensionMismatch("subspace of wrong ambient dimension")
    if w.is_zero():
        raise InputError("subsheaf of the zero subspace")
    filts = []
    for f in range(sheaf.num_facets):
        steps = [(i, w.intersect(v).coordinates_in(w))
                 for i, v in sheaf.filtrations[f]]
        filts.append(_compress(w.dim, steps))
    return FiltrationSheaf(w.dim, tuple(filts))


def sections_on_chart(
    sheaf: FiltrationSheaf, p: HPolytope, face: Face, m: Sequence[int]
) -> Subspace:
    """Weight-m sections on the chart of a face: the intersection over the
    facets containing the face of E^F(<m, u_F>); the full space on the big
    chart (empty active set)."""
    if sheaf.num_facets != p.num_facets:
        raise FacetMismatch("sheaf and polytope facet counts differ")
    mv = tuple(int(x) for x in m)
    if len(mv) != p.n:
        raise DimensionMismatch("weight vector of wrong length")
    current = Subspace.full(sheaf.rank)
    for f in sorted(face.active_facets):
        pairing = int(linalg.dot(mv, p.facets[f][0]))
        current = current.intersect(sheaf.value_at(f, pairing))
    return current


def direct_sum(s1: FiltrationSheaf, s2: FiltrationSheaf) -> FiltrationSheaf:
    """Blockwise direct sum; facet sets must agree."""
    if s1.num_facets != s2.num_facets:
        raise FacetMismatch("direct sum over different facet sets")
    r1, r2 = s1.rank, s2.rank
    rank = r1 + r2

    def embed(v: Subspace, offset: int) -> list[QVec]:
        rows = []
        for row in v.rows:
            padded = [Fraction(0)] * rank
            padded[offset:offset + len(row)] = list(row)
            rows.append(tuple(padded))
        return rows

    filts = []
    for f in range(s1.num_facets):
        indices = sorted({i for i, _ in s1.filtrations[f]}
                         | {i for i, _ in s2.filtrations[f]})
        steps = []
        for i in indices:
            rows = embed(s1.value_at(f, i), 0) + embed(s2.value_at(f, i), r1)
            steps.append((i, Subspace.span(rank, rows)))
        filts.append(_compress(rank, steps))
    return FiltrationSheaf(rank, tuple(filts))


@dataclass(frozen=True)
class SheafMorphism:
    """Linear map between the underlying spaces that preserves every
    filtration step."""

    source: FiltrationSheaf
    target: FiltrationSheaf
    matrix: tuple[QVec, ...]  # target.rank x source.rank

    def __post_init__(self):
        if len(self.matrix) != self.target.rank or any(
            len(r) != self.source.rank for r in self.matrix
        ):
            raise DimensionMismatch("morphism matrix of wrong shape")
        object.__setattr__(self, "matrix", linalg.frac_mat(self.matrix))

    def apply(self, v: Subspace) -> Subspace:
        return v.image_under(self.matrix)

    def compose(self, other: "SheafMorphism") -> "SheafMorphism":
        """self o other."""
        if other.target is not self.source and other.target != self.source:
            raise FacetMismatch("composition with mismatched middle sheaf")
        return SheafMorphism(
            other.source, self.target, linalg.mat_mul(self.matrix, other.matrix))


def is_morphism(phi: SheafMorphism) -> bool:
    """Check phi(E1^F(i)) <= E2^F(i); jump indices of the source suffice."""
    s, t = phi.source, phi.target
    if s.num_facets != t.num_facets:
        raise FacetMismatch("morphism between sheaves on different facet sets")
    for f in range(s.num_facets):
        for i, v in s.filtrations[f]:
            if not t.value_at(f, i).contains(phi.apply(v)):
                return False
    return True


def inclusion_morphism(sheaf: FiltrationSheaf, w: Subspace) -> SheafMorphism:
    """The canonical inclusion subsheaf(S, W) -> S; its matrix maps the W
    coordinates back through the RREF basis of W."""
    sub = subsheaf(sheaf, w)
    matrix = linalg.transpose(w.rows)  # rank x dim(W)
    return SheafMorphism(sub, sheaf, matrix)
