"""Toric GIT machinery for a subtorus action on a polarized toric variety.

The linearization is encoded by the translation of the polytope itself:
callers translate (and may dilate) the polytope to move the linearization.
A GitSetup eagerly classifies every face of the polytope against the
subspace U = annihilator of the sublattice:

* unstable   -- the face misses U,
* stable     -- the relative interior meets U and the face direction plus U
                spans everything,
* strictly semistable -- the rest.

Setups with strictly semistable faces fail fast with NotGeneric in every
downstream operation; the quotient machinery (quotient polytope, descent,
pullback functors) is only geometric in the generic case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Optional

from . import linalg, serialize
from .errors import (
    DimensionMismatch,
    FacetMismatch,
    InputError,
    NotGeneric,
    NotSaturated,
)
from .klyachko import FiltrationSheaf, SheafMorphism, Subspace, _compress
from .lattice import Lattice, QuotientLattice, Sublattice, primitive_content, quotient, saturate
from .polytope import Face, HPolytope

STABLE = "Stable"
STRICTLY_SEMISTABLE = "StrictlySemistable"
UNSTABLE = "Unstable"


@dataclass(frozen=True)
class FaceStatus:
    face: Face
    status: str
    witness: Optional[tuple[Fraction, ...]]  # a point of (rel.int.) Q n U


class GitSetup:
    """A polytope with fixed linearization translation plus a saturated
    sublattice, with the derived face classification and quotient data."""

    def __init__(self, polytope: HPolytope, sublattice: Sublattice):
        if sublattice.ambient.rank != polytope.n:
            raise DimensionMismatch("sublattice rank does not match polytope")
        if saturate(sublattice).generators != sublattice.generators:
            raise NotSaturated("GIT setup requires a saturated sublattice")
        self.polytope = polytope
        self.sublattice = sublattice
        self.lattice = Lattice(polytope.n)
        self.quotient_lattice: QuotientLattice = quotient(self.lattice, sublattice)
        self.classification: tuple[FaceStatus, ...] = self._classify()
        if self.is_generic():
            self._quotient_data  # materialize the quotient table eagerly

    @property
    def u_basis(self) -> tuple[tuple[int, ...], ...]:
        """A basis of the annihilator of the sublattice inside the dual
        lattice; its rows are also the quotient projection."""
        return self.quotient_lattice.projection_matrix

    # -- classification -----------------------------------------------------

    def _classify(self) -> tuple[FaceStatus, ...]:
        p = self.polytope
        gens = self.sublattice.generators
        g = len(gens)
        out = []
        for face in p.face_lattice:
            active = sorted(face.active_facets)
            eqs = [(p.facets[f][0], -p.facets[f][1]) for f in active]
            eqs += [(gen, Fraction(0)) for gen in gens]
            loose = [(p.facets[f][0], -p.facets[f][1], False)
                     for f in range(p.num_facets) if f not in face.active_facets]
            meet = linalg.feasible_point(p.n, eqs, loose)
            if meet is None:
                out.append(FaceStatus(face, UNSTABLE, None))
                continue
            strict = [(u, c, True) for u, c, _ in loose]
            interior = linalg.feasible_point(p.n, eqs, strict)
            transversal = False
            if interior is not None:
                # dir(Q) + U spans iff the active normals meet the sublattice
                # span only in 0, an exact rank additivity test
                normals = [p.facets[f][0] for f in active]
                stacked = list(normals) + [list(x) for x in gens]
                transversal = linalg.rank(stacked) == linalg.rank(normals) + g
            if interior is not None and transversal:
                out.append(FaceStatus(face, STABLE, interior))
            else:
                out.append(FaceStatus(face, STRICTLY_SEMISTABLE, meet))
        return tuple(out)

    @cached_property
    def stable_facets(self) -> tuple[int, ...]:
        out = []
        for fs in self.classification:
            if fs.face.dim == self.polytope.n - 1 and fs.status == STABLE:
                out.append(min(fs.face.active_facets))
        return tuple(sorted(out))

    @cached_property
    def unstable_facets(self) -> tuple[int, ...]:
        out = []
        for fs in self.classification:
            if fs.face.dim == self.polytope.n - 1 and fs.status == UNSTABLE:
                out.append(min(fs.face.active_facets))
        return tuple(sorted(out))

    def is_generic(self) -> bool:
        """Stable = semistable and nonempty, with a positive-dimensional
        quotient (a full-rank sublattice collapses Y to a point and carries
        no polarized quotient)."""
        if self.sublattice.rank >= self.polytope.n:
            return False
        has_stable = any(fs.status == STABLE for fs in self.classification)
        has_sss = any(fs.status == STRICTLY_SEMISTABLE for fs in self.classification)
        return has_stable and not has_sss

    def require_generic(self) -> None:
        if not self.is_generic():
            raise NotGeneric(
                "setup is not generic (strictly semistable faces or empty stable locus)")

    # -- quotient data --------------------------------------------------------

    @cached_property
    def _quotient_data(self) -> tuple[HPolytope, dict[int, int], dict[int, int]]:
        """(quotient polytope over N_Y, stable facet -> quotient facet index,
        stable facet -> b_F)."""
        self.require_generic()
        q = self.quotient_lattice
        facets = []
        fmap: dict[int, int] = {}
        b: dict[int, int] = {}
        for pos, f in enumerate(self.stable_facets):
            u, a = self.polytope.facets[f]
            proj = q.project(u)
            prim, content = primitive_content(proj)
            facets.append((prim, Fraction(a) / content))
            fmap[f] = pos
            b[f] = content
        py = HPolytope(q.rank, facets)
        return py, fmap, b

    def quotient_polytope(self) -> tuple[HPolytope, dict[int, int], dict[int, int]]:
        """Quotient polytope in the coordinates dual to the projection, the
        facet correspondence, and the divisibility moduli b_F."""
        return self._quotient_data

    def b_values(self) -> dict[int, int]:
        return dict(self._quotient_data[2])

    def dim_quotient(self) -> int:
        return self.quotient_lattice.rank

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "polytope": self.polytope.to_json_dict(),
            "sublattice": [list(g) for g in self.sublattice.generators],
        }

    @staticmethod
    def from_json_dict(obj) -> "GitSetup":
        if not isinstance(obj, dict) or "polytope" not in obj or "sublattice" not in obj:
            raise InputError('setup JSON must have keys "polytope" and "sublattice"')
        poly = HPolytope.from_json_dict(obj["polytope"])
        if not isinstance(obj["sublattice"], list):
            raise InputError("sublattice must be a list of integer vectors")
        gens = tuple(serialize.int_vector(g, poly.n) for g in obj["sublattice"])
        return GitSetup(poly, Sublattice(Lattice(poly.n), gens))

    def classification_report(self) -> list[dict]:
        out = []
        for fs in self.classification:
            out.append({
                "face": sorted(fs.face.active_facets),
                "dim": fs.face.dim,
                "status": fs.status,
                "witness": None if fs.witness is None
                else [serialize.frac_to_str(x) for x in fs.witness],
            })
        return out


# ---------------------------------------------------------------------------
# index vectors for the pullback functors


@dataclass(frozen=True)
class UnstableIndexVector:
    """One integer per unstable facet, keyed by facet index of P."""

    entries: tuple[tuple[int, int], ...]

    @staticmethod
    def from_dict(d: Mapping[int, int]) -> "UnstableIndexVector":
        return UnstableIndexVector(tuple(sorted((int(k), int(v)) for k, v in d.items())))

    @staticmethod
    def zero(setup: GitSetup) -> "UnstableIndexVector":
        return UnstableIndexVector.from_dict({f: 0 for f in setup.unstable_facets})

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def validate(self, setup: GitSetup) -> None:
        if tuple(k for k, _ in self.entries) != setup.unstable_facets:
            raise InputError(
                f"index vector keys {tuple(k for k, _ in self.entries)} != "
                f"unstable facets {setup.unstable_facets}")


# ---------------------------------------------------------------------------
# descent and the functors


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def restrict_to_stable(setup: GitSetup, sheaf: FiltrationSheaf) -> FiltrationSheaf:
    """Forget the filtrations on non-stable facets; the result is keyed by
    the stable facets in increasing order."""
    setup.require_generic()
    if sheaf.num_facets != setup.polytope.num_facets:
        raise FacetMismatch("sheaf does not live on the setup's polytope")
    return FiltrationSheaf(
        sheaf.rank, tuple(sheaf.filtrations[f] for f in setup.stable_facets))


def pushforward(setup: GitSetup, sheaf: FiltrationSheaf) -> FiltrationSheaf:
    """Invariant pushforward to the quotient: on a stable facet F the new
    filtration reads the old one at b_F-multiples, E-check(i) = E^F(b_F i).

    Accepts a sheaf on all of P's facets or one already restricted to the
    stable facets.
    """
    setup.require_generic()
    _, fmap, b = setup.quotient_polytope()
    if sheaf.num_facets == setup.polytope.num_facets:
        sheaf = restrict_to_stable(setup, sheaf)
    elif sheaf.num_facets != len(setup.stable_facets):
        raise FacetMismatch("sheaf matches neither all facets nor the stable ones")
    filts = []
    for pos, f in enumerate(setup.stable_facets):
        bf = b[f]
        jumps = sheaf.filtrations[pos]
        candidates = sorted({_ceil_div(j, bf) for j, _ in jumps})
        steps = [(i, sheaf.value_at(pos, bf * i)) for i in candidates]
        filts.append(_compress(sheaf.rank, steps))
    return FiltrationSheaf(sheaf.rank, tuple(filts))


def pullback(setup: GitSetup, quotient_sheaf: FiltrationSheaf) -> FiltrationSheaf:
    """Pullback to the stable locus: E^F(i) = E-check(floor(i / b_F)), so the
    jumps sit exactly at b_F-multiples."""
    setup.require_generic()
    py, _, b = setup.quotient_polytope()
    if quotient_sheaf.num_facets != py.num_facets:
        raise FacetMismatch("sheaf does not live on the quotient polytope")
    filts = []
    for pos, f in enumerate(setup.stable_facets):
        bf = b[f]
        steps = tuple((bf * j, v) for j, v in quotient_sheaf.filtrations[pos])
        filts.append(steps)
    return FiltrationSheaf(quotient_sheaf.rank, tuple(filts))


def descends(setup: GitSetup, sheaf: FiltrationSheaf) -> bool:
    """Divisibility criterion for descent: every jump index on every stable
    facet is divisible by b_F."""
    setup.require_generic()
    if sheaf.num_facets != setup.polytope.num_facets:
        raise FacetMismatch("sheaf does not live on the setup's polytope")
    b = setup.b_values()
    for f in setup.stable_facets:
        bf = b[f]
        for j, _ in sheaf.filtrations[f]:
            if j % bf != 0:
                return False
    return True


def pullback_functor(
    setup: GitSetup,
    indices: UnstableIndexVector,
    quotient_sheaf: FiltrationSheaf,
) -> FiltrationSheaf:
    """The extension-across-the-unstable-locus functor: stable facets carry
    the pullback filtrations, each unstable facet the single full jump at
    its prescribed index."""
    setup.require_generic()
    indices.validate(setup)
    lifted = pullback(setup, quotient_sheaf)
    idx = indices.as_dict()
    full = Subspace.full(quotient_sheaf.rank)
    pos_of_stable = {f: pos for pos, f in enumerate(setup.stable_facets)}
    filts = []
    for f in range(setup.polytope.num_facets):
        if f in pos_of_stable:
            filts.append(lifted.filtrations[pos_of_stable[f]])
        else:
            filts.append(((idx[f], full),))
    return FiltrationSheaf(quotient_sheaf.rank, tuple(filts))


def pullback_functor_morphism(
    setup: GitSetup,
    indices: UnstableIndexVector,
    phi: SheafMorphism,
) -> SheafMorphism:
    """Action of the functor on morphisms: the same matrix between the
    transformed sheaves (the functor is faithful)."""
    return SheafMorphism(
        pullback_functor(setup, indices, phi.source),
        pullback_functor(setup, indices, phi.target),
        phi.matrix,
    )


def in_image(
    setup: GitSetup, indices: UnstableIndexVector, sheaf: FiltrationSheaf
) -> bool:
    """Whether the sheaf is hit by the functor for this index vector: it
    descends and each unstable facet has the single full jump exactly at the
    prescribed index."""
    setup.require_generic()
    indices.validate(setup)
    if sheaf.num_facets != setup.polytope.num_facets:
        raise FacetMismatch("sheaf does not live on the setup's polytope")
    if not descends(setup, sheaf):
        return False
    idx = indices.as_dict()
    for f in setup.unstable_facets:
        filt = sheaf.filtrations[f]
        if len(filt) != 1 or filt[0][0] != idx[f]:
            return False
    return True


# ---------------------------------------------------------------------------
# linearization search


def translation_classes(
    poly: HPolytope, sublattice: Sublattice, dilation: int
) -> Iterator[tuple[tuple[int, ...], HPolytope]]:
    """Enumerate lattice-translation classes of the dilated polytope that can
    meet U.

    The face classification of (k*P + t, N0) depends on t only through the
    pairings of t against the sublattice generators (translating inside U
    moves the slice within U).  Each residue with a nonempty slice gets one
    integral representative.
    """
    gens = sublattice.generators
    if not gens:
        yield (), poly.dilate(dilation)
        return
    rinv = linalg.integer_right_inverse(gens)
    if rinv is None:
        raise NotSaturated("translation classes need a saturated sublattice")
    scaled = poly.dilate(dilation)
    verts = scaled.vertices
    ranges = []
    for gen in gens:
        vals = [linalg.dot(v, gen) for v in verts]
        lo = math.ceil(-max(vals))
        hi = math.floor(-min(vals))
        ranges.append(range(lo, hi + 1))

    def rec(i: int, acc: list[int]):
        if i == len(ranges):
            s = tuple(acc)
            t = tuple(sum(rinv[row][j] * s[j] for j in range(len(s)))
                      for row in range(len(rinv)))
            yield s, scaled.translate(t)
            return
        for v in ranges[i]:
            yield from rec(i + 1, acc + [v])

    yield from rec(0, [])


def generic_setups(
    poly: HPolytope, sublattice: Sublattice, max_dilation: int
) -> Iterator[GitSetup]:
    """All generic setups obtainable from the polytope by dilations up to
    max_dilation and lattice translations (one representative per
    translation class)."""
    for k in range(1, max_dilation + 1):
        for _, moved in translation_classes(poly, sublattice, k):
            setup = GitSetup(moved, sublattice)
            if setup.is_generic():
                yield setup
