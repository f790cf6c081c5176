"""The Minkowski condition and the quotient ample class.

A generic setup satisfies the Minkowski condition when the degree-weighted
stable normals vanish modulo the sublattice:
    sum_{F stable} deg_P(D_F) * pi(u_F) = 0   in N_Y (x) QQ.
That balance is exactly the solvability condition for prescribing the facet
volumes b_F * deg_P(D_F) on the quotient normals, and the resulting polytope
(unique up to translation) is the quotient class that makes the pullback
functors slope-compatible.

The solver is floating point by design: it maximizes the polytope volume
over the affine slice f . a = const by projected ascent with backtracking,
using the exact identity  d vol / d a_F = latvol(F); volumes are evaluated
exactly by the polytope module on rational approximations of the iterate.
Everything else in this module is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from random import Random
from typing import Optional, Sequence

from . import linalg
from .errors import (
    CurveQuotient,
    InfeasibleTargets,
    InputError,
    MinkowskiFails,
    NoConvergence,
)
from .git import GitSetup, UnstableIndexVector, pullback_functor, translation_classes
from .klyachko import FiltrationSheaf, det_indices, direct_sum, line_bundle
from .lattice import Lattice, Sublattice, primitive_content, saturate
from .polytope import HPolytope, hsystem_volume_data
from .stability import slope

IntVec = tuple[int, ...]

SOLVER_TOL = 1e-6
SOLVER_MAX_ITER = 10_000
RATIONALIZE_DENOM = 10 ** 12


@dataclass(frozen=True)
class MinkowskiReport:
    defect: tuple[Fraction, ...]
    holds: bool

    def to_json_dict(self) -> dict:
        from . import serialize

        return {
            "defect": [serialize.frac_to_str(x) for x in self.defect],
            "holds": self.holds,
        }


def minkowski_condition(setup: GitSetup) -> MinkowskiReport:
    """Exact evaluation of the degree-weighted stable-normal sum in the
    quotient lattice."""
    setup.require_generic()
    q = setup.quotient_lattice
    defect = [Fraction(0)] * q.rank
    for f in setup.stable_facets:
        deg = setup.polytope.facet_latvol(f)
        proj = q.project(setup.polytope.facets[f][0])
        defect = [d + deg * p for d, p in zip(defect, proj)]
    defect_t = tuple(defect)
    return MinkowskiReport(defect_t, all(x == 0 for x in defect_t))


# ---------------------------------------------------------------------------
# numerical reconstruction of a polytope from facet volumes


@dataclass(frozen=True)
class MinkowskiSolution:
    normals: tuple[IntVec, ...]
    supports: tuple[float, ...]
    residual: float
    iterations: int

    def to_polytope(self, max_denominator: int = 10 ** 6) -> HPolytope:
        """Exact rational polytope snapped from the float supports."""
        n = len(self.normals[0])
        return HPolytope(n, [
            (u, Fraction(a).limit_denominator(max_denominator))
            for u, a in zip(self.normals, self.supports)
        ])


def _evaluate(n: int, normals, supports) -> tuple[float, list[float]]:
    cons = [(u, Fraction(a).limit_denominator(RATIONALIZE_DENOM))
            for u, a in zip(normals, supports)]
    vol, latvols, _ = hsystem_volume_data(n, cons)
    return float(vol), [float(x) for x in latvols]


def solve_minkowski(
    normals: Sequence[Sequence[int]],
    volumes: Sequence,
    tol: float = SOLVER_TOL,
    max_iter: int = SOLVER_MAX_ITER,
    seed: Optional[int] = None,
) -> MinkowskiSolution:
    """Reconstruct support numbers whose facet volumes match the targets.

    Requires the balance sum volumes_i * normals_i = 0 (checked exactly for
    rational targets, within tol otherwise) and normals spanning.  The
    translation gauge puts the vertex barycenter at the origin; the scale is
    fixed by the targets.
    """
    norm_t = tuple(tuple(int(x) for x in u) for u in normals)
    if not norm_t:
        raise InputError("no normals")
    n = len(norm_t[0])
    if n < 2:
        raise InputError("the facet-volume problem needs dimension >= 2")
    if len(set(norm_t)) != len(norm_t):
        raise InputError("duplicate normals")
    for u in norm_t:
        prim, g = primitive_content(u)
        if g != 1:
            raise InputError(f"normal {u} is not primitive")
    targets = []
    for v in volumes:
        if isinstance(v, float):
            targets.append(Fraction(v).limit_denominator(RATIONALIZE_DENOM))
        else:
            targets.append(Fraction(v))
    if len(targets) != len(norm_t):
        raise InputError("normals and volumes differ in length")
    if any(t <= 0 for t in targets):
        raise InputError("facet volume targets must be positive")
    if linalg.rank([list(u) for u in norm_t]) != n:
        raise InfeasibleTargets("normals do not span the ambient space")
    balance = [sum(t * u[j] for t, u in zip(targets, norm_t)) for j in range(n)]
    exact_targets = all(isinstance(v, (int, Fraction)) or isinstance(v, str)
                        for v in volumes)
    if exact_targets:
        if any(x != 0 for x in balance):
            raise InfeasibleTargets(f"weighted normal sum is {balance}, not zero")
    else:
        scale = max(abs(float(t)) for t in targets) or 1.0
        if any(abs(float(x)) > tol * scale for x in balance):
            raise InfeasibleTargets(f"weighted normal sum {balance} exceeds tolerance")

    f = [float(t) for t in targets]
    ff = sum(x * x for x in f)
    rng = Random(seed)
    a = [1.0 + (rng.uniform(0.0, 0.3) if seed is not None else 0.0)
         for _ in norm_t]
    vol, lat = _evaluate(n, norm_t, a)
    if vol <= 0:
        # start from a deeper uniform cut, guaranteed nonempty around 0
        a = [1.0] * len(norm_t)
        vol, lat = _evaluate(n, norm_t, a)
    step = 1.0
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        lam = sum(l * fi for l, fi in zip(lat, f)) / ff
        if lam > 0 and all(abs(l - lam * fi) <= 0.5 * tol * lam * fi
                           for l, fi in zip(lat, f)):
            break
        d = [l - lam * fi for l, fi in zip(lat, f)]
        dnorm = math.sqrt(sum(x * x for x in d))
        if dnorm == 0:
            break
        improved = False
        t = step
        for _ in range(60):
            cand = [ai + t * di for ai, di in zip(a, d)]
            cvol, clat = _evaluate(n, norm_t, cand)
            if cvol > vol:
                a, vol, lat = cand, cvol, clat
                step = t * 1.5
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    else:
        raise NoConvergence(f"no proportional facet volumes after {max_iter} iterations")

    # scale to match the targets, then fix the translation gauge
    lam = sum(l * fi for l, fi in zip(lat, f)) / ff
    if lam <= 0:
        raise NoConvergence("volume maximization collapsed")
    kappa = lam ** (-1.0 / (n - 1))
    a = [ai * kappa for ai in a]
    cons = [(u, Fraction(ai).limit_denominator(RATIONALIZE_DENOM))
            for u, ai in zip(norm_t, a)]
    _, _, verts = hsystem_volume_data(n, cons)
    if not verts:
        raise NoConvergence("scaled polytope is empty")
    bary = [sum(v[j] for v in verts) / len(verts) for j in range(n)]
    a = [float(Fraction(ai).limit_denominator(RATIONALIZE_DENOM)
               + linalg.dot(bary, u)) for ai, u in zip(a, norm_t)]
    _, lat_final = _evaluate(n, norm_t, a)
    residual = max(abs(l - fi) / fi for l, fi in zip(lat_final, f))
    if residual > tol:
        raise NoConvergence(
            f"facet-volume residual {residual:.3e} above tolerance {tol:.3e}")
    return MinkowskiSolution(norm_t, tuple(a), residual, iterations)


# ---------------------------------------------------------------------------
# the quotient ample class


@dataclass(frozen=True)
class AmpleClassNumeric:
    """Numerically reconstructed quotient class: one float support per
    quotient facet, vertex-barycenter gauge."""

    normals: tuple[IntVec, ...]
    supports: tuple[float, ...]
    residual: float
    targets: tuple[Fraction, ...]
    gauge: str = "vertex-barycenter"

    def to_polytope(self, max_denominator: int = 10 ** 6) -> HPolytope:
        n = len(self.normals[0])
        return HPolytope(n, [
            (u, Fraction(a).limit_denominator(max_denominator))
            for u, a in zip(self.normals, self.supports)
        ])

    def direction(self) -> tuple[float, ...]:
        """Supports normalized to unit Euclidean length (class up to scale,
        gauge already fixed)."""
        norm = math.sqrt(sum(a * a for a in self.supports))
        return tuple(a / norm for a in self.supports)

    def to_json_dict(self) -> dict:
        from . import serialize

        return {
            "normals": [list(u) for u in self.normals],
            "supports": [f"{a:.12g}" for a in self.supports],
            "residual": f"{self.residual:.12g}",
            "targets": [serialize.frac_to_str(t) for t in self.targets],
            "gauge": self.gauge,
        }


def normalized_supports(normals: Sequence[IntVec], supports: Sequence) -> list[float]:
    """Barycenter-gauged, unit-norm support vector of an exact class, for
    scale/translation-free comparison against a solver result."""
    n = len(normals[0])
    cons = [(u, Fraction(a)) for u, a in zip(normals, supports)]
    _, _, verts = hsystem_volume_data(n, cons)
    if not verts:
        raise InputError("class defines an empty polytope")
    bary = [sum(v[j] for v in verts) / len(verts) for j in range(n)]
    gauged = [float(a + linalg.dot(bary, u)) for u, a in cons]
    norm = math.sqrt(sum(x * x for x in gauged))
    return [x / norm for x in gauged]


def ample_class_alpha(
    setup: GitSetup,
    tol: float = SOLVER_TOL,
    max_iter: int = SOLVER_MAX_ITER,
    seed: Optional[int] = None,
) -> AmpleClassNumeric:
    """The unique (up to scale) quotient class with facet volumes
    b_F * deg_P(D_F); exists iff the Minkowski condition holds."""
    setup.require_generic()
    if setup.dim_quotient() < 2:
        raise CurveQuotient(
            "one-dimensional quotient: degrees of points are polarization-free")
    report = minkowski_condition(setup)
    if not report.holds:
        raise MinkowskiFails(f"Minkowski defect {report.defect} is nonzero")
    py, fmap, b = setup.quotient_polytope()
    targets = []
    for f in setup.stable_facets:
        targets.append(Fraction(b[f]) * setup.polytope.facet_latvol(f))
    sol = solve_minkowski([u for u, _ in py.facets], targets, tol, max_iter, seed)
    return AmpleClassNumeric(
        normals=sol.normals,
        supports=sol.supports,
        residual=sol.residual,
        targets=tuple(targets),
    )


# ---------------------------------------------------------------------------
# the slope identity


@dataclass(frozen=True)
class SlopeIdentityReport:
    lhs: Fraction            # mu_L of the lifted sheaf, exact
    mu_alpha: float          # quotient slope against the numeric class
    correction: Fraction     # sum over unstable facets of i_F deg_L(D_F)
    residual: float

    def to_json_dict(self) -> dict:
        from . import serialize

        return {
            "lhs": serialize.frac_to_str(self.lhs),
            "mu_alpha": f"{self.mu_alpha:.12g}",
            "correction": serialize.frac_to_str(self.correction),
            "residual": f"{self.residual:.12g}",
        }


def verify_slope_identity(
    setup: GitSetup,
    quotient_sheaf: FiltrationSheaf,
    indices: UnstableIndexVector,
    alpha: AmpleClassNumeric,
) -> SlopeIdentityReport:
    """|mu_L(lift) - (mu_alpha(sheaf) - sum_us i_F deg_L(D_F))| with the
    lifted side exact and the alpha side in floating point."""
    setup.require_generic()
    lifted = pullback_functor(setup, indices, quotient_sheaf)
    lhs = slope(lifted, setup.polytope)
    cons = [(u, Fraction(a).limit_denominator(RATIONALIZE_DENOM))
            for u, a in zip(alpha.normals, alpha.supports)]
    _, latvols, _ = hsystem_volume_data(len(alpha.normals[0]), cons)
    idx = det_indices(quotient_sheaf)
    mu_alpha = -sum(float(i) * float(lv) for i, lv in zip(idx, latvols)) \
        / quotient_sheaf.rank
    correction = Fraction(0)
    ivec = indices.as_dict()
    for f in setup.unstable_facets:
        correction += ivec[f] * setup.polytope.facet_latvol(f)
    residual = abs(float(lhs) - (mu_alpha - float(correction)))
    return SlopeIdentityReport(lhs, mu_alpha, correction, residual)


def curve_slope_ratio(setup: GitSetup) -> tuple[dict[int, Fraction], bool]:
    """For one-dimensional quotients: the per-stable-facet ratios
    c_F = b_F deg_L(D_F) (a point has degree 1 under every class) and
    whether they agree, which is exactly the Minkowski condition."""
    setup.require_generic()
    if setup.dim_quotient() != 1:
        raise InputError("curve ratio only for one-dimensional quotients")
    b = setup.b_values()
    ratios = {f: Fraction(b[f]) * setup.polytope.facet_latvol(f)
              for f in setup.stable_facets}
    values = set(ratios.values())
    return ratios, len(values) == 1


# ---------------------------------------------------------------------------
# converse falsifier


@dataclass(frozen=True)
class ConverseCounterexample:
    facet_pair: tuple[int, int]
    d1: int
    d2: int
    quotient_sheaf: FiltrationSheaf
    lifted_slopes: tuple[Fraction, Fraction]
    ratios: dict[int, Fraction]
    defect: tuple[Fraction, ...]

    def to_json_dict(self) -> dict:
        from . import serialize

        return {
            "facet_pair": list(self.facet_pair),
            "d1": self.d1,
            "d2": self.d2,
            "quotient_sheaf": self.quotient_sheaf.to_json_dict(),
            "lifted_slopes": [serialize.frac_to_str(s) for s in self.lifted_slopes],
            "ratios": {str(k): serialize.frac_to_str(v)
                       for k, v in self.ratios.items()},
            "defect": [serialize.frac_to_str(x) for x in self.defect],
        }


def converse_falsifier(setup: GitSetup) -> Optional[ConverseCounterexample]:
    """When the Minkowski condition fails, build the equal-slope direct sum
    of two quotient line bundles whose lifts have equal slope on X while no
    quotient class can balance them on Y.

    The ratios c_F = b_F deg_L(D_F) / deg_{P_Y}(D_F-check) evaluated against
    the quotient polytope's own class cannot all agree when the defect is
    nonzero (their agreement would force the defect to vanish through the
    quotient polytope's facet-normal balance), so a witness pair exists.
    Returns None when the condition holds.
    """
    setup.require_generic()
    report = minkowski_condition(setup)
    if report.holds:
        return None
    py, fmap, b = setup.quotient_polytope()
    ratios = {}
    for f in setup.stable_facets:
        ratios[f] = (Fraction(b[f]) * setup.polytope.facet_latvol(f)
                     / py.facet_latvol(fmap[f]))
    pair = None
    for f1, f2 in combinations(setup.stable_facets, 2):
        if ratios[f1] != ratios[f2]:
            pair = (f1, f2)
            break
    if pair is None:
        raise AssertionError("nonzero defect but constant ratio table")
    f1, f2 = pair
    d1 = Fraction(b[f2]) * setup.polytope.facet_latvol(f2)
    d2 = Fraction(b[f1]) * setup.polytope.facet_latvol(f1)
    scale = math.lcm(d1.denominator, d2.denominator)
    d1i, d2i = int(d1 * scale), int(d2 * scale)
    sheaf = direct_sum(
        line_bundle(py.num_facets, {fmap[f1]: d1i}),
        line_bundle(py.num_facets, {fmap[f2]: d2i}),
    )
    zero = UnstableIndexVector.zero(setup)
    lift1 = pullback_functor(setup, zero, line_bundle(py.num_facets, {fmap[f1]: d1i}))
    lift2 = pullback_functor(setup, zero, line_bundle(py.num_facets, {fmap[f2]: d2i}))
    s1, s2 = slope(lift1, setup.polytope), slope(lift2, setup.polytope)
    assert s1 == s2, "constructed summands must have equal lifted slopes"
    return ConverseCounterexample(
        facet_pair=pair, d1=d1i, d2=d2i, quotient_sheaf=sheaf,
        lifted_slopes=(s1, s2), ratios=ratios, defect=report.defect)


# ---------------------------------------------------------------------------
# compatible one-parameter subgroups


@dataclass(frozen=True)
class CompatibleSubgroup:
    sublattice: Sublattice
    stable_facets: tuple[int, ...]
    dilation: int
    polytope: HPolytope            # the witnessing linearized polytope
    from_vertex_star: bool

    def to_json_dict(self) -> dict:
        return {
            "sublattice": [list(g) for g in self.sublattice.generators],
            "stable_facets": list(self.stable_facets),
            "dilation": self.dilation,
            "polytope": self.polytope.to_json_dict(),
            "from_vertex_star": self.from_vertex_star,
        }


@dataclass(frozen=True)
class SubgroupSearch:
    subgroups: tuple[CompatibleSubgroup, ...]
    upper_bound: int
    zero_direction_subsets: int    # subsets with u_D = 0, outside the bound's hypothesis
    complete_hypothesis: bool      # True when no subset had u_D = 0

    def to_json_dict(self) -> dict:
        return {
            "subgroups": [s.to_json_dict() for s in self.subgroups],
            "upper_bound": self.upper_bound,
            "zero_direction_subsets": self.zero_direction_subsets,
            "complete_hypothesis": self.complete_hypothesis,
        }


def compatible_subgroups(
    poly: HPolytope, k_max: int = 6
) -> SubgroupSearch:
    """Bounded search for one-parameter subgroups admitting a generic
    linearization whose stable divisors balance.

    For every facet subset D of size n..d-1 the weighted normal sum u_D
    determines the only possible subgroup (its saturated span); subsets with
    u_D = 0 are reported separately since the counting bound assumes they do
    not occur.  For each candidate the search scans dilations up to k_max
    and one lattice translation per residue class (translating inside the
    annihilator of the subgroup does not change the classification); a hit
    must be generic with stable facet set exactly D, and then satisfies the
    Minkowski condition automatically (verified exactly anyway).
    """
    n = poly.n
    d = poly.num_facets
    degrees = poly.latvols()
    vertex_stars = set()
    for face in poly.face_lattice:
        if face.dim == 0:
            vertex_stars.add(tuple(sorted(face.active_facets)))
    upper_bound = sum(math.comb(d, k) for k in range(n, d))
    found: dict[tuple[IntVec, ...], CompatibleSubgroup] = {}
    zero_direction = 0
    ambient = Lattice(n)
    for size in range(n, d):
        for subset in combinations(range(d), size):
            u_d = [Fraction(0)] * n
            for f in subset:
                u_d = [x + degrees[f] * c for x, c in zip(u_d, poly.facets[f][0])]
            if all(x == 0 for x in u_d):
                zero_direction += 1
                continue
            denom = math.lcm(*[x.denominator for x in u_d])
            int_dir = tuple(int(x * denom) for x in u_d)
            prim, _ = primitive_content(int_dir)
            n0 = saturate(Sublattice(ambient, (prim,)))
            if n0.generators in found:
                continue
            witness = _search_linearization(poly, n0, subset, k_max)
            if witness is None:
                continue
            setup, k = witness
            report = minkowski_condition(setup)
            assert report.holds, "stable set matches the direction but defect nonzero"
            found[n0.generators] = CompatibleSubgroup(
                sublattice=n0,
                stable_facets=setup.stable_facets,
                dilation=k,
                polytope=setup.polytope,
                from_vertex_star=tuple(sorted(subset)) in vertex_stars,
            )
    return SubgroupSearch(
        subgroups=tuple(found.values()),
        upper_bound=upper_bound,
        zero_direction_subsets=zero_direction,
        complete_hypothesis=zero_direction == 0,
    )


def _search_linearization(
    poly: HPolytope, n0: Sublattice, subset: Sequence[int], k_max: int
) -> Optional[tuple[GitSetup, int]]:
    want = tuple(sorted(subset))
    for k in range(1, k_max + 1):
        for _, moved in translation_classes(poly, n0, k):
            setup = GitSetup(moved, n0)
            if setup.is_generic() and setup.stable_facets == want:
                return setup, k
    return None


def is_weighted_projective_quotient(setup: GitSetup) -> bool:
    """Picard-rank-1 test for the quotient: facet count = dim + 1."""
    setup.require_generic()
    py, _, _ = setup.quotient_polytope()
    return py.num_facets == py.n + 1
