"""Slopes and slope-stability verdicts for equivariant reflexive sheaves.

The slope of a sheaf against a polytope's ample class is the exact rational
  mu(S) = -(1/rank) * sum_F i_F(det S) * latvol(F).
Stability only needs to be tested against equivariant subsheaves, i.e.
against subspaces W of the underlying space.  That family is infinite, so
the search runs over:

* the closure of the proper jump subspaces under pairwise intersection and
  sum (the "candidates"),
* an exact maximization over ALL one-dimensional W via profiles on the
  intersection closure (any line sits inside a closure member with a
  pointwise-better profile, and a generic line of a member realizes the
  member's profile),
* an exact maximization over ALL corank-one W via co-profiles on the sum
  closure (a generic hyperplane above a sum member realizes its co-profile).

For ranks <= 3 every stratum of subspace dimensions is therefore searched
exactly.  Middle dimensions (2..rank-2) are heuristic and are additionally
attacked with seeded random subspaces.  Verdicts never claim more than the
search tier supports: Stable requires certified completeness.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from . import serialize
from .errors import FacetMismatch, InputError
from .klyachko import FiltrationSheaf, Subspace, det_indices, subsheaf
from .polytope import HPolytope

STABLE = "Stable"
SEMISTABLE = "Semistable"
UNSTABLE = "Unstable"
CERTIFIED = "Certified"
HEURISTIC = "Heuristic"

DEFAULT_CAP = 10_000
DEFAULT_RANDOM_TRIALS = 1_000
DEFAULT_SEED = 20_240_601


def slope(sheaf: FiltrationSheaf, poly: HPolytope) -> Fraction:
    """Exact slope of the sheaf with respect to the polytope's class."""
    if sheaf.num_facets != poly.num_facets:
        raise FacetMismatch("sheaf facet set does not match polytope")
    idx = det_indices(sheaf)
    total = sum((Fraction(i) * poly.facet_latvol(f) for f, i in enumerate(idx)),
                Fraction(0))
    return -total / sheaf.rank


@dataclass(frozen=True)
class CandidateFamily:
    subspaces: tuple[Subspace, ...]
    reached_fixpoint: bool


def _proper_jump_subspaces(sheaf: FiltrationSheaf) -> list[Subspace]:
    out = []
    seen = set()
    for f in range(sheaf.num_facets):
        for _, v in sheaf.filtrations[f]:
            if 0 < v.dim < sheaf.rank and v not in seen:
                seen.add(v)
                out.append(v)
    return out


def _closure(
    seeds: Sequence[Subspace],
    rank: int,
    cap: int,
    use_intersections: bool,
    use_sums: bool,
    keep_proper_only: bool,
) -> tuple[list[Subspace], bool]:
    """Close a family of subspaces under pairwise meet/join up to ``cap``
    members; returns (members, reached_fixpoint)."""
    found: dict[Subspace, None] = {}
    for s in seeds:
        if s not in found:
            found[s] = None
    frontier = list(found)
    while frontier:
        if len(found) > cap:
            return list(found), False
        new: list[Subspace] = []
        existing = list(found)
        for a in frontier:
            for b in existing:
                if a == b:
                    continue
                results = []
                if use_intersections:
                    results.append(a.intersect(b))
                if use_sums:
                    results.append(a.add(b))
                for c in results:
                    if c.is_zero():
                        continue
                    if keep_proper_only and c.dim >= rank:
                        continue
                    if c not in found:
                        found[c] = None
                        new.append(c)
                        if len(found) > cap:
                            return list(found), False
        frontier = new
    return list(found), True


def candidate_subspaces(
    sheaf: FiltrationSheaf, cap: int = DEFAULT_CAP
) -> CandidateFamily:
    """The proper jump subspaces closed under pairwise intersection and sum,
    iterated to a fixed point (or to ``cap``, which downgrades verdicts)."""
    seeds = _proper_jump_subspaces(sheaf)
    members, fixpoint = _closure(
        seeds, sheaf.rank, cap,
        use_intersections=True, use_sums=True, keep_proper_only=True)
    return CandidateFamily(tuple(members), fixpoint)


# ---------------------------------------------------------------------------
# exact strata


def _profile(sheaf: FiltrationSheaf, c: Subspace) -> list[int]:
    """p(C)_F = min{i : C <= E^F(i)} (the last jump index always works)."""
    out = []
    for f in range(sheaf.num_facets):
        p = None
        for i, v in sheaf.filtrations[f]:
            if v.contains(c):
                p = i
                break
        if p is None:
            raise AssertionError("profile of a subspace not inside E")
        out.append(p)
    return out


def _generic_vector_avoiding(c: Subspace, avoid: list[Subspace]) -> tuple:
    """A vector of C outside every listed proper subspace of C, found on the
    moment curve through C's basis (at most dim-1 bad parameters per
    avoided subspace)."""
    basis = c.rows
    bound = len(avoid) * max(len(basis) - 1, 0) + 1
    for t in range(bound + 1):
        v = tuple(
            sum(Fraction(t) ** k * basis[k][j] for k in range(len(basis)))
            for j in range(c.ambient))
        if any(v) and all(not d.contains_vector(v) for d in avoid):
            return v
    raise AssertionError("moment curve failed to avoid proper subspaces")


def max_line_slope(
    sheaf: FiltrationSheaf, poly: HPolytope, cap: int = DEFAULT_CAP
) -> tuple[Fraction, Subspace, bool]:
    """Exact maximum of mu(subsheaf(S, line)) over all lines.

    Any line V lies in C(V) = intersection of the jump subspaces E^F(p(V)_F),
    a member of the intersection closure with a pointwise-smaller profile;
    conversely a generic line of a closure member C realizes C's profile.
    So the max over closure members of -sum_F p(C)_F latvol(F) is the exact
    line maximum.  Returns (max, witness line, closure reached fixpoint).
    """
    seeds = [v for f in range(sheaf.num_facets) for _, v in sheaf.filtrations[f]]
    members, fixpoint = _closure(
        seeds, sheaf.rank, cap,
        use_intersections=True, use_sums=False, keep_proper_only=False)
    best: Optional[Fraction] = None
    best_c: Optional[Subspace] = None
    best_profile: Optional[list[int]] = None
    for c in members:
        prof = _profile(sheaf, c)
        val = -sum((Fraction(p) * poly.facet_latvol(f) for f, p in enumerate(prof)),
                   Fraction(0))
        if best is None or val > best:
            best, best_c, best_profile = val, c, prof
    # realize the profile with an actual line of best_c
    avoid = []
    for f, p in enumerate(best_profile):
        below = best_c.intersect(sheaf.value_at(f, p - 1))
        if below.dim < best_c.dim:
            avoid.append(below)
    vec = _generic_vector_avoiding(best_c, avoid)
    line = Subspace.span(sheaf.rank, [vec])
    assert slope(subsheaf(sheaf, line), poly) == best, "line witness mismatch"
    return best, line, fixpoint


def max_hyperplane_slope(
    sheaf: FiltrationSheaf, poly: HPolytope, cap: int = DEFAULT_CAP
) -> tuple[Fraction, Subspace, bool]:
    """Exact maximum of mu(subsheaf(S, W)) over all corank-one W (rank >= 2).

    For corank-one W, i_F(det S_W) = i_F(det S) - j_F(W) with
    j_F(W) = min{i : E^F(i) not<= W}; maximizing mu(S_W) maximizes
    sum_F j_F(W) latvol(F).  A generic hyperplane above a sum S0 of jump
    subspaces contains exactly the jump steps inside S0, so the maximum is
    attained over the sum closure (including S0 = 0).
    """
    r = sheaf.rank
    if r < 2:
        raise InputError("hyperplane stratum needs rank >= 2")
    seeds = _proper_jump_subspaces(sheaf)
    members, fixpoint = _closure(
        seeds, sheaf.rank, cap,
        use_intersections=False, use_sums=True, keep_proper_only=True)
    members = [Subspace.zero(r)] + members
    det_sum = sum(
        (Fraction(i) * poly.facet_latvol(f)
         for f, i in enumerate(det_indices(sheaf))), Fraction(0))
    best = None
    best_s0 = None
    for s0 in members:
        jsum = Fraction(0)
        for f in range(sheaf.num_facets):
            j = None
            for i, v in sheaf.filtrations[f]:
                if not s0.contains(v):
                    j = i
                    break
            jsum += Fraction(j) * poly.facet_latvol(f)
        val = (jsum - det_sum) / (r - 1)
        if best is None or val > best:
            best, best_s0 = val, s0
    # realize with a hyperplane: ker(phi) above best_s0 with phi avoiding the
    # annihilators of the first jump spaces sticking out of best_s0
    stickers = []
    for f in range(sheaf.num_facets):
        for i, v in sheaf.filtrations[f]:
            if not best_s0.contains(v):
                stickers.append(v)
                break
    phi = _generic_functional(r, best_s0, stickers)
    hyper = _kernel_of_functional(r, phi)
    assert slope(subsheaf(sheaf, hyper), poly) == best, "hyperplane witness mismatch"
    return best, hyper, fixpoint


def _generic_functional(r: int, contained: Subspace, stickers: list[Subspace]):
    """A functional vanishing on ``contained`` but on none of the sticker
    subspaces; found on a moment curve in the annihilator of ``contained``."""
    from . import linalg

    ann = linalg.nullspace([list(row) for row in contained.rows], r) \
        if contained.rows else list(linalg.identity_mat(r))
    bound = len(stickers) * max(len(ann) - 1, 0) + 1
    for t in range(bound + 1):
        phi = tuple(
            sum(Fraction(t) ** k * ann[k][j] for k in range(len(ann)))
            for j in range(r))
        if any(phi) and all(
            any(sum(phi[j] * row[j] for j in range(r)) != 0 for row in v.rows)
            for v in stickers
        ):
            return phi
    raise AssertionError("moment curve failed to avoid sticker annihilators")


def _kernel_of_functional(r: int, phi) -> Subspace:
    from . import linalg

    return Subspace.span(r, linalg.nullspace([list(phi)], r))


def _random_subspace(rng: Random, r: int) -> Subspace:
    dim = rng.randint(1, r - 1)
    while True:
        rows = [[Fraction(rng.randint(-5, 5)) for _ in range(r)] for _ in range(dim)]
        s = Subspace.span(r, rows)
        if s.dim == dim:
            return s


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class StabilityVerdict:
    status: str
    certainty: str
    slope: Fraction
    witness: Optional[Subspace] = None
    witness_slope: Optional[Fraction] = None
    slope_table: tuple[tuple[int, Fraction], ...] = field(default=())
    seed: Optional[int] = None
    cap_exceeded: bool = False
    ground_field: str = "QQ"
    notes: str = ""

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "certainty": self.certainty,
            "slope": serialize.frac_to_str(self.slope),
            "witness": None if self.witness is None else self.witness.to_json(),
            "witness_slope": None if self.witness_slope is None
            else serialize.frac_to_str(self.witness_slope),
            "slope_table": [
                {"dim": d, "slope": serialize.frac_to_str(s)}
                for d, s in self.slope_table
            ],
            "seed": self.seed,
            "cap_exceeded": self.cap_exceeded,
            "ground_field": self.ground_field,
            "notes": self.notes,
        }


def check_stability(
    sheaf: FiltrationSheaf,
    poly: HPolytope,
    cap: int = DEFAULT_CAP,
    random_trials: int = DEFAULT_RANDOM_TRIALS,
    seed: int = DEFAULT_SEED,
) -> StabilityVerdict:
    """Slope-stability verdict with an explicit certainty tier.

    Certified completeness holds when rank <= 2, or when every proper jump
    subspace has dimension 1 or rank-1 and every closure reached its fixed
    point; the dimension-1 and corank-1 strata are searched exactly in all
    cases.  Without certified completeness the verdict never claims Stable;
    a clean sweep is reported as Semistable/Heuristic after seeded random
    falsification.
    """
    mu = slope(sheaf, poly)
    r = sheaf.rank
    if r == 1:
        return StabilityVerdict(
            status=STABLE, certainty=CERTIFIED, slope=mu, seed=seed,
            notes="rank 1: no proper subsheaves")

    family = candidate_subspaces(sheaf, cap)
    evaluations: list[tuple[Fraction, Subspace]] = []
    try:
        workers = int(os.environ.get("TORICGIT_THREADS", "1"))
    except ValueError:
        workers = 1
    if workers > 1 and len(family.subspaces) > 1:
        # pure functions on immutable data; results kept in submission order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slopes = list(pool.map(
                lambda w: slope(subsheaf(sheaf, w), poly), family.subspaces))
        evaluations.extend(zip(slopes, family.subspaces))
    else:
        for w in family.subspaces:
            evaluations.append((slope(subsheaf(sheaf, w), poly), w))

    line_val, line_witness, line_fix = max_line_slope(sheaf, poly, cap)
    evaluations.append((line_val, line_witness))
    hyp_val, hyp_witness, hyp_fix = max_hyperplane_slope(sheaf, poly, cap)
    evaluations.append((hyp_val, hyp_witness))

    fixpoint = family.reached_fixpoint and line_fix and hyp_fix
    jump_dims = {v.dim for v in _proper_jump_subspaces(sheaf)}
    complete = (r <= 2) or (jump_dims <= {1, r - 1} and fixpoint)
    certainty = CERTIFIED if complete else HEURISTIC

    notes = []
    if not fixpoint:
        notes.append(f"subspace closure cap {cap} exceeded")
    if not complete:
        rng = Random(seed)
        for _ in range(random_trials):
            w = _random_subspace(rng, r)
            evaluations.append((slope(subsheaf(sheaf, w), poly), w))
        notes.append(
            f"middle strata heuristic; falsified against {random_trials} random subspaces")

    best_val, best_w = max(evaluations, key=lambda e: e[0])
    table = tuple(sorted(((w.dim, v) for v, w in evaluations), key=lambda t: -t[1]))
    if len(table) > 100:
        table = table[:100]

    if best_val > mu:
        recheck = slope(subsheaf(sheaf, best_w), poly)
        assert recheck == best_val, "witness slope failed verification"
        return StabilityVerdict(
            status=UNSTABLE, certainty=certainty, slope=mu,
            witness=best_w, witness_slope=best_val, slope_table=table,
            seed=seed, cap_exceeded=not family.reached_fixpoint,
            notes="; ".join(notes))
    if best_val == mu:
        return StabilityVerdict(
            status=SEMISTABLE, certainty=certainty, slope=mu,
            witness=best_w, witness_slope=best_val, slope_table=table,
            seed=seed, cap_exceeded=not family.reached_fixpoint,
            notes="; ".join(notes))
    if complete:
        return StabilityVerdict(
            status=STABLE, certainty=CERTIFIED, slope=mu, slope_table=table,
            seed=seed, notes="; ".join(notes))
    return StabilityVerdict(
        status=SEMISTABLE, certainty=HEURISTIC, slope=mu, slope_table=table,
        seed=seed, cap_exceeded=not family.reached_fixpoint,
        notes="; ".join(notes + ["no destabilizer found; Stable not certifiable"]))
