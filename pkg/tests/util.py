"""Shared test helpers: random data generators and independent oracles."""

from __future__ import annotations

from fractions import Fraction
from random import Random

from toricgit import linalg
from toricgit.build import hirzebruch, product, projective_space
from toricgit.git import GitSetup, translation_classes
from toricgit.klyachko import FiltrationSheaf, Subspace
from toricgit.lattice import Lattice, Sublattice
from toricgit.polytope import HPolytope


def snf_saturation_oracle(gens, n):
    """Saturation via the Smith transform: rows i of V^-1 with nonzero
    diagonal span the saturation (independent of the double-perp route)."""
    d, u, v = linalg.smith_normal_form([list(g) for g in gens])
    vinv = linalg.invert_unimodular(v)
    rows = [vinv[i] for i in range(min(len(d), n)) if i < len(d[0] if d else []) and d[i][i]]
    return linalg.hnf_rows(rows)


def random_subspace(rng: Random, ambient: int, dim: int) -> Subspace:
    while True:
        rows = [[Fraction(rng.randint(-4, 4)) for _ in range(ambient)]
                for _ in range(dim)]
        s = Subspace.span(ambient, rows)
        if s.dim == dim:
            return s


def random_flag(rng: Random, ambient: int, dims: list[int]) -> list[Subspace]:
    """Nested subspaces of the given (strictly increasing) dimensions."""
    while True:
        mat = [[Fraction(rng.randint(-4, 4)) for _ in range(ambient)]
               for _ in range(ambient)]
        if linalg.rank(mat) == ambient:
            break
    return [Subspace.span(ambient, mat[:d]) for d in dims]


def random_sheaf(
    rng: Random,
    rank: int,
    num_facets: int,
    lo: int = -3,
    hi: int = 3,
    multiples=None,
) -> FiltrationSheaf:
    """Random filtration sheaf; jump indices on facet f are multiples of
    multiples[f] when given."""
    filts = []
    for f in range(num_facets):
        steps = rng.randint(1, rank)
        dims = sorted(rng.sample(range(1, rank + 1), steps))
        if dims[-1] != rank:
            dims[-1] = rank
        dims = sorted(set(dims))
        flag = random_flag(rng, rank, dims)
        m = multiples[f] if multiples else 1
        idx = sorted(rng.sample(range(lo, hi + 1), len(dims)))
        jumps = tuple((m * i, v) for i, v in zip(idx, flag))
        filts.append(jumps)
    return FiltrationSheaf(rank, tuple(filts))


BASE_FAMILIES = (
    lambda: projective_space(2, 1),
    lambda: projective_space(2, 2),
    lambda: hirzebruch(1),
    lambda: hirzebruch(2, (0, 0, 2, 1)),
    lambda: product(projective_space(1, 1), projective_space(1, 2)),
)

DIRECTIONS_2D = ((1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, 3), (2, -1))


def random_generic_setup(rng: Random, max_dilation: int = 3) -> GitSetup:
    """A random generic rank-1-subgroup setup drawn from the 2-d families."""
    while True:
        poly = rng.choice(BASE_FAMILIES)()
        direction = rng.choice(DIRECTIONS_2D)
        n0 = Sublattice(Lattice(2), (direction,))
        candidates = []
        for k in range(1, max_dilation + 1):
            for _, moved in translation_classes(poly, n0, k):
                setup = GitSetup(moved, n0)
                if setup.is_generic():
                    candidates.append(setup)
        if candidates:
            return rng.choice(candidates)


def random_quotient_sheaf(rng: Random, setup: GitSetup, max_rank: int = 3) -> FiltrationSheaf:
    py, _, _ = setup.quotient_polytope()
    rank = rng.randint(1, max_rank)
    return random_sheaf(rng, rank, py.num_facets)


def brute_force_vertices(poly: HPolytope):
    """Vertex oracle: feasible intersections of n facet hyperplanes, checked
    against every inequality (redundant with the implementation's method but
    independent of its caching/dedup path)."""
    from itertools import combinations

    out = set()
    for subset in combinations(range(poly.num_facets), poly.n):
        mat = [poly.facets[i][0] for i in subset]
        rhs = [-poly.facets[i][1] for i in subset]
        x = linalg.solve_square(mat, rhs)
        if x is not None and poly.contains(x):
            out.add(x)
    return out
