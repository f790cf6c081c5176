"""Integer-lattice algebra: sublattices in Hermite form, saturation,
quotient lattices with explicit projection/section pairs, primitive vectors.

All values are immutable and all operations pure.  Integers are arbitrary
precision throughout; normal-form intermediates are allowed to swell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import DimensionMismatch, NotSaturated, ZeroVector

IntVec = tuple[int, ...]


def primitive_content(v: Sequence[int]) -> tuple[IntVec, int]:
    """Split v = content * primitive with primitive of gcd 1 pointing the
    same way as v and content >= 1."""
    vec = tuple(int(x) for x in v)
    g = linalg.vec_content(vec)
    if g == 0:
        raise ZeroVector("primitive_content of the zero vector")
    return tuple(x // g for x in vec), g


@dataclass(frozen=True)
class Lattice:
    """ZZ^rank with its standard basis; the dual pairing is the dot product."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise DimensionMismatch("lattice rank must be >= 0")

    def check_vector(self, v: Sequence[int]) -> IntVec:
        vec = tuple(int(x) for x in v)
        if len(vec) != self.rank:
            raise DimensionMismatch(
                f"vector of length {len(vec)} in rank-{self.rank} lattice")
        return vec


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of ZZ^n, stored as the canonical Hermite basis of its
    generators so that equal sublattices compare equal structurally."""

    ambient: Lattice
    generators: tuple[IntVec, ...] = field(default=())

    def __post_init__(self):
        gens = tuple(self.ambient.check_vector(g) for g in self.generators)
        object.__setattr__(self, "generators", linalg.hnf_rows(gens))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def contains(self, v: Sequence[int]) -> bool:
        vec = self.ambient.check_vector(v)
        if not self.generators:
            return not any(vec)
        coeffs = linalg.solve_general(linalg.transpose(self.generators), vec)
        return coeffs is not None and all(c.denominator == 1 for c in coeffs)

    def spans_rationally(self, v: Sequence[int]) -> bool:
        """Whether v lies in the QQ-span of the generators."""
        vec = self.ambient.check_vector(v)
        if not self.generators:
            return not any(vec)
        return linalg.solve_general(linalg.transpose(self.generators), vec) is not None


def saturate(s: Sublattice) -> Sublattice:
    """Saturation (QQ-span of s) intersected with the ambient lattice.

    Computed as the double perp: the integer kernel of the pairing against
    a basis of s-perp, which is saturated by construction.
    """
    n = s.ambient.rank
    if not s.generators:
        return s
    perp = linalg.integer_kernel(s.generators, n)
    sat = linalg.integer_kernel(perp, n) if perp else linalg.hnf_rows(
        [[1 if i == j else 0 for j in range(n)] for i in range(n)])
    return Sublattice(s.ambient, sat)


def saturation_index(s: Sublattice) -> int:
    """Index [saturate(s) : s], the product of the Smith diagonal."""
    if not s.generators:
        return 1
    diag = linalg.smith_diagonal(s.generators)
    out = 1
    for d in diag:
        out *= d
    return out


@dataclass(frozen=True)
class QuotientLattice:
    """ZZ^n / kernel, presented by a surjective integer projection with an
    integer section.  The basis of the quotient is a free unimodular choice;
    only the stated invariants may be relied upon downstream."""

    ambient: Lattice
    kernel: Sublattice
    projection_matrix: tuple[IntVec, ...]
    section_matrix: tuple[IntVec, ...]

    @property
    def rank(self) -> int:
        return len(self.projection_matrix)

    def project(self, v: Sequence[int]) -> IntVec:
        vec = self.ambient.check_vector(v)
        return tuple(int(linalg.dot(row, vec)) for row in self.projection_matrix)

    def project_rational(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.ambient.rank:
            raise DimensionMismatch("vector/lattice rank mismatch")
        return tuple(linalg.dot(row, v) for row in self.projection_matrix)

    def lift(self, w: Sequence[int]) -> IntVec:
        if len(w) != self.rank:
            raise DimensionMismatch("vector/quotient rank mismatch")
        return tuple(
            sum(self.section_matrix[i][j] * int(w[j]) for j in range(self.rank))
            for i in range(self.ambient.rank))


def quotient(n: Lattice, n0: Sublattice) -> QuotientLattice:
    """Quotient lattice N/N0 for saturated N0, with projection pi such that
    pi(v) = 0 iff v lies in N0, and an integer right inverse witnessing
    surjectivity.

    The projection rows are the canonical basis of the annihilator of N0 in
    the dual lattice, so pairing a dual vector written in those coordinates
    against pi(v) agrees with the ambient pairing.
    """
    if n0.ambient != n:
        raise DimensionMismatch("sublattice of a different lattice")
    if saturate(n0).generators != n0.generators:
        raise NotSaturated("quotient by a non-saturated sublattice")
    proj = linalg.integer_kernel(n0.generators, n.rank) if n0.generators else \
        linalg.hnf_rows([[1 if i == j else 0 for j in range(n.rank)]
                         for i in range(n.rank)])
    section = linalg.integer_right_inverse(proj)
    if section is None:
        raise NotSaturated("projection is not surjective; kernel not saturated")
    q = QuotientLattice(
        ambient=n,
        kernel=n0,
        projection_matrix=proj,
        section_matrix=tuple(tuple(r) for r in section),
    )
    # construction-time invariants
    comp = linalg.mat_mul(linalg.frac_mat(proj), linalg.frac_mat(section))
    assert comp == linalg.identity_mat(len(proj)), "projection o section != id"
    for g in n0.generators:
        assert not any(q.project(g)), "kernel generator with nonzero image"
    return q
