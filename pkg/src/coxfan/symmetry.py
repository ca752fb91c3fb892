"""The finite group of lattice automorphisms permuting a ray configuration.

Elements act on N by their matrix (columns convention: v |-> M v), on rays
by the induced permutation, and on M by the dual matrix (inverse transpose),
which is the action that moves points of the stratification torus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from . import intlinalg as la
from .classgroup import ClassGroup, DivisorClass, validate_rays
from .errors import PreconditionError, ToricInputError


@dataclass(frozen=True)
class RaySymmetry:
    """A unimodular matrix g with g . u_rho = u_{perm[rho]} for every ray."""

    matrix: la.IntMatrix
    perm: tuple[int, ...]
    dual: la.IntMatrix  # transpose of the inverse; the action on M

    def apply_n(self, v):
        return la.mat_vec(self.matrix, v)

    def apply_m(self, theta):
        return la.mat_vec(self.dual, theta)

    def key(self):
        return self.matrix


def _dual_matrix(matrix) -> la.IntMatrix:
    inv = la.mat_inverse(matrix)
    dual = la.transpose(inv)
    out = []
    for row in dual:
        if any(Fraction(x).denominator != 1 for x in row):
            raise ToricInputError("matrix is not unimodular")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def _symmetry_from_matrix(matrix, rays) -> RaySymmetry | None:
    ray_index = {r: i for i, r in enumerate(rays)}
    perm = []
    for r in rays:
        image = la.mat_vec(matrix, r)
        j = ray_index.get(image)
        if j is None:
            return None
        perm.append(j)
    if len(set(perm)) != len(perm):
        return None
    return RaySymmetry(matrix=matrix, perm=tuple(perm), dual=_dual_matrix(matrix))


@dataclass(frozen=True)
class RaySymmetryGroup:
    """All ray-preserving lattice automorphisms, in a fixed canonical order."""

    rays: tuple[tuple[int, ...], ...]
    elements: tuple[RaySymmetry, ...]
    generators: tuple[RaySymmetry, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity(self) -> RaySymmetry:
        n = len(self.rays[0])
        ident = la.identity_matrix(n)
        return next(e for e in self.elements if e.matrix == ident)

    def compose(self, g: RaySymmetry, h: RaySymmetry) -> RaySymmetry:
        """The element acting as first h, then g (matrix product g h)."""
        matrix = la.mat_mul(g.matrix, h.matrix)
        return self.element_with_matrix(matrix)

    def inverse(self, g: RaySymmetry) -> RaySymmetry:
        inv = tuple(
            tuple(int(x) for x in row) for row in la.mat_inverse(g.matrix)
        )
        return self.element_with_matrix(inv)

    def element_with_matrix(self, matrix) -> RaySymmetry:
        for e in self.elements:
            if e.matrix == tuple(tuple(r) for r in matrix):
                return e
        raise ToricInputError("matrix is not an element of the group")

    def permutation_is_faithful(self) -> bool:
        return len({e.perm for e in self.elements}) == len(self.elements)


def compute_symmetry_group(rays) -> RaySymmetryGroup:
    """Enumerate G = {g in GL(N) unimodular : g permutes the rays}.

    Strategy: fix a ray subset forming a basis of N_Q, try every injective
    assignment of images among the rays, solve for the matrix, and keep it
    iff it is integral, unimodular, and permutes the whole configuration.
    """
    rays = validate_rays(rays)
    n = len(rays[0])
    if la.mat_rank(rays) != n:
        raise PreconditionError(
            "symmetry group not finite: rays do not span N_R"
        )
    basis_idx = _greedy_basis(rays, n)
    basis_cols = la.transpose([rays[i] for i in basis_idx])
    basis_inv = la.mat_inverse(basis_cols)
    found = {}
    for target in permutations(range(len(rays)), n):
        target_cols = la.transpose([rays[i] for i in target])
        candidate = la.mat_mul(target_cols, basis_inv)
        matrix = []
        integral = True
        for row in candidate:
            ints = []
            for x in row:
                fx = Fraction(x)
                if fx.denominator != 1:
                    integral = False
                    break
                ints.append(int(fx))
            if not integral:
                break
            matrix.append(tuple(ints))
        if not integral:
            continue
        matrix = tuple(matrix)
        if matrix in found:
            continue
        if abs(la.bareiss_det(matrix)) != 1:
            continue
        sym = _symmetry_from_matrix(matrix, rays)
        if sym is not None:
            found[matrix] = sym
    elements = tuple(sorted(found.values(), key=lambda e: e.matrix))
    generators = _generating_subsequence(elements)
    return RaySymmetryGroup(rays=rays, elements=elements, generators=generators)


def _greedy_basis(rays, n):
    chosen = []
    for i, _ in enumerate(rays):
        if la.mat_rank([rays[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == n:
            return tuple(chosen)
    raise PreconditionError("rays do not span N_R")


def _generating_subsequence(elements):
    """A small generating set, found greedily over the canonical order."""
    n = len(elements[0].matrix)
    ident = la.identity_matrix(n)
    have = {ident}
    gens = []
    for e in elements:
        if e.matrix in have:
            continue
        gens.append(e)
        have = _closure([g.matrix for g in gens], ident)
        if len(have) == len(elements):
            break
    return tuple(gens)


def _closure(matrices, ident):
    have = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in matrices:
                prod = la.mat_mul(g, m)
                if prod not in have:
                    have.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return have


def act_on_class(g: RaySymmetry, c: DivisorClass, cg: ClassGroup) -> DivisorClass:
    """Push a divisor class along g: permute a lift's coordinates, reproject.

    Well defined because permuting a pairing-image vector by g lands back
    in the pairing image (<m, u_{g^{-1} rho}> = <g_* m, u_rho>).
    """
    if len(g.perm) != cg.n_rays:
        raise ToricInputError("symmetry and class group disagree on ray count")
    lift = cg.lift(c)
    permuted = [0] * len(lift)
    for i, coeff in enumerate(lift):
        permuted[g.perm[i]] = coeff
    return cg.degree_of_vector(tuple(permuted))


def act_on_free_point(g: RaySymmetry, point, cg: ClassGroup):
    """The action on rational points of Cl(X)_R (free coordinates)."""
    lift = cg.rational_lift(point)
    permuted = [Fraction(0)] * len(lift)
    for i, coeff in enumerate(lift):
        permuted[g.perm[i]] = coeff
    return cg.free_image(tuple(permuted))


def orbits(group: RaySymmetryGroup, points, action):
    """Orbit partition of an indexed point list under a supplied action.

    ``action(g, point) -> point`` must return values comparable with the
    listed points.  Orbits come back as sorted index tuples, ordered by
    their smallest member.
    """
    index = {}
    for i, p in enumerate(points):
        index.setdefault(_hashable(p), i)
    seen = set()
    out = []
    for i, p in enumerate(points):
        if i in seen:
            continue
        orbit = {i}
        for g in group.elements:
            image = action(g, p)
            j = index.get(_hashable(image))
            if j is None:
                raise ToricInputError(
                    "action leaves the listed points; orbit undefined"
                )
            orbit.add(j)
        seen |= orbit
        out.append(tuple(sorted(orbit)))
    return tuple(out)


def _hashable(x):
    if isinstance(x, DivisorClass):
        return x.key()
    if isinstance(x, tuple):
        return x
    return x
