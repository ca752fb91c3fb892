"""Fans, stacky fans, maps of stacky fans, and the nef test.

A Fan stores the full ray configuration; chamber fans that omit rays keep
them in ``rays`` and flag the omitted indices in ``unused_rays`` so the
bookkeeping round-trips losslessly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import functools
from functools import cached_property

from . import intlinalg as la
from .classgroup import ClassGroup, DivisorClass, validate_rays
from .errors import PreconditionError, ToricInputError
from .geometry import Cone


class Fan:
    """A fan given by rays and maximal cones (ray-index tuples).

    Construction validates everything: rays primitive and distinct, every
    listed cone strongly convex, any two cones intersecting in a common
    face, and every ray either used by a cone or explicitly flagged unused.
    """

    def __init__(self, lattice_rank, rays, max_cones, unused_rays=()):
        self.lattice_rank = int(lattice_rank)
        self.rays = validate_rays(rays)
        if any(len(r) != self.lattice_rank for r in self.rays):
            raise ToricInputError("ray dimension does not match lattice rank")
        cones = []
        for cone in max_cones:
            idx = tuple(sorted(set(int(i) for i in cone)))
            if not idx:
                raise ToricInputError("empty maximal cone")
            for i in idx:
                if not 0 <= i < len(self.rays):
                    raise ToricInputError(f"cone ray index {i} out of range")
            cones.append(idx)
        if not cones:
            raise ToricInputError("fan needs at least one maximal cone")
        self.max_cones = tuple(sorted(set(cones)))
        self.unused_rays = frozenset(int(i) for i in unused_rays)
        used = set()
        for cone in self.max_cones:
            used.update(cone)
        declared = set(range(len(self.rays))) - used
        if declared != set(self.unused_rays):
            raise ToricInputError(
                f"unused rays {sorted(declared)} do not match the declared set "
                f"{sorted(self.unused_rays)}"
            )
        self._cones = tuple(
            Cone.from_generators(self.lattice_rank, [self.rays[i] for i in idx])
            for idx in self.max_cones
        )
        self._check_face_intersections()

    def _check_face_intersections(self):
        for i in range(len(self._cones)):
            for j in range(i + 1, len(self._cones)):
                meet = self._cones[i].intersect(self._cones[j])
                if not (meet.is_face_of(self._cones[i]) and meet.is_face_of(self._cones[j])):
                    raise ToricInputError(
                        f"cones {self.max_cones[i]} and {self.max_cones[j]} "
                        "do not intersect in a common face"
                    )

    def cone(self, k: int) -> Cone:
        return self._cones[k]

    def cones(self):
        return self._cones

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def cone_keys(self):
        """Label-free cone set: sorted extreme-ray keys of the maximal cones."""
        return tuple(sorted(c.key() for c in self._cones))

    def __eq__(self, other):
        return (
            isinstance(other, Fan)
            and self.lattice_rank == other.lattice_rank
            and set(self.rays) == set(other.rays)
            and self.cone_keys() == other.cone_keys()
        )

    def __hash__(self):
        return hash((self.lattice_rank, tuple(sorted(self.rays)), self.cone_keys()))

    def __repr__(self):
        return (
            f"Fan(rank={self.lattice_rank}, rays={len(self.rays)}, "
            f"max_cones={len(self.max_cones)})"
        )

    @cached_property
    def all_faces(self):
        """Every nonzero face of every maximal cone, deduplicated."""
        seen = {}
        for c in self._cones:
            for f in c.faces():
                seen.setdefault(f.key(), f)
        return tuple(sorted(seen.values(), key=lambda c: (c.dim, c.key())))

    def containing_cone_index(self, v):
        for k, c in enumerate(self._cones):
            if c.contains(v):
                return k
        return None


def is_simplicial(fan: Fan) -> bool:
    """True iff each maximal cone's listed rays are linearly independent."""
    for idx in fan.max_cones:
        vecs = [fan.rays[i] for i in idx]
        if la.mat_rank(vecs) != len(vecs):
            return False
    return True


def is_complete(fan: Fan) -> bool:
    """Exact completeness: all maximal cones full dimensional and every
    ridge shared by exactly two of them (the support then has no boundary)."""
    n = fan.lattice_rank
    if any(c.dim != n for c in fan.cones()):
        return False
    counts = {}
    for c in fan.cones():
        for facet in c.facets():
            counts[facet.key()] = counts.get(facet.key(), 0) + 1
    return bool(counts) and all(v == 2 for v in counts.values())


def is_refinement(fine: Fan, coarse: Fan) -> bool:
    """True iff every cone of fine lies in a cone of coarse and the two
    supports coincide."""
    if fine.lattice_rank != coarse.lattice_rank:
        raise PreconditionError("fans live in different lattices")
    hosts = {}
    for k, c in enumerate(fine.cones()):
        host = next(
            (j for j, d in enumerate(coarse.cones()) if d.contains_cone(c)), None
        )
        if host is None:
            return False
        hosts.setdefault(host, []).append(k)
    if is_complete(fine) and is_complete(coarse):
        return True
    # Support equality: inside each coarse cone the fine cones of full local
    # dimension must tile it (ridges internal to the coarse cone pair up).
    for j, d in enumerate(coarse.cones()):
        members = [fine.cone(k) for k in hosts.get(j, [])]
        members = [c for c in members if c.dim == d.dim]
        if not members:
            return False
        ridge_counts = {}
        for c in members:
            for facet in c.facets():
                ridge_counts[facet.key()] = ridge_counts.get(facet.key(), 0) + 1
        boundary = {f.key() for f in d.facets()}
        for key, count in ridge_counts.items():
            if count == 2:
                continue
            if count == 1:
                face = Cone.from_generators(fine.lattice_rank, key)
                if any(
                    Cone.from_generators(coarse.lattice_rank, bk).contains_cone(face)
                    for bk in boundary
                ):
                    continue
            return False
    return True


@dataclass(frozen=True)
class StackyFan:
    """A fan with a positive integer weight per ray (beta(e_rho) = b u_rho)."""

    fan: Fan
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.fan.rays):
            raise ToricInputError("need one weight per ray")
        if any(w < 1 for w in self.weights):
            raise ToricInputError("stacky weights must be positive")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))


def trivial_weights(fan: Fan) -> StackyFan:
    return StackyFan(fan, (1,) * len(fan.rays))


@dataclass(frozen=True)
class RayWitness:
    """Divisibility data for one source ray under a map of stacky fans.

    a_multiplier is the least positive a with a * f(u_rho) an integer
    combination of the minimal target cone's rays; coeffs are those integers.
    lift gives the integral coefficients of the Z^rays-level map when it
    exists (b_rho * c_tau / b'_tau for each tau).
    """

    target_cone: tuple[int, ...]
    coeffs: tuple[tuple[int, int], ...]  # (target ray index, integer coeff)
    a_multiplier: int
    lift: tuple[tuple[int, int], ...] | None


class FanMap:
    """A candidate map of stacky fans: a lattice map plus ray-lift witnesses."""

    def __init__(self, source: StackyFan, target: StackyFan, matrix):
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        if len(self.matrix) != target.fan.lattice_rank or any(
            len(row) != source.fan.lattice_rank for row in self.matrix
        ):
            raise ToricInputError("lattice map has the wrong shape")
        self.ray_witnesses = self._compute_witnesses()

    def map_vector(self, v):
        return la.mat_vec(self.matrix, v)

    def _compute_witnesses(self):
        witnesses = {}
        tfan = self.target.fan
        for rho, ray in enumerate(self.source.fan.rays):
            if rho in self.source.fan.unused_rays:
                continue
            image = self.map_vector(ray)
            if not any(image):
                witnesses[rho] = None
                continue
            k = tfan.containing_cone_index(image)
            if k is None:
                witnesses[rho] = None
                continue
            idx = tfan.max_cones[k]
            vecs = [tfan.rays[i] for i in idx]
            coeffs = _cone_coefficients(vecs, image)
            if coeffs is None:
                witnesses[rho] = None
                continue
            support = [(i, c) for i, c in zip(idx, coeffs) if c != 0]
            a = 1
            for _, c in support:
                a = la.lcm(a, Fraction(c).denominator)
            int_coeffs = tuple((i, int(c * a)) for i, c in support)
            b_rho = self.source.weights[rho]
            lift = []
            ok = True
            for i, c in support:
                num = b_rho * c
                val = Fraction(num, self.target.weights[i])
                if val.denominator != 1:
                    ok = False
                    break
                lift.append((i, int(val)))
            witnesses[rho] = RayWitness(
                target_cone=idx,
                coeffs=int_coeffs,
                a_multiplier=a,
                lift=tuple(lift) if ok else None,
            )
        return witnesses


def _cone_coefficients(vecs, point):
    """Nonnegative rational coordinates of point over independent vecs, if any."""
    if la.mat_rank(vecs) != len(vecs):
        return None
    cols = la.transpose(vecs)
    sol = la.solve_rational(cols, point)
    if sol is None:
        return None
    if la.mat_vec(cols, sol) != tuple(Fraction(x) for x in point):
        return None
    if any(c < 0 for c in sol):
        return None
    return sol


def is_map_of_stacky_fans(fm: FanMap) -> bool:
    """True iff every source cone maps into a target cone and every source
    ray has an integral divisibility witness against the target weights."""
    tcones = fm.target.fan.cones()
    for c in fm.source.fan.cones():
        images = [fm.map_vector(g) for g in c.gens]
        if not any(all(t.contains(v) for v in images) for t in tcones):
            return False
    for rho in range(len(fm.source.fan.rays)):
        if rho in fm.source.fan.unused_rays:
            continue
        w = fm.ray_witnesses.get(rho)
        if w is None or w.lift is None:
            return False
    return True


def fan_2d(rays, unused=()) -> Fan:
    """The unique complete fan on a positively spanning set of planar rays."""
    rays = validate_rays(rays)
    if len(rays[0]) != 2:
        raise PreconditionError("fan_2d needs planar rays")
    used = [i for i in range(len(rays)) if i not in set(unused)]

    def angle_class(v):
        x, y = v
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    # Sort by angle: within the same half turn, v before w iff cross(v,w) > 0.
    def compare(i, j):
        vi, vj = rays[i], rays[j]
        ci, cj = angle_class(vi), angle_class(vj)
        if ci != cj:
            return -1 if ci < cj else 1
        cross = vi[0] * vj[1] - vi[1] * vj[0]
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    order = sorted(used, key=functools.cmp_to_key(compare))
    cones = []
    for k in range(len(order)):
        i, j = order[k], order[(k + 1) % len(order)]
        cross = rays[i][0] * rays[j][1] - rays[i][1] * rays[j][0]
        if cross <= 0:
            raise PreconditionError(
                "rays do not positively span the plane with proper gaps"
            )
        cones.append((i, j))
    return Fan(2, rays, cones, unused_rays=unused)


def is_nef(c: DivisorClass, chamber_fan: Fan, cg: ClassGroup) -> bool:
    """Decide nef-ness of a class on a complete simplicial chamber fan.

    A class is nef iff its lift (a_rho) supports a concave function F,
    linear on each maximal cone with F(u_rho) = -a_rho on fan rays and
    F(u_rho) >= -a_rho on every configuration ray (unused ones included).
    Sign convention: -x^2 counts as concave, so concavity reads
    <m_sigma, u_rho> >= -a_rho globally.  The choice of lift is immaterial
    because shifting by the pairing image tilts F by a linear function.
    """
    if not is_simplicial(chamber_fan):
        raise PreconditionError("nef test needs a simplicial fan")
    n = chamber_fan.lattice_rank
    if any(cone.dim != n for cone in chamber_fan.cones()):
        raise PreconditionError("nef test needs full-dimensional support")
    if len(cg.rays) != len(chamber_fan.rays):
        raise ToricInputError("class group and fan disagree on the ray count")
    lift = cg.lift(c)
    for idx in chamber_fan.max_cones:
        rows = [chamber_fan.rays[i] for i in idx]
        rhs = [-lift[i] for i in idx]
        m_sigma = la.solve_unique(rows, rhs)
        if m_sigma is None:
            raise PreconditionError("degenerate maximal cone in nef test")
        for rho, ray in enumerate(chamber_fan.rays):
            if la.vec_dot(m_sigma, ray) < -lift[rho]:
                return False
    return True
