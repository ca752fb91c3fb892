"""The periodic Bondal stratification of the torus M_R/M.

Points k of M_R are graded by the integer vector (ceil<k,u_rho>)_rho.  The
dual hyperplanes <k, u_rho> in Z cut M_R/M into finitely many cells; each
cell carries the divisor class of sum floor(-<theta,u_rho>) D_rho, constant
on the cell.  This module enumerates the cells exactly, computes the class
data, the bounding polytopes P_theta, the integrally-pinned ray sets J, and
a brute-force oracle that sweeps 1/ell-grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intlinalg as la
from .classgroup import ClassGroup, DivisorClass, class_group, validate_rays
from .errors import InternalInvariantError, PreconditionError
from .geometry import Cone, Polytope, _rays_from_halfspaces

RatPoint = tuple[Fraction, ...]


def d_theta(theta, cg: ClassGroup) -> DivisorClass:
    """Class of the vector (floor(-<theta, u_rho>))_rho."""
    theta = tuple(Fraction(x) for x in theta)
    coeffs = tuple(
        math.floor(-la.vec_dot(theta, ray)) for ray in cg.rays
    )
    return cg.degree_of_vector(coeffs)


def ceil_vector(theta, rays) -> tuple[int, ...]:
    theta = tuple(Fraction(x) for x in theta)
    return tuple(math.ceil(la.vec_dot(theta, ray)) for ray in rays)


def polytope_P(theta, rays) -> Polytope:
    """The bounding polytope {k : <k,u_rho> <= ceil<theta,u_rho>}."""
    rays = validate_rays(rays)
    cv = ceil_vector(theta, rays)
    try:
        poly = Polytope.from_halfspaces(
            len(rays[0]), [(ray, c) for ray, c in zip(rays, cv)]
        )
    except PreconditionError as exc:
        raise PreconditionError(
            "bounding polytope is unbounded: projective case required "
            "(rays must positively span)"
        ) from exc
    if poly is None:
        raise InternalInvariantError("bounding polytope cannot be empty")
    return poly


@dataclass(frozen=True)
class BondalStratum:
    """One cell of the stratification, with its class-level pinning data.

    ``dim`` is the cell's own dimension (affine dimension of
    closure_vertices).  ``J`` and ``region_dim`` describe the half-open
    region of points sharing the cell's ceiling vector: J holds the rays
    whose pairing is pinned to a constant integer there, and region_dim its
    dimension.  The two coincide with the cell data whenever the ray set is
    centrally symmetric; they depend only on the cell's class in general.
    """

    id: int
    sample: RatPoint
    dim: int
    J: tuple[int, ...]
    region_dim: int
    theta_class: DivisorClass
    closure_vertices: tuple[RatPoint, ...]
    lifts: tuple[tuple[RatPoint, ...], ...]

    def closure_polytope(self, ambient: int) -> Polytope:
        return Polytope.from_points(ambient, self.closure_vertices)


@dataclass(frozen=True)
class ThetaCollection:
    """All strata plus the deduplicated class list (the collection Theta)."""

    rays: tuple[tuple[int, ...], ...]
    strata: tuple[BondalStratum, ...]
    classes: tuple[DivisorClass, ...]
    class_of_stratum: tuple[int, ...]  # stratum id -> class index

    @property
    def lattice_rank(self) -> int:
        return len(self.rays[0])

    def class_index(self, c: DivisorClass) -> int:
        for i, d in enumerate(self.classes):
            if d == c:
                return i
        raise KeyError(f"{c} is not a Theta class")

    def strata_of_class(self, class_index: int):
        return tuple(
            s for s in self.strata if self.class_of_stratum[s.id] == class_index
        )

    def class_sample(self, class_index: int) -> RatPoint:
        return self.strata_of_class(class_index)[0].sample

    def class_J(self, class_index: int) -> tuple[int, ...]:
        return self.strata_of_class(class_index)[0].J

    def class_region_dim(self, class_index: int) -> int:
        return self.strata_of_class(class_index)[0].region_dim

    def counts_by_dim(self) -> tuple[int, ...]:
        n = self.lattice_rank
        counts = [0] * (n + 1)
        for s in self.strata:
            counts[s.dim] += 1
        return tuple(counts)


def arrangement_walls(rays):
    """Canonical wall functionals with their integer levels on [0,1]^n."""
    n = len(rays[0])
    functionals = sorted({la.sign_canonical(r) for r in rays})
    walls = []
    for u in functionals:
        lo = sum(min(0, x) for x in u)
        hi = sum(max(0, x) for x in u)
        walls.append((u, tuple(range(lo, hi + 1))))
    return tuple(walls)


def _frac_mod1(x: Fraction) -> Fraction:
    return Fraction(x) - math.floor(Fraction(x))


def _torus_key(point):
    return tuple(_frac_mod1(x) for x in point)


def _integral_rays(theta, rays):
    return tuple(
        i for i, ray in enumerate(rays)
        if la.vec_dot(tuple(Fraction(x) for x in theta), ray).denominator == 1
    )


def pinned_rays(theta, rays) -> tuple[tuple[int, ...], int]:
    """J and the region dimension for the ceiling region through theta.

    A ray rho is pinned iff <theta,u_rho> is an integer and -u_rho lies in
    the cone spanned by the integrally tight rays; the region spans the
    common kernel of the pinned rays.
    """
    n = len(rays[0])
    tight = _integral_rays(theta, rays)
    if not tight:
        return (), n
    vecs = [rays[i] for i in tight]
    dual_rays = _dual_generators(tuple(vecs), n)
    j = []
    for i in tight:
        target = tuple(-x for x in rays[i])
        if _in_cone_hull(tuple(vecs), target, dual_rays, n):
            j.append(i)
    j = tuple(j)
    rank = la.mat_rank([rays[i] for i in j]) if j else 0
    return j, n - rank


def _dual_generators(vecs, ambient):
    """Data deciding membership in cone(vecs): span rows plus the extreme
    rays of the dual cone restricted to the span."""
    span_eqs = la.right_kernel_basis(vecs)
    duals = _rays_from_halfspaces(ambient, vecs, span_eqs)
    return span_eqs, tuple(duals)


def _in_cone_hull(vecs, target, dual_data, ambient):
    span_eqs, duals = dual_data
    if any(la.vec_dot(e, target) != 0 for e in span_eqs):
        return False
    return all(la.vec_dot(y, target) >= 0 for y in duals)


def frobenius_oracle(rays, cg: ClassGroup, ell: int):
    """Classes of d_theta over the (1/ell)-grid in [0,1)^n: an independent
    generator of Theta classes that converges as ell grows."""
    if ell < 1:
        raise PreconditionError("ell must be a positive integer")
    n = len(rays[0])
    found = {}
    grid = [Fraction(i, ell) for i in range(ell)]
    from itertools import product

    for point in product(grid, repeat=n):
        c = d_theta(point, cg)
        found[c.key()] = c
    return tuple(sorted(found.values(), key=lambda c: c.key()))


def enumerate_strata(rays, cg: ClassGroup | None = None) -> ThetaCollection:
    """All strata of the torus cut by {<k, u_rho> in Z}, exactly.

    The closed cube [0,1]^n is sliced by every integer level of every ray
    functional; faces of the resulting complex are identified under integer
    translation via their barycenters.  When some cube facet is not itself
    an arrangement wall, faces artificially split by it are re-merged.
    """
    rays = validate_rays(rays)
    n = len(rays[0])
    if la.mat_rank(rays) != n:
        raise PreconditionError("strata enumeration requires rays spanning N_R")
    if cg is None:
        cg = class_group(rays)
    walls = arrangement_walls(rays)

    cells = [Polytope.cube(n)]
    for u, levels in walls:
        for c in levels:
            nxt = []
            for cell in cells:
                lo, hi = cell.split(u, c)
                nxt.extend(p for p in (lo, hi) if p is not None)
            cells = nxt

    # Collect every face of every top cell, dedup by torus barycenter.
    records: dict[tuple, dict] = {}
    for cell in cells:
        for verts in cell.face_vertex_sets():
            bary = _barycenter(verts)
            key = _torus_key(bary)
            rec = records.get(key)
            if rec is None:
                rec = {"dim": la.affine_rank(verts), "lifts": set()}
                records[key] = rec
            rec["lifts"].add(tuple(sorted(verts)))

    functional_set = {u for u, _ in walls}
    cube_walls_genuine = all(
        la.sign_canonical(tuple(1 if j == i else 0 for j in range(n))) in functional_set
        for i in range(n)
    )
    groups = _merge_artifacts(records, rays, n) if not cube_walls_genuine else [
        [key] for key in records
    ]

    strata = []
    for group in groups:
        best = max(group, key=lambda k: (records[k]["dim"], k))
        rec = records[best]
        lift = min(rec["lifts"])
        sample = _torus_key(_barycenter(lift))
        j, region_dim = pinned_rays(sample, rays)
        strata.append(
            {
                "sample": sample,
                "dim": rec["dim"],
                "J": j,
                "region_dim": region_dim,
                "theta_class": d_theta(sample, cg),
                "closure_vertices": lift,
                "lifts": tuple(sorted(records[k]["lifts"].pop() for k in group)),
            }
        )
    strata.sort(key=lambda s: (s["dim"], s["sample"]))

    class_keys = sorted({s["theta_class"].key() for s in strata})
    classes = tuple(
        next(s["theta_class"] for s in strata if s["theta_class"].key() == k)
        for k in class_keys
    )
    class_of_stratum = []
    built = []
    for i, s in enumerate(strata):
        idx = class_keys.index(s["theta_class"].key())
        class_of_stratum.append(idx)
        built.append(BondalStratum(id=i, **s))

    collection = ThetaCollection(
        rays=rays,
        strata=tuple(built),
        classes=classes,
        class_of_stratum=tuple(class_of_stratum),
    )
    _check_class_consistency(collection)
    return collection


def _barycenter(verts):
    total = verts[0]
    for v in verts[1:]:
        total = la.vec_add(total, v)
    return tuple(Fraction(x) / len(verts) for x in total)


def _merge_artifacts(records, rays, n):
    """Union-find pass re-joining faces split by non-arrangement cube walls.

    A face is an artifact when its dimension is lower than that of the
    arrangement flat through its barycenter; it belongs to the same stratum
    as any incident one-dimension-up face whose integrally tight functional
    set matches (only fake walls separate them).
    """
    keys = list(records)
    tight_sets = {}
    flat_dims = {}
    for key in keys:
        tight = tuple(
            u for u in {la.sign_canonical(r) for r in rays}
            if la.vec_dot(key, u).denominator == 1
        )
        tight_sets[key] = frozenset(tight)
        rank = la.mat_rank(list(tight)) if tight else 0
        flat_dims[key] = n - rank

    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    by_dim: dict[int, list] = {}
    for key in keys:
        by_dim.setdefault(records[key]["dim"], []).append(key)

    for key in keys:
        rec = records[key]
        if rec["dim"] >= flat_dims[key]:
            continue
        for up_key in by_dim.get(rec["dim"] + 1, ()):
            if tight_sets[up_key] != tight_sets[key]:
                continue
            if _is_incident(records[key]["lifts"], records[up_key]["lifts"]):
                union(key, up_key)

    groups: dict = {}
    for key in keys:
        groups.setdefault(find(key), []).append(key)
    return list(groups.values())


def _is_incident(lifts_small, lifts_big):
    for small in lifts_small:
        sset = set(small)
        v0 = small[0]
        for big in lifts_big:
            bset = set(big)
            for w in big:
                t = la.vec_sub(w, v0)
                if any(Fraction(x).denominator != 1 for x in t):
                    continue
                if all(la.vec_add(v, t) in bset for v in sset):
                    return True
    return False


def _check_class_consistency(collection: ThetaCollection):
    per_class: dict[int, tuple] = {}
    for s in collection.strata:
        idx = collection.class_of_stratum[s.id]
        data = (s.J, s.region_dim)
        if idx in per_class and per_class[idx] != data:
            raise InternalInvariantError(
                f"strata of class {collection.classes[idx]} disagree on (J, region_dim)"
            )
        per_class.setdefault(idx, data)
