"""Exact rational cones and bounded polytopes in low ambient dimension.

All predicates are decided with integer/Fraction arithmetic.  Enumeration is
brute force over constraint subsets, which is entirely adequate at the scale
this library targets (ambient dimension <= 4, a few dozen constraints).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from . import intlinalg as la
from .errors import PreconditionError, ToricInputError


def _frac_tuple(v):
    return tuple(Fraction(x) for x in v)


def _canon_halfplane(a, b):
    """Scale (a, b) so a has integer entries, b stays exact."""
    denom = 1
    for x in a:
        denom = la.lcm(denom, Fraction(x).denominator)
    a = tuple(int(Fraction(x) * denom) for x in a)
    b = Fraction(b) * denom
    return a, b


def _normal_rep(kill_rows, span_kill_rows, ambient):
    """Primitive functional vanishing on kill_rows, canonical mod the span
    annihilator; None if the quotient direction is not one-dimensional."""
    kernel = la.right_kernel_basis(tuple(kill_rows)) if kill_rows else la.identity_matrix(ambient)
    w = list(span_kill_rows)
    base_rank = la.mat_rank(w) if w else 0
    candidate = None
    for k in kernel:
        if la.mat_rank(w + [k]) > base_rank:
            candidate = k
            break
    if candidate is None:
        return None
    if not w:
        return la.primitive_part(candidate)
    # Project candidate off span(w) so the representative is unique.
    gram = tuple(tuple(la.vec_dot(wi, wj) for wj in w) for wi in w)
    rhs = tuple(la.vec_dot(wi, candidate) for wi in w)
    coeff = la.solve_unique(gram, rhs)
    proj = list(_frac_tuple(candidate))
    for c, wi in zip(coeff, w):
        for j in range(ambient):
            proj[j] -= c * wi[j]
    if not any(proj):
        return None
    return la.primitive_part(proj)


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    """A strongly convex rational polyhedral cone with V- and H-descriptions.

    ``gens`` are the primitive extreme rays (sorted; empty for the origin),
    ``eqs`` cut out the linear span, ``ineqs`` are facet inequalities
    a . x >= 0 within the span.  Construction rejects cones with lineality.
    """

    ambient: int
    gens: tuple[tuple[int, ...], ...]
    eqs: tuple[tuple[int, ...], ...]
    ineqs: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_generators(ambient: int, vectors) -> "Cone":
        vecs = []
        for v in vectors:
            if any(v):
                p = la.primitive_part(v)
                if p not in vecs:
                    vecs.append(p)
        if not vecs:
            return Cone(ambient, (), tuple(la.identity_matrix(ambient)), ())
        eqs = la.right_kernel_basis(tuple(vecs))
        dim = ambient - len(eqs)
        ineqs = _cone_facets(ambient, vecs, eqs, dim)
        if ineqs is None:
            raise ToricInputError("cone is not strongly convex")
        gens = tuple(
            sorted(v for v in vecs if _ray_is_extreme(v, ineqs, eqs, ambient))
        )
        return Cone(ambient, gens, tuple(eqs), tuple(ineqs))

    @staticmethod
    def from_halfspaces(ambient: int, normals, eqs=()) -> "Cone":
        """Cone {x : n . x >= 0, e . x = 0}; must be strongly convex."""
        rays = _rays_from_halfspaces(ambient, tuple(normals), tuple(eqs))
        return Cone.from_generators(ambient, rays)

    @property
    def dim(self) -> int:
        return self.ambient - len(self.eqs)

    def key(self):
        return self.gens

    def contains(self, x) -> bool:
        return all(la.vec_dot(e, x) == 0 for e in self.eqs) and all(
            la.vec_dot(n, x) >= 0 for n in self.ineqs
        )

    def relint_contains(self, x) -> bool:
        return all(la.vec_dot(e, x) == 0 for e in self.eqs) and all(
            la.vec_dot(n, x) > 0 for n in self.ineqs
        )

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.gens)

    def intersect(self, other: "Cone") -> "Cone":
        return Cone.from_halfspaces(
            self.ambient, self.ineqs + other.ineqs, self.eqs + other.eqs
        )

    def is_face_of(self, other: "Cone") -> bool:
        """self is a face of other iff it equals other cut by the facets
        tight on it (the minimal face containing it)."""
        if not other.contains_cone(self):
            return False
        if self.dim == 0:
            return True
        tight = tuple(
            n for n in other.ineqs if all(la.vec_dot(n, g) == 0 for g in self.gens)
        )
        cut = Cone.from_halfspaces(other.ambient, other.ineqs, other.eqs + tight)
        return cut.key() == self.key()

    def facets(self):
        out = {}
        for n in self.ineqs:
            sub = [g for g in self.gens if la.vec_dot(n, g) == 0]
            face = Cone.from_generators(self.ambient, sub)
            if face.dim == self.dim - 1:
                out.setdefault(face.key(), face)
        return list(out.values())

    def faces(self, include_self=True):
        """All nonzero faces, lowest dimension first."""
        seen = {}
        stack = [self]
        while stack:
            cone = stack.pop()
            if cone.key() in seen or cone.dim == 0:
                continue
            seen[cone.key()] = cone
            stack.extend(cone.facets())
        out = sorted(seen.values(), key=lambda c: (c.dim, c.key()))
        if not include_self:
            out = [c for c in out if c.key() != self.key()]
        return out

    def interior_point(self) -> tuple[int, ...]:
        if not self.gens:
            return (0,) * self.ambient
        total = self.gens[0]
        for g in self.gens[1:]:
            total = la.vec_add(total, g)
        return total


def _cone_facets(ambient, vecs, eqs, dim):
    """Facet inequalities of cone(vecs) within its span; None if lineality."""
    if dim == 0:
        return ()
    if dim == 1:
        g = la.primitive_part(vecs[0])
        for v in vecs:
            if la.primitive_part(v) == tuple(-x for x in g):
                return None
        return (g,)
    normals = {}
    for idx in combinations(range(len(vecs)), dim - 1):
        sub = [vecs[i] for i in idx]
        if la.mat_rank(sub) != dim - 1:
            continue
        n = _normal_rep(sub, list(eqs), ambient)
        if n is None:
            continue
        pos = any(la.vec_dot(n, v) > 0 for v in vecs)
        neg = any(la.vec_dot(n, v) < 0 for v in vecs)
        if pos and neg:
            continue
        if neg:
            n = tuple(-x for x in n)
        normals[n] = True
    normals = sorted(normals)
    for v in vecs:
        if any(v) and all(la.vec_dot(n, v) == 0 for n in normals):
            return None  # a line survives every facet: lineality
    if la.mat_rank(list(normals) + list(eqs)) < ambient:
        return None
    return tuple(normals)


def _ray_is_extreme(v, ineqs, eqs, ambient):
    tight = [n for n in ineqs if la.vec_dot(n, v) == 0]
    return la.mat_rank(tight + list(eqs)) == ambient - 1


def _rays_from_halfspaces(ambient, normals, eqs):
    constraints = list(dict.fromkeys(normals))
    eqs = list(dict.fromkeys(eqs))
    eq_rank = la.mat_rank(eqs) if eqs else 0
    need = ambient - 1 - eq_rank
    if need < 0:
        return []
    found = {}
    for idx in combinations(range(len(constraints)), need):
        tight = [constraints[i] for i in idx] + eqs
        if tight:
            if la.mat_rank(tight) != ambient - 1:
                continue
            kernel = la.right_kernel_basis(tuple(tight))
        else:
            if ambient != 1:
                continue
            kernel = ((1,),)
        if len(kernel) != 1:
            continue
        for cand in (kernel[0], tuple(-x for x in kernel[0])):
            if all(la.vec_dot(n, cand) >= 0 for n in constraints):
                found[la.primitive_part(cand)] = True
    out = []
    for r in found:
        tight = [n for n in constraints if la.vec_dot(n, r) == 0] + eqs
        rank = la.mat_rank(tight) if tight else 0
        if rank == ambient - 1:
            out.append(r)
    return sorted(out)


# ---------------------------------------------------------------------------
# Polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """A bounded rational polytope with exact V- and H-descriptions.

    Inequalities (a, b) mean a . x <= b with integer a; equalities carry the
    affine hull.  Vertices are sorted Fraction tuples.
    """

    ambient: int
    vertices: tuple[tuple[Fraction, ...], ...]
    ineqs: tuple
    eqs: tuple

    @staticmethod
    def _make(ambient, vertices, ineqs) -> "Polytope":
        """Normalize: recompute the affine hull, drop non-vertex points, keep
        facet inequalities only."""
        points = tuple(sorted(set(map(_frac_tuple, vertices))))
        eqs = _affine_hull_eqs(ambient, points)
        vertices = tuple(
            p for p in points if _is_vertex(p, ineqs, eqs, ambient)
        )
        if not vertices:
            vertices = points  # degenerate input; keep what we were given
        dim = la.affine_rank(vertices)
        keep = []
        seen_facets = set()
        for a, b in ineqs:
            tight = frozenset(v for v in vertices if la.vec_dot(a, v) == b)
            if not tight or la.affine_rank(tight) != dim - 1:
                continue
            if tight in seen_facets:
                continue
            seen_facets.add(tight)
            keep.append((a, b))
        return Polytope(ambient, vertices, tuple(keep), eqs)

    @staticmethod
    def from_halfspaces(ambient, ineqs, eqs=()) -> "Polytope | None":
        """Vertex-enumerate {a.x <= b} cap {a.x == b}; None if empty.

        Raises PreconditionError when the region is unbounded.
        """
        ineqs = [(_canon_halfplane(a, b)) for a, b in ineqs]
        eqs = [(_canon_halfplane(a, b)) for a, b in eqs]
        all_normals = [a for a, _ in ineqs] + [a for a, _ in eqs]
        normal_rank = la.mat_rank(all_normals) if all_normals else 0
        if normal_rank < ambient:
            raise PreconditionError("halfspace system is unbounded")
        recession = Cone.from_halfspaces(
            ambient,
            tuple(tuple(-x for x in a) for a, _ in ineqs),
            tuple(a for a, _ in eqs),
        )
        if recession.dim > 0:
            raise PreconditionError("halfspace system is unbounded")
        eq_rank = la.mat_rank([a for a, _ in eqs]) if eqs else 0
        k = ambient - eq_rank
        verts = set()
        for idx in combinations(range(len(ineqs)), k):
            rows = [ineqs[i][0] for i in idx] + [a for a, _ in eqs]
            rhs = [ineqs[i][1] for i in idx] + [b for _, b in eqs]
            if la.mat_rank(rows) != ambient:
                continue
            sol = la.solve_rational(rows, rhs)
            if sol is None:
                continue
            if all(la.vec_dot(a, sol) <= b for a, b in ineqs):
                verts.add(tuple(sol))
        if ambient == 0:
            verts = {()} if all(b >= 0 for _, b in ineqs) else set()
        verts = [v for v in verts if _is_vertex(v, ineqs, eqs, ambient)]
        if not verts:
            return None
        return Polytope._make(ambient, verts, ineqs)

    @staticmethod
    def cube(n: int) -> "Polytope":
        verts = [_frac_tuple(p) for p in product((0, 1), repeat=n)]
        ineqs = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            ineqs.append((tuple(-x for x in e), 0))
            ineqs.append((e, 1))
        return Polytope._make(n, verts, ineqs)

    @staticmethod
    def from_points(ambient, points) -> "Polytope":
        """Convex hull by brute-force facet search (fine for dim <= 3)."""
        pts = sorted({_frac_tuple(p) for p in points})
        if not pts:
            raise ToricInputError("empty point set")
        hull_eqs = _affine_hull_eqs(ambient, pts)
        span_kill = [a for a, _ in hull_eqs]
        dim = ambient - (la.mat_rank(span_kill) if span_kill else 0)
        ineqs = set()
        if dim > 0:
            for idx in combinations(range(len(pts)), dim):
                base = pts[idx[0]]
                diffs = [la.vec_sub(pts[i], base) for i in idx[1:]]
                diffs = [la.primitive_part(d) for d in diffs if any(d)]
                if len(diffs) != dim - 1 or (diffs and la.mat_rank(diffs) != dim - 1):
                    continue
                n = _normal_rep(diffs, span_kill, ambient)
                if n is None:
                    continue
                vals = [la.vec_dot(n, p) for p in pts]
                b = la.vec_dot(n, base)
                if all(v <= b for v in vals):
                    ineqs.add(_canon_halfplane(n, b))
                elif all(v >= b for v in vals):
                    ineqs.add(_canon_halfplane(tuple(-x for x in n), -b))
        return Polytope._make(ambient, pts, sorted(ineqs))

    @property
    def dim(self) -> int:
        return la.affine_rank(self.vertices)

    def contains(self, x) -> bool:
        return all(la.vec_dot(a, x) == b for a, b in self.eqs) and all(
            la.vec_dot(a, x) <= b for a, b in self.ineqs
        )

    def barycenter(self) -> tuple[Fraction, ...]:
        n = len(self.vertices)
        total = self.vertices[0]
        for v in self.vertices[1:]:
            total = la.vec_add(total, v)
        return tuple(Fraction(x) / n for x in total)

    def translate(self, t) -> "Polytope":
        t = _frac_tuple(t)
        verts = [la.vec_add(v, t) for v in self.vertices]
        ineqs = [(a, b + la.vec_dot(a, t)) for a, b in self.ineqs]
        return Polytope._make(self.ambient, verts, ineqs)

    def _is_edge(self, v, w) -> bool:
        tight = [a for a, _ in self.eqs]
        for a, b in self.ineqs:
            if la.vec_dot(a, v) == b and la.vec_dot(a, w) == b:
                tight.append(a)
        rank = la.mat_rank(tight) if tight else 0
        return rank == self.ambient - 1

    def _crossings(self, a, b):
        plus = [v for v in self.vertices if la.vec_dot(a, v) > b]
        minus = [v for v in self.vertices if la.vec_dot(a, v) < b]
        points = set()
        for vp in plus:
            for vm in minus:
                if not self._is_edge(vp, vm):
                    continue
                fp = la.vec_dot(a, vp) - b
                fm = b - la.vec_dot(a, vm)
                t = Fraction(fp, fp + fm)
                points.add(tuple(x + t * (y - x) for x, y in zip(vp, vm)))
        return points

    def split(self, a, b):
        """(part with a.x <= b, part with a.x >= b); either side may be None."""
        a, b = _canon_halfplane(a, b)
        vals = [la.vec_dot(a, v) for v in self.vertices]
        if all(v <= b for v in vals):
            return self, None
        if all(v >= b for v in vals):
            return None, self
        crossings = self._crossings(a, b)
        lo = Polytope._make(
            self.ambient,
            [v for v, val in zip(self.vertices, vals) if val <= b] + list(crossings),
            list(self.ineqs) + [(a, b)],
        )
        neg = tuple(-x for x in a)
        hi = Polytope._make(
            self.ambient,
            [v for v, val in zip(self.vertices, vals) if val >= b] + list(crossings),
            list(self.ineqs) + [(neg, -b)],
        )
        return lo, hi

    def slice(self, a, b) -> "Polytope | None":
        """Intersection with the hyperplane a.x = b, or None if empty."""
        a, b = _canon_halfplane(a, b)
        vals = [la.vec_dot(a, v) for v in self.vertices]
        verts = {v for v, val in zip(self.vertices, vals) if val == b}
        verts |= self._crossings(a, b)
        if not verts:
            return None
        return Polytope._make(self.ambient, verts, self.ineqs)

    def face_vertex_sets(self):
        """All faces as sorted vertex tuples (including self and vertices)."""
        facet_sets = []
        for a, b in self.ineqs:
            tight = frozenset(v for v in self.vertices if la.vec_dot(a, v) == b)
            if tight:
                facet_sets.append(tight)
        top = frozenset(self.vertices)
        closure = {top}
        frontier = [top]
        while frontier:
            nxt = []
            for face in frontier:
                for fs in facet_sets:
                    meet = face & fs
                    if meet and meet not in closure:
                        closure.add(meet)
                        nxt.append(meet)
            frontier = nxt
        return sorted(tuple(sorted(f)) for f in closure)

    def lattice_points(self):
        """Iterate integer points in lexicographic order."""
        lows, highs = [], []
        for i in range(self.ambient):
            coords = [v[i] for v in self.vertices]
            lo, hi = min(coords), max(coords)
            lows.append(-((-lo.numerator) // lo.denominator))
            highs.append(hi.numerator // hi.denominator)
        for point in product(*[range(lo, hi + 1) for lo, hi in zip(lows, highs)]):
            if self.contains(point):
                yield point


def _is_vertex(v, ineqs, eqs, ambient):
    tight = [a for a, _ in eqs]
    tight += [a for a, b in ineqs if la.vec_dot(a, v) == b]
    rank = la.mat_rank(tight) if tight else 0
    return rank == ambient


def _affine_hull_eqs(ambient, pts):
    pts = list(pts)
    base = pts[0]
    diffs = [la.vec_sub(p, base) for p in pts[1:]]
    rows = tuple(la.primitive_part(d) for d in diffs if any(d))
    rows = tuple(dict.fromkeys(rows))
    kernel = la.right_kernel_basis(rows) if rows else la.identity_matrix(ambient)
    eqs = []
    for kv in kernel:
        n = la.primitive_part(kv)
        eqs.append(_canon_halfplane(n, la.vec_dot(n, base)))
    return tuple(sorted(eqs))
