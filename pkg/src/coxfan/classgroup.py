"""Class-group presentations and divisor classes.

The class group of a ray configuration is the cokernel of the pairing map
M -> Z^rays, m |-> (<m, u_rho>)_rho.  We present it canonically: the free
part by the Hermite basis of the left kernel of the pairing matrix, the
torsion part by Smith normal form rows reduced mod their orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intlinalg as la
from .errors import PreconditionError, ToricInputError


@dataclass(frozen=True)
class DivisorClass:
    """An element of Cl(X): free coordinates plus reduced torsion residues."""

    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(int(x) for x in self.free))
        object.__setattr__(self, "torsion", tuple(int(x) for x in self.torsion))

    def key(self):
        return (self.free, self.torsion)


def validate_rays(rays) -> tuple[tuple[int, ...], ...]:
    """Check rays are nonzero, primitive, pairwise distinct integer vectors."""
    out = []
    dim = None
    for ray in rays:
        v = tuple(int(x) for x in ray)
        if dim is None:
            dim = len(v)
        elif len(v) != dim:
            raise ToricInputError(f"ray {ray} has wrong dimension (expected {dim})")
        if not any(v):
            raise ToricInputError("zero vector is not a valid ray")
        if not la.is_primitive(v):
            raise ToricInputError(f"ray {ray} is not primitive")
        if v in out:
            raise ToricInputError(f"duplicate ray {ray}")
        out.append(v)
    if not out:
        raise ToricInputError("empty ray configuration")
    return tuple(out)


@dataclass(frozen=True)
class ClassGroup:
    """Presentation of Cl(X) = coker(M -> Z^rays) for a fixed ray order.

    ``free_rows`` and ``torsion_rows`` stack to the degree map
    Z^rays -> Z^rank (+) Z/d_1 (+) ... ; both annihilate the pairing image
    of M exactly.
    """

    rays: tuple[tuple[int, ...], ...]
    rank: int
    torsion_orders: tuple[int, ...]
    free_rows: tuple[tuple[int, ...], ...]
    torsion_rows: tuple[tuple[int, ...], ...]

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def lattice_rank(self) -> int:
        return len(self.rays[0])

    @property
    def degree_map(self) -> la.IntMatrix:
        return self.free_rows + self.torsion_rows

    def degree_of_vector(self, a) -> DivisorClass:
        """Class of an integer coefficient vector on the rays."""
        if len(a) != self.n_rays:
            raise ToricInputError("coefficient vector length does not match ray count")
        free = la.mat_vec(self.free_rows, a)
        tors = tuple(
            la.vec_dot(row, a) % order
            for row, order in zip(self.torsion_rows, self.torsion_orders)
        )
        return DivisorClass(free, tors)

    def degree_of_ray(self, i: int) -> DivisorClass:
        e = tuple(1 if j == i else 0 for j in range(self.n_rays))
        return self.degree_of_vector(e)

    def zero_class(self) -> DivisorClass:
        return DivisorClass((0,) * self.rank, (0,) * len(self.torsion_orders))

    def add(self, c: DivisorClass, d: DivisorClass) -> DivisorClass:
        return DivisorClass(
            la.vec_add(c.free, d.free),
            tuple((x + y) % o for x, y, o in zip(c.torsion, d.torsion, self.torsion_orders)),
        )

    def negate(self, c: DivisorClass) -> DivisorClass:
        return DivisorClass(
            tuple(-x for x in c.free),
            tuple((-x) % o for x, o in zip(c.torsion, self.torsion_orders)),
        )

    def subtract(self, c: DivisorClass, d: DivisorClass) -> DivisorClass:
        return self.add(c, self.negate(d))

    def check_class(self, c: DivisorClass):
        if len(c.free) != self.rank or len(c.torsion) != len(self.torsion_orders):
            raise ToricInputError("divisor class has the wrong shape for this class group")
        for x, o in zip(c.torsion, self.torsion_orders):
            if not 0 <= x < o:
                raise ToricInputError(f"torsion residue {x} outside [0, {o})")

    def lift(self, c: DivisorClass) -> tuple[int, ...]:
        """A deterministic integer vector on the rays mapping to c."""
        self.check_class(c)
        sol = _lift_solver(self).solve(c.free + c.torsion)
        if sol is None:
            raise ToricInputError("class admits no integral lift")
        return sol[: self.n_rays]

    def rational_lift(self, point) -> tuple[Fraction, ...]:
        """A rational coefficient vector whose free image is the given point."""
        sol = la.solve_rational(self.free_rows, point)
        if sol is None:
            raise ToricInputError("point is not in the image of the free degree map")
        return sol

    def free_image(self, a) -> tuple:
        return la.mat_vec(self.free_rows, a)


@lru_cache(maxsize=None)
def _lift_solver(cg: ClassGroup) -> la.IntegerSolver:
    # Unknowns (a, k): free_rows a = c_free and torsion_rows a - diag(d) k = c_tors.
    n = cg.n_rays
    t = len(cg.torsion_orders)
    rows = [row + (0,) * t for row in cg.free_rows]
    for i, (row, order) in enumerate(zip(cg.torsion_rows, cg.torsion_orders)):
        extra = tuple(-order if j == i else 0 for j in range(t))
        rows.append(row + extra)
    if not rows:
        rows = [(0,) * (n + t)]
    return la.IntegerSolver(tuple(rows))


def pairing_matrix(rays) -> la.IntMatrix:
    """Rows u_rho: sends m in M to (<m, u_rho>)_rho as a column action."""
    return tuple(tuple(r) for r in rays)


def class_group(rays) -> ClassGroup:
    """Present Cl(X) for a primitive ray configuration."""
    rays = validate_rays(rays)
    pairing = pairing_matrix(rays)
    free_rows = la.hnf_rows(la.left_kernel_basis(pairing))
    u, d, _v = la.smith_normal_form(pairing)
    torsion_rows = []
    torsion_orders = []
    for i in range(min(len(rays), len(rays[0]))):
        if d[i][i] > 1:
            torsion_orders.append(d[i][i])
            torsion_rows.append(tuple(x % d[i][i] for x in u[i]))
    return ClassGroup(
        rays=rays,
        rank=len(rays) - la.mat_rank(pairing),
        torsion_orders=tuple(torsion_orders),
        free_rows=tuple(free_rows),
        torsion_rows=tuple(torsion_rows),
    )


def _positively_spans(rays) -> bool:
    # cone(rays) = R^n iff no nonzero y has <y, u_rho> <= 0 for all rho
    # iff the dual cone {y : <y, u_rho> >= 0} is {0}.
    from .geometry import Cone

    dual = Cone.from_halfspaces(len(rays[0]), rays)
    return dual.dim == 0


@lru_cache(maxsize=None)
def _effective_memo(cg: ClassGroup, key) -> bool:
    from .geometry import Polytope

    c = DivisorClass(*key)
    a0 = cg.lift(c)
    n = cg.lattice_rank
    # a0 + <m, u_rho> >= 0 for some m in M, i.e. the polytope
    # {x : <x, -u_rho> <= a0_rho} contains a lattice point.
    ineqs = tuple((tuple(-u for u in ray), a0[i]) for i, ray in enumerate(cg.rays))
    poly = Polytope.from_halfspaces(n, ineqs)
    if poly is None:
        return False
    return next(poly.lattice_points(), None) is not None


def is_effective(c: DivisorClass, cg: ClassGroup) -> bool:
    """True iff c is a nonnegative integer combination of the ray classes.

    Decided exactly: c is effective iff some integer lift a satisfies a >= 0,
    iff the rational polytope {x in M_R : <x, u_rho> >= -a0_rho} contains a
    lattice point for any one lift a0.  Bounded precisely when the rays
    positively span N_R; otherwise we refuse rather than answer wrongly.
    """
    cg.check_class(c)
    if not _positively_spans(cg.rays):
        raise PreconditionError(
            "effectivity search requires rays that positively span N_R"
        )
    return _effective_memo(cg, c.key())
