"""Named ray configurations, the JSON input format, and its validation.

The JSON schema is versioned ("format": 1) and fail-closed: unknown keys are
rejected so golden outputs stay trustworthy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations

from . import intlinalg as la
from .classgroup import validate_rays
from .errors import ToricInputError
from .fans import Fan, fan_2d


@dataclass(frozen=True)
class ToricInput:
    """A ray configuration plus optional fan, weights, and label data."""

    name: str
    lattice_rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...] | None = None
    stacky_weights: tuple[int, ...] | None = None
    class_basis: tuple[tuple[str, tuple[int, ...]], ...] | None = None
    ray_names: tuple[str, ...] | None = None

    def fan(self) -> Fan | None:
        if self.max_cones is None:
            return None
        return Fan(self.lattice_rank, self.rays, self.max_cones)

    def to_json_dict(self) -> dict:
        out = {
            "format": 1,
            "name": self.name,
            "lattice_rank": self.lattice_rank,
            "rays": [list(r) for r in self.rays],
        }
        if self.max_cones is not None:
            out["max_cones"] = [list(c) for c in self.max_cones]
        if self.stacky_weights is not None:
            out["stacky_weights"] = list(self.stacky_weights)
        if self.class_basis is not None:
            out["class_basis"] = [
                {"name": n, "coefficients": list(c)} for n, c in self.class_basis
            ]
        if self.ray_names is not None:
            out["ray_names"] = list(self.ray_names)
        return out


_ALLOWED_KEYS = {
    "format",
    "name",
    "lattice_rank",
    "rays",
    "max_cones",
    "stacky_weights",
    "class_basis",
    "ray_names",
}


def parse_input(data: dict) -> ToricInput:
    if not isinstance(data, dict):
        raise ToricInputError("input must be a JSON object")
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise ToricInputError(f"unknown input keys: {sorted(unknown)}")
    if data.get("format") != 1:
        raise ToricInputError('input must declare "format": 1')
    if "rays" not in data or "lattice_rank" not in data:
        raise ToricInputError('input needs "lattice_rank" and "rays"')
    rank = data["lattice_rank"]
    if not isinstance(rank, int) or rank < 1:
        raise ToricInputError("lattice_rank must be a positive integer")
    rays = []
    for ray in data["rays"]:
        if not isinstance(ray, list) or len(ray) != rank or not all(
            isinstance(x, int) for x in ray
        ):
            raise ToricInputError(f"bad ray {ray!r}")
        rays.append(tuple(ray))
    rays = validate_rays(rays)
    max_cones = None
    if "max_cones" in data:
        max_cones = []
        for cone in data["max_cones"]:
            if not isinstance(cone, list) or not all(
                isinstance(i, int) and 0 <= i < len(rays) for i in cone
            ):
                raise ToricInputError(f"bad cone {cone!r}")
            max_cones.append(tuple(sorted(cone)))
        max_cones = tuple(max_cones)
    weights = None
    if "stacky_weights" in data:
        weights = data["stacky_weights"]
        if (
            not isinstance(weights, list)
            or len(weights) != len(rays)
            or not all(isinstance(w, int) and w >= 1 for w in weights)
        ):
            raise ToricInputError("stacky_weights must list a positive integer per ray")
        weights = tuple(weights)
    basis = None
    if "class_basis" in data:
        basis = []
        for entry in data["class_basis"]:
            if (
                not isinstance(entry, dict)
                or set(entry) != {"name", "coefficients"}
                or not isinstance(entry["name"], str)
                or not isinstance(entry["coefficients"], list)
                or len(entry["coefficients"]) != len(rays)
                or not all(isinstance(x, int) for x in entry["coefficients"])
            ):
                raise ToricInputError(f"bad class_basis entry {entry!r}")
            basis.append((entry["name"], tuple(entry["coefficients"])))
        basis = tuple(basis)
    ray_names = None
    if "ray_names" in data:
        ray_names = data["ray_names"]
        if not isinstance(ray_names, list) or len(ray_names) != len(rays) or not all(
            isinstance(s, str) for s in ray_names
        ):
            raise ToricInputError("ray_names must list one string per ray")
        ray_names = tuple(ray_names)
    return ToricInput(
        name=data.get("name", "input"),
        lattice_rank=rank,
        rays=rays,
        max_cones=max_cones,
        stacky_weights=weights,
        class_basis=basis,
        ray_names=ray_names,
    )


def load_input(text: str) -> ToricInput:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ToricInputError(f"invalid JSON: {exc}") from exc
    return parse_input(data)


# ---------------------------------------------------------------------------
# Built-in configurations
# ---------------------------------------------------------------------------


def _proper_subsets(n_plus_1):
    universe = tuple(range(1, n_plus_1 + 1))
    out = []
    for size in range(1, n_plus_1):
        out.extend(combinations(universe, size))
    return out


def _e_subset_image(subset, n):
    """Image of e_S in Z^{n+1}/(1,...,1) ~ Z^n via e_{n+1} = -e_1-...-e_n."""
    v = [0] * n
    for i in subset:
        if i <= n:
            v[i - 1] += 1
        else:
            for j in range(n):
                v[j] -= 1
    return tuple(v)


def permutohedral_input(n_plus_1: int) -> ToricInput:
    """X_{n+1}: rays are the images of e_S over proper nonempty subsets S,
    maximal cones the flags of subsets (the braid fan chambers)."""
    n = n_plus_1 - 1
    subsets = _proper_subsets(n_plus_1)
    rays = tuple(_e_subset_image(s, n) for s in subsets)
    index = {s: i for i, s in enumerate(subsets)}
    cones = set()
    for perm in permutations(range(1, n_plus_1 + 1)):
        chain = []
        acc = []
        for x in perm[:-1]:
            acc = sorted(acc + [x])
            chain.append(index[tuple(acc)])
        cones.add(tuple(sorted(chain)))
    names = tuple("e{" + ",".join(str(i) for i in s) + "}" for s in subsets)
    return ToricInput(
        name=f"perm{n_plus_1}",
        lattice_rank=n,
        rays=rays,
        max_cones=tuple(sorted(cones)),
        ray_names=names,
    )


def _x3_class_basis():
    # Ray order for perm3: e{1}=(1,0), e{2}=(0,1), e{3}=(-1,-1),
    # e{1,2}=(1,1), e{1,3}=(0,-1), e{2,3}=(-1,0).
    # Coordinates z_1 <-> e1, z_2 <-> e2, z_0 <-> -e1-e2; the exceptional
    # divisor over z_i = z_j = 0 sits on the sum of the two rays, so
    # E01 = ray (0,-1), E02 = ray (-1,0), E12 = ray (1,1), and
    # H = [D_{e1}] + E01 + E12.
    return (
        ("H", (1, 0, 0, 1, 1, 0)),
        ("E01", (0, 0, 0, 0, 1, 0)),
        ("E02", (0, 0, 0, 0, 0, 1)),
        ("E12", (0, 0, 0, 1, 0, 0)),
    )


def builtin_input(name: str) -> ToricInput:
    key = name.strip()
    if key == "P1":
        return ToricInput("P1", 1, ((1,), (-1,)), ((0,), (1,)))
    if key == "P2":
        rays = ((1, 0), (0, 1), (-1, -1))
        return ToricInput("P2", 2, rays, fan_2d(rays).max_cones)
    if key == "P1xP1":
        rays = ((1, 0), (-1, 0), (0, 1), (0, -1))
        return ToricInput("P1xP1", 2, rays, fan_2d(rays).max_cones)
    if key == "BlP2":
        rays = ((1, 0), (0, 1), (-1, -1), (1, 1))
        return ToricInput("BlP2", 2, rays, fan_2d(rays).max_cones)
    if key == "perm3":
        base = permutohedral_input(3)
        return ToricInput(
            base.name,
            base.lattice_rank,
            base.rays,
            base.max_cones,
            class_basis=_x3_class_basis(),
            ray_names=base.ray_names,
        )
    if key == "perm4":
        return permutohedral_input(4)
    raise ToricInputError(
        f"unknown built-in input {name!r}; available: "
        + ", ".join(BUILTIN_NAMES)
    )


BUILTIN_NAMES = ("P1", "P2", "P1xP1", "BlP2", "perm3", "perm4")
