"""Legendre analysis of an even polynomial Lagrangian.

Derives momenta, the velocity Hessian and its body rank, solves the
expressible velocities exactly, extracts the primary-constraint functions
for the unexpressed directions and assembles the canonical Hamiltonian.
Supported Lagrangians are polynomial and at most quadratic in velocities,
which keeps velocity solving inside exact graded linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .brackets import PhaseBasis
from .errors import ResidualVelocity, UnsupportedLagrangian
from .smatrix import body_matrix, body_rank, solve_left
from .superalgebra import (
    Generator,
    Kind,
    Parity,
    SuperPoly,
    ZERO,
    contains,
    derive_right,
    gen_poly,
    parity_of,
    substitute,
)


@dataclass
class LagrangianModel:
    """Declared generators plus an even Lagrangian over them."""

    name: str
    coordinates: tuple[Generator, ...]
    velocities: dict[Generator, Generator]
    momenta: dict[Generator, Generator]
    parameters: tuple[Generator, ...]
    lagrangian: SuperPoly

    def __post_init__(self):
        if parity_of(self.lagrangian) != Parity.EVEN:
            raise UnsupportedLagrangian("Lagrangian must be even")
        for g in self.lagrangian.generators():
            if g.kind == Kind.VELOCITY and g not in self.velocities.values():
                raise UnsupportedLagrangian(f"velocity {g} has no declared coordinate")

    def velocity(self, q):
        return self.velocities[q]

    def momentum(self, q):
        return self.momenta[q]

    def coordinate_of(self, p):
        for q, mom in self.momenta.items():
            if mom == p:
                return q
        raise KeyError(p)

    def phase_basis(self):
        return PhaseBasis(tuple((q, self.momenta[q]) for q in self.coordinates))

    @property
    def odd_coordinates(self):
        return tuple(q for q in self.coordinates if q.parity)


class ModelBuilder:
    """Declares generators with stable ordering and assembles a model."""

    def __init__(self, name):
        self.name = name
        self._coords = []
        self._velocities = {}
        self._momenta = {}
        self._params = []
        self._seq = 0

    def coordinate(self, name, parity, index=None):
        """Declare a coordinate; returns (coordinate, velocity, momentum)."""
        n = self._seq
        self._seq += 1
        q = Generator(name, parity, Kind.COORDINATE, index, n)
        v = Generator(f"dot({name})", parity, Kind.VELOCITY, index, n)
        p = Generator(f"p_{name}", parity, Kind.MOMENTUM, index, n)
        self._coords.append(q)
        self._velocities[q] = v
        self._momenta[q] = p
        return q, v, p

    def parameter(self, name, parity=Parity.EVEN):
        g = Generator(name, parity, Kind.PARAMETER, None, self._seq)
        self._seq += 1
        self._params.append(g)
        return g

    def velocity_of(self, q):
        return self._velocities[q]

    def finish(self, lagrangian):
        return LagrangianModel(
            self.name,
            tuple(self._coords),
            dict(self._velocities),
            dict(self._momenta),
            tuple(self._params),
            lagrangian,
        )


@dataclass
class RankSplit:
    rank: int
    expressible: tuple[int, ...]
    unexpressed: tuple[int, ...]

    @property
    def reorder(self):
        """Coordinate permutation placing the invertible block bottom-right."""
        return self.unexpressed + self.expressible


@dataclass
class LegendreResult:
    model: LagrangianModel
    momenta_defs: dict[Generator, SuperPoly]
    hessian: list[list[SuperPoly]]
    split: RankSplit
    solved_velocities: dict[Generator, SuperPoly]
    primary_h: dict[Generator, SuperPoly]
    h0: SuperPoly

    @property
    def rank(self):
        return self.split.rank

    @property
    def expressible_coords(self):
        return tuple(self.model.coordinates[i] for i in self.split.expressible)

    @property
    def unexpressed_coords(self):
        return tuple(self.model.coordinates[i] for i in self.split.unexpressed)

    def primary_constraints(self):
        """Constraint expressions p_alpha + H_alpha, one per unexpressed coordinate."""
        out = []
        for q in self.unexpressed_coords:
            out.append((q, gen_poly(self.model.momentum(q)) + self.primary_h[q]))
        return out


def momenta(model):
    """p_i as the right derivative of the Lagrangian by each velocity."""
    return {
        q: derive_right(model.lagrangian, model.velocity(q))
        for q in model.coordinates
    }


def hessian(model, momenta_defs=None):
    """H_ij as the second right velocity derivatives of the Lagrangian."""
    defs = momenta_defs or momenta(model)
    return [
        [derive_right(defs[qi], model.velocity(qj)) for qj in model.coordinates]
        for qi in model.coordinates
    ]


def rank_and_split(hess):
    """Body rank and the first coordinate subset carrying an invertible block.

    Subsets are scanned in lexicographic order, so the split is deterministic.
    Raises NonNumericBody when an entry has a non-constant even part.
    """
    bodies = body_matrix(hess)
    n = len(bodies)
    rank = body_rank(bodies)
    if rank == 0:
        return RankSplit(0, (), tuple(range(n)))
    for subset in combinations(range(n), rank):
        block = [[bodies[i][j] for j in subset] for i in subset]
        if body_rank(block) == rank:
            expressible = subset
            break
    unexpressed = tuple(i for i in range(n) if i not in expressible)
    return RankSplit(rank, expressible, unexpressed)


def _check_affine(model, hess):
    for row in hess:
        for entry in row:
            for v in model.velocities.values():
                if contains(entry, v):
                    raise UnsupportedLagrangian(
                        "Lagrangian is more than quadratic in velocities")


def solve_velocities(model, momenta_defs, split):
    """Invert the expressible momentum-velocity block exactly.

    Returns the association velocity -> f(q, p); substituting it back into
    the momenta definitions reproduces them identically.
    """
    hess = hessian(model, momenta_defs)
    _check_affine(model, hess)
    coords = model.coordinates
    block_idx = split.expressible
    if not block_idx:
        return {}
    m = [[hess[i][j] for j in block_idx] for i in block_idx]
    zero_vels = {model.velocity(coords[j]): ZERO for j in block_idx}
    rhs = []
    for i in block_idx:
        q = coords[i]
        rest = substitute(momenta_defs[q], zero_vels)
        rhs.append(gen_poly(model.momentum(q)) - rest)
    solution = solve_left(m, rhs)
    solved = {}
    for j, value in zip(block_idx, solution):
        solved[model.velocity(coords[j])] = value
    for i in block_idx:
        q = coords[i]
        if substitute(momenta_defs[q], solved) != gen_poly(model.momentum(q)):
            raise UnsupportedLagrangian(
                f"velocity inversion failed to reproduce p_{q}")
    return solved


def primary_constraints(model, momenta_defs, split, solved_velocities):
    """H_alpha for each unexpressed direction, with p_alpha = -H_alpha."""
    out = []
    for i in split.unexpressed:
        q = model.coordinates[i]
        expr = substitute(momenta_defs[q], solved_velocities)
        for v in model.velocities.values():
            if contains(expr, v):
                raise UnsupportedLagrangian(
                    f"constraint for {q} retains a velocity: {expr}")
        h_alpha = -expr
        parity_of(gen_poly(model.momentum(q)) + h_alpha)
        out.append((q, h_alpha))
    return out


def canonical_hamiltonian(model, momenta_defs, split, solved_velocities, primary_h):
    """H0 = p_a f^a + p_alpha|_(p=-H) qdot^alpha - L|_(qdot_a=f^a).

    Momenta are kept left of velocities; every unexpressed velocity must
    cancel exactly or ResidualVelocity is raised.
    """
    h0 = ZERO
    for i in split.expressible:
        q = model.coordinates[i]
        h0 = h0 + gen_poly(model.momentum(q)) * solved_velocities[model.velocity(q)]
    for i in split.unexpressed:
        q = model.coordinates[i]
        h0 = h0 + (-primary_h[q]) * gen_poly(model.velocity(q))
    h0 = h0 - substitute(model.lagrangian, solved_velocities)
    for v in model.velocities.values():
        if contains(h0, v):
            raise ResidualVelocity(f"H0 still contains {v}: {h0}")
    return h0


def analyze(model):
    """Run the full Legendre analysis for a model."""
    defs = momenta(model)
    hess = hessian(model, defs)
    _check_affine(model, hess)
    split = rank_and_split(hess)
    solved = solve_velocities(model, defs, split)
    primary = dict(primary_constraints(model, defs, split, solved))
    h0 = canonical_hamiltonian(model, defs, split, solved, primary)
    return LegendreResult(model, defs, hess, split, solved, primary, h0)
