"""Elaboration of a parsed model document into a Lagrangian model.

Index families and tensor contractions are expanded to scalar generators;
the expression tree is multiplied out in the written order so every sign
comes from canonicalization, never from the frontend.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    IndexOutOfRange,
    MixedParity,
    UnboundConstant,
    UnknownSymbol,
)
from ..legendre import LagrangianModel, ModelBuilder
from ..superalgebra import (
    C_I,
    Coefficient,
    Parity,
    ZERO,
    const_poly,
    gen_poly,
    parity_of,
)
from . import parser as syn

RESERVED = {"t0", "P0", "Z", "i", "dot", "sum", "in", "model", "even", "odd",
            "param", "tensor", "lagrangian", "steps", "params"}


@dataclass
class ElaboratedModel:
    document: syn.ModelDocument
    model: LagrangianModel
    families: dict  # name -> list of coordinate Generators (1-based families)
    sizes: dict  # name -> size or None
    params: dict  # name -> Generator
    tensors: dict  # name -> tuple of tuples of Coefficient
    odd_slots: dict  # odd coordinate Generator -> 1-based Lambda_n slot

    @property
    def n_odd(self):
        return len(self.odd_slots)

    def lookup(self, name, index=None):
        """Resolve a printed generator name (coordinates, momenta, params)."""
        if name in self.families:
            coords = self.families[name]
            if self.sizes[name] is None:
                if index is not None:
                    raise IndexOutOfRange(f"{name} is not an indexed family")
                return coords[0]
            if index is None or not 1 <= index <= len(coords):
                raise IndexOutOfRange(f"index {index} outside {name}[1..{len(coords)}]")
            return coords[index - 1]
        if name.startswith("p_"):
            coord = self.lookup(name[2:], index)
            return self.model.momentum(coord)
        if name in self.params:
            return self.params[name]
        raise UnknownSymbol(f"unknown generator {name!r}")


def _check_name(name, seen):
    if name in RESERVED:
        raise UnknownSymbol(f"{name!r} is reserved")
    if name.startswith("p_") or name.startswith("v_"):
        raise UnknownSymbol(f"{name!r} collides with derived generator names")
    if name in seen:
        raise UnknownSymbol(f"{name!r} declared twice")
    seen.add(name)


def elaborate(doc):
    """Expand the document to scalar generators and an even SuperPoly."""
    builder = ModelBuilder(doc.name)
    families = {}
    sizes = {}
    seen = set()
    for decl in doc.declarations:
        _check_name(decl.name, seen)
        parity = Parity.EVEN if decl.parity == "even" else Parity.ODD
        if decl.size is None:
            q, _, _ = builder.coordinate(decl.name, parity)
            families[decl.name] = [q]
        else:
            coords = []
            for k in range(1, decl.size + 1):
                q, _, _ = builder.coordinate(decl.name, parity, k)
                coords.append(q)
            families[decl.name] = coords
        sizes[decl.name] = decl.size
    params = {}
    for pd in doc.params:
        _check_name(pd.name, seen)
        params[pd.name] = builder.parameter(
            pd.name, Parity.EVEN if pd.parity == "even" else Parity.ODD)
    tensors = {}
    for td in doc.tensors:
        _check_name(td.name, seen)
        tensors[td.name] = tuple(
            tuple(_constant(entry, td.name) for entry in row)
            for row in td.entries)

    env = _Env(families, sizes, params, tensors, builder)
    lagrangian = env.eval(doc.lagrangian, {})
    try:
        if parity_of(lagrangian) != Parity.EVEN:
            raise MixedParity("the Lagrangian must be even")
    except MixedParity:
        raise MixedParity("the Lagrangian must be even") from None
    model = builder.finish(lagrangian)
    odd_slots = {}
    for q in model.coordinates:
        if q.parity == Parity.ODD:
            odd_slots[q] = len(odd_slots) + 1
    return ElaboratedModel(doc, model, families, sizes, params, tensors, odd_slots)


def _constant(node, tensor_name):
    value = _fold(node)
    if value is None:
        raise UnboundConstant(
            f"tensor {tensor_name} entry is not a numeric constant")
    return value


def _fold(node):
    if isinstance(node, syn.Num):
        return Coefficient(node.value)
    if isinstance(node, syn.Imag):
        return C_I
    if isinstance(node, syn.Neg):
        inner = _fold(node.item)
        return None if inner is None else -inner
    if isinstance(node, syn.Add):
        a, b = _fold(node.left), _fold(node.right)
        return None if a is None or b is None else a + b
    if isinstance(node, syn.Sub):
        a, b = _fold(node.left), _fold(node.right)
        return None if a is None or b is None else a - b
    if isinstance(node, syn.Mul):
        a, b = _fold(node.left), _fold(node.right)
        return None if a is None or b is None else a * b
    return None


class _Env:
    def __init__(self, families, sizes, params, tensors, builder):
        self.families = families
        self.sizes = sizes
        self.params = params
        self.tensors = tensors
        self.builder = builder

    def resolve_index(self, ix, bindings):
        if isinstance(ix, int):
            return ix
        if ix in bindings:
            return bindings[ix]
        raise UnknownSymbol(f"unbound index variable {ix!r}")

    def coordinate(self, name, indices, bindings):
        coords = self.families[name]
        size = self.sizes[name]
        if size is None:
            if indices:
                raise IndexOutOfRange(f"{name} is not an indexed family")
            return coords[0]
        if len(indices) != 1:
            raise IndexOutOfRange(f"{name} needs exactly one index")
        k = self.resolve_index(indices[0], bindings)
        if not 1 <= k <= size:
            raise IndexOutOfRange(f"index {k} outside {name}[1..{size}]")
        return coords[k - 1]

    def eval(self, node, bindings):
        if isinstance(node, syn.Num):
            return const_poly(Coefficient(node.value))
        if isinstance(node, syn.Imag):
            return const_poly(C_I)
        if isinstance(node, syn.Neg):
            return -self.eval(node.item, bindings)
        if isinstance(node, syn.Add):
            return self.eval(node.left, bindings) + self.eval(node.right, bindings)
        if isinstance(node, syn.Sub):
            return self.eval(node.left, bindings) - self.eval(node.right, bindings)
        if isinstance(node, syn.Mul):
            return self.eval(node.left, bindings) * self.eval(node.right, bindings)
        if isinstance(node, syn.SumExpr):
            total = ZERO
            for k in range(node.lo, node.hi + 1):
                inner = dict(bindings)
                inner[node.var] = k
                total = total + self.eval(node.body, inner)
            return total
        if isinstance(node, syn.Dot):
            coord = self.coordinate_checked(node.name, node.indices, bindings)
            return gen_poly(self.builder.velocity_of(coord))
        if isinstance(node, syn.Ref):
            if node.name in self.families:
                return gen_poly(self.coordinate(node.name, node.indices, bindings))
            if node.name in self.params:
                if node.indices:
                    raise IndexOutOfRange(f"parameter {node.name} takes no index")
                return const_poly(1) * gen_poly(self.params[node.name])
            if node.name in self.tensors:
                entries = self.tensors[node.name]
                if len(node.indices) != 2:
                    raise IndexOutOfRange(f"tensor {node.name} needs two indices")
                r = self.resolve_index(node.indices[0], bindings)
                c = self.resolve_index(node.indices[1], bindings)
                if not (1 <= r <= len(entries) and 1 <= c <= len(entries[0])):
                    raise IndexOutOfRange(
                        f"tensor index [{r},{c}] outside {node.name}")
                return const_poly(entries[r - 1][c - 1])
            if len(node.indices) == 2:
                raise UnboundConstant(f"tensor {node.name!r} is not declared")
            if node.name in bindings:
                raise UnknownSymbol(
                    f"index variable {node.name!r} used as a value")
            raise UnknownSymbol(f"unknown symbol {node.name!r}")
        raise TypeError(f"not an expression node: {node!r}")

    def coordinate_checked(self, name, indices, bindings):
        if name not in self.families:
            raise UnknownSymbol(f"dot() of unknown coordinate {name!r}")
        return self.coordinate(name, indices, bindings)
