"""Finite abelian groups built from cyclic factors.

Two kinds of groups appear throughout the package:

* the index group of a multipartite Weyl system, ``(+)_a Z_{d_a}`` for the
  ``m`` labels followed by the same factors for the ``n`` labels, and
* its primary components ``(+)_i Z_{p^{M_i}}`` with ``M`` non-increasing.

Both are described by a tuple of factor orders.  Elements are tuples of
residues; bulk work uses integer numpy arrays of shape ``(..., rank)`` and a
mixed-radix integer *code* (first factor most significant), so sorting codes
sorts elements lexicographically.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

MAX_GROUP_ORDER = 2**16


class CapExceeded(RuntimeError):
    """An exhaustive operation would exceed a configured size cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


def max_group_order() -> int:
    """Cap on |G| for enumerating paths; ``WEYLKIT_MAX_GROUP`` overrides it."""
    env = os.environ.get("WEYLKIT_MAX_GROUP")
    return int(env) if env else MAX_GROUP_ORDER


def check_group_cap(order: int, what: str = "group order") -> None:
    cap = max_group_order()
    if order > cap:
        raise CapExceeded(what, order, cap)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as ``{p: exponent}``."""
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class CyclicProduct:
    """Shared machinery for a direct sum of cyclic groups ``Z_{o_1} + ... + Z_{o_r}``."""

    orders: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def size(self) -> int:
        return math.prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    @cached_property
    def _weights(self) -> np.ndarray:
        w = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            w[i] = w[i + 1] * self.orders[i + 1]
        return w

    @cached_property
    def _orders_arr(self) -> np.ndarray:
        return np.asarray(self.orders, dtype=np.int64)

    def encode(self, elems) -> np.ndarray:
        """Residue arrays ``(..., rank)`` to integer codes."""
        arr = np.asarray(elems, dtype=np.int64) % self._orders_arr
        return arr @ self._weights

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self._weights) % self._orders_arr

    def all_elements(self) -> np.ndarray:
        """Every element in code order, shape ``(size, rank)``."""
        check_group_cap(self.size)
        return self.decode(np.arange(self.size))

    def element(self, residues: Sequence[int]) -> GroupElement:
        return GroupElement(tuple(int(x) for x in residues), self.orders)

    def zero(self) -> GroupElement:
        return GroupElement((0,) * self.rank, self.orders)

    def add_codes(self, a, b) -> np.ndarray:
        return self.encode(self.decode(a) + self.decode(b))

    def neg_codes(self, a) -> np.ndarray:
        return self.encode(-self.decode(a))


@dataclass(frozen=True)
class CyclicGroup(CyclicProduct):
    """A bare direct sum of cyclic groups given by its factor orders."""

    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        if not self.orders or any(o < 1 for o in self.orders):
            raise ValueError(f"invalid factor orders {self.orders}")


@dataclass(frozen=True)
class GroupElement:
    """An element of a cyclic product; arithmetic is component-wise modular."""

    residues: tuple[int, ...]
    orders: tuple[int, ...]

    def __post_init__(self):
        if len(self.residues) != len(self.orders):
            raise ValueError("residue count does not match the number of factors")
        object.__setattr__(
            self, "residues", tuple(int(x) % o for x, o in zip(self.residues, self.orders))
        )

    def _check(self, other: GroupElement) -> None:
        if not isinstance(other, GroupElement) or other.orders != self.orders:
            raise ValueError("operands belong to different groups")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(tuple(a + b for a, b in zip(self.residues, other.residues)), self.orders)

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __neg__(self) -> GroupElement:
        return GroupElement(tuple(-a for a in self.residues), self.orders)

    def __mul__(self, k: int) -> GroupElement:
        return GroupElement(tuple(int(k) * a for a in self.residues), self.orders)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.residues)

    def order(self) -> int:
        """Least t >= 1 with t*g = 0."""
        return math.lcm(*(o // math.gcd(o, a) for a, o in zip(self.residues, self.orders)))


@dataclass(frozen=True)
class PrimaryComponent(CyclicProduct):
    """The p-primary part ``(+)_i Z_{p^{M_i}}`` with exponents non-increasing.

    ``slots[i]`` is the index of the index-group coordinate that factor ``i``
    came from (``None`` for a component built directly from a partition).
    """

    p: int
    exponents: tuple[int, ...]
    slots: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(factorize(self.p)) != 1 or factorize(self.p).get(self.p) != 1:
            raise ValueError(f"{self.p} is not prime")
        if not exps or any(e < 1 for e in exps):
            raise ValueError("exponents must be positive")
        if any(a < b for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be non-increasing")

    @property
    def orders(self) -> tuple[int, ...]:  # type: ignore[override]
        return tuple(self.p**e for e in self.exponents)

    @property
    def largest_exponent(self) -> int:
        return self.exponents[0]

    def blocks(self) -> list[tuple[int, int, int]]:
        """Runs of equal exponents as ``(value, start, stop)``, largest first."""
        out = []
        start = 0
        for i in range(1, len(self.exponents) + 1):
            if i == len(self.exponents) or self.exponents[i] != self.exponents[start]:
                out.append((self.exponents[start], start, i))
                start = i
        return out


@dataclass(frozen=True)
class GroupSpec(CyclicProduct):
    """Particle dimensions of a multipartite system and its index group.

    Index-group elements are laid out as ``(m_1..m_N, n_1..n_N)``, which is
    also the row-major order of every tau and lambda table.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise ValueError("dims must be non-empty")
        if any(d < 2 for d in dims):
            raise ValueError(f"every dimension must be >= 2, got {dims}")

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x))

    @property
    def n_particles(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def pair_dims(self) -> tuple[int, ...]:
        return tuple(d for d in self.dims for _ in range(2))

    @property
    def orders(self) -> tuple[int, ...]:  # type: ignore[override]
        return self.dims + self.dims

    @property
    def lcm(self) -> int:
        return math.lcm(*self.dims)

    def split(self, elems) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(elems)
        n = self.n_particles
        return arr[..., :n], arr[..., n:]

    def join(self, m, n) -> np.ndarray:
        return np.concatenate([np.asarray(m), np.asarray(n)], axis=-1)

    def index(self, m: Sequence[int], n: Sequence[int]) -> int:
        """Position of ``(m, n)`` in a tau table."""
        if len(m) != self.n_particles or len(n) != self.n_particles:
            raise ValueError("label length does not match the number of particles")
        return int(self.encode(list(m) + list(n)))

    def to_json(self) -> dict:
        return {"dims": list(self.dims)}

    @classmethod
    def from_json(cls, obj: dict) -> GroupSpec:
        return cls(tuple(obj["dims"]))

    def element_to_json(self, g: GroupElement | Sequence[int]) -> dict:
        res = g.residues if isinstance(g, GroupElement) else tuple(int(x) for x in g)
        n = self.n_particles
        return {"m": list(res[:n]), "n": list(res[n:])}

    def element_from_json(self, obj: dict) -> GroupElement:
        return self.element(list(obj["m"]) + list(obj["n"]))

    @cached_property
    def decomposition(self) -> Decomposition:
        return Decomposition(self)


def decompose(spec: GroupSpec) -> list[PrimaryComponent]:
    """Primary components of the index group, one per prime, smallest prime first."""
    return list(spec.decomposition.components)


class Decomposition:
    """CRT correspondence between the index group and its primary components."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        per_prime: dict[int, list[tuple[int, int]]] = {}
        for slot, d in enumerate(spec.orders):
            for p, k in factorize(d).items():
                per_prime.setdefault(p, []).append((k, slot))
        comps = []
        for p in sorted(per_prime):
            # stable sort keeps particle order within equal exponents
            entries = sorted(per_prime[p], key=lambda t: -t[0])
            comps.append(
                PrimaryComponent(p, tuple(k for k, _ in entries), tuple(s for _, s in entries))
            )
        self.components: tuple[PrimaryComponent, ...] = tuple(comps)
        orders = np.asarray(spec.orders, dtype=np.int64)
        # CRT idempotents: e_p = 1 mod p^k, 0 mod d/p^k for every slot
        self._idem = []
        for comp in comps:
            idem = np.zeros(spec.rank, dtype=object)
            for k_order, slot in zip(comp.orders, comp.slots):
                d = int(orders[slot])
                rest = d // k_order
                idem[slot] = (rest * pow(rest, -1, k_order)) % d
            self._idem.append(idem)

    def to_components(self, elems) -> list[np.ndarray]:
        arr = np.asarray(elems, dtype=np.int64)
        return [
            arr[..., list(comp.slots)] % np.asarray(comp.orders, dtype=np.int64)
            for comp in self.components
        ]

    def from_components(self, parts: Sequence[np.ndarray]) -> np.ndarray:
        if len(parts) != len(self.components):
            raise ValueError("need one coordinate array per primary component")
        lead = np.asarray(parts[0]).shape[:-1]
        out = np.zeros(lead + (self.spec.rank,), dtype=np.int64)
        orders = np.asarray(self.spec.orders, dtype=np.int64)
        for comp, idem, part in zip(self.components, self._idem, parts):
            part = np.asarray(part, dtype=np.int64)
            for i, slot in enumerate(comp.slots):
                out[..., slot] += part[..., i] * int(idem[slot])
        return out % orders

    def embed(self, comp_index: int, elems) -> np.ndarray:
        """Image of component elements in G with every other prime set to zero."""
        elems = np.asarray(elems, dtype=np.int64)
        parts = [
            np.zeros(elems.shape[:-1] + (c.rank,), dtype=np.int64) for c in self.components
        ]
        parts[comp_index] = elems
        return self.from_components(parts)


# -- partitions ---------------------------------------------------------------


def conjugate_partition(parts: Iterable[int]) -> tuple[int, ...]:
    """Transpose of the Ferrers diagram; zero parts are ignored."""
    parts = [int(x) for x in parts if x]
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError("partition parts must be non-increasing")
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x > j) for j in range(parts[0]))


def is_valid_subgroup_type(group_type: Sequence[int], sub_type: Sequence[int]) -> bool:
    """Whether ``sub_type`` can be the type of a subgroup of a group of ``group_type``."""
    m = list(group_type)
    sub = list(sub_type)
    if len(sub) > len(m):
        if any(sub[len(m):]):
            return False
        sub = sub[: len(m)]
    sub += [0] * (len(m) - len(sub))
    if any(x < 0 for x in sub):
        return False
    if any(a > b for a, b in zip(sub, m)):
        return False
    return all(a >= b for a, b in zip(sub, sub[1:]))


def subgroup_types(group_type: Sequence[int]) -> list[tuple[int, ...]]:
    """All valid subgroup types of a group type, padded to its length."""
    ranges = [range(m + 1) for m in group_type]
    return [t for t in product(*ranges) if all(a >= b for a, b in zip(t, t[1:]))]
