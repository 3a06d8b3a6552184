"""Subgroups, automorphisms and homomorphisms of finite abelian p-groups.

Subgroups of a primary component are produced by taking one representative
per automorphism class (subgroups spanned by ``p^{s_i} e_i``) and sweeping
its orbit under the automorphism group.  Closed-form counts for both the
automorphism group and the subgroups of a given type are provided as
independent checks on the enumeration.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement, product
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .groups import (
    CapExceeded,
    CyclicProduct,
    GroupSpec,
    PrimaryComponent,
    check_group_cap,
    conjugate_partition,
    factorize,
    is_valid_subgroup_type,
    subgroup_types,
)

MAX_AUTOMORPHISMS = 10**7


# -- subgroups ----------------------------------------------------------------


def span(group: CyclicProduct, generators) -> tuple[np.ndarray, list[int]]:
    """Sorted codes of the subgroup generated by ``generators``.

    Also returns the relative order of each generator, i.e. the least t with
    ``t*g_i`` inside the span of the earlier generators.  Every element is
    then uniquely ``sum c_i g_i`` with ``0 <= c_i < rel_i``.
    """
    check_group_cap(group.size)
    current = np.zeros(1, dtype=np.int64)
    member = np.zeros(group.size, dtype=bool)
    member[0] = True
    rel = []
    for g in np.asarray(generators, dtype=np.int64).reshape(-1, group.rank):
        t = 1
        while not member[int(group.encode(t * g))]:
            t += 1
        rel.append(t)
        if t == 1:
            continue
        base = group.decode(current)
        shifted = [current]
        for c in range(1, t):
            shifted.append(group.encode(base + c * g))
        current = np.concatenate(shifted)
        member[current] = True
    return np.sort(current), rel


class Subgroup:
    """A subgroup of a cyclic product, fingerprinted by its sorted element codes.

    ``basis`` generates the subgroup with relative orders ``basis_orders``;
    for subgroups coming out of the orbit enumeration the basis is
    independent (a direct-sum decomposition).
    """

    def __init__(self, group: CyclicProduct, codes, basis=(), basis_orders=()):
        self.group = group
        self.codes = tuple(int(c) for c in codes)
        self.basis = tuple(tuple(int(x) for x in b) for b in basis)
        self.basis_orders = tuple(int(o) for o in basis_orders)

    @classmethod
    def from_generators(cls, group: CyclicProduct, generators) -> Subgroup:
        gens = [g for g in np.asarray(generators, dtype=np.int64).reshape(-1, group.rank) if g.any()]
        codes, rel = span(group, gens)
        keep = [(g, r) for g, r in zip(gens, rel) if r > 1]
        return cls(group, codes, [g for g, _ in keep], [r for _, r in keep])

    @classmethod
    def from_elements(cls, group: CyclicProduct, codes) -> Subgroup:
        """Subgroup from an element set; raises ``ValueError`` if the set is not closed."""
        codes = np.unique(np.asarray(codes, dtype=np.int64))
        if codes.size == 0 or codes[0] != 0:
            raise ValueError("element set does not contain the identity")
        member = np.zeros(group.size, dtype=bool)
        member[codes] = True
        spanned = np.zeros(group.size, dtype=bool)
        spanned[0] = True
        basis = []
        for c in codes:
            if not spanned[c]:
                basis.append(group.decode(c))
                span_codes, _ = span(group, basis)
                spanned[:] = False
                spanned[span_codes] = True
        result = cls.from_generators(group, basis) if basis else cls.trivial(group)
        if len(result.codes) != len(codes):
            raise ValueError("element set is not closed under addition")
        return result

    @classmethod
    def trivial(cls, group: CyclicProduct) -> Subgroup:
        return cls(group, [0])

    @classmethod
    def whole(cls, group: CyclicProduct) -> Subgroup:
        eye = np.eye(group.rank, dtype=np.int64)
        return cls(group, range(group.size), eye, group.orders)

    @property
    def order(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.group.orders == other.group.orders
            and self.codes == other.codes
        )

    def __hash__(self) -> int:
        return hash((self.group.orders, self.codes))

    def __repr__(self) -> str:
        return f"Subgroup(orders={self.group.orders}, order={self.order})"

    def __contains__(self, element) -> bool:
        code = int(self.group.encode(getattr(element, "residues", element)))
        return code in self.code_set

    @cached_property
    def code_set(self) -> frozenset[int]:
        return frozenset(self.codes)

    def elements(self) -> np.ndarray:
        return self.group.decode(np.asarray(self.codes, dtype=np.int64))

    def is_independent(self) -> bool:
        """True when the basis orders are the true element orders."""
        return all(
            self.group.element(b).order() == o for b, o in zip(self.basis, self.basis_orders)
        )

    def is_closed(self) -> bool:
        """Exhaustive closure check under addition and negation."""
        if 0 not in self.code_set:
            return False
        elems = self.elements()
        member = np.zeros(self.group.size, dtype=bool)
        member[list(self.codes)] = True
        if not member[self.group.encode(-elems)].all():
            return False
        for i in range(len(elems)):
            if not member[self.group.encode(elems[i] + elems)].all():
                return False
        return True

    def intersection(self, other: Subgroup) -> Subgroup:
        return Subgroup.from_elements(self.group, sorted(self.code_set & other.code_set))

    def to_json(self) -> dict:
        group = self.group.to_json() if isinstance(self.group, GroupSpec) else {"orders": list(self.group.orders)}
        return {
            "group": group,
            "elements": [list(map(int, e)) for e in self.elements()],
        }


@dataclass(frozen=True)
class SubgroupBasis:
    """The subgroup spanned by ``p^{s_i} e_i``."""

    component: PrimaryComponent
    shifts: tuple[int, ...]

    def __post_init__(self):
        if len(self.shifts) != self.component.rank:
            raise ValueError("one shift per cyclic factor required")
        if any(not 0 <= s <= m for s, m in zip(self.shifts, self.component.exponents)):
            raise ValueError("shift outside [0, M_i]")

    @property
    def generators(self) -> list[tuple[int, ...]]:
        p, r = self.component.p, self.component.rank
        out = []
        for i, (s, m) in enumerate(zip(self.shifts, self.component.exponents)):
            if s < m:
                v = [0] * r
                v[i] = p**s
                out.append(tuple(v))
        return out

    @property
    def generator_orders(self) -> list[int]:
        p = self.component.p
        return [p ** (m - s) for s, m in zip(self.shifts, self.component.exponents) if s < m]

    @property
    def order(self) -> int:
        p = self.component.p
        return p ** sum(m - s for s, m in zip(self.shifts, self.component.exponents))

    def subgroup(self) -> Subgroup:
        comp = self.component
        gens = np.asarray(self.generators, dtype=np.int64).reshape(-1, comp.rank)
        orders = self.generator_orders
        coeffs = _coefficient_grid(orders)
        codes = np.sort(comp.encode(coeffs @ gens)) if gens.size else np.zeros(1, dtype=np.int64)
        return Subgroup(comp, codes, gens, orders)


def _coefficient_grid(orders: Sequence[int]) -> np.ndarray:
    if not orders:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(orders), dtype=np.int64)
    return grids.reshape(len(orders), -1).T


def representative_bases(comp: PrimaryComponent) -> list[SubgroupBasis]:
    """One shift vector per automorphism class, the lexicographically smallest.

    Two shift vectors are equivalent iff, block by block over runs of equal
    exponents, they hold the same multiset of shifts.  The smallest member
    of a class therefore lists each block's shifts in ascending order.
    """
    per_block = [
        list(combinations_with_replacement(range(value + 1), stop - start))
        for value, start, stop in comp.blocks()
    ]
    shifts = sorted(tuple(x for blk in choice for x in blk) for choice in product(*per_block))
    return [SubgroupBasis(comp, s) for s in shifts]


def generator_bases(comp: PrimaryComponent) -> list[SubgroupBasis]:
    """Representatives whose shift vector has exactly one non-zero entry."""
    out = []
    for value, start, stop in comp.blocks():
        for s in range(1, value + 1):
            shifts = [0] * comp.rank
            shifts[stop - 1] = s
            out.append(SubgroupBasis(comp, tuple(shifts)))
    return sorted(out, key=lambda b: b.shifts)


# -- automorphisms --------------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """Matrix ``t`` acting on coordinates as ``y_a = sum_b t_ab x_b mod p^{M_a}``."""

    component: PrimaryComponent
    matrix: tuple[tuple[int, ...], ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=np.int64)

    def __call__(self, elems) -> np.ndarray:
        elems = np.asarray(getattr(elems, "residues", elems), dtype=np.int64)
        return (elems @ self.array.T) % np.asarray(self.component.orders, dtype=np.int64)

    def is_valid(self) -> bool:
        comp = self.component
        t = self.array
        p, m = comp.p, comp.exponents
        for a in range(comp.rank):
            for b in range(comp.rank):
                if m[a] > m[b] and t[a, b] % p ** (m[a] - m[b]):
                    return False
        for _, start, stop in comp.blocks():
            if not _invertible_mod_p(t[None, start:stop, start:stop], p)[0]:
                return False
        return True


def _entry_values(comp: PrimaryComponent) -> list[list[np.ndarray]]:
    p, m = comp.p, comp.exponents
    vals = []
    for a in range(comp.rank):
        row = []
        for b in range(comp.rank):
            if m[a] <= m[b]:
                row.append(np.arange(p ** m[a], dtype=np.int64))
            else:
                row.append(p ** (m[a] - m[b]) * np.arange(p ** m[b], dtype=np.int64))
        vals.append(row)
    return vals


def _invertible_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Batched full-rank test over GF(p) by Gaussian elimination."""
    a = np.array(mats, dtype=np.int64) % p
    n, k, _ = a.shape
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    ok = np.ones(n, dtype=bool)
    rows = np.arange(n)
    for col in range(k):
        nz = a[:, col:, col] != 0
        ok &= nz.any(axis=1)
        piv = col + nz.argmax(axis=1)
        top = a[rows, col].copy()
        a[rows, col] = a[rows, piv]
        a[rows, piv] = top
        a[:, col] = (a[:, col] * inv[a[:, col, col]][:, None]) % p
        if col + 1 < k:
            f = a[:, col + 1 :, col]
            a[:, col + 1 :] = (a[:, col + 1 :] - f[:, :, None] * a[:, None, col]) % p
    return ok


def count_automorphisms(comp: PrimaryComponent) -> int:
    """Order of the automorphism group from the block structure of the exponents."""
    p = comp.p
    blocks = comp.blocks()
    values = [v for v, _, _ in blocks]
    nu = [stop - start for _, start, stop in blocks]
    q = len(blocks)
    invertible = math.prod(
        math.prod(p**n - p**j for j in range(n)) for n in nu
    )
    k0 = sum(nu[a] * nu[b] for a in range(q) for b in range(a))
    k1 = sum((values[a] - 1) * nu[a] * nu[b] for a in range(q) for b in range(a + 1))
    k2 = sum(values[b] * nu[a] * nu[b] for a in range(q) for b in range(a + 1, q))
    return p ** (k0 + k1 + k2) * invertible


def _vector_codes(p: int, k: int) -> np.ndarray:
    """All vectors of ``GF(p)^k`` in lexicographic order (row ``i`` has code ``i``)."""
    return _coefficient_grid([p] * k)


def _encode_mod_p(vecs: np.ndarray, p: int) -> np.ndarray:
    k = vecs.shape[-1]
    weights = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (vecs % p) @ weights


class _SpanTables:
    """Lookup tables to grow spans of vectors in ``GF(p)^k`` held as boolean masks."""

    def __init__(self, p: int, k: int):
        vecs = _vector_codes(p, k)
        self.size = len(vecs)
        self.diff = _encode_mod_p(vecs[:, None, :] - vecs[None, :, :], p)
        self.scaled = np.stack([_encode_mod_p(c * vecs, p) for c in range(p)])

    def extend(self, masks: np.ndarray, new: np.ndarray) -> np.ndarray:
        """``span(S) + <w>`` for each mask ``S`` and vector code ``w``."""
        out = np.zeros_like(masks)
        for shift in self.scaled:
            cols = self.diff[:, shift[new]].T
            out |= np.take_along_axis(masks, cols, axis=1)
        return out


def automorphism_matrices(
    comp: PrimaryComponent, cap: int = MAX_AUTOMORPHISMS, chunk: int = 1 << 20
) -> Iterator[np.ndarray]:
    """Every automorphism matrix, in lexicographic (row-major) order, as ``(n, r, r)`` chunks.

    Rows are chosen one at a time; a row is admissible when its entries in
    its own diagonal block, reduced mod p, leave the span of the earlier
    rows of that block.  This is exactly the block invertibility condition.
    """
    total = count_automorphisms(comp)
    if total > cap:
        raise CapExceeded("automorphism count", total, cap)
    r, p = comp.rank, comp.p
    vals = _entry_values(comp)
    block_of, first_row = [], []
    tables = {}
    for _, lo, hi in comp.blocks():
        for a in range(lo, hi):
            block_of.append((lo, hi))
            first_row.append(a == lo)
        tables.setdefault(hi - lo, _SpanTables(p, hi - lo))
    rows, dcodes = [], []
    for a in range(r):
        grid = np.stack(np.meshgrid(*vals[a], indexing="ij"), axis=-1).reshape(-1, r)
        lo, hi = block_of[a]
        rows.append(grid)
        dcodes.append(_encode_mod_p(grid[:, lo:hi], p))

    def expand(a: int, prefix: np.ndarray, masks: np.ndarray):
        lo, hi = block_of[a]
        if first_row[a]:
            masks = np.zeros((len(prefix), tables[hi - lo].size), dtype=bool)
            masks[:, 0] = True
        cands = rows[a]
        step = max(1, chunk // len(cands))
        for s in range(0, len(prefix), step):
            part, pmask = prefix[s : s + step], masks[s : s + step]
            parent, cand = np.nonzero(~pmask[:, dcodes[a]])
            grown = np.concatenate([part[parent], cands[cand][:, None, :]], axis=1)
            if a == r - 1:
                yield grown
                continue
            if block_of[a + 1] == block_of[a]:
                nmask = tables[hi - lo].extend(pmask[parent], dcodes[a][cand])
            else:
                nmask = np.empty((len(parent), 0), dtype=bool)
            yield from expand(a + 1, grown, nmask)

    start = np.zeros((1, 0, r), dtype=np.int64)
    yield from expand(0, start, np.zeros((1, 1), dtype=bool))


def enumerate_automorphisms(
    comp: PrimaryComponent, cap: int = MAX_AUTOMORPHISMS
) -> Iterator[Automorphism]:
    for block in automorphism_matrices(comp, cap):
        for t in block:
            yield Automorphism(comp, tuple(tuple(int(x) for x in row) for row in t))


def _unit_generators(p: int, k: int) -> list[int]:
    """Generators of the unit group of Z/p^k."""
    mod = p**k
    if p == 2:
        return [g for g in (mod - 1, 5) if g % mod != 1 and (g != 5 or k >= 3)]
    phi = mod - mod // p
    primes = list(factorize(phi))
    for g in range(2, mod):
        if g % p and all(pow(g, phi // q, mod) != 1 for q in primes):
            return [g]
    return []


def automorphism_generators(comp: PrimaryComponent) -> list[np.ndarray]:
    """A generating set of the automorphism group.

    Unit scalings of single coordinates, elementary transvections with the
    smallest admissible coefficient, and swaps inside equal-exponent blocks.
    """
    r, p, m = comp.rank, comp.p, comp.exponents
    gens = []
    for a in range(r):
        for u in _unit_generators(p, m[a]):
            t = np.eye(r, dtype=np.int64)
            t[a, a] = u
            gens.append(t)
    for a in range(r):
        for b in range(r):
            if a != b:
                t = np.eye(r, dtype=np.int64)
                t[a, b] = p ** max(0, m[a] - m[b])
                gens.append(t)
    for _, start, stop in comp.blocks():
        for a in range(start, stop - 1):
            t = np.eye(r, dtype=np.int64)
            t[[a, a + 1]] = t[[a + 1, a]]
            gens.append(t)
    return gens


# -- subgroup enumeration -------------------------------------------------------


def _apply(comp: PrimaryComponent, t: np.ndarray, sub: Subgroup) -> Subgroup:
    orders = np.asarray(comp.orders, dtype=np.int64)
    elems = (sub.elements() @ t.T) % orders
    basis = (np.asarray(sub.basis, dtype=np.int64).reshape(-1, comp.rank) @ t.T) % orders
    return Subgroup(comp, np.sort(comp.encode(elems)), basis, sub.basis_orders)


def subgroup_orbit(comp: PrimaryComponent, seed: Subgroup) -> list[Subgroup]:
    """Orbit of a subgroup under the automorphism group (closure under generators)."""
    gens = automorphism_generators(comp)
    seen = {seed.codes: seed}
    queue = deque([seed])
    while queue:
        sub = queue.popleft()
        for t in gens:
            img = _apply(comp, t, sub)
            if img.codes not in seen:
                seen[img.codes] = img
                queue.append(img)
    return list(seen.values())


def _sort_key(sub: Subgroup):
    return (sub.order, sub.codes)


def independent_basis(group: CyclicProduct, codes) -> tuple[list[np.ndarray], list[int]]:
    """Basis of a p-subgroup as a direct sum of cyclic groups.

    Greedy: repeatedly take an element of largest order modulo the span so
    far and lift it to a coset member of that same order.  The span stays
    pure, so the lift always exists.
    """
    codes = np.asarray(codes, dtype=np.int64)
    elems = group.decode(codes)
    orders_arr = np.asarray(group.orders, dtype=np.int64)
    p = _prime_of(group.orders)
    member = np.zeros(group.size, dtype=bool)
    member[0] = True
    current = np.zeros(1, dtype=np.int64)
    basis, orders = [], []
    while current.size < codes.size:
        coset_order = np.ones(codes.size, dtype=np.int64)
        cur = elems.copy()
        inside = member[group.encode(cur)]
        while not inside.all():
            coset_order[~inside] *= p
            cur = (cur * p) % orders_arr
            inside = member[group.encode(cur)]
        k = int(np.argmax(coset_order))
        o = int(coset_order[k])
        lifts = (elems[k] + group.decode(current)) % orders_arr
        good = np.flatnonzero(~((lifts * o) % orders_arr).any(axis=1))
        if good.size == 0:
            raise AssertionError("no lift of maximal order; span is not pure")
        y = lifts[good[0]]
        base = group.decode(current)
        current = np.concatenate([group.encode(base + c * y) for c in range(o)])
        member[current] = True
        basis.append(y)
        orders.append(o)
    return basis, orders


def _index_p_extensions(comp: PrimaryComponent, sub: Subgroup) -> Iterator[Subgroup]:
    """Every subgroup containing ``sub`` with index p."""
    p = comp.p
    elems = comp.all_elements()
    member = np.zeros(comp.size, dtype=bool)
    member[list(sub.codes)] = True
    cand = np.flatnonzero(member[comp.encode(p * elems)] & ~member)
    covered = member.copy()
    base = sub.elements()
    for c in cand:
        if covered[c]:
            continue
        g = elems[c]
        codes = np.sort(np.concatenate([comp.encode(base + k * g) for k in range(p)]))
        covered[codes] = True
        basis, orders = independent_basis(comp, codes)
        yield Subgroup(comp, codes, basis, orders)


def _orbit_representatives(comp: PrimaryComponent) -> tuple[list[Subgroup], dict]:
    check_group_cap(comp.size)
    found: dict[tuple[int, ...], Subgroup] = {}
    reps: list[Subgroup] = []

    def add_orbit(seed: Subgroup) -> None:
        reps.append(seed)
        for sub in subgroup_orbit(comp, seed):
            found.setdefault(sub.codes, sub)

    for rep in representative_bases(comp):
        seed = rep.subgroup()
        if seed.codes not in found:
            add_orbit(seed)
    # Diagonal bases miss whole classes once two exponents differ by 2 or
    # more.  Every subgroup is an index-p extension of a smaller one, so
    # extending each class representative by one step reaches all classes.
    i = 0
    while i < len(reps):
        for ext in _index_p_extensions(comp, reps[i]):
            if ext.codes not in found:
                add_orbit(ext)
        i += 1
    return reps, found


def representative_subgroups(comp: PrimaryComponent) -> list[Subgroup]:
    """One subgroup per automorphism class, diagonal representatives first."""
    return _orbit_representatives(comp)[0]


def enumerate_subgroups(comp: PrimaryComponent) -> list[Subgroup]:
    """All subgroups of a primary component, ordered by (order, elements)."""
    return sorted(_orbit_representatives(comp)[1].values(), key=_sort_key)


def has_cyclic_quotient(sub: Subgroup) -> bool:
    """True when ``G / sub`` is cyclic, i.e. its elements of order p form one Z_p."""
    group = sub.group
    p = _prime_of(group.orders)
    if p is None:
        return True
    member = np.zeros(group.size, dtype=bool)
    member[list(sub.codes)] = True
    socle = np.count_nonzero(member[group.encode(p * group.all_elements())])
    return socle <= p * sub.order


def enumerate_generator_subgroups(comp: PrimaryComponent) -> list[Subgroup]:
    """Proper subgroups that are not an intersection of strictly larger subgroups.

    These are exactly the proper subgroups with cyclic quotient.  Orbits of
    :func:`generator_bases` cover them when adjacent exponents differ by at
    most one; in general they are read off the complete enumeration.
    """
    return [s for s in enumerate_subgroups(comp) if s.order < comp.size and has_cyclic_quotient(s)]


# -- closed-form subgroup counts ----------------------------------------------------


def gaussian_binomial(n: int, m: int, p: int) -> int:
    """Number of m-dimensional subspaces of GF(p)^n."""
    if m < 0 or m > n:
        return 0
    num = math.prod(p ** (n - s + 1) - 1 for s in range(1, m + 1))
    den = math.prod(p ** (m - s + 1) - 1 for s in range(1, m + 1))
    return num // den


class TypeCount(NamedTuple):
    count: int
    valid: bool


def count_subgroups_of_type(group_type: Sequence[int], sub_type: Sequence[int], p: int) -> TypeCount:
    """Number of subgroups of type ``sub_type`` in the p-group of type ``group_type``."""
    if not is_valid_subgroup_type(group_type, sub_type):
        return TypeCount(0, False)
    mc = conjugate_partition(group_type)
    lc = conjugate_partition(sub_type)
    width = max(len(mc), len(lc)) + 1
    mc = list(mc) + [0] * (width - len(mc))
    lc = list(lc) + [0] * (width - len(lc))
    total = 1
    for a in range(width - 1):
        total *= p ** (lc[a + 1] * (mc[a] - lc[a]))
        total *= gaussian_binomial(mc[a] - lc[a + 1], lc[a] - lc[a + 1], p)
    return TypeCount(total, True)


def count_subgroups(group_type: Sequence[int], p: int) -> int:
    return sum(count_subgroups_of_type(group_type, t, p).count for t in subgroup_types(group_type))


# -- homomorphisms ------------------------------------------------------------------


class Homomorphism:
    """A homomorphism from a subgroup into ``Z_codomain``, fixed by its basis values."""

    def __init__(self, domain: Subgroup, phi: Sequence[int], codomain: int):
        if len(phi) != len(domain.basis):
            raise ValueError("one value per basis element required")
        self.domain = domain
        self.codomain = int(codomain)
        self.phi = tuple(int(v) % self.codomain for v in phi)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Homomorphism)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.value_table() == other.value_table()
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, tuple(sorted(self.value_table().items()))))

    def __repr__(self) -> str:
        return f"Homomorphism(phi={self.phi}, codomain={self.codomain})"

    def _tabulate(self) -> tuple[np.ndarray, np.ndarray]:
        group = self.domain.group
        coeffs = _coefficient_grid(self.domain.basis_orders)
        basis = np.asarray(self.domain.basis, dtype=np.int64).reshape(-1, group.rank)
        codes = group.encode(coeffs @ basis) if basis.size else np.zeros(1, dtype=np.int64)
        values = (coeffs @ np.asarray(self.phi, dtype=np.int64)) % self.codomain
        return codes, values

    def value_table(self) -> dict[int, int]:
        """Map from element code to value in ``Z_codomain``."""
        if not hasattr(self, "_table"):
            codes, values = self._tabulate()
            self._table = dict(zip(codes.tolist(), values.tolist()))
        return self._table

    def __call__(self, element) -> int:
        code = int(self.domain.group.encode(getattr(element, "residues", element)))
        return self.value_table()[code]

    def verify(self) -> bool:
        """Exhaustive check that the basis values extend to a homomorphism."""
        group = self.domain.group
        codes, values = self._tabulate()
        if sorted(codes.tolist()) != list(self.domain.codes):
            return False
        full = np.full(group.size, -1, dtype=np.int64)
        full[codes] = values
        elems = group.decode(codes)
        for g, v in zip(self.domain.basis, self.phi):
            moved = full[group.encode(elems + np.asarray(g))]
            if not np.array_equal(moved, (values + v) % self.codomain):
                return False
        return True

    def to_json(self) -> dict:
        return {"phi": list(self.phi), "codomain": self.codomain}


def _prime_of(orders: Sequence[int]) -> int | None:
    primes = set()
    for o in orders:
        primes |= set(factorize(o))
    if len(primes) > 1:
        raise ValueError("domain is not a p-group")
    return primes.pop() if primes else None


def homomorphism_values(generator_orders: Sequence[int], codomain: int) -> list[list[int]]:
    """Admissible images of each generator in ``Z_codomain``."""
    out = []
    for o in generator_orders:
        step = codomain // math.gcd(o, codomain)
        out.append(list(range(0, codomain, step)))
    return out


def enumerate_homomorphisms(domain: Subgroup | PrimaryComponent, codomain: int) -> list[Homomorphism]:
    """All homomorphisms from a p-group with independent basis into ``Z_{p^n}``."""
    if isinstance(domain, PrimaryComponent):
        domain = Subgroup.whole(domain)
    orders = domain.basis_orders
    p = _prime_of(orders)
    cp = factorize(codomain)
    if codomain < 1 or len(cp) > 1 or (p is not None and cp and p not in cp):
        raise ValueError(f"codomain {codomain} is not a power of the domain prime {p}")
    if not domain.is_independent():
        raise ValueError("domain basis is not independent")
    choices = homomorphism_values(orders, codomain)
    return [Homomorphism(domain, phi, codomain) for phi in product(*choices)]


def count_homomorphisms(generator_orders: Sequence[int], codomain: int) -> int:
    return math.prod(math.gcd(o, codomain) for o in generator_orders)


# -- direct sums across primes --------------------------------------------------------


@dataclass
class Selection:
    subgroup: Subgroup
    homomorphism: Homomorphism | None = field(default=None)


def combine_across_primes(
    spec: GroupSpec, selections: Sequence[Selection | Subgroup | tuple]
) -> tuple[Subgroup, Homomorphism | None]:
    """Direct sum of per-prime subgroups (and homomorphisms) as objects over G."""
    dec = spec.decomposition
    sels = []
    for s in selections:
        if isinstance(s, Selection):
            sels.append(s)
        elif isinstance(s, Subgroup):
            sels.append(Selection(s))
        else:
            sels.append(Selection(*s))
    if len(sels) != len(dec.components):
        raise ValueError(
            f"need one selection per primary component ({len(dec.components)}), got {len(sels)}"
        )
    for sel, comp in zip(sels, dec.components):
        if sel.subgroup.group.orders != comp.orders:
            raise ValueError("selection does not belong to the matching primary component")
    parts = [sel.subgroup.elements() for sel in sels]
    grids = np.meshgrid(*[np.arange(len(x)) for x in parts], indexing="ij")
    combined = dec.from_components([x[g.ravel()] for x, g in zip(parts, grids)])
    codes = np.sort(spec.encode(combined))
    basis, orders = [], []
    for i, sel in enumerate(sels):
        if sel.subgroup.basis:
            basis.extend(dec.embed(i, np.asarray(sel.subgroup.basis, dtype=np.int64)))
            orders.extend(sel.subgroup.basis_orders)
    sub = Subgroup(spec, codes, basis, orders)
    if any(sel.homomorphism is None for sel in sels):
        return sub, None
    codomain = math.prod(sel.homomorphism.codomain for sel in sels)
    phi = []
    for sel in sels:
        scale = codomain // sel.homomorphism.codomain
        phi.extend(v * scale for v in sel.homomorphism.phi)
    return sub, Homomorphism(sub, phi, codomain)


def enumerate_group_subgroups(spec: GroupSpec) -> list[Subgroup]:
    """All subgroups of the index group, as direct sums across primes."""
    check_group_cap(spec.size)
    per = [enumerate_subgroups(c) for c in spec.decomposition.components]
    out = [combine_across_primes(spec, list(choice))[0] for choice in product(*per)]
    return sorted(out, key=_sort_key)


def group_homomorphisms(spec: GroupSpec) -> list[Homomorphism]:
    """Homomorphisms from the whole index group to the sum of largest cyclic factors."""
    comps = spec.decomposition.components
    per = []
    for comp in comps:
        whole = Subgroup.whole(comp)
        per.append([(whole, h) for h in enumerate_homomorphisms(whole, comp.orders[0])])
    return [combine_across_primes(spec, list(choice))[1] for choice in product(*per)]
