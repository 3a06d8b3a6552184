"""Erasing channels: tau is a root of unity on a subgroup H and zero elsewhere.

A pair (H, phi) with phi: H -> Z_L (L = lcm of the dims) gives the table
``tau = exp(2 pi i phi / L)`` on H.  Its Choi spectrum is flat on a coset of
the annihilator of H, which also indexes the Kraus operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .channels import (
    ZERO,
    ChannelError,
    ChoiSpectrum,
    WeylChannel,
    extreme_channel,
    identity_channel,
    tau_to_lambda,
    unimodular_support,
)
from .groups import GroupSpec, check_group_cap
from .subgroups import (
    Homomorphism,
    Selection,
    Subgroup,
    combine_across_primes,
    enumerate_generator_subgroups,
    enumerate_homomorphisms,
    enumerate_subgroups,
)
from .weyl import WeylIndex, phase_den, weyl_matrix


def pairing(spec: GroupSpec, g, h) -> np.ndarray:
    """Exponent of ``prod_a w_a^{-m_a r_a + n_a s_a}`` over ``Z_L`` for g=(m,n), h=(r,s).

    Broadcasts over leading axes of ``g`` and ``h``.
    """
    lcm = spec.lcm
    w = np.asarray([lcm // d for d in spec.dims], dtype=np.int64)
    m, n = spec.split(np.asarray(g, dtype=np.int64))
    r, s = spec.split(np.asarray(h, dtype=np.int64))
    return ((-m * r + n * s) * w).sum(axis=-1) % lcm


class ErasingChannel:
    """The erasing channel of a subgroup ``H`` of the index group and ``phi`` on it."""

    def __init__(self, subgroup: Subgroup, hom: Homomorphism):
        spec = subgroup.group
        if not isinstance(spec, GroupSpec):
            raise ValueError("subgroup must live in the index group of a system")
        if hom.domain != subgroup:
            raise ValueError("homomorphism is defined on a different subgroup")
        if not hom.verify():
            raise ValueError("phi does not define a homomorphism on H")
        den = phase_den(spec)
        table = hom.value_table()
        if any((den * v) % hom.codomain for v in table.values()):
            raise ValueError(f"phi values in Z_{hom.codomain} are not roots of unity of order {den}")
        nums = np.full(spec.size, ZERO, dtype=np.int64)
        for code, v in table.items():
            nums[code] = den * v // hom.codomain
        self.spec = spec
        self.subgroup = subgroup
        self.hom = hom
        self.channel = WeylChannel.from_exact(spec, nums)

    def __repr__(self) -> str:
        return f"ErasingChannel(dims={self.spec.dims}, |H|={self.subgroup.order}, phi={self.hom.phi})"

    @property
    def tau(self) -> np.ndarray:
        return self.channel.tau

    def fingerprint(self) -> bytes:
        return self.channel.fingerprint()


def build_erasing(subgroup: Subgroup, hom: Homomorphism, tol: float = 1e-9) -> ErasingChannel:
    ch = ErasingChannel(subgroup, hom)
    if not tau_to_lambda(ch.channel).is_cp(tol):
        raise ChannelError("erasing channel failed the complete-positivity check")
    return ch


def zero_homomorphism(subgroup: Subgroup) -> Homomorphism:
    return Homomorphism(subgroup, [0] * len(subgroup.basis), subgroup.group.lcm)


@dataclass(frozen=True)
class Annihilator:
    subgroup: Subgroup
    offset: tuple[int, ...]

    @property
    def offset_label(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        spec = self.subgroup.group
        m, n = spec.split(np.asarray(self.offset))
        return tuple(m.tolist()), tuple(n.tolist())

    def coset_codes(self) -> np.ndarray:
        spec = self.subgroup.group
        return np.sort(spec.encode(self.subgroup.elements() + np.asarray(self.offset)))


def annihilator(ch: ErasingChannel) -> Annihilator:
    """``H^perp`` and the smallest label whose extreme channel agrees with ``ch`` on H."""
    spec = ch.spec
    check_group_cap(spec.size)
    labels = spec.all_elements()
    basis = np.asarray(ch.subgroup.basis, dtype=np.int64).reshape(-1, spec.rank)
    lcm = spec.lcm
    targets = np.asarray(
        [ch.hom(b) * lcm // ch.hom.codomain for b in basis], dtype=np.int64
    ).reshape(-1, 1)
    pairs = pairing(spec, basis[:, None, :], labels[None, :, :]) if basis.size else np.zeros((0, spec.size), dtype=np.int64)
    kernel = np.flatnonzero((pairs == 0).all(axis=0))
    solutions = np.flatnonzero((pairs == targets % lcm).all(axis=0))
    if solutions.size == 0:
        raise AssertionError("no label reproduces the phases on H; phi is not a homomorphism")
    perp = Subgroup.from_elements(spec, kernel)
    assert ch.subgroup.order * perp.order == spec.size, "|H| |H^perp| != |G|"
    return Annihilator(perp, tuple(labels[solutions[0]].tolist()))


def erasing_spectrum(ch: ErasingChannel) -> ChoiSpectrum:
    """Closed form: ``|H| / D`` on the offset coset of ``H^perp``, zero elsewhere."""
    ann = annihilator(ch)
    lam = np.zeros(ch.spec.size)
    lam[ann.coset_codes()] = ch.subgroup.order / ch.spec.total_dim
    return ChoiSpectrum(ch.spec, lam)


@dataclass(frozen=True)
class KrausTerm:
    label: tuple[tuple[int, ...], tuple[int, ...]]
    matrix: np.ndarray
    probability: float


def kraus_operators(ch: ErasingChannel) -> list[KrausTerm]:
    """``rho -> sum_k p_k K_k rho K_k^dagger`` with ``K = U(s, r)^dagger`` over the coset."""
    spec = ch.spec
    ann = annihilator(ch)
    prob = ch.subgroup.order / spec.size
    out = []
    for code in ann.coset_codes():
        r, s = spec.split(spec.decode(int(code)))
        u = weyl_matrix(WeylIndex(spec, tuple(s.tolist()), tuple(r.tolist())))
        out.append(KrausTerm((tuple(r.tolist()), tuple(s.tolist())), u.conj().T, prob))
    return out


def apply_kraus(terms: Sequence[KrausTerm], rho: np.ndarray) -> np.ndarray:
    return sum(t.probability * t.matrix @ rho @ t.matrix.conj().T for t in terms)


# -- enumeration ------------------------------------------------------------------------


def _component_pairs(spec: GroupSpec, subgroups_per, phases: str):
    comps = spec.decomposition.components
    per = []
    for comp, subs in zip(comps, subgroups_per):
        codomain = comp.orders[0]
        pairs = []
        for sub in subs:
            if phases == "none":
                pairs.append(Selection(sub, Homomorphism(sub, [0] * len(sub.basis), codomain)))
            else:
                pairs.extend(Selection(sub, h) for h in enumerate_homomorphisms(sub, codomain))
        per.append(pairs)
    return per


def _from_selections(spec: GroupSpec, per) -> list[ErasingChannel]:
    seen: dict[bytes, ErasingChannel] = {}
    for choice in product(*per):
        sub, hom = combine_across_primes(spec, list(choice))
        ch = build_erasing(sub, hom)
        seen.setdefault(ch.fingerprint(), ch)
    return list(seen.values())


def enumerate_erasing(spec: GroupSpec, phases: str = "all") -> list[ErasingChannel]:
    """Every erasing channel of ``spec``, one per distinct tau table.

    ``phases="none"`` restricts to phi = 0 (one channel per subgroup).
    """
    if phases not in ("all", "none"):
        raise ValueError("phases must be 'all' or 'none'")
    check_group_cap(spec.size)
    subs = [enumerate_subgroups(c) for c in spec.decomposition.components]
    return _from_selections(spec, _component_pairs(spec, subs, phases))


def generator_subgroups(spec: GroupSpec) -> list[Subgroup]:
    """Subgroups equal to the whole group at every prime but one, where they are generators."""
    check_group_cap(spec.size)
    comps = spec.decomposition.components
    out = []
    for i, comp in enumerate(comps):
        for gen in enumerate_generator_subgroups(comp):
            parts = [gen if j == i else Subgroup.whole(c) for j, c in enumerate(comps)]
            out.append(combine_across_primes(spec, parts)[0])
    return out


def _surjective(hom: Homomorphism) -> bool:
    return math.gcd(hom.codomain, *hom.phi) == 1 if hom.phi else hom.codomain == 1


def generating_channels(spec: GroupSpec) -> list[ErasingChannel]:
    """Generator subgroups paired with phases onto the largest cyclic factor of their prime."""
    check_group_cap(spec.size)
    comps = spec.decomposition.components
    out = []
    for i, comp in enumerate(comps):
        for gen in enumerate_generator_subgroups(comp):
            homs = [h for h in enumerate_homomorphisms(gen, comp.orders[0]) if _surjective(h)]
            for h in homs:
                sels = []
                for j, c in enumerate(comps):
                    if j == i:
                        sels.append(Selection(gen, h))
                    else:
                        whole = Subgroup.whole(c)
                        sels.append(Selection(whole, Homomorphism(whole, [0] * c.rank, c.orders[0])))
                sub, hom = combine_across_primes(spec, sels)
                out.append(build_erasing(sub, hom))
    return out


def unitary_generators(spec: GroupSpec) -> list[WeylChannel]:
    """Extreme channels at the unit labels; they generate every unitary Weyl channel."""
    out = []
    for i in range(spec.rank):
        e = np.zeros(spec.rank, dtype=np.int64)
        e[i] = 1
        r0, s0 = spec.split(e)
        out.append(extreme_channel(spec, r0, s0))
    return out


def _compose_exact(a: np.ndarray, b: np.ndarray, den: int) -> np.ndarray:
    return np.where((a == ZERO) | (b == ZERO), ZERO, (a + b) % den)


def closure(seeds: Iterable[WeylChannel], include_identity: bool = True) -> list[WeylChannel]:
    """All products of the seeds, as a fixed point of pairwise composition."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("closure needs at least one seed")
    spec = seeds[0].spec
    den = phase_den(spec)
    if any(not s.is_exact for s in seeds):
        raise ValueError("closure works on exact tables")
    start = list(seeds) + ([identity_channel(spec)] if include_identity else [])
    found: dict[bytes, np.ndarray] = {}
    for s in start:
        found.setdefault(s.exact.tobytes(), s.exact)
    frontier = list(found.values())
    gens = [s.exact for s in seeds]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose_exact(x, g, den)
                key = y.tobytes()
                if key not in found:
                    found[key] = y
                    nxt.append(y)
        frontier = nxt
    return [WeylChannel.from_exact(spec, v) for _, v in sorted(found.items())]


def closure_check(gens: Iterable[WeylChannel], target: Iterable[WeylChannel]) -> bool:
    """True when composing the generators reaches exactly the target set."""
    got = {c.fingerprint() for c in closure(gens)}
    want = {c.fingerprint() for c in target}
    return got == want


def is_minimal(gens: Sequence[WeylChannel], target: Iterable[WeylChannel]) -> bool:
    """No generating set with one element fewer closes onto the target."""
    target = list(target)
    return all(
        not closure_check(list(subset), target) for subset in combinations(gens, len(gens) - 1)
    )


def erasing_from_channel(ch: WeylChannel, tol: float = 1e-9) -> ErasingChannel | None:
    """Recover (H, phi) from a table with every |tau| in {0, 1}; ``None`` otherwise."""
    mod = np.abs(ch.tau)
    if np.any((mod > tol) & (np.abs(mod - 1) > tol)):
        return None
    sub, hom = unimodular_support(ch, tol)
    return ErasingChannel(sub, hom)
