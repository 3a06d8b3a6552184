"""Multi-particle Weyl operators, exact phases and closed-form spectra."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .groups import CapExceeded, GroupSpec

MAX_DENSE_DIM = 256


@dataclass(frozen=True, eq=False)
class PhaseExponent:
    """The root of unity ``exp(2 pi i num / den)``, with ``num`` kept mod ``den``."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "num", int(self.num) % int(self.den))
        object.__setattr__(self, "den", int(self.den))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def value(self) -> complex:
        return root_of_unity(self.num, self.den)

    def __complex__(self) -> complex:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, PhaseExponent):
            return self.fraction == other.fraction
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.fraction)

    def __mul__(self, other: PhaseExponent) -> PhaseExponent:
        den = math.lcm(self.den, other.den)
        return PhaseExponent(self.num * (den // self.den) + other.num * (den // other.den), den)

    def __pow__(self, k: int) -> PhaseExponent:
        return PhaseExponent(self.num * k, self.den)

    def conjugate(self) -> PhaseExponent:
        return PhaseExponent(-self.num, self.den)

    def with_den(self, den: int) -> PhaseExponent:
        if (self.num * den) % self.den:
            raise ValueError(f"{self.num}/{self.den} is not expressible over {den}")
        return PhaseExponent(self.num * den // self.den, den)


def root_of_unity(num: int, den: int) -> complex:
    # snap the eighth roots so that +-1, +-i come out exact
    num %= den
    if (8 * num) % den == 0:
        return (1, cmath.exp(1j * math.pi / 4), 1j, cmath.exp(3j * math.pi / 4),
                -1, cmath.exp(5j * math.pi / 4), -1j, cmath.exp(7j * math.pi / 4))[8 * num // den]
    return cmath.exp(2j * math.pi * num / den)


def phase_den(spec: GroupSpec) -> int:
    """Common denominator for every exact phase of ``spec``: twice the lcm of the dims."""
    return 2 * spec.lcm


@dataclass(frozen=True)
class WeylIndex:
    spec: GroupSpec
    m: tuple[int, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        n = tuple(int(x) for x in self.n)
        if len(m) != self.spec.n_particles or len(n) != self.spec.n_particles:
            raise ValueError("label length does not match the number of particles")
        for x, y, d in zip(m, n, self.spec.dims):
            if not (0 <= x < d and 0 <= y < d):
                raise ValueError(f"label ({x},{y}) out of range for dimension {d}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @classmethod
    def wrap(cls, spec: GroupSpec, m: Sequence[int], n: Sequence[int]) -> WeylIndex:
        return cls(spec, tuple(x % d for x, d in zip(m, spec.dims)), tuple(x % d for x, d in zip(n, spec.dims)))

    @classmethod
    def from_code(cls, spec: GroupSpec, code: int) -> WeylIndex:
        el = spec.decode(code)
        m, n = spec.split(el)
        return cls(spec, tuple(m.tolist()), tuple(n.tolist()))

    @property
    def code(self) -> int:
        return self.spec.index(self.m, self.n)

    def __neg__(self) -> WeylIndex:
        return WeylIndex.wrap(self.spec, [-x for x in self.m], [-x for x in self.n])

    def __add__(self, other: WeylIndex) -> WeylIndex:
        if other.spec != self.spec:
            raise ValueError("indices belong to different systems")
        return WeylIndex.wrap(
            self.spec,
            [a + b for a, b in zip(self.m, other.m)],
            [a + b for a, b in zip(self.n, other.n)],
        )


def _check_dense(dim: int) -> None:
    if dim > MAX_DENSE_DIM:
        raise CapExceeded("dense operator dimension", dim, MAX_DENSE_DIM)


def single_weyl(m: int, n: int, d: int) -> np.ndarray:
    """``sum_k w^{mk} |k><k+n|`` for one particle of dimension ``d``."""
    k = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    u[k, (k + n) % d] = [root_of_unity(m * x, d) for x in k]
    return u


def weyl_matrix(idx: WeylIndex) -> np.ndarray:
    _check_dense(idx.spec.total_dim)
    out = np.ones((1, 1), dtype=complex)
    for m, n, d in zip(idx.m, idx.n, idx.spec.dims):
        out = np.kron(out, single_weyl(m, n, d))
    return out


def weyl_product(a: WeylIndex, b: WeylIndex) -> tuple[PhaseExponent, WeylIndex]:
    """``U(a) U(b) = phase * U(a + b)``."""
    if a.spec != b.spec:
        raise ValueError("indices belong to different systems")
    den = phase_den(a.spec)
    num = sum(mb * na * (den // d) for mb, na, d in zip(b.m, a.n, a.spec.dims))
    return PhaseExponent(num, den), a + b


def commutation_phase(a: WeylIndex, b: WeylIndex) -> PhaseExponent:
    """Phase c with ``U(a) U(b) = c U(b) U(a)``."""
    ab, _ = weyl_product(a, b)
    ba, _ = weyl_product(b, a)
    return ab * ba.conjugate()


def weyl_spectrum(m: int, n: int, d: int) -> list[PhaseExponent]:
    """The d eigenvalues of the single-particle ``U(m, n)``, as exact phases over ``2d``."""
    if not (0 <= m < d and 0 <= n < d):
        raise ValueError("label out of range")
    g = math.gcd(m, n) if (m or n) else d
    period = d // math.gcd(d, n)
    return [PhaseExponent(2 * g * k + (period - 1) * m * n, 2 * d) for k in range(d)]


def mu_phase(idx: WeylIndex, r: Sequence[int], s: Sequence[int]) -> PhaseExponent:
    """Eigenvalue label ``(r, s)`` of ``U(idx) (x) U(idx)^*``."""
    den = phase_den(idx.spec)
    num = sum(
        (mi * ri - ni * si) * (den // d)
        for mi, ni, ri, si, d in zip(idx.m, idx.n, r, s, idx.spec.dims)
    )
    return PhaseExponent(num, den)


@lru_cache(maxsize=16)
def weyl_basis(spec: GroupSpec) -> np.ndarray:
    """Stack of every ``U(m, n)`` in table order, shape ``(|G|, D, D)``."""
    dim = spec.total_dim
    _check_dense(dim)
    if spec.size * dim * dim > 1 << 24:
        raise CapExceeded("Weyl basis entries", spec.size * dim * dim, 1 << 24)
    stack = np.empty((spec.size, dim, dim), dtype=complex)
    for code in range(spec.size):
        stack[code] = weyl_matrix(WeylIndex.from_code(spec, code))
    stack.setflags(write=False)
    return stack


def weyl_coefficients(rho: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """``alpha(m, n) = tr(U(m, n)^dagger rho)`` in table order."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (spec.total_dim, spec.total_dim):
        raise ValueError(f"expected a {spec.total_dim}x{spec.total_dim} matrix, got {rho.shape}")
    basis = weyl_basis(spec)
    return np.einsum("gji,ji->g", basis.conj(), rho)


def from_weyl_coefficients(alpha: np.ndarray, spec: GroupSpec) -> np.ndarray:
    return np.einsum("g,gij->ij", alpha, weyl_basis(spec)) / spec.total_dim
