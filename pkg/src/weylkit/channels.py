"""Weyl channels: tau tables, Choi spectra and complete positivity.

A channel acts diagonally on the Weyl basis, ``U(m, n) -> tau(m, n) U(m, n)``.
Tables are flat arrays in row-major order over ``(m_1..m_N, n_1..n_N)``.
The eigenvalues of the Choi matrix (the lambda table) are a discrete
Fourier transform of tau over the index group.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import CapExceeded, GroupSpec, check_group_cap
from .subgroups import Homomorphism, Subgroup
from .weyl import (
    PhaseExponent,
    WeylIndex,
    phase_den,
    root_of_unity,
    weyl_basis,
    weyl_coefficients,
)

TOL = 1e-9
MAX_TRANSFORM_ORDER = 2**14
MAX_CHOI_DIM = 2**14

ZERO = -1  # marker for an exact zero in an exact table


class ChannelError(ValueError):
    pass


class UnimodularSupportError(ChannelError):
    """The entries of modulus one do not form a subgroup with additive phases."""


def cp_tolerance(spec: GroupSpec, tol: float = TOL) -> float:
    return tol * spec.total_dim


class WeylChannel:
    """A tau table over the index group.

    ``exact`` holds phase numerators over ``phase_den(spec)`` (``-1`` for an
    exact zero) when every entry is a root of unity or zero; otherwise it is
    ``None`` and only the complex table is meaningful.
    """

    def __init__(self, spec: GroupSpec, tau, exact=None):
        tau = np.array(tau, dtype=complex).reshape(-1)
        if tau.shape != (spec.size,):
            raise ValueError(f"tau table needs {spec.size} entries, got {tau.size}")
        self.spec = spec
        self.exact = None
        if exact is not None:
            exact = np.array(exact, dtype=np.int64).reshape(-1)
            den = phase_den(spec)
            exact = np.where(exact < 0, ZERO, exact % den)
            exact.setflags(write=False)
            self.exact = exact
        tau.setflags(write=False)
        self.tau = tau

    @classmethod
    def from_exact(cls, spec: GroupSpec, nums) -> WeylChannel:
        nums = np.asarray(nums, dtype=np.int64).reshape(-1)
        den = phase_den(spec)
        tau = np.array([0 if k < 0 else root_of_unity(int(k), den) for k in nums], dtype=complex)
        return cls(spec, tau, nums)

    def __repr__(self) -> str:
        kind = "exact" if self.is_exact else "float"
        return f"WeylChannel(dims={self.spec.dims}, {kind})"

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __getitem__(self, label) -> complex:
        m, n = label
        return complex(self.tau[self.spec.index(m, n)])

    def phase(self, m, n) -> PhaseExponent | None:
        """Exact entry at ``(m, n)``; ``None`` for an exact zero."""
        if self.exact is None:
            raise ChannelError("channel has no exact representation")
        k = int(self.exact[self.spec.index(m, n)])
        return None if k == ZERO else PhaseExponent(k, phase_den(self.spec))

    def fingerprint(self) -> bytes:
        if self.exact is not None:
            return b"x" + self.exact.tobytes()
        return b"f" + np.round(self.tau, 12).tobytes()

    def allclose(self, other: WeylChannel, atol: float = 1e-12) -> bool:
        return self.spec == other.spec and np.allclose(self.tau, other.tau, rtol=0, atol=atol)


@dataclass(frozen=True)
class ChoiSpectrum:
    """Choi eigenvalues indexed by labels ``(r, s)`` in table order."""

    spec: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.shape != (self.spec.size,):
            raise ValueError(f"lambda table needs {self.spec.size} entries, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def is_cp(self, tol: float = TOL) -> bool:
        return bool(self.values.min() >= -cp_tolerance(self.spec, tol))

    def __getitem__(self, label) -> float:
        r, s = label
        return float(self.values[self.spec.index(r, s)])

    def support(self, tol: float = TOL) -> np.ndarray:
        return np.flatnonzero(np.abs(self.values) > cp_tolerance(self.spec, tol))


@dataclass
class ValidationReport:
    trace_preserving: bool
    hermitian: bool
    cp: bool
    min_lambda: float | None
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.trace_preserving and self.hermitian and self.cp


# -- transforms -----------------------------------------------------------------------


def _negation(spec: GroupSpec) -> np.ndarray:
    return spec.neg_codes(np.arange(spec.size))


def hermiticity_defect(ch: WeylChannel) -> float:
    tau = ch.tau
    return float(np.max(np.abs(tau[_negation(ch.spec)] - tau.conj())))


def _axes(spec: GroupSpec) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = spec.n_particles
    return tuple(range(n)), tuple(range(n, 2 * n))


def _dft_tau_to_lambda(spec: GroupSpec, tau: np.ndarray) -> np.ndarray:
    # sum_m e^{+2 pi i m r/d} is d*ifft; sum_n e^{-2 pi i n s/d} is fft; the d's cancel 1/D
    m_axes, n_axes = _axes(spec)
    grid = tau.reshape(spec.orders)
    out = np.fft.ifftn(np.fft.fftn(grid, axes=n_axes), axes=m_axes)
    return out.reshape(-1)


def _dft_lambda_to_tau(spec: GroupSpec, lam: np.ndarray) -> np.ndarray:
    m_axes, n_axes = _axes(spec)
    grid = np.asarray(lam, dtype=complex).reshape(spec.orders)
    out = np.fft.fftn(np.fft.ifftn(grid, axes=n_axes), axes=m_axes)
    return out.reshape(-1)


def _pairing_exponents(spec: GroupSpec) -> np.ndarray:
    """``E[g, h] = sum_a (-m_a r_a + n_a s_a) * L/d_a mod L`` for g=(m,n), h=(r,s)."""
    check_group_cap(spec.size)
    if spec.size > MAX_TRANSFORM_ORDER:
        raise CapExceeded("transform order", spec.size, MAX_TRANSFORM_ORDER)
    lcm = spec.lcm
    w = np.asarray([lcm // d for d in spec.dims], dtype=np.int64)
    el = spec.all_elements()
    m, n = spec.split(el)
    return ((-m * w) @ m.T + (n * w) @ n.T) % lcm


def transform_matrix(spec: GroupSpec) -> np.ndarray:
    """Matrix mapping a lambda vector to the tau vector."""
    lcm = spec.lcm
    roots = np.array([root_of_unity(k, lcm) for k in range(lcm)])
    return roots[_pairing_exponents(spec)] / spec.total_dim


def inverse_transform_matrix(spec: GroupSpec) -> np.ndarray:
    """Matrix mapping a tau vector to the lambda vector."""
    lcm = spec.lcm
    roots = np.array([root_of_unity(-k, lcm) for k in range(lcm)])
    return roots[_pairing_exponents(spec)] / spec.total_dim


def transform_arguments(spec: GroupSpec) -> np.ndarray:
    """Arguments in ``(-pi, pi]`` of the entries of :func:`transform_matrix`."""
    lcm = spec.lcm
    e = _pairing_exponents(spec)
    frac = np.where(2 * e > lcm, e - lcm, e) / lcm
    return 2 * np.pi * frac


def tau_to_lambda(ch: WeylChannel, method: str = "fft", tol: float = TOL) -> ChoiSpectrum:
    defect = hermiticity_defect(ch)
    if defect > tol:
        raise ChannelError(f"hermiticity violated (defect {defect:.3g}); lambda would be complex")
    if method == "fft":
        lam = _dft_tau_to_lambda(ch.spec, ch.tau)
    elif method == "direct":
        lam = inverse_transform_matrix(ch.spec) @ ch.tau
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.max(np.abs(lam.imag)) > cp_tolerance(ch.spec, tol):
        raise ChannelError("lambda table has a non-negligible imaginary part")
    return ChoiSpectrum(ch.spec, lam.real)


def lambda_to_tau(sp: ChoiSpectrum, method: str = "fft", tol: float = TOL) -> WeylChannel:
    expected = sp.spec.total_dim
    if abs(sp.total - expected) > tol * expected:
        raise ChannelError(f"lambda table sums to {sp.total:.12g}, expected {expected}")
    if method == "fft":
        tau = _dft_lambda_to_tau(sp.spec, sp.values)
    elif method == "direct":
        tau = transform_matrix(sp.spec) @ sp.values
    else:
        raise ValueError(f"unknown method {method!r}")
    return WeylChannel(sp.spec, tau)


def is_cp(ch: WeylChannel, tol: float = TOL) -> bool:
    try:
        return tau_to_lambda(ch, tol=tol).is_cp(tol)
    except ChannelError:
        return False


def validate(ch: WeylChannel, tol: float = TOL) -> ValidationReport:
    spec = ch.spec
    msgs = []
    t0 = ch.tau[0]
    tp = abs(t0 - 1) <= tol
    if not tp:
        msgs.append(f"trace-preservation violated: tau(0,0) = {t0.real:.12g}{t0.imag:+.12g}j")
    neg = _negation(spec)
    bad = np.flatnonzero(np.abs(ch.tau[neg] - ch.tau.conj()) > tol)
    herm = bad.size == 0
    if not herm:
        g = WeylIndex.from_code(spec, int(bad[0]))
        msgs.append(
            f"hermiticity violated at (m,n)={list(g.m)},{list(g.n)}: "
            f"tau(-m,-n) must equal conj(tau(m,n)) ({bad.size} entries affected)"
        )
    lam = _dft_tau_to_lambda(spec, ch.tau)
    min_lam = float(lam.real.min())
    cp = bool(
        np.max(np.abs(lam.imag)) <= cp_tolerance(spec, tol) and min_lam >= -cp_tolerance(spec, tol)
    )
    if not cp:
        msgs.append(f"not completely positive: min lambda = {min_lam:.12g}")
    return ValidationReport(tp, herm, cp, min_lam, msgs)


# -- Choi matrices and action -----------------------------------------------------------


def _check_choi(spec: GroupSpec) -> None:
    side = spec.total_dim**2
    if side > MAX_CHOI_DIM:
        raise CapExceeded("Choi matrix dimension", side, MAX_CHOI_DIM)


def choi_matrix(ch: WeylChannel) -> np.ndarray:
    """``(1/D) sum tau(m,n) U(m,n) (x) U(m,n)^*``."""
    spec = ch.spec
    _check_choi(spec)
    dim = spec.total_dim
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    basis = weyl_basis(spec)
    for code in np.flatnonzero(ch.tau):
        u = basis[code]
        out += ch.tau[code] * np.kron(u, u.conj())
    return out / dim


def choi_matrix_from_action(ch: WeylChannel) -> np.ndarray:
    """``sum_{k,l} E(|k><l|) (x) |k><l|`` built by applying the channel to matrix units."""
    spec = ch.spec
    _check_choi(spec)
    dim = spec.total_dim
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in range(dim):
        for l in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[k, l] = 1
            out += np.kron(apply(ch, unit), unit)
    return out


def apply(ch: WeylChannel, rho: np.ndarray) -> np.ndarray:
    spec = ch.spec
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (spec.total_dim, spec.total_dim):
        raise ValueError(f"state has shape {rho.shape}, channel acts on dimension {spec.total_dim}")
    alpha = weyl_coefficients(rho, spec)
    return np.einsum("g,gij->ij", ch.tau * alpha, weyl_basis(spec)) / spec.total_dim


def weyl_decomposition(rho: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """The coefficients alpha(m, n) of a density matrix."""
    return weyl_coefficients(rho, spec)


# -- composition and iteration ------------------------------------------------------------


def compose(a: WeylChannel, b: WeylChannel) -> WeylChannel:
    """The channel ``a o b``; diagonal maps compose by pointwise products."""
    if a.spec != b.spec:
        raise ChannelError("cannot compose channels on different systems")
    if a.is_exact and b.is_exact:
        den = phase_den(a.spec)
        zero = (a.exact == ZERO) | (b.exact == ZERO)
        nums = np.where(zero, ZERO, (a.exact + b.exact) % den)
        return WeylChannel.from_exact(a.spec, nums)
    return WeylChannel(a.spec, a.tau * b.tau)


def _drop_decaying(ch: WeylChannel, decaying: np.ndarray) -> WeylChannel:
    # entries with |tau| < 1 vanish in the limit, the rest keep their modulus
    if ch.is_exact or not decaying.any():
        return ch
    return WeylChannel(ch.spec, np.where(decaying, 0, ch.tau))


@dataclass
class IterationReport:
    """Outcome of repeatedly applying a channel.

    ``start`` is the first power inside the cycle and ``cycle`` lists the
    channels ``E^start, ..., E^(start+period-1)``.
    """

    converged: bool
    steps: int
    start: int | None = None
    period: int | None = None
    cycle: list[WeylChannel] = field(default_factory=list)

    @property
    def limit(self) -> WeylChannel | None:
        return self.cycle[0] if self.converged and self.period == 1 else None


def iterate(ch: WeylChannel, max_steps: int = 1000, tol: float = TOL) -> IterationReport:
    history = [ch]
    stack = [ch.tau]
    current = ch
    for step in range(2, max_steps + 1):
        current = compose(current, ch)
        if current.is_exact:
            hits = [j for j, h in enumerate(history) if np.array_equal(h.exact, current.exact)]
        else:
            diff = np.max(np.abs(np.asarray(stack) - current.tau), axis=1)
            hits = np.flatnonzero(diff <= tol).tolist()
        if hits:
            j = hits[-1]
            decaying = np.abs(ch.tau) < 1 - tol
            cycle = [_drop_decaying(h, decaying) for h in history[j:]]
            return IterationReport(True, step, start=j + 1, period=step - (j + 1), cycle=cycle)
        history.append(current)
        stack.append(current.tau)
    return IterationReport(False, max_steps)


# -- extreme points -----------------------------------------------------------------------


def extreme_channel(spec: GroupSpec, r0: Sequence[int], s0: Sequence[int]) -> WeylChannel:
    """``tau(m, n) = w^{-m.r0 + n.s0}``: the vertex whose lambda is a spike at (r0, s0)."""
    den = phase_den(spec)
    w = np.asarray([den // d for d in spec.dims], dtype=np.int64)
    m, n = spec.split(spec.all_elements())
    nums = (-m * w) @ np.asarray(r0, dtype=np.int64) + (n * w) @ np.asarray(s0, dtype=np.int64)
    return WeylChannel.from_exact(spec, nums % den)


def extreme_channels(spec: GroupSpec) -> list[WeylChannel]:
    out = []
    for code in range(spec.size):
        r0, s0 = spec.split(spec.decode(code))
        out.append(extreme_channel(spec, r0, s0))
    return out


def is_extreme(ch: WeylChannel, tol: float = TOL) -> bool:
    return bool(np.all(np.abs(np.abs(ch.tau) - 1) <= tol)) and is_cp(ch, tol)


def identity_channel(spec: GroupSpec) -> WeylChannel:
    return WeylChannel.from_exact(spec, np.zeros(spec.size, dtype=np.int64))


def depolarizing_channel(spec: GroupSpec) -> WeylChannel:
    nums = np.full(spec.size, ZERO, dtype=np.int64)
    nums[0] = 0
    return WeylChannel.from_exact(spec, nums)


def exact_phases(ch: WeylChannel, codes: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Phase exponents mod lcm(dims) of unimodular entries, snapped and checked."""
    spec = ch.spec
    lcm = spec.lcm
    if ch.is_exact:
        nums = ch.exact[codes]
        if np.any(nums == ZERO) or np.any(nums % 2):
            raise UnimodularSupportError("unimodular entry is not an lcm(dims)-th root of unity")
        return (nums // 2) % lcm
    vals = ch.tau[codes]
    k = np.rint(np.angle(vals) * lcm / (2 * np.pi)).astype(np.int64) % lcm
    snapped = np.exp(2j * np.pi * k / lcm)
    if np.any(np.abs(vals - snapped) > tol):
        raise UnimodularSupportError("unimodular entry is not an lcm(dims)-th root of unity")
    return k


def unimodular_support(ch: WeylChannel, tol: float = TOL) -> tuple[Subgroup, Homomorphism]:
    """Indices with ``|tau| = 1`` as a subgroup, and their phases as a homomorphism."""
    spec = ch.spec
    if not is_cp(ch, tol):
        raise ChannelError("unimodular support requires a completely positive channel")
    if ch.is_exact:
        codes = np.flatnonzero(ch.exact != ZERO)
    else:
        codes = np.flatnonzero(np.abs(np.abs(ch.tau) - 1) <= tol)
    try:
        sub = Subgroup.from_elements(spec, codes)
    except ValueError as exc:
        raise UnimodularSupportError(f"unimodular support is not a subgroup: {exc}") from exc
    k = exact_phases(ch, codes, tol)
    table = dict(zip(codes.tolist(), k.tolist()))
    phi = [table[int(spec.encode(b))] for b in sub.basis]
    hom = Homomorphism(sub, phi, spec.lcm)
    if not hom.verify() or hom.value_table() != table:
        raise UnimodularSupportError("phases on the unimodular support are not additive")
    return sub, hom


# -- helpers for sampling -------------------------------------------------------------


def random_channel(
    spec: GroupSpec, rng: np.random.Generator, n_terms: int | None = None
) -> WeylChannel:
    """A CP channel from random non-negative lambda weights on ``n_terms`` labels."""
    size = spec.size
    k = size if n_terms is None else min(n_terms, size)
    labels = rng.choice(size, size=k, replace=False)
    lam = np.zeros(size)
    lam[labels] = rng.dirichlet(np.ones(k)) * spec.total_dim
    return lambda_to_tau(ChoiSpectrum(spec, lam))


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)

