"""Brute-force ground truth in a number-truncated two-mode Fock space.

States live on the product basis |n_a, n_b> with 0 <= n <= cutoff.  The full
Hamiltonian conserves the parity of n_a + n_b and the beam-splitter-only one
conserves n_a + n_b itself, so propagation is done per conserved sector with
one real-symmetric eigendecomposition each; applying the propagator at any
time is then a phase rotation in the sector eigenbasis and exactly unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import OscillatorParams
from .states import InitialState

__all__ = [
    "TruncationError",
    "FockBasis",
    "FockVector",
    "build_hamiltonian",
    "propagate",
    "SectorPropagator",
    "vacuum_vector",
    "fock_vector",
    "squeezed_vector",
    "FockOracle",
    "OraclePoint",
    "oracle_fidelity",
    "oracle_delta_n",
    "fock_bound",
    "bound_check",
    "BoundCheckResult",
    "TAIL_TOL",
    "MAX_CUTOFF",
]

TAIL_TOL = 1e-8
MAX_CUTOFF = 96
BOUND_CERT_TOL = 1e-6


class TruncationError(RuntimeError):
    """Raised when the cutoff is too small for the requested quantity."""


@dataclass(frozen=True)
class FockBasis:
    """Two-mode number basis truncated at a per-mode occupation cutoff."""

    cutoff: int

    def __post_init__(self):
        if not (1 <= self.cutoff <= MAX_CUTOFF):
            raise ValueError(f"cutoff must be in [1, {MAX_CUTOFF}]")

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** 2

    def index(self, n_a: int, n_b: int) -> int:
        c = self.cutoff
        if not (0 <= n_a <= c and 0 <= n_b <= c):
            raise ValueError(f"occupation ({n_a}, {n_b}) outside cutoff {c}")
        return n_a * (c + 1) + n_b

    def occupations(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.cutoff + 1)

    def number_vector(self) -> np.ndarray:
        c = self.cutoff
        n = np.arange(c + 1)
        return (n[:, None] + n[None, :]).reshape(-1).astype(float)

    def boundary_mask(self) -> np.ndarray:
        c = self.cutoff
        n = np.arange(c + 1)
        return ((n[:, None] == c) | (n[None, :] == c)).reshape(-1)


@dataclass
class FockVector:
    """State vector on a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.basis.dim,):
            raise ValueError("amplitude length does not match the basis dimension")
        self.amplitudes = amp

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tail_weight(self) -> float:
        """Probability mass sitting on the boundary shell of the truncation."""
        return float(np.sum(np.abs(self.amplitudes[self.basis.boundary_mask()]) ** 2))

    def number_expectation(self) -> float:
        n = self.basis.number_vector()
        return float(np.real(np.vdot(self.amplitudes, n * self.amplitudes)))


def _sector_indices(basis: FockBasis, variant: str) -> list[np.ndarray]:
    c = basis.cutoff
    na = np.repeat(np.arange(c + 1), c + 1)
    nb = np.tile(np.arange(c + 1), c + 1)
    total = na + nb
    labels = total % 2 if variant == "full" else total
    return [np.nonzero(labels == lab)[0] for lab in np.unique(labels)]


def _fill_sector(p: OscillatorParams, basis: FockBasis, variant: str, idx: np.ndarray) -> np.ndarray:
    c = basis.cutoff
    pos = {int(i): k for k, i in enumerate(idx)}
    h = np.zeros((len(idx), len(idx)))
    g_sq = 0.0 if variant == "rwa" else p.g_sq
    for k, i in enumerate(idx):
        n_a, n_b = basis.occupations(int(i))
        h[k, k] = p.omega_a * n_a + p.omega_b * n_b
        if p.g_bs and n_a + 1 <= c and n_b - 1 >= 0:
            j = pos.get(basis.index(n_a + 1, n_b - 1))
            if j is not None:
                val = p.g_bs * math.sqrt((n_a + 1) * n_b)
                h[j, k] += val
                h[k, j] += val
        if g_sq and n_a + 1 <= c and n_b + 1 <= c:
            j = pos.get(basis.index(n_a + 1, n_b + 1))
            if j is not None:
                val = g_sq * math.sqrt((n_a + 1) * (n_b + 1))
                h[j, k] += val
                h[k, j] += val
    return h


def build_hamiltonian(p: OscillatorParams, basis: FockBasis, variant: str = "full") -> np.ndarray:
    """Dense Hamiltonian on the truncated basis; variant 'rwa' drops the squeezing term."""
    if variant not in ("full", "rwa"):
        raise ValueError("variant must be 'full' or 'rwa'")
    h = np.zeros((basis.dim, basis.dim))
    for idx in _sector_indices(basis, variant):
        h[np.ix_(idx, idx)] = _fill_sector(p, basis, variant, idx)
    return h


class SectorPropagator:
    """exp(-i H t) applied per conserved sector from cached eigendecompositions."""

    def __init__(self, p: OscillatorParams, basis: FockBasis, variant: str):
        if variant not in ("full", "rwa"):
            raise ValueError("variant must be 'full' or 'rwa'")
        self.basis = basis
        self.variant = variant
        self.sectors = []
        for idx in _sector_indices(basis, variant):
            h = _fill_sector(p, basis, variant, idx)
            energies, modes = np.linalg.eigh(h)
            self.sectors.append((idx, energies, modes))

    def apply(self, state: FockVector, t: float) -> FockVector:
        out = np.zeros(self.basis.dim, dtype=complex)
        amp = state.amplitudes
        for idx, energies, modes in self.sectors:
            sub = amp[idx]
            if not np.any(sub):
                continue
            out[idx] = modes @ (np.exp(-1j * energies * t) * (modes.T @ sub))
        return FockVector(self.basis, out)


def propagate(h: np.ndarray, state: FockVector, t: float) -> FockVector:
    """One-shot exp(-i h t) |state> for an explicitly built Hermitian matrix."""
    h = np.asarray(h)
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, float(np.linalg.norm(h))):
        raise ValueError("propagation requires a Hermitian matrix")
    energies, modes = np.linalg.eigh(h)
    amp = modes @ (np.exp(-1j * energies * t) * (modes.conj().T @ state.amplitudes))
    return FockVector(state.basis, amp)


def vacuum_vector(basis: FockBasis) -> FockVector:
    amp = np.zeros(basis.dim, dtype=complex)
    amp[basis.index(0, 0)] = 1.0
    return FockVector(basis, amp)


def fock_vector(basis: FockBasis, n_a: int, n_b: int) -> FockVector:
    amp = np.zeros(basis.dim, dtype=complex)
    amp[basis.index(n_a, n_b)] = 1.0
    return FockVector(basis, amp)


def squeezed_mode_amplitudes(s: float, cutoff: int) -> np.ndarray:
    """Number-basis amplitudes of a single squeezed mode with +sinh(s) pair moment.

    Matches the covariance convention of states.squeezed_pair: <a^2> = sinh(2s)/2,
    so the even amplitudes carry (+tanh s)^k.
    """
    amp = np.zeros(cutoff + 1)
    th = np.tanh(s)
    for k in range(0, cutoff + 1, 2):
        half = k // 2
        amp[k] = th**half * math.sqrt(math.factorial(k)) / (2.0**half * math.factorial(half))
    return amp / math.sqrt(math.cosh(s))


def squeezed_vector(basis: FockBasis, s: float) -> tuple[FockVector, float]:
    """Truncated squeezed-pair state and the discarded weight before renormalization."""
    mode = squeezed_mode_amplitudes(s, basis.cutoff)
    amp = np.kron(mode, mode).astype(complex)
    weight = float(np.sum(np.abs(amp) ** 2))
    discarded = 1.0 - weight
    if discarded > TAIL_TOL:
        raise TruncationError(f"initial squeezed state loses weight {discarded:.3e} at cutoff {basis.cutoff}")
    amp /= math.sqrt(weight)
    return FockVector(basis, amp), discarded


def initial_vector(basis: FockBasis, initial: InitialState) -> tuple[FockVector, float]:
    if initial.kind == "vacuum":
        return vacuum_vector(basis), 0.0
    if initial.kind == "squeezed":
        return squeezed_vector(basis, initial.s)
    return fock_vector(basis, initial.n_a, initial.n_b), 0.0


@dataclass(frozen=True)
class OraclePoint:
    """Oracle outputs at one time: overlap fidelity, excitation surplus, tail."""

    fidelity: float
    delta_n: float
    tail_weight: float


@lru_cache(maxsize=6)
def _cached_propagator(p: OscillatorParams, cutoff: int, variant: str) -> SectorPropagator:
    return SectorPropagator(p, FockBasis(cutoff), variant)


class FockOracle:
    """Paired full/RWA propagation of one parameter set at a fixed cutoff."""

    def __init__(self, p: OscillatorParams, cutoff: int):
        self.params = p
        self.basis = FockBasis(cutoff)
        self.full = _cached_propagator(p, cutoff, "full")
        self.rwa = _cached_propagator(p, cutoff, "rwa")

    def evolved_pair(self, initial: InitialState, t: float) -> tuple[FockVector, FockVector, float]:
        psi0, discarded = initial_vector(self.basis, initial)
        return self.full.apply(psi0, t), self.rwa.apply(psi0, t), discarded

    def compare(self, initial: InitialState, t: float) -> OraclePoint:
        psi_full, psi_rwa, discarded = self.evolved_pair(initial, t)
        tail = max(psi_full.tail_weight(), psi_rwa.tail_weight(), discarded)
        if tail > TAIL_TOL:
            raise TruncationError(f"truncation tail {tail:.3e} exceeds {TAIL_TOL} at cutoff {self.basis.cutoff}")
        overlap = np.vdot(psi_rwa.amplitudes, psi_full.amplitudes)
        fid = float(abs(overlap) ** 2)
        d_n = psi_full.number_expectation() - psi_rwa.number_expectation()
        return OraclePoint(fidelity=fid, delta_n=d_n, tail_weight=tail)


def oracle_fidelity(p: OscillatorParams, initial: InitialState, t: float, cutoff: int) -> float:
    """Overlap fidelity |<psi_rwa(t)|psi_full(t)>|^2 on the truncated basis."""
    return FockOracle(p, cutoff).compare(initial, t).fidelity


def oracle_delta_n(p: OscillatorParams, initial: InitialState, t: float, cutoff: int) -> float:
    """Excitation surplus of the full over the RWA propagation."""
    return FockOracle(p, cutoff).compare(initial, t).delta_n


def fock_bound(n_a: int, n_b: int, g: float, omega: float, t: float) -> float:
    """Resonant worst-case bound on ||(U - U_RWA)|n_a, n_b>||."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    total = n_a + n_b
    return 2.0 * (g / omega) * (total + 4) ** 2 * (1.0 + 6.0 * g * t * (total + 4))


@dataclass(frozen=True)
class BoundCheckResult:
    z_exact: float
    z_max: float
    satisfied: bool


def _propagation_distance(p: OscillatorParams, n_a: int, n_b: int, t: float, cutoff: int) -> float:
    oracle = FockOracle(p, cutoff)
    psi_full, psi_rwa, _ = oracle.evolved_pair(InitialState("fock", n_a=n_a, n_b=n_b), t)
    return float(np.linalg.norm(psi_full.amplitudes - psi_rwa.amplitudes))


def bound_check(n_a: int, n_b: int, p: OscillatorParams, t: float, cutoff: int) -> BoundCheckResult:
    """Exact propagation distance against the analytic bound, on resonance.

    The distance is recomputed at double the cutoff; a shift beyond the
    certification tolerance means the truncation is too small.
    """
    if abs(p.omega_a - p.omega_b) > 1e-12:
        raise ValueError("the bound is derived on resonance")
    if p.g_bs != p.g_sq:
        raise ValueError("the bound compares equal couplings against their RWA")
    z_base = _propagation_distance(p, n_a, n_b, t, cutoff)
    z_doubled = _propagation_distance(p, n_a, n_b, t, min(2 * cutoff, MAX_CUTOFF))
    if abs(z_doubled - z_base) > BOUND_CERT_TOL:
        raise TruncationError(
            f"doubling the cutoff moves the distance by {abs(z_doubled - z_base):.3e}; raise the cutoff"
        )
    z_max = fock_bound(n_a, n_b, p.g_bs, p.omega_a, t)
    return BoundCheckResult(z_exact=z_doubled, z_max=z_max, satisfied=z_doubled <= z_max)
