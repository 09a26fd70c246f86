"""Two coupled oscillators: parameter validation, normal modes, and evolutions.

Conventions (used everywhere downstream):
  * operator ordering (a, b, a^dag, b^dag),
  * symplectic form Omega = -i diag(I2, -I2),
  * hbar = 1, all frequencies and couplings angular (rad/time).

A 4x4 symplectic matrix is stored by its 2x2 blocks (alpha, beta); the full
matrix is ((alpha, beta), (beta*, alpha*)).  The beam-splitter-only evolution
is block diagonal (beta = 0); a nonzero beta block signals squeezing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import matcore

__all__ = [
    "OMEGA",
    "UnstableParamsError",
    "OscillatorParams",
    "SymplecticMatrix",
    "NormalModes",
    "hamiltonian_matrix",
    "normal_mode_frequencies",
    "critical_coupling",
    "diagonalize",
    "full_evolution",
    "rwa_block",
    "rwa_evolution",
    "time_evolution",
    "evolution_via_exponential",
    "effective_evolution",
    "SYMPLECTIC_TOL",
]

_I2 = np.eye(2)
OMEGA = -1j * np.block([[_I2, np.zeros((2, 2))], [np.zeros((2, 2)), -_I2]])

SYMPLECTIC_TOL = 1e-10
# Margin below the critical coupling under which parameters are rejected:
# kappa_minus -> 0 there and every downstream formula turns singular.
CRITICAL_MARGIN = 1e-9


class UnstableParamsError(ValueError):
    """Raised when couplings reach or exceed the stability boundary."""


@dataclass(frozen=True)
class OscillatorParams:
    """Frequencies and couplings of the two-oscillator Hamiltonian.

    ``g_bs`` drives the excitation-conserving beam-splitter term, ``g_sq`` the
    two-mode squeezing term.  Stability requires the 4x4 Hamiltonian matrix to
    stay positive definite, which is exactly |g_bs| + |g_sq| < sqrt(wa*wb);
    this is also the first boundary crossing of the normal-mode reality
    constraint along the coupling ray.
    """

    omega_a: float
    omega_b: float
    g_bs: float = 0.0
    g_sq: float = 0.0

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "g_bs", "g_sq"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega_a <= 0 or self.omega_b <= 0:
            raise ValueError("oscillator frequencies must be positive")
        bound = np.sqrt(self.omega_a * self.omega_b)
        if abs(self.g_bs) + abs(self.g_sq) >= bound * (1.0 - CRITICAL_MARGIN):
            raise UnstableParamsError(
                f"couplings |g_bs|+|g_sq| = {abs(self.g_bs) + abs(self.g_sq):.6g} reach the "
                f"critical coupling {critical_coupling_value(self.omega_a, self.omega_b, self.g_bs, self.g_sq):.6g} "
                f"(stability bound sqrt(omega_a*omega_b) = {bound:.6g})"
            )

    @property
    def equal_couplings(self) -> bool:
        return self.g_bs == self.g_sq

    @property
    def resonant(self) -> bool:
        return abs(self.omega_a**2 - self.omega_b**2) < 1e-12


def critical_coupling_value(omega_a: float, omega_b: float, g_bs: float, g_sq: float) -> float:
    """Critical coupling magnitude along the ray through (g_bs, g_sq).

    Scaling the coupling pair by c keeps stability while
    c*(|g_bs|+|g_sq|) < sqrt(wa*wb); the returned value is the magnitude of
    the larger coupling at the first boundary crossing.  Equal couplings give
    sqrt(wa*wb)/2, a single coupling gives sqrt(wa*wb).
    """
    bound = np.sqrt(omega_a * omega_b)
    total = abs(g_bs) + abs(g_sq)
    if total == 0.0:
        return bound / 2.0  # degenerate ray; quote the equal-couplings value
    return bound * max(abs(g_bs), abs(g_sq)) / total


def critical_coupling(p: OscillatorParams) -> float:
    return critical_coupling_value(p.omega_a, p.omega_b, p.g_bs, p.g_sq)


@dataclass(frozen=True)
class SymplecticMatrix:
    """2x2 blocks (alpha, beta) of a 4x4 symplectic matrix in (a, b, a+, b+) ordering."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=complex))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=complex))
        defect = self.bogoliubov_defect()
        scale = max(1.0, float(np.linalg.norm(self.alpha) ** 2 + np.linalg.norm(self.beta) ** 2))
        if defect > SYMPLECTIC_TOL * scale:
            raise ValueError(f"blocks violate the Bogoliubov identities (defect {defect:.3e})")

    def bogoliubov_defect(self) -> float:
        a, b = self.alpha, self.beta
        d1 = np.max(np.abs(a @ a.conj().T - b @ b.conj().T - _I2))
        d2 = np.max(np.abs(a @ b.T - b @ a.T))
        return float(max(d1, d2))

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.block([[a, b], [b.conj(), a.conj()]])

    @property
    def inverse(self) -> "SymplecticMatrix":
        # s^-1 = -Omega s^dag Omega, i.e. blocks (alpha^dag, -beta^T).
        return SymplecticMatrix(self.alpha.conj().T, -self.beta.T)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        a = self.alpha @ other.alpha + self.beta @ other.beta.conj()
        b = self.alpha @ other.beta + self.beta @ other.alpha.conj()
        return SymplecticMatrix(a, b)

    def symplectic_defect(self) -> float:
        s = self.matrix
        return float(np.max(np.abs(s @ OMEGA @ s.conj().T - OMEGA)))

    @staticmethod
    def identity() -> "SymplecticMatrix":
        return SymplecticMatrix(np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex))

    @staticmethod
    def from_matrix(s4: np.ndarray) -> "SymplecticMatrix":
        s4 = matcore.check_matrix(s4, "symplectic matrix")
        if s4.shape[0] != 4:
            raise ValueError("expected a 4x4 matrix")
        return SymplecticMatrix(s4[:2, :2], s4[:2, 2:])


@dataclass(frozen=True)
class NormalModes:
    """Normal-mode data of the equal-couplings Hamiltonian."""

    kappa_plus: float
    kappa_minus: float
    theta: float
    diagonalizer: SymplecticMatrix

    def __post_init__(self):
        if not (self.kappa_plus >= self.kappa_minus > 0):
            raise ValueError("normal-mode frequencies must satisfy kappa_+ >= kappa_- > 0")


def hamiltonian_matrix(p: OscillatorParams) -> np.ndarray:
    """The 4x4 Hamiltonian matrix ((U, V), (V, U)) of the coupled pair."""
    u = np.array([[p.omega_a, p.g_bs], [p.g_bs, p.omega_b]])
    v = p.g_sq * np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.block([[u, v], [v, u]]).astype(complex)


def rwa_hamiltonian_matrix(p: OscillatorParams) -> np.ndarray:
    """Hamiltonian matrix with the squeezing coupling dropped."""
    return hamiltonian_matrix(OscillatorParams(p.omega_a, p.omega_b, p.g_bs, 0.0))


def normal_mode_frequencies(p: OscillatorParams) -> tuple[float, float]:
    """Normal-mode frequencies (kappa_+, kappa_-), both real and positive."""
    wa2, wb2 = p.omega_a**2, p.omega_b**2
    dg2 = p.g_bs**2 - p.g_sq**2
    gamma2 = (wa2 - wb2) ** 2 + 8.0 * p.omega_a * p.omega_b * (p.g_bs**2 + p.g_sq**2) + 4.0 * (wa2 + wb2) * dg2
    gamma = np.sqrt(gamma2)
    kp2 = 0.5 * ((wa2 + wb2) + 2.0 * dg2 + gamma)
    km2 = 0.5 * ((wa2 + wb2) + 2.0 * dg2 - gamma)
    if km2 <= 0.0:
        raise UnstableParamsError(
            f"normal mode squared frequency {km2:.3e} is not positive; "
            f"critical coupling {critical_coupling(p):.6g}"
        )
    return float(np.sqrt(kp2)), float(np.sqrt(km2))


def _mixing_angle(p: OscillatorParams) -> float:
    """Angle diagonalizing the equal-couplings Hamiltonian, in [0, pi/2].

    On resonance the defining relation degenerates and the angle is pi/4.
    """
    if p.resonant:
        return np.pi / 4.0
    g = p.g_bs
    two_theta = np.arctan2(4.0 * g * np.sqrt(p.omega_a * p.omega_b), p.omega_a**2 - p.omega_b**2)
    return 0.5 * two_theta


@lru_cache(maxsize=256)
def _diagonalize_cached(omega_a: float, omega_b: float, g: float) -> NormalModes:
    p = OscillatorParams(omega_a, omega_b, g, g)
    kp, km = normal_mode_frequencies(p)
    th = _mixing_angle(p)
    c, s = np.cos(th), np.sin(th)
    wa, wb = p.omega_a, p.omega_b
    alpha = np.array(
        [
            [(kp + wa) / (2.0 * np.sqrt(kp * wa)) * c, (kp + wb) / (2.0 * np.sqrt(kp * wb)) * s],
            [(km + wa) / (2.0 * np.sqrt(km * wa)) * s, -(km + wb) / (2.0 * np.sqrt(km * wb)) * c],
        ]
    )
    beta = np.array(
        [
            [(kp - wa) / (2.0 * np.sqrt(kp * wa)) * c, (kp - wb) / (2.0 * np.sqrt(kp * wb)) * s],
            [(km - wa) / (2.0 * np.sqrt(km * wa)) * s, -(km - wb) / (2.0 * np.sqrt(km * wb)) * c],
        ]
    )
    return NormalModes(kp, km, th, SymplecticMatrix(alpha, beta))


def diagonalize(p: OscillatorParams) -> NormalModes:
    """Closed-form diagonalizer; only the equal-couplings family has one."""
    if not p.equal_couplings:
        raise ValueError("closed-form diagonalization requires g_bs == g_sq")
    if p.g_bs < 0:
        raise ValueError("closed-form diagonalization requires g >= 0")
    return _diagonalize_cached(p.omega_a, p.omega_b, p.g_bs)


def full_evolution(nm: NormalModes, t: float) -> SymplecticMatrix:
    """Closed-form evolution generated by the equal-couplings Hamiltonian."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    al, be = nm.diagonalizer.alpha, nm.diagonalizer.beta
    ph_m = np.diag([np.exp(-1j * nm.kappa_plus * t), np.exp(-1j * nm.kappa_minus * t)])
    ph_p = np.diag([np.exp(1j * nm.kappa_plus * t), np.exp(1j * nm.kappa_minus * t)])
    a = al.T @ ph_m @ al - be.T @ ph_p @ be
    b = al.T @ ph_m @ be - be.T @ ph_p @ al
    return SymplecticMatrix(a, b)


def rwa_block(p: OscillatorParams, t: float) -> np.ndarray:
    """The unitary 2x2 block of the beam-splitter-only evolution."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    w_delta = 0.5 * (p.omega_a - p.omega_b)
    w_sigma = 0.5 * (p.omega_a + p.omega_b)
    w_bs = np.sqrt(w_delta**2 + p.g_bs**2)
    if w_bs == 0.0:
        return np.exp(-1j * w_sigma * t) * np.eye(2, dtype=complex)
    c2 = w_delta / w_bs
    s2 = p.g_bs / w_bs
    chi = np.cos(w_bs * t) - 1j * c2 * np.sin(w_bs * t)
    xi = s2 * np.sin(w_bs * t)
    return np.exp(-1j * w_sigma * t) * np.array([[chi, -1j * xi], [-1j * xi, np.conj(chi)]])


def rwa_evolution(p: OscillatorParams, t: float) -> SymplecticMatrix:
    return SymplecticMatrix(rwa_block(p, t), np.zeros((2, 2), dtype=complex))


def evolution_via_exponential(p: OscillatorParams, t: float) -> SymplecticMatrix:
    """Evolution from the matrix exponential of the generator; any couplings."""
    s4 = matcore.mat_exp(OMEGA @ hamiltonian_matrix(p), t)
    return SymplecticMatrix.from_matrix(s4)


def time_evolution(p: OscillatorParams, t: float) -> SymplecticMatrix:
    """Full evolution; closed form when available, exponential route otherwise."""
    if p.equal_couplings and p.g_bs >= 0:
        return full_evolution(diagonalize(p), t)
    return evolution_via_exponential(p, t)


def effective_evolution(p: OscillatorParams, t: float) -> SymplecticMatrix:
    """S_eff(t): the RWA-frame residual evolution, identity iff the two coincide."""
    s = time_evolution(p, t)
    u = rwa_block(p, t)
    return SymplecticMatrix(u.conj().T @ s.alpha, u.conj().T @ s.beta)
