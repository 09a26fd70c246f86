"""Comparison quantities between the full and RWA-evolved states.

Central object: the effective Bogoliubov block B_f of
S_f(t) = s0^-1 S_RWA^dag(t) S(t) s0.  The fidelity between the two evolved
states is 1/sqrt(det(I + B_f^dag B_f)); the companion block A_f provides the
mandatory internal cross-check 1/|det A_f|, and the singular values of B_f
give the squeezing parameters r_+- with F = 1/(cosh r_+ cosh r_-).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import OMEGA, OscillatorParams, SymplecticMatrix, rwa_block, time_evolution
from .states import CovarianceMatrix, NonPhysicalStateError, PureStateFactor, vacuum

__all__ = [
    "FidelityReport",
    "gaussian_fidelity",
    "effective_bogoliubov",
    "fidelity_eff",
    "bloch_messiah",
    "delta_n",
    "number_moments",
    "vacuum_fidelity_moments",
    "CROSS_CHECK_TOL",
    "RADICAND_TOL",
]

CROSS_CHECK_TOL = 1e-10
RADICAND_TOL = 1e-9

_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class FidelityReport:
    """Fidelity and the derived distance measures at one time point."""

    fidelity: float
    bures: float
    angle: float
    r_plus: float
    r_minus: float


def _safe_sqrt(x: float, what: str) -> float:
    if x < -RADICAND_TOL:
        raise NonPhysicalStateError(f"negative radicand in {what}: {x:.3e}")
    return float(np.sqrt(max(x, 0.0)))


def gaussian_fidelity(cov1: CovarianceMatrix, cov2: CovarianceMatrix) -> float:
    """Fidelity of two (possibly mixed) zero-mean two-mode Gaussian states.

    When either state is pure, Lambda vanishes and Gamma = Delta, collapsing
    the general expression to 4/sqrt(Gamma); that branch is taken explicitly
    because the general form loses half the significant digits at the pure
    boundary (a square root of the rounding-level Lambda enters linearly).
    """
    s1, s2 = cov1.sigma, cov2.sigma
    ident = np.eye(4, dtype=complex)
    gam = float(np.real(np.linalg.det(ident - OMEGA @ s1 @ OMEGA @ s2)))
    lam = float(np.real(np.linalg.det(ident + 1j * OMEGA @ s1) * np.linalg.det(ident + 1j * OMEGA @ s2)))
    root_g = _safe_sqrt(gam, "Gamma")
    if abs(lam) <= 1e-10 * max(1.0, abs(gam)):
        if root_g <= 0.0:
            raise NonPhysicalStateError("fidelity denominator is not positive")
        fid = 4.0 / root_g
    else:
        delta = float(np.real(np.linalg.det(s1 + s2)))
        root_l = _safe_sqrt(lam, "Lambda")
        inner = _safe_sqrt((root_l + root_g) ** 2 - delta, "fidelity discriminant")
        denom = root_l + root_g - inner
        if denom <= 0.0:
            raise NonPhysicalStateError("fidelity denominator is not positive")
        fid = 4.0 / denom
    if fid > 1.0 + RADICAND_TOL:
        raise NonPhysicalStateError(f"fidelity {fid} exceeds one beyond tolerance")
    return float(min(max(fid, 0.0), 1.0))


def effective_bogoliubov(factor: PureStateFactor, p: OscillatorParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Blocks (A_f, B_f) of s0^-1 S_RWA^dag(t) S(t) s0."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    s = time_evolution(p, t)
    u = rwa_block(p, t)
    a_eff = u.conj().T @ s.alpha
    b_eff = u.conj().T @ s.beta
    al0, be0 = factor.alpha, factor.beta
    a_f = (
        al0.conj().T @ a_eff @ al0
        + al0.conj().T @ b_eff @ be0.conj()
        - be0.T @ b_eff.conj() @ al0
        - be0.T @ a_eff.conj() @ be0.conj()
    )
    b_f = (
        al0.conj().T @ a_eff @ be0
        + al0.conj().T @ b_eff @ al0.conj()
        - be0.T @ b_eff.conj() @ be0
        - be0.T @ a_eff.conj() @ al0.conj()
    )
    SymplecticMatrix(a_f, b_f)  # validates the assembled S_f
    return a_f, b_f


def bloch_messiah(b_block: np.ndarray) -> tuple[float, float]:
    """Squeezing parameters (r_+, r_-) from the singular values of a beta block.

    Singular values are computed from the closed-form eigenvalues of the 2x2
    Hermitian product B^dag B, and r = arcsinh(singular value).
    """
    b = np.asarray(b_block, dtype=complex)
    m = b.conj().T @ b
    half_tr = 0.5 * float(np.real(m[0, 0] + m[1, 1]))
    off = 0.25 * abs(m[0, 0] - m[1, 1]) ** 2 + abs(m[0, 1]) ** 2
    spread = float(np.sqrt(max(np.real(off), 0.0)))
    lam_plus = max(half_tr + spread, 0.0)
    lam_minus = max(half_tr - spread, 0.0)
    return float(np.arcsinh(np.sqrt(lam_plus))), float(np.arcsinh(np.sqrt(lam_minus)))


def fidelity_eff(factor: PureStateFactor, p: OscillatorParams, t: float) -> FidelityReport:
    """Fidelity between the full- and RWA-evolved images of the initial state."""
    a_f, b_f = effective_bogoliubov(factor, p, t)
    det_arg = np.real(np.linalg.det(_I2 + b_f.conj().T @ b_f))
    fid = 1.0 / np.sqrt(det_arg)
    fid_a = 1.0 / abs(np.linalg.det(a_f))
    if abs(fid - fid_a) > CROSS_CHECK_TOL * max(1.0, fid):
        raise ArithmeticError(f"fidelity routes disagree: {fid} vs {fid_a}")
    r_plus, r_minus = bloch_messiah(b_f)
    fid = float(min(fid, 1.0))
    angle = 0.5 * float(np.arccos(min(1.0, np.sqrt(fid))))
    bures = _safe_sqrt(2.0 * (1.0 - np.sqrt(fid)), "Bures distance")
    return FidelityReport(fidelity=fid, bures=bures, angle=angle, r_plus=r_plus, r_minus=r_minus)


def delta_n(factor: PureStateFactor, p: OscillatorParams, t: float) -> float:
    """Average excitation surplus of the full evolution over the RWA one.

    The RWA evolution conserves the total number, so the passive 2x2 block
    cancels and the result depends only on the full evolution's blocks:
        dN = Tr(B+B) + 2 Re Tr(B+B beta0* beta0^T) + 2 Re Tr(B+A alpha0 beta0^T).
    Vanishes identically when B = 0.
    """
    s = time_evolution(p, t)
    a, b = s.alpha, s.beta
    al0, be0 = factor.alpha, factor.beta
    m = b.conj().T @ b
    term1 = float(np.real(np.trace(m)))
    term2 = 2.0 * float(np.real(np.trace(m @ be0.conj() @ be0.T)))
    term3 = 2.0 * float(np.real(np.trace(b.conj().T @ a @ al0 @ be0.T)))
    return term1 + term2 + term3


def delta_n_from_trace(factor: PureStateFactor, p: OscillatorParams, t: float) -> float:
    """Same quantity from the covariance-trace definition; consistency route."""
    sigma0 = factor.covariance.sigma
    s4 = time_evolution(p, t).matrix
    return float(np.real(np.trace(s4 @ sigma0 @ s4.conj().T) - np.trace(sigma0)) / 4.0)


def number_moments(a_block: np.ndarray, b_block: np.ndarray) -> tuple[float, float]:
    """Vacuum expectation (dN, dN^2) of the number change under a Bogoliubov pair.

    dN   = Tr(B+B)
    dN^2 = Tr(A A+ B B+) + Tr(B A^T B* A+) + (Tr B+B)^2
    """
    a = np.asarray(a_block, dtype=complex)
    b = np.asarray(b_block, dtype=complex)
    dn = float(np.real(np.trace(b.conj().T @ b)))
    dn2 = float(
        np.real(
            np.trace(a @ a.conj().T @ b @ b.conj().T)
            + np.trace(b @ a.T @ b.conj() @ a.conj().T)
        )
    ) + dn**2
    return dn, dn2


def vacuum_fidelity_moments(p: OscillatorParams, t: float) -> tuple[float, float, float, float]:
    """(F^-2, dN, dN^2, variance) for an initial vacuum, via number statistics.

    F^-2 = 1 + (3/2) dN + (1/2) dN^2_mean - (1/4) var, where dN^2_mean is the
    square of the mean and var = dN^2 - dN^2_mean.  Cross-checked against the
    determinant route.
    """
    a_f, b_f = effective_bogoliubov(vacuum(), p, t)
    dn, dn2 = number_moments(a_f, b_f)
    var = dn2 - dn**2
    f_inv2 = 1.0 + 1.5 * dn + 0.5 * dn**2 - 0.25 * var
    det_route = float(np.real(np.linalg.det(_I2 + b_f.conj().T @ b_f)))
    if abs(f_inv2 - det_route) > CROSS_CHECK_TOL * max(1.0, det_route):
        raise ArithmeticError(f"moment route {f_inv2} disagrees with determinant route {det_route}")
    return f_inv2, dn, dn2, var
