"""SINR, rate, and lower-bound computations.

Both the pre-equalization SINR (the matched bound, "A" side) and the
post-equalization SINR of a linear filter ("B" side) are evaluated here, in
linear units; rates are log2(1 + SINR) in bits/s/Hz.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .channel import jammer_manifold
from .numerics import symmetrize

if TYPE_CHECKING:
    from .channel import ReceiverKnowledge, Scenario
    from .txrx import FilterBank


def signal_vectors(obj) -> np.ndarray:
    """Stack of effective signal vectors h_k = H_k w_k, shape (K, N_B)."""
    return np.stack([h @ w for h, w in zip(obj.channels, obj.precoders)])


def interference_matrices(obj) -> np.ndarray:
    """Per-user interference-plus-noise covariances without the jammer term:
    B_k = sum_{k' != k} h_k' h_k'^H + sigma^2 I, shape (K, N_B, N_B)."""
    h = signal_vectors(obj)
    outers = np.einsum("ki,kj->kij", h, h.conj())
    total = outers.sum(axis=0)
    eye = np.eye(h.shape[1])
    return total[None, :, :] - outers + obj.sigma2 * eye[None, :, :]


def jammer_cross_covariance(sc: Scenario, q) -> np.ndarray:
    """Received jammer covariance G Q G^H (zero matrix for q=None)."""
    n = sc.bs_antennas
    if q is None or np.isscalar(q):
        return np.zeros((n, n), dtype=complex)
    return symmetrize(sc.jammer_channel @ q @ sc.jammer_channel.conj().T)


def sinr_a_all(sc: Scenario, q) -> np.ndarray:
    """Pre-equalization SINRs of all users under jammer covariance q."""
    h = signal_vectors(sc)
    m = interference_matrices(sc) + jammer_cross_covariance(sc, q)[None, :, :]
    x = np.linalg.solve(m, h[..., None])[..., 0]
    return np.einsum("ki,ki->k", h.conj(), x).real


def sinr_a(sc: Scenario, q, k: int) -> float:
    """w_k^H H_k^H M_k^{-1} H_k w_k with M_k the full interference covariance."""
    return float(sinr_a_all(sc, q)[k])


def sinr_b(sc: Scenario, q, v: np.ndarray, k: int) -> float:
    """Post-equalization SINR of filter v for user k; invariant to v -> c v."""
    if np.linalg.norm(v) == 0:
        raise ValueError("equalizer must be nonzero")
    h = signal_vectors(sc)
    denom_mat = interference_matrices(sc)[k] + jammer_cross_covariance(sc, q)
    num = abs(np.vdot(v, h[k])) ** 2
    den = np.vdot(v, denom_mat @ v).real
    return float(num / den)


def compute_eta(p_j: float, n_j: int, l_g: int, jammer_gains) -> float:
    """Bound constant: P_J * N_J * L_G * ||B_G||_F for diagonal gains B_G."""
    if p_j < 0 or n_j < 0 or l_g < 0:
        raise ValueError("eta arguments must be nonnegative")
    return float(p_j * n_j * l_g * np.linalg.norm(jammer_gains))


def sinr_lower_bound(kn: ReceiverKnowledge, v: np.ndarray, k: int, eta: float) -> float:
    """Receiver-side SINR lower bound: replaces the unknown jammer term with
    eta times the beampattern toward the resolved jammer AoAs.  Tight when
    the jammer is off or when v is orthogonal to the jammer manifold."""
    if np.linalg.norm(v) == 0:
        raise ValueError("equalizer must be nonzero")
    h = signal_vectors(kn)
    a_b = jammer_manifold(kn.jammer_aoas, kn.bs_geometry)
    num = abs(np.vdot(v, h[k])) ** 2
    den = np.vdot(v, interference_matrices(kn)[k] @ v).real
    den += eta * np.linalg.norm(a_b.conj().T @ v) ** 2
    return float(num / den)


@dataclass(frozen=True)
class RateReport:
    """Per-user SINRs and rates plus the two sum rates, one evaluation pass."""

    per_user_sinr_a: tuple[float, ...]
    per_user_sinr_b: tuple[float, ...]
    per_user_rate_a: tuple[float, ...]
    per_user_rate_b: tuple[float, ...]
    sum_rate_a: float
    sum_rate_b: float


def rate_report(sc: Scenario, q, filters: FilterBank) -> RateReport:
    """Evaluate all per-user SINRs/rates for the given filters under q."""
    gam_a = sinr_a_all(sc, q)
    gam_b = np.array(
        [sinr_b(sc, q, filters.vectors[k], k) for k in range(sc.num_users)]
    )
    rate_a = np.log2(1.0 + gam_a)
    rate_b = np.log2(1.0 + gam_b)
    sum_a = float(rate_a.sum())
    sum_b = float(rate_b.sum())
    # sum rate can never exceed K times the strongest user's rate
    assert sum_a <= sc.num_users * rate_a.max() + 1e-9
    return RateReport(
        per_user_sinr_a=tuple(float(x) for x in gam_a),
        per_user_sinr_b=tuple(float(x) for x in gam_b),
        per_user_rate_a=tuple(float(x) for x in rate_a),
        per_user_rate_b=tuple(float(x) for x in rate_b),
        sum_rate_a=sum_a,
        sum_rate_b=sum_b,
    )
