"""SVD precoding and the three sensing-assisted receive filter designs.

All receivers are built from ReceiverKnowledge only: uplink channels,
precoders, the jammer arrival angles, and the noise floor.  Filters are
dimensionless; every post-equalization SINR is invariant to rescaling them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ReceiverKnowledge, jammer_manifold
from .metrics import interference_matrices, signal_vectors
from .numerics import (
    SdpInfeasibleError,
    hermitian_eig,
    solve_small_sdp,
    symmetrize,
)


class DegenerateScenarioError(RuntimeError):
    """Scenario is too degenerate for the requested design (resample it)."""


@dataclass(frozen=True)
class FilterBank:
    """One receive equalizer per user stream, rows of ``vectors``.

    ``fallback_users`` lists users whose QoS target was infeasible and who
    received the analytic filter instead; ``recovery_warnings`` lists users
    whose rank-1 recovery missed the QoS target by more than 2%.
    """

    vectors: np.ndarray
    fallback_users: tuple[int, ...] = ()
    recovery_warnings: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("filters must be finite")
        if np.any(np.linalg.norm(self.vectors, axis=-1) == 0):
            raise ValueError("filters must be nonzero")

    @property
    def num_users(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class QosTarget:
    """Minimum jammer-free SINR, linear units."""

    gamma0: float

    def __post_init__(self) -> None:
        if self.gamma0 < 0:
            raise ValueError("QoS target must be nonnegative")

    @classmethod
    def from_db(cls, gamma0_db: float) -> "QosTarget":
        return cls(10.0 ** (gamma0_db / 10.0))


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the first non-negligible entry is real positive."""
    mags = np.abs(v)
    idx = np.argmax(mags > 1e-12 * mags.max())
    return v * (v[idx].conj() / mags[idx])


def svd_precoder(h: np.ndarray, p_a: float) -> np.ndarray:
    """sqrt(P_A) times the right-singular vector of the largest singular
    value, with a deterministic global phase."""
    if np.linalg.norm(h) == 0:
        raise DegenerateScenarioError("zero channel matrix has no precoder")
    _, _, vh = np.linalg.svd(h)
    return np.sqrt(p_a) * fix_phase(vh[0].conj())


def beampattern(v: np.ndarray, a_b: np.ndarray) -> float:
    """Squared response toward the manifold columns: ||A_B^H v||^2."""
    return float(np.linalg.norm(a_b.conj().T @ v) ** 2)


def analytic_receiver(kn: ReceiverKnowledge, eta: float) -> FilterBank:
    """Closed-form max of the SINR lower bound (a Rayleigh quotient):
    v_k = (B_k + eta A_B A_B^H)^{-1} H_k w_k.

    eta is a hyperparameter trading jammer suppression against noise and
    interference whitening; eta = 0 is the jammer-unaware MMSE filter.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    a_b = jammer_manifold(kn.jammer_aoas, kn.bs_geometry)
    suppress = eta * (a_b @ a_b.conj().T)
    h = signal_vectors(kn)
    b = interference_matrices(kn)
    vectors = np.linalg.solve(b + suppress[None, :, :], h[..., None])[..., 0]
    return FilterBank(vectors=vectors)


def pad_angles(jammer_aoas, n_b: int, user_aoas) -> np.ndarray:
    """Top up the resolved jammer AoAs to ``n_b`` distinct angles.

    Candidates come from a 1-degree grid over (-90, 90); points within 2
    degrees of any resolved jammer AoA or user AoA center are skipped.  The
    survivors are picked to cover sin(angle) space evenly, because a ULA
    manifold's conditioning is set by the spacing of the sines (a uniform
    sin grid is DFT-like), not of the angles.  Angles are radians in and
    out.
    """
    jammer_aoas = np.atleast_1d(np.asarray(jammer_aoas, dtype=float))
    if len(jammer_aoas) >= n_b:
        return jammer_aoas.copy()
    needed = n_b - len(jammer_aoas)
    grid = np.arange(-89.0, 90.0, 1.0)
    blocked_deg = np.rad2deg(
        np.concatenate([jammer_aoas, np.atleast_1d(np.asarray(user_aoas, float))])
    )
    admissible = grid[np.all(np.abs(grid[:, None] - blocked_deg) > 2.0, axis=1)]
    if len(admissible) < needed:
        raise RuntimeError("padding grid exhausted")
    sines = np.sin(np.deg2rad(admissible))
    targets = np.linspace(sines.min(), sines.max(), needed)
    chosen: list[int] = []
    taken = np.zeros(len(admissible), dtype=bool)
    for t in targets:
        order = np.argsort(np.abs(sines - t))
        idx = next(int(i) for i in order if not taken[i])
        taken[idx] = True
        chosen.append(idx)
    padding = np.deg2rad(admissible[np.sort(chosen)])
    if len(np.unique(padding)) != needed:
        raise RuntimeError("padding grid produced duplicate angles")
    return np.concatenate([jammer_aoas, padding])


def _zf_filters(p: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rows of the beampattern-minimal zero-forcing bank:
    v_k = X^{-1} P (P^H X^{-1} P)^{-1} e_k."""
    y = np.linalg.solve(x, p)
    gram = p.conj().T @ y
    return np.linalg.solve(gram.conj().T, y.conj().T).conj()


PAD_WEIGHT = 1e-8


def zf_metric(kn: ReceiverKnowledge, padded_aoas) -> np.ndarray:
    """Quadratic form X for the ZF design: the resolved jammer angles carry
    unit weight (they are the beampattern being minimized) while the padding
    angles enter at weight PAD_WEIGHT, acting as the full-rank regularizer
    that makes X invertible.  The jammer response of the resulting filters
    sits at the numerical-null floor, so the design stays power-resilient.
    Splitting by angle value keeps the metric a function of the padded set,
    not its order."""
    padded = np.atleast_1d(np.asarray(padded_aoas, dtype=float))
    resolved = np.asarray(kn.jammer_aoas, dtype=float)
    is_resolved = np.any(
        np.abs(padded[:, None] - resolved[None, :]) < 1e-12, axis=1
    )
    a_all = jammer_manifold(padded, kn.bs_geometry)
    weights = np.where(is_resolved, 1.0, PAD_WEIGHT)
    return (a_all * weights) @ a_all.conj().T


def zf_receiver(kn: ReceiverKnowledge, padded_aoas) -> FilterBank:
    """Zero inter-user interference (P^H v_k = e_k) while minimizing the
    beampattern toward the resolved jammer angles; the padded angles keep
    the metric full rank so the closed form applies."""
    p = signal_vectors(kn).T
    sing = np.linalg.svd(p, compute_uv=False)
    if sing[-1] <= 1e-10 * sing[0]:
        raise DegenerateScenarioError("effective channel matrix is rank deficient")
    x = zf_metric(kn, padded_aoas)
    w, _ = hermitian_eig(x)
    if w[0] <= 1e-12 * max(w[-1], 1.0):
        warnings.warn("padded manifold is ill conditioned, adding ridge")
        x = x + 1e-8 * (np.trace(x).real / kn.bs_antennas) * np.eye(kn.bs_antennas)
    return FilterBank(vectors=_zf_filters(p, x))


def _jammer_free_sinr(v: np.ndarray, h_k: np.ndarray, b_k: np.ndarray) -> float:
    return float(abs(np.vdot(v, h_k)) ** 2 / np.vdot(v, b_k @ v).real)


def minsinr_receiver(
    kn: ReceiverKnowledge, padded_aoas, qos: QosTarget
) -> FilterBank:
    """Per user: minimize the beampattern over the padded angles subject to a
    jammer-free SINR floor, via the rank-relaxed semidefinite program

        min tr(X V)  s.t.  tr(A_k V) - gamma0 tr(B_k V) >= 0, tr V = 1, V >= 0

    and recover the filter as the principal eigenvector of V.  Users whose
    target is infeasible (gamma0 above the jammer-free optimum) fall back to
    the analytic filter with eta = 1 and are flagged.
    """
    n = kn.bs_antennas
    a_pad = jammer_manifold(padded_aoas, kn.bs_geometry)
    cost = symmetrize(a_pad @ a_pad.conj().T)
    h = signal_vectors(kn)
    b = interference_matrices(kn)
    eye = np.eye(n)

    vectors = np.empty((kn.num_users, n), dtype=complex)
    fallbacks: list[int] = []
    recovery: list[int] = []
    fallback_bank: FilterBank | None = None
    for k in range(kn.num_users):
        a_k = np.outer(h[k], h[k].conj())
        gamma_max = np.vdot(h[k], np.linalg.solve(b[k], h[k])).real
        v_sdp = None
        if qos.gamma0 <= gamma_max:
            try:
                v_sdp = solve_small_sdp(
                    cost,
                    [(a_k - qos.gamma0 * b[k], 0.0, ">="), (eye, 1.0, "==")],
                    dim=n,
                )
            except SdpInfeasibleError:
                v_sdp = None
        if v_sdp is None:
            if fallback_bank is None:
                fallback_bank = analytic_receiver(kn, eta=1.0)
            vectors[k] = fallback_bank.vectors[k]
            fallbacks.append(k)
            continue
        w, u = hermitian_eig(v_sdp)
        v_k = fix_phase(u[:, -1])
        if _jammer_free_sinr(v_k, h[k], b[k]) < 0.98 * qos.gamma0:
            warnings.warn(f"rank-1 recovery missed the QoS target for user {k}")
            recovery.append(k)
        vectors[k] = v_k
    return FilterBank(
        vectors=vectors,
        fallback_users=tuple(fallbacks),
        recovery_warnings=tuple(recovery),
    )
