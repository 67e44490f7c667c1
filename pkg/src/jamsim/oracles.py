"""Independent reference implementations used to validate the fast paths.

Everything here is deliberately written the slow, obvious way (explicit
loops, brute-force grids, whitening instead of closed forms) so the test
suite and the CLI selftest can cross-check the production code against a
second route to the same numbers.
"""

from __future__ import annotations

import numpy as np

from .channel import ArrayGeometry, PathSet, Scenario


def beamspace_naive(paths: PathSet, rx: ArrayGeometry, tx: ArrayGeometry) -> np.ndarray:
    """Triple loop over (path, row, col) with phases computed from scratch."""
    out = np.zeros((rx.elements, tx.elements), dtype=complex)
    for l in range(len(paths)):
        for r in range(rx.elements):
            for c in range(tx.elements):
                phase_r = -2.0 * np.pi * rx.spacing * r * np.sin(paths.aoas[l])
                phase_c = -2.0 * np.pi * tx.spacing * c * np.sin(paths.aods[l])
                out[r, c] += paths.gains[l] * np.exp(1j * phase_r) * np.exp(-1j * phase_c)
    return out


def sinr_a_naive(sc: Scenario, q, k: int) -> float:
    """Pre-equalization SINR assembled term by term with np.linalg.inv."""
    n = sc.bs_antennas
    m = sc.sigma2 * np.eye(n, dtype=complex)
    for kp in range(sc.num_users):
        if kp == k:
            continue
        hw = sc.channels[kp] @ sc.precoders[kp]
        m = m + np.outer(hw, hw.conj())
    if q is not None and not np.isscalar(q):
        m = m + sc.jammer_channel @ q @ sc.jammer_channel.conj().T
    hw_k = sc.channels[k] @ sc.precoders[k]
    return float((hw_k.conj() @ np.linalg.inv(m) @ hw_k).real)


def jammer_objective_naive(q, sc: Scenario) -> float:
    return max(sinr_a_naive(sc, q, k) for k in range(sc.num_users))


def largest_singular_value(h: np.ndarray, iters: int = 2000) -> float:
    """Power iteration on H^H H."""
    rng = np.random.default_rng(7)
    v = rng.standard_normal(h.shape[1]) + 1j * rng.standard_normal(h.shape[1])
    v /= np.linalg.norm(v)
    gram = h.conj().T @ h
    for _ in range(iters):
        v = gram @ v
        v /= np.linalg.norm(v)
    return float(np.sqrt((v.conj() @ gram @ v).real))


def rayleigh_quotient_max(a: np.ndarray, b: np.ndarray) -> float:
    """max_v v^H A v / v^H B v via whitening with B^{-1/2}."""
    w, u = np.linalg.eigh(0.5 * (b + b.conj().T))
    whiten = (u / np.sqrt(w)) @ u.conj().T
    inner = whiten @ (0.5 * (a + a.conj().T)) @ whiten
    evals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(evals[-1])


def mmse_filters(sc: Scenario, q) -> np.ndarray:
    """Genie filters M_k^{-1} h_k using the true jammer covariance."""
    n = sc.bs_antennas
    j = np.zeros((n, n), dtype=complex)
    if q is not None and not np.isscalar(q):
        j = sc.jammer_channel @ q @ sc.jammer_channel.conj().T
    out = np.empty((sc.num_users, n), dtype=complex)
    for k in range(sc.num_users):
        m = sc.sigma2 * np.eye(n, dtype=complex) + j
        for kp in range(sc.num_users):
            if kp != k:
                hw = sc.channels[kp] @ sc.precoders[kp]
                m += np.outer(hw, hw.conj())
        out[k] = np.linalg.solve(m, sc.channels[k] @ sc.precoders[k])
    return out


def beampattern_trace_form(v: np.ndarray, a_b: np.ndarray) -> float:
    """tr(A_B^H V A_B) with V = v v^H, assembled literally."""
    big_v = np.outer(v, v.conj())
    return float(np.trace(a_b.conj().T @ big_v @ a_b).real)


def zf_min_beampattern(p: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Numeric solver of the ZF beampattern minimization via the null-space
    method: v = v0 + N t with v0 the minimum-norm ZF point and N spanning
    null(P^H), then the unconstrained quadratic in t is solved directly."""
    n, k_users = p.shape
    _, _, vh = np.linalg.svd(p.conj().T)
    null_basis = vh[k_users:].conj().T  # n x (n - k)
    v0_all = p @ np.linalg.inv(p.conj().T @ p)
    filters = np.empty((k_users, n), dtype=complex)
    total = 0.0
    for k in range(k_users):
        v0 = v0_all[:, k]
        lhs = null_basis.conj().T @ x @ null_basis
        rhs = null_basis.conj().T @ x @ v0
        t = -np.linalg.solve(lhs, rhs)
        v = v0 + null_basis @ t
        filters[k] = v
        total += float((v.conj() @ x @ v).real)
    return filters, total


def sdp_bloch_grid(
    cost: np.ndarray,
    a_ineq: np.ndarray,
    b_ineq: float,
    resolution: int = 41,
    refine_rounds: int = 6,
) -> float:
    """Brute-force min tr(C V) s.t. tr(A V) >= b, tr V = 1, V >= 0 for 2x2
    Hermitian V parameterized by the Bloch ball (3 real parameters), with
    local grid refinement around the best point of each round."""

    def tr_prod(m, v00, v11, v01):
        return (m[0, 0] * v00 + m[1, 1] * v11 + m[0, 1].conj() * v01
                + m[1, 0].conj() * v01.conj()).real

    lo = np.array([-1.0, -1.0, -1.0])
    hi = np.array([1.0, 1.0, 1.0])
    best_val, best_pt = np.inf, None
    for _ in range(refine_rounds):
        axes = [np.linspace(lo[d], hi[d], resolution) for d in range(3)]
        xs, ys, zs = (g.ravel() for g in np.meshgrid(*axes, indexing="ij"))
        mask = xs**2 + ys**2 + zs**2 <= 1.0
        xs, ys, zs = xs[mask], ys[mask], zs[mask]
        # V = 0.5 * (I + x sx + y sy + z sz)
        v00 = 0.5 * (1.0 + zs)
        v11 = 0.5 * (1.0 - zs)
        v01 = 0.5 * (xs - 1j * ys)
        feasible = tr_prod(a_ineq, v00, v11, v01) >= b_ineq
        if not np.any(feasible):
            raise RuntimeError("grid found no feasible point")
        obj = tr_prod(cost, v00, v11, v01)
        obj[~feasible] = np.inf
        i = int(np.argmin(obj))
        if obj[i] < best_val:
            best_val = float(obj[i])
            best_pt = np.array([xs[i], ys[i], zs[i]])
        span = (hi - lo) / (resolution - 1)
        lo = np.maximum(best_pt - 1.5 * span, -1.0)
        hi = np.minimum(best_pt + 1.5 * span, 1.0)
    return best_val


def _objective_batch(sc: Scenario, q_batch: np.ndarray) -> np.ndarray:
    """max_k gamma_k^A for a batch of jammer covariances."""
    h = np.stack([sc.channels[k] @ sc.precoders[k] for k in range(sc.num_users)])
    n = sc.bs_antennas
    base = np.zeros((sc.num_users, n, n), dtype=complex)
    for k in range(sc.num_users):
        base[k] = sc.sigma2 * np.eye(n)
        for kp in range(sc.num_users):
            if kp != k:
                base[k] += np.outer(h[kp], h[kp].conj())
    g = sc.jammer_channel
    j_batch = np.einsum("ij,bjk,lk->bil", g, q_batch, g.conj())
    m = base[None, :, :, :] + j_batch[:, None, :, :]
    x = np.linalg.solve(m, np.broadcast_to(h[..., None], m.shape[:2] + (n, 1)).copy())
    gam = np.einsum("ki,bki->bk", h.conj(), x[..., 0]).real
    return gam.max(axis=1)


def jammer_grid_1d(sc: Scenario, p_j: float, points: int = 1000) -> tuple[float, float]:
    """Grid the single-antenna jammer power q in [0, P_J]; returns
    (best q, best objective)."""
    qs = np.linspace(0.0, p_j, points)
    q_batch = qs[:, None, None].astype(complex)
    obj = _objective_batch(sc, q_batch)
    i = int(np.argmin(obj))
    return float(qs[i]), float(obj[i])


def jammer_grid_2x2(
    sc: Scenario, p_j: float, coarse: int = 15, refine_rounds: int = 3
) -> float:
    """Brute-force min-max objective over PSD 2x2 covariances parameterized
    by two eigenvalues and a rotation/phase pair, with local grid refinement
    around the best point of each round."""

    def build(lam1, lam2, phi, chi):
        c, s = np.cos(phi), np.sin(phi)
        e = np.exp(1j * chi)
        u = np.stack(
            [np.stack([c, -s * np.conj(e)], axis=-1), np.stack([s * e, c], axis=-1)],
            axis=-2,
        )
        lam = np.stack([lam1, lam2], axis=-1)
        return np.einsum("...ij,...j,...kj->...ik", u, lam, u.conj())

    lo = np.array([0.0, 0.0, 0.0, 0.0])
    hi = np.array([p_j, p_j, np.pi / 2, 2 * np.pi])
    best_val, best_pt = np.inf, None
    for _ in range(refine_rounds):
        axes = [np.linspace(lo[d], hi[d], coarse) for d in range(4)]
        grids = np.meshgrid(*axes, indexing="ij")
        flat = [g.ravel() for g in grids]
        mask = flat[0] + flat[1] <= p_j + 1e-12
        lam1, lam2, phi, chi = (f[mask] for f in flat)
        q_batch = build(lam1, lam2, phi, chi)
        obj = _objective_batch(sc, q_batch)
        i = int(np.argmin(obj))
        if obj[i] < best_val:
            best_val = float(obj[i])
            best_pt = np.array([lam1[i], lam2[i], phi[i], chi[i]])
        span = (hi - lo) / (coarse - 1)
        lo = np.maximum(best_pt - 1.5 * span, [0.0, 0.0, 0.0, 0.0])
        hi = np.minimum(best_pt + 1.5 * span, [p_j, p_j, np.pi / 2, 2 * np.pi])
    return best_val


def capped_simplex_bisect(v: np.ndarray, total: float, iters: int = 200) -> np.ndarray:
    """Projection onto {x >= 0, sum x <= total} via bisection on the KKT
    water level (independent of the sort-based production code)."""
    clipped = np.maximum(v, 0.0)
    if clipped.sum() <= total:
        return clipped
    lo, hi = 0.0, float(clipped.max())
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.maximum(clipped - mid, 0.0).sum() > total:
            lo = mid
        else:
            hi = mid
    return np.maximum(clipped - hi, 0.0)


def min_beampattern_rank1_search(
    cost: np.ndarray,
    a_k: np.ndarray,
    b_k: np.ndarray,
    gamma0: float,
    samples: int = 20_000,
    seed: int = 3,
) -> float:
    """Randomized search over rank-1 feasible points of the QoS-constrained
    beampattern problem; returns the smallest sampled objective (an upper
    bound on the rank-1 optimum, hence on nothing below the SDP value)."""
    rng = np.random.default_rng(seed)
    n = cost.shape[0]
    best = np.inf
    for _ in range(samples):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        num = (v.conj() @ a_k @ v).real
        den = (v.conj() @ b_k @ v).real
        if num - gamma0 * den >= 0:
            best = min(best, (v.conj() @ cost @ v).real)
    return float(best)
