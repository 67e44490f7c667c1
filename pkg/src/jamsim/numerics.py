"""Complex Hermitian linear algebra and small convex-optimization kernels.

Everything here operates on plain complex numpy arrays.  Hermitian PSD
matrices are represented as ordinary ndarrays; `check_hermitian` /
`min_eigenvalue` are the validators used at module boundaries and in tests.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-10


class SdpInfeasibleError(RuntimeError):
    """The SDP was detected to be infeasible (residuals stalled)."""


class SdpNumericalError(RuntimeError):
    """The SDP solver hit its iteration cap without converging or stalling."""


def hermitian_defect(m: np.ndarray) -> float:
    """Frobenius norm of the anti-Hermitian part of ``m``."""
    return float(np.linalg.norm(m - m.conj().T))


def check_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    """Raise if ``m`` is not square-Hermitian within a relative tolerance."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m)))
    if hermitian_defect(m) > rtol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")


def symmetrize(m: np.ndarray) -> np.ndarray:
    """(M + M^H) / 2, killing round-off from products like G Q G^H."""
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a (numerically) Hermitian matrix.

    Returns (eigenvalues ascending, unitary eigenvector columns) such that
    M = U diag(w) U^H.  The input is symmetrized before decomposition.
    """
    check_hermitian(m)
    w, u = np.linalg.eigh(symmetrize(m))
    return w, u


def min_eigenvalue(m: np.ndarray) -> float:
    w, _ = hermitian_eig(m)
    return float(w[0])


def is_psd(m: np.ndarray, tol_scale: float = 1e-8) -> bool:
    """PSD check: smallest eigenvalue >= -tol_scale * max(largest eig, 1)."""
    w, _ = hermitian_eig(m)
    return bool(w[0] >= -tol_scale * max(float(w[-1]), 1.0))


def project_capped_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection of ``v`` onto {x >= 0, sum(x) <= total}.

    Clip at zero; if the clipped sum still exceeds ``total``, subtract the
    KKT water level tau solving sum(max(v - tau, 0)) = total.
    """
    clipped = np.maximum(v, 0.0)
    if clipped.sum() <= total:
        return clipped
    u = np.sort(clipped)[::-1]
    cumsum = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    tau_candidates = (cumsum - total) / k
    valid = np.nonzero(u > tau_candidates)[0]
    # when one entry dwarfs the budget, u - total rounds to u and the strict
    # comparison can miss; the single-element prefix is then exact
    tau = tau_candidates[valid[-1]] if valid.size else tau_candidates[0]
    return np.maximum(clipped - tau, 0.0)


def psd_project_trace(m: np.ndarray, power: float) -> np.ndarray:
    """Frobenius-nearest matrix to ``m`` in {Q >= 0, tr Q <= power}.

    The feasible set is unitarily invariant, so the projection keeps the
    eigenvectors and projects the eigenvalue vector onto the capped simplex.
    """
    if power < 0:
        raise ValueError(f"power must be nonnegative, got {power}")
    w, u = hermitian_eig(m)
    w_proj = project_capped_simplex(w, power)
    return symmetrize((u * w_proj) @ u.conj().T)


def _is_pd(m: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


def solve_small_sdp(
    cost: np.ndarray,
    constraints: list[tuple[np.ndarray, float, str]],
    dim: int,
    max_iter: int = 500,
    tol: float = 1e-6,
    _polish: bool = True,
) -> np.ndarray:
    """Solve  min tr(C V)  s.t.  tr(A_i V) {>=,==} b_i,  V >= 0.

    Dual path-following interior point: maximize b^T y over the log-det
    barrier of the dual slack S = C - sum_i y_i A_i (plus log barriers on the
    inequality multipliers) with Newton steps in the m dual variables, and
    recover the primal central point V = tau S^{-1}.  At the final barrier
    weight the certified duality gap is below ``tol`` relative.

    Raises SdpInfeasibleError when the dual objective diverges (a primal
    infeasibility certificate) and SdpNumericalError when centering fails or
    the Newton iteration budget ``max_iter`` is exhausted.
    """
    if dim > 64:
        raise ValueError(f"dim {dim} exceeds the supported size of 64")
    if cost.shape != (dim, dim):
        raise ValueError(f"cost shape {cost.shape} does not match dim {dim}")
    check_hermitian(cost)

    mats, rhs = [], []
    ineq = []
    for i, (a, b, sense) in enumerate(constraints):
        if a.shape != (dim, dim):
            raise ValueError(f"constraint shape {a.shape} does not match dim {dim}")
        check_hermitian(a)
        if sense in (">=", "ge"):
            ineq.append(i)
        elif sense not in ("==", "="):
            raise ValueError(f"unknown constraint sense {sense!r}")
        scale = max(float(np.linalg.norm(a)), 1e-12)
        mats.append(symmetrize(a) / scale)
        rhs.append(float(b) / scale)
    m = len(constraints)
    a_stack = np.asarray(mats)
    b_vec = np.asarray(rhs)
    ineq = np.asarray(ineq, dtype=int)
    c_scale = max(float(np.linalg.norm(cost)), 1e-12)
    c_norm = symmetrize(cost) / c_scale

    # identity-multiple equality rows can shift the dual slack to stay PD
    id_rows = [
        i
        for i, (a, _, sense) in enumerate(constraints)
        if sense in ("==", "=")
        and a[0, 0].real > 0
        and np.allclose(a, np.eye(dim) * a[0, 0].real)
    ]

    def slack(y: np.ndarray) -> np.ndarray:
        return c_norm - np.einsum("k,kij->ij", y, a_stack)

    def barrier_value(y: np.ndarray, tau: float) -> float:
        try:
            chol = np.linalg.cholesky(slack(y))
        except np.linalg.LinAlgError:
            return -np.inf
        if len(ineq) and np.any(y[ineq] <= 0):
            return -np.inf
        val = float(b_vec @ y) + 2.0 * tau * float(np.log(np.diag(chol).real).sum())
        if len(ineq):
            val += tau * float(np.log(y[ineq]).sum())
        return val

    # strictly feasible dual start: tiny inequality multipliers, then push
    # the slack positive definite through an identity row if one exists
    y = np.zeros(m)
    y[ineq] = 1e-3
    lam_min = float(np.linalg.eigvalsh(slack(y))[0])
    if lam_min < 0.5 and id_rows:
        i0 = id_rows[0]
        y[i0] += (lam_min - 0.5) / a_stack[i0][0, 0].real
    if not _is_pd(slack(y)):
        raise SdpNumericalError(
            "no strictly feasible dual start (need an identity-trace row "
            "to shift the dual slack)"
        )

    n_barrier = dim + len(ineq)
    tau = 1.0
    tau_final = 0.1 * tol / n_barrier
    diverge_bound = 1e9
    newton_budget = max_iter

    eq_rows = np.asarray(
        [i for i in range(m) if i not in set(ineq.tolist())], dtype=int
    )
    while True:
        final_stage = tau <= tau_final
        for _ in range(200):  # center at the current barrier weight
            if newton_budget <= 0:
                raise SdpNumericalError("Newton iteration budget exhausted")
            newton_budget -= 1
            s = slack(y)
            w = np.linalg.solve(np.broadcast_to(s, a_stack.shape), a_stack)
            grad = b_vec - tau * np.einsum("kii->k", w).real
            hess = -tau * np.einsum("kij,lji->kl", w, w).real
            if len(ineq):
                grad[ineq] += tau / y[ineq]
                hess[ineq, ineq] -= tau / y[ineq] ** 2
            try:
                step = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError as err:
                raise SdpNumericalError(f"singular Newton system: {err}") from err
            decrement = float(grad @ step)
            # the gradient on the equality rows equals the constraint
            # violation of the implied primal point, so the final stage
            # centers until that violation is resolved, not merely until
            # the Newton decrement underflows
            eq_viol = float(np.abs(grad[eq_rows]).max()) if len(eq_rows) else 0.0
            if decrement <= 1e-18 or (
                decrement <= 1e-12 and (not final_stage or eq_viol <= 0.05 * tol)
            ):
                break
            f_now = barrier_value(y, tau)
            t = 1.0
            for _ in range(60):
                if barrier_value(y + t * step, tau) >= f_now + 0.25 * t * decrement:
                    break
                t *= 0.5
            else:
                break  # stalled line search: accept the current center
            y = y + t * step
            if float(b_vec @ y) > diverge_bound:
                raise SdpInfeasibleError(
                    "dual objective diverged: primal problem is infeasible"
                )
        if tau <= tau_final:
            break
        tau = max(tau * 0.05, tau_final)

    def violation(cand: np.ndarray) -> float:
        vals = np.einsum("kij,ji->k", a_stack, cand).real - b_vec
        out = np.abs(vals)
        if len(ineq):
            out[ineq] = np.maximum(-vals[ineq], 0.0)
        return float(out.max())

    def solve_on_span(span: np.ndarray) -> np.ndarray | None:
        """Re-solve the problem restricted to V = U M U^H on the given
        orthonormal span.  The full-space constraint values equal the reduced
        ones exactly, so a successful reduced solve is feasible by
        construction; it also refines the objective relative to its own
        scale rather than the overall problem scale."""
        try:
            m_red = solve_small_sdp(
                symmetrize(span.conj().T @ (c_norm @ span)),
                [
                    (symmetrize(span.conj().T @ (a_stack[i] @ span)), b_vec[i],
                     ">=" if i in ineq else "==")
                    for i in range(m)
                ],
                dim=span.shape[1],
                max_iter=max_iter,
                tol=tol,
                _polish=False,
            )
        except (SdpInfeasibleError, SdpNumericalError):
            return None
        return symmetrize(span @ m_red @ span.conj().T)

    # primal recovery from the central point; row normalization does not
    # change the primal variable, so V needs no rescaling
    v = symmetrize(tau * np.linalg.inv(slack(y)))
    pobj = float(np.vdot(c_norm, v).real)
    dobj = float(b_vec @ y)

    if _polish and dim > 1:
        # finite-precision centering leaves a small constraint violation and
        # an objective accurate only relative to the problem scale; the
        # optimal face lies in the bottom eigenspace of the dual slack
        # (equivalently the top eigenspace of V), so re-solving on those
        # small spans repairs both at once
        _, u_s = np.linalg.eigh(slack(y))
        best_v, best_obj = None, np.inf
        if violation(v) <= tol:
            best_v, best_obj = v, pobj
        for rank in range(1, min(4, dim) + 1):
            cand = solve_on_span(u_s[:, :rank])
            if cand is None:
                continue
            cand_obj = float(np.vdot(c_norm, cand).real)
            if violation(cand) <= tol:
                if best_v is not None and cand_obj >= best_obj - tol:
                    if cand_obj < best_obj:
                        best_v, best_obj = cand, cand_obj
                    break  # widening the span has stopped paying off
                if cand_obj < best_obj:
                    best_v, best_obj = cand, cand_obj
        if best_v is not None:
            v, pobj = best_v, best_obj

    gap_rel = max(pobj - dobj, 0.0) / max(1.0, abs(pobj), abs(dobj))
    viol = violation(v)
    if gap_rel > tol or viol > tol:
        raise SdpNumericalError(
            f"certificate too weak: gap {gap_rel:.2e}, violation {viol:.2e}"
        )
    return v
