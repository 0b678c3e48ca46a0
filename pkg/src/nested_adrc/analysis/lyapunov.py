"""Companion matrices, Lyapunov solves and the steady-state error bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotHurwitzError(ValueError):
    pass


def companion_matrix(coeffs) -> np.ndarray:
    """Error-dynamics matrix: first column ``-a``, ones on the superdiagonal."""
    a = np.asarray(coeffs, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("companion matrix needs at least one coefficient")
    A = np.eye(a.size, k=1)
    A[:, 0] = -a
    return A


def jacobi_eigenvalues(S, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    S = np.array(S, dtype=float)
    m = S.shape[0]
    scale = max(np.abs(S).max(), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(S, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if abs(S[p, q]) < 1e-300:
                    continue
                theta = (S[q, q] - S[p, p]) / (2.0 * S[p, q])
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(m)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                S = J.T @ S @ J
    return np.sort(np.diag(S))


@dataclass(frozen=True)
class LyapunovResult:
    P: np.ndarray
    lambda_min: float
    lambda_max: float
    residual: float

    def V(self, eta) -> float:
        eta = np.asarray(eta, dtype=float)
        return float(eta @ self.P @ eta)

    @staticmethod
    def W(eta) -> float:
        eta = np.asarray(eta, dtype=float)
        return float(eta @ eta)


def solve_lyapunov(A) -> LyapunovResult:
    """Solve ``A.T @ P + P @ A = -I`` by vectorising into a dense linear system.

    Raises :class:`NotHurwitzError` when the solution is not positive definite
    (or the system is singular), which happens iff ``A`` is not Hurwitz.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m = A.shape[0]
    if A.shape != (m, m):
        raise ValueError("A must be square")
    eye = np.eye(m)
    # Column-major vec: vec(A.T P) = (I kron A.T) vec P, vec(P A) = (A.T kron I) vec P.
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    try:
        vecP = np.linalg.solve(K, -eye.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise NotHurwitzError("Lyapunov equation is singular; A is not Hurwitz") from exc
    P = vecP.reshape((m, m), order="F")
    P = 0.5 * (P + P.T)
    lam = jacobi_eigenvalues(P)
    if not lam[0] > 0:
        raise NotHurwitzError("Lyapunov solution is not positive definite; A is not Hurwitz")
    residual = float(np.max(np.abs(A.T @ P + P @ A + eye)))
    return LyapunovResult(P, float(lam[0]), float(lam[-1]), residual)


def theorem1_bound(M: float, lyap: LyapunovResult, omega0: float, n: int, i: int) -> float:
    """Asymptotic bound on ``|x_i - xhat_i|``:
    ``2 M lambda_max**2 / (lambda_min * omega0**(n+2-i))``.
    """
    if not 1 <= i <= n + 1:
        raise IndexError(f"state index {i} outside 1..{n + 1}")
    if not omega0 > 0:
        raise ValueError("omega0 must be positive")
    if M < 0:
        raise ValueError("M must be non-negative")
    return 2.0 * M * lyap.lambda_max**2 / lyap.lambda_min / omega0 ** (n + 2 - i)
