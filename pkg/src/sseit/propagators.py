"""Master-equation propagation backends.

All backends evolve the vectorized density matrix under the (time
independent) Lindblad generator and return samples on a uniform time grid.

``cheb``
    Chebyshev polynomial expansion of exp(L t).  The generator's spectrum is
    essentially an imaginary interval set by the Bohr frequencies of H plus
    a thin dissipative strip, which the Chebyshev scheme covers with nearly
    the minimal number of matrix-vector products; substeps keep the
    dissipative growth of the expansion terms bounded.  Default for large
    systems.
``expm``
    scipy.sparse.linalg.expm_multiply (scaling-and-squaring Taylor); used as
    an independent cross-check of ``cheb``.
``eig``
    Dense eigendecomposition of the Liouvillian; exact and cheapest for
    small systems.
``rk``
    Adaptive explicit Runge-Kutta (DOP853, rtol 1e-8 / atol 1e-12) on the
    vectorized density matrix with superoperator-free right-hand-side
    evaluation via matrix products.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply
from scipy.special import jv

from .constants import RK_ATOL, RK_RTOL
from .errors import DomainError, IntegrationError

__all__ = ["build_superoperator", "propagate", "BACKENDS"]

BACKENDS = ("auto", "cheb", "expm", "eig", "rk")

_EIG_MAX_DIM = 16          # dense-eig backend limit (superoperator 256x256)
_GAMMA_SUBSTEP = 0.9       # max decay-rate x substep for the cheb expansion
_CHEB_TAIL = 40            # fixed extra Chebyshev orders beyond alpha


def build_superoperator(h: np.ndarray, jumps) -> sp.csr_matrix:
    """Sparse Lindblad generator acting on the row-major vectorized rho."""
    n = h.shape[0]
    eye = sp.identity(n, format="csr", dtype=complex)
    hs = sp.csr_matrix(h)
    gen = -1j * (sp.kron(hs, eye) - sp.kron(eye, hs.T))
    for jump in jumps:
        ls = sp.csr_matrix(jump)
        ldl = sp.csr_matrix(jump.conj().T @ jump)
        gen = gen + sp.kron(ls, ls.conj()) - 0.5 * (
            sp.kron(ldl, eye) + sp.kron(eye, ldl.T)
        )
    return sp.csr_matrix(gen)


def _max_decay_rate(jumps, n: int) -> float:
    total = np.zeros(n, dtype=float)
    for jump in jumps:
        total += np.einsum("ij,ij->j", jump.conj(), jump).real
    return float(total.max()) if total.size else 0.0


def _spectral_half_width(h: np.ndarray, gamma_max: float) -> float:
    lam = np.linalg.eigvalsh(h)
    spread = float(lam[-1] - lam[0])
    return 1.02 * spread + 8.0 * gamma_max + 1.0


def _cheb_coefficients(alpha: float) -> np.ndarray:
    order = int(np.ceil(alpha + 12.0 * alpha ** (1.0 / 3.0) + _CHEB_TAIL))
    k = np.arange(order + 1)
    coeff = 2.0 * (-1j) ** k * jv(k, alpha)
    coeff[0] *= 0.5
    return coeff


def _propagate_cheb(gen: sp.csr_matrix, h: np.ndarray, jumps, rho0: np.ndarray,
                    times: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    dt = float(times[1] - times[0])
    gamma_max = _max_decay_rate(jumps, n)
    half_w = _spectral_half_width(h, gamma_max)
    n_sub = max(1, int(np.ceil(gamma_max * dt / _GAMMA_SUBSTEP)))
    tau = dt / n_sub
    alpha = half_w * tau
    coeff = _cheb_coefficients(alpha)
    scale = 1j / half_w

    out = np.empty((times.size, n * n), dtype=complex)
    y = rho0.reshape(-1).astype(complex)
    out[0] = y
    for i in range(1, times.size):
        for _ in range(n_sub):
            t_prev = y
            t_cur = scale * (gen @ y)
            acc = coeff[0] * t_prev + coeff[1] * t_cur
            for c in coeff[2:]:
                t_prev, t_cur = t_cur, 2.0 * scale * (gen @ t_cur) - t_prev
                acc += c * t_cur
            y = acc
        out[i] = y
    return out.reshape(times.size, n, n)


def _propagate_expm(gen: sp.csr_matrix, rho0: np.ndarray, times: np.ndarray) -> np.ndarray:
    n = rho0.shape[0]
    flat = expm_multiply(
        gen, rho0.reshape(-1).astype(complex),
        start=float(times[0]), stop=float(times[-1]),
        num=times.size, endpoint=True,
    )
    return np.asarray(flat).reshape(times.size, n, n)


def _propagate_eig(gen: sp.csr_matrix, rho0: np.ndarray, times: np.ndarray):
    dense = gen.toarray()
    values, vectors = scipy.linalg.eig(dense)
    try:
        coeffs = scipy.linalg.solve(vectors, rho0.reshape(-1).astype(complex))
    except scipy.linalg.LinAlgError:
        return None
    residual = np.linalg.norm(vectors @ np.diag(values) @ np.linalg.inv(vectors) - dense)
    if residual > 1e-10 * max(np.linalg.norm(dense), 1.0):
        return None
    n = rho0.shape[0]
    phases = np.exp(np.outer(times, values))
    flat = (vectors @ (phases * coeffs).T).T
    return flat.reshape(times.size, n, n)


def _propagate_rk(h: np.ndarray, jumps, rho0: np.ndarray, times: np.ndarray,
                  rtol: float, atol: float) -> np.ndarray:
    n = h.shape[0]
    sum_ldl = np.zeros((n, n), dtype=complex)
    for jump in jumps:
        sum_ldl += jump.conj().T @ jump
    damped = -1j * h - 0.5 * sum_ldl  # effective non-Hermitian generator

    def rhs(_t, y):
        rho = y.reshape(n, n)
        drho = damped @ rho + rho @ damped.conj().T
        for jump in jumps:
            drho += jump @ rho @ jump.conj().T
        return drho.reshape(-1)

    sol = solve_ivp(
        rhs, (float(times[0]), float(times[-1])), rho0.reshape(-1).astype(complex),
        t_eval=times, method="DOP853", rtol=rtol, atol=atol,
    )
    if not sol.success:
        raise IntegrationError(
            f"adaptive integrator failed: {sol.message}",
            worst_error=None,
        )
    return sol.y.T.reshape(times.size, n, n)


def propagate(h: np.ndarray, jumps, rho0: np.ndarray, times,
              backend: str = "auto", rtol: float = RK_RTOL,
              atol: float = RK_ATOL) -> np.ndarray:
    """Density matrices at the requested times under the Lindblad generator.

    ``times`` must be a uniformly spaced, increasing grid starting at 0.
    Returns an array of shape (len(times), n, n).
    """
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise DomainError("need at least two sample times")
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise DomainError("sample times must be uniformly spaced and increasing")
    if abs(times[0]) > 1e-30:
        raise DomainError("sample times must start at 0")
    if backend not in BACKENDS:
        raise DomainError(f"unknown backend {backend!r}; choose from {BACKENDS}")

    h = np.asarray(h, dtype=complex)
    jumps = [np.asarray(j, dtype=complex) for j in jumps]
    n = h.shape[0]
    if backend == "auto":
        backend = "eig" if n <= _EIG_MAX_DIM else "cheb"

    if backend == "rk":
        return _propagate_rk(h, jumps, rho0, times, rtol, atol)

    gen = build_superoperator(h, jumps)
    if backend == "eig":
        result = _propagate_eig(gen, rho0, times)
        if result is not None:
            return result
        backend = "expm"  # defective eigenbasis; fall back to the Taylor route
    if backend == "expm":
        return _propagate_expm(gen, rho0, times)
    return _propagate_cheb(gen, h, jumps, rho0, times)
