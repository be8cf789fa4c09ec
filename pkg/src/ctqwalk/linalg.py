"""Dense complex-matrix kernels.

Everything here works on plain ``numpy.ndarray`` matrices at desk scale
(Hilbert dimension <= 16, superoperators <= 256x256), so dense LAPACK
routines are used throughout; there is no sparse or iterative machinery.

Vectorization convention (shared by every module): column stacking,
``vec(X) = X.flatten(order="F")``, under which the map ``rho -> A rho B``
has matrix ``kron(B.T, A)``.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.linalg

_HERMITICITY_TOL = 1e-12

#: eigenvalues of a PSD matrix may dip this far below zero from float drift
PSD_TOL = 1e-10


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).flatten(order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(vector).reshape((dim, dim), order="F")


def _check_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} has non-finite entries")
    return a


def _check_hermitian(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = _check_square(a, name)
    defect = np.abs(a - a.conj().T).max()
    if defect > _HERMITICITY_TOL * max(1.0, np.abs(a).max()):
        raise ValueError(f"{name} is not Hermitian (defect {defect:.3e})")
    return a


def expm(matrix: np.ndarray) -> np.ndarray:
    """Matrix exponential of a general square complex matrix.

    Scaling-and-squaring with a Pade rational approximation (via
    scipy.linalg.expm); accurate to ~1e-12 relative in norm for
    well-conditioned inputs.
    """
    a = _check_square(matrix)
    out = scipy.linalg.expm(a)
    if not np.isfinite(out).all():
        raise ArithmeticError("matrix exponential overflowed to non-finite values")
    return out


def expm_hermitian_generator(h: np.ndarray, t: float) -> np.ndarray:
    """``e^{-iHt}`` for Hermitian ``H`` via spectral decomposition.

    The spectral route keeps the result unitary to ~1e-12 regardless of
    ``t``, unlike Pade exponentiation of the anti-Hermitian ``-iHt``.
    """
    h = _check_hermitian(h, "generator")
    w, u = np.linalg.eigh(h)
    return (u * np.exp(-1j * w * t)) @ u.conj().T


def hermitian_sqrt(matrix: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-psd_tol, 0)`` are clipped to zero before the root;
    anything below ``-psd_tol`` is an error, not noise.
    """
    m = _check_hermitian(matrix)
    w, u = np.linalg.eigh(m)
    if w.min() < -psd_tol:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T


# ---------------------------------------------------------------------------
# Bessel function of the first kind
# ---------------------------------------------------------------------------

_BESSEL_MAX_ORDER = 64
_BESSEL_MAX_ARG = 200.0
# Trapezoid points for J_n(x) = (1/pi) int_0^pi cos(n th - x sin th) dth.
# The full-period integrand is entire and 2pi-periodic, so the trapezoid
# rule converges geometrically; aliasing only reinjects J_{m}(x) terms with
# m >= 2M - |n|, which for M = 2048 >> e|x|/2 + |n| (|x| <= 200, |n| <= 64)
# are far below 1e-16.
_BESSEL_POINTS = 2048


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind J_n(x), |n| <= 64, |x| <= 200.

    Evaluated from the integral definition with a 2048-point trapezoid
    rule (spectrally accurate for periodic integrands); absolute error
    below 1e-12 over the supported range.
    """
    n = int(order)
    if n != order:
        raise ValueError(f"order must be an integer, got {order!r}")
    if abs(n) > _BESSEL_MAX_ORDER:
        raise ValueError(f"|order| <= {_BESSEL_MAX_ORDER} required, got {n}")
    if not np.isfinite(x) or abs(x) > _BESSEL_MAX_ARG:
        raise ValueError(f"|x| <= {_BESSEL_MAX_ARG} required, got {x}")
    theta = np.linspace(0.0, np.pi, _BESSEL_POINTS + 1)
    f = np.cos(n * theta - x * np.sin(theta))
    # trapezoid on [0, pi]; equals half the full-period rule by symmetry
    return float((f[0] / 2 + f[1:-1].sum() + f[-1] / 2) / _BESSEL_POINTS)


# ---------------------------------------------------------------------------
# Superoperators
# ---------------------------------------------------------------------------

class Superoperator:
    """Linear map on density matrices, stored as an n^2 x n^2 matrix.

    Acts on column-stacked matrices. The class caches a diagonalization
    of its matrix the first time a semigroup action ``e^{Lt}`` is needed;
    if the matrix is too close to defective for the factorization to be
    trustworthy (reconstruction residual above ~1e-12 relative), actions
    fall back to dense Pade exponentials per time point.
    """

    def __init__(self, dim: int, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (dim * dim, dim * dim):
            raise ValueError(
                f"superoperator for dim {dim} must be {dim*dim}x{dim*dim}, "
                f"got {matrix.shape}")
        if not np.isfinite(matrix).all():
            raise ValueError("superoperator has non-finite entries")
        matrix = np.ascontiguousarray(matrix)
        matrix.flags.writeable = False
        self.dim = int(dim)
        self.matrix = matrix
        self._expm_cache: dict[float, np.ndarray] = {}

    def __repr__(self) -> str:
        return f"Superoperator(dim={self.dim})"

    @cached_property
    def _spectral(self) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
        """(eigenvalues, V, V^{-1}) if the diagonalization is reliable, else None."""
        try:
            w, v = np.linalg.eig(self.matrix)
            vinv = np.linalg.inv(v)
        except np.linalg.LinAlgError:
            return None
        residual = np.abs((v * w) @ vinv - self.matrix).max()
        if residual > 1e-12 * max(1.0, np.abs(self.matrix).max()):
            return None
        return w, v, vinv

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        if self._spectral is not None:
            return self._spectral[0]
        return np.linalg.eigvals(self.matrix)

    def spectral_factors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
        return self._spectral

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        """Apply the map itself (not its exponential) to an n x n matrix."""
        return unvec(self.matrix @ vec(matrix), self.dim)

    def _expm_matrix(self, t: float) -> np.ndarray:
        cached = self._expm_cache.get(t)
        if cached is None:
            cached = scipy.linalg.expm(self.matrix * t)
            self._expm_cache[t] = cached
        return cached

    def expm_apply(self, t: float, matrix: np.ndarray) -> np.ndarray:
        """Apply ``e^{Lt}`` to an n x n matrix."""
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        if t == 0:
            return np.asarray(matrix, dtype=np.complex128).copy()
        spectral = self._spectral
        v0 = vec(matrix)
        if spectral is not None:
            w, v, vinv = spectral
            out = v @ (np.exp(w * t) * (vinv @ v0))
        else:
            out = self._expm_matrix(t) @ v0
        return unvec(out, self.dim)


def vectorize_lindblad(h: np.ndarray,
                       jumps: list[tuple[float, np.ndarray]] | tuple = ()) -> Superoperator:
    """Matrix form of ``rho -> -i[H,rho] + sum_k g_k (G rho G+ - {G+G, rho}/2)``.

    Parameters
    ----------
    h : np.ndarray
        Hermitian generator of the coherent part.
    jumps : sequence of (rate, operator)
        Nonnegative rates with jump operators of matching dimension.
    """
    h = _check_hermitian(h, "Hamiltonian")
    n = h.shape[0]
    eye = np.eye(n)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for rate, g in jumps:
        if rate < 0:
            raise ValueError(f"jump rates must be nonnegative, got {rate}")
        g = np.asarray(g, dtype=np.complex128)
        if g.shape != (n, n):
            raise ValueError(
                f"jump operator shape {g.shape} does not match Hamiltonian dim {n}")
        gg = g.conj().T @ g
        m = m + rate * (np.kron(g.conj(), g)
                        - 0.5 * np.kron(eye, gg)
                        - 0.5 * np.kron(gg.T, eye))
    return Superoperator(n, m)
