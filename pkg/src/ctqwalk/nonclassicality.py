"""Single-time and multi-time nonclassicality quantifiers for walks.

Multi-time statistics come from projective position measurements composed
with the semigroup propagator between measurement times (for Markovian
open dynamics this is the regression rule; for unitary dynamics it is the
textbook projective-measurement formula). The central quantity is

    K(s, t) = (1/2) sum_x | sum_y P(x,t; y,s) - P(x,t) |,

the total-variation distance between the outcome distribution at time t
with a marginalized intermediate measurement at time s and the
undisturbed single-time distribution. Any classical stochastic process
has K = 0 (marginalizing an unread measurement changes nothing), so
K > 0 certifies genuinely nonclassical temporal correlations. K is
evaluated through the equivalent difference form

    K(s, t) = (1/2) sum_x | Tr[ Pi_x e^{L(t-s)} (rho(s) - Delta rho(s)) ] |,

which needs one forward propagation, one site dephasing, and one
propagation of the difference per s sample. ``kbar`` averages K(s, t)
uniformly over s in [0, t] with composite Simpson quadrature.

The single-time benchmark ``dqc`` is one minus the best quantum fidelity
between the walker's state and the diagonal state of the classical random
walk generated by the same Laplacian.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import (
    ClassicalDistribution,
    DensityMatrix,
    EvolutionModel,
    Propagator,
    classical_propagate,
    localized_state,
    make_generator,
    propagate,
    spectral_gap,
)
from .graphs import Graph, SpectralDecomposition
from .linalg import Superoperator, hermitian_sqrt, vec

#: probabilities may carry at most this much imaginary noise; beyond it is an error
IMAG_TOL = 1e-9

DEFAULT_QUAD_POINTS = 201


def _real_probability(value: complex, what: str = "probability") -> float:
    if abs(value.imag) > IMAG_TOL:
        raise ArithmeticError(f"{what} has imaginary part {value.imag:.3e}")
    return float(min(max(value.real, 0.0), 1.0))


def _k_from_diagonal(diag: np.ndarray) -> float:
    bad = np.abs(diag.imag).max()
    if bad > IMAG_TOL:
        raise ArithmeticError(f"measured diagonal has imaginary part {bad:.3e}")
    return float(min(max(0.5 * np.abs(diag.real).sum(), 0.0), 1.0))


def _hermitize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def _simpson_weights(m: int) -> np.ndarray:
    w = np.ones(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def _check_quad_points(quad_points: int) -> int:
    q = int(quad_points)
    if q < 3 or q % 2 == 0:
        raise ValueError(f"quad_points must be odd and >= 3, got {quad_points}")
    return q


# ---------------------------------------------------------------------------
# Multi-time probabilities (regression rule)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementRecord:
    """Sequence of (time, site outcome) pairs with nondecreasing times."""

    times: tuple[float, ...]
    outcomes: tuple[int, ...]

    def __post_init__(self):
        if len(self.times) == 0:
            raise ValueError("measurement record must be nonempty")
        if len(self.times) != len(self.outcomes):
            raise ValueError("times and outcomes must have equal length")
        if self.times[0] < 0:
            raise ValueError("measurement times must be nonnegative")
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("measurement times must be nondecreasing")


def multi_time_prob(generator: Superoperator, rho0: DensityMatrix,
                    record: MeasurementRecord) -> float:
    """Joint probability of a sequence of site outcomes at given times.

    Alternates semigroup propagation over each interval with projection
    ``rho -> Pi_x rho Pi_x`` onto the measured site.
    """
    n = generator.dim
    if rho0.dim != n:
        raise ValueError(f"state dim {rho0.dim} does not match generator dim {n}")
    if any(not 0 <= x < n for x in record.outcomes):
        raise ValueError(f"outcome out of range for {n} sites")
    x_mat = np.asarray(rho0.matrix, dtype=np.complex128)
    prev = 0.0
    weight = 0j
    for t_i, x_i in zip(record.times, record.outcomes):
        x_mat = generator.expm_apply(t_i - prev, x_mat)
        weight = x_mat[x_i, x_i]
        x_mat = np.zeros((n, n), dtype=np.complex128)
        x_mat[x_i, x_i] = weight
        prev = t_i
    return _real_probability(weight, "joint probability")


def one_time_probs(generator: Superoperator, rho0: DensityMatrix,
                   t: float) -> ClassicalDistribution:
    """Site-outcome distribution of a single measurement at time t."""
    rho_t = propagate(generator, rho0, t)
    return ClassicalDistribution(rho_t.populations())


# ---------------------------------------------------------------------------
# Kolmogorov consistency violation K(s, t) and its time average
# ---------------------------------------------------------------------------

def kolmogorov_k(generator: Superoperator, rho0: DensityMatrix,
                 s: float, t: float) -> float:
    """Consistency violation K(s, t) for one intermediate time s <= t."""
    if not 0 <= s <= t:
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
    rho_s = _hermitize(generator.expm_apply(s, rho0.matrix))
    delta = rho_s - np.diag(np.diagonal(rho_s))
    out = generator.expm_apply(t - s, delta)
    return _k_from_diagonal(np.diagonal(out))


def _k_profile_superop(generator: Superoperator, rho0_mat: np.ndarray,
                       s_values: np.ndarray, t: float) -> np.ndarray:
    """K(s, t) for every s in ``s_values`` (ascending, within [0, t])."""
    n = generator.dim
    di = np.arange(n) * (n + 1)  # diagonal positions under column stacking
    spectral = generator.spectral_factors()
    if spectral is not None:
        w, v, vinv = spectral
        y = v @ (np.exp(np.outer(w, s_values)) * (vinv @ vec(rho0_mat))[:, None])
        y[di, :] = 0.0  # vec(rho(s) - Delta rho(s))
        z = (vinv @ y) * np.exp(np.outer(w, t - s_values))
        r = v[di, :] @ z  # diagonal of e^{L(t-s)}[delta(s)] per column
        bad = np.abs(r.imag).max()
        if bad > IMAG_TOL:
            raise ArithmeticError(f"measured diagonal has imaginary part {bad:.3e}")
        return np.clip(0.5 * np.abs(r.real).sum(axis=0), 0.0, 1.0)

    # Near-defective generator: diagonalization untrustworthy. Walk the
    # uniform grid with one Pade exponential per step, propagating the
    # site projectors backward (adjoint) so each K needs one inner product.
    h = np.diff(s_values)
    if not np.allclose(h, h[0], rtol=0, atol=1e-12 * max(t, 1.0)):
        return np.array([kolmogorov_k(generator, DensityMatrix(rho0_mat), s, t)
                         for s in s_values])
    step = generator._expm_matrix(float(h[0]))
    m = len(s_values)
    states = np.empty((n * n, m), dtype=np.complex128)
    states[:, 0] = vec(rho0_mat)
    for i in range(1, m):
        states[:, i] = step @ states[:, i - 1]
    duals = [np.eye(n * n, dtype=np.complex128)[:, di]]
    for _ in range(1, m):
        duals.append(step.conj().T @ duals[-1])
    out = np.empty(m)
    for i in range(m):
        delta = states[:, i].copy()
        delta[di] = 0.0
        out[i] = _k_from_diagonal(duals[m - 1 - i].conj().T @ delta)
    return out


def _k_profile(prop: Propagator, rho0_mat: np.ndarray,
               s_values: np.ndarray, t: float) -> np.ndarray:
    """Model-dispatched K profile; n-space routes avoid the superoperator."""
    if prop.model.kind in ("unitary", "energy-dephasing"):
        out = np.empty(len(s_values))
        for i, s in enumerate(s_values):
            rho_s = _hermitize(prop.evolve_matrix(rho0_mat, s))
            delta = rho_s - np.diag(np.diagonal(rho_s))
            out[i] = _k_from_diagonal(np.diagonal(prop.evolve_matrix(delta, t - s)))
        return out
    return _k_profile_superop(prop.generator, rho0_mat, s_values, t)


def kbar(generator: Superoperator, rho0: DensityMatrix, t: float,
         quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Time average of K(s, t) over s in [0, t], composite Simpson."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    q = _check_quad_points(quad_points)
    s_values = np.linspace(0.0, t, q)
    vals = _k_profile_superop(generator, rho0.matrix, s_values, t)
    integral = (t / (q - 1)) / 3.0 * np.dot(_simpson_weights(q), vals)
    return float(min(max(integral / t, 0.0), 1.0))


@dataclass(frozen=True)
class KbarCurve:
    """Time series of the averaged violation on an ascending grid."""

    times: np.ndarray
    values: np.ndarray
    quad_points: int

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")
        if np.any((self.values < 0) | (self.values > 1)):
            raise ValueError("values must lie in [0, 1]")


def kbar_curve(graph: Graph, model: EvolutionModel, node: int,
               times: Sequence[float],
               quad_points: int = DEFAULT_QUAD_POINTS,
               threads: int = 1) -> KbarCurve:
    """Averaged violation on a grid of final times, one quadrature per point.

    Grid points are independent, so with ``threads > 1`` they are farmed
    out to a thread pool (results keep grid order either way).
    """
    q = _check_quad_points(quad_points)
    prop = Propagator(graph, model)
    rho0 = localized_state(graph, node).matrix
    t_arr = np.asarray(list(times), dtype=np.float64)
    if np.any(t_arr <= 0):
        raise ValueError("all grid times must be positive")
    weights = _simpson_weights(q)

    def one(t: float) -> float:
        vals = _k_profile(prop, rho0, np.linspace(0.0, t, q), t)
        integral = (t / (q - 1)) / 3.0 * np.dot(weights, vals)
        return min(max(integral / t, 0.0), 1.0)

    if threads > 1 and len(t_arr) > 1:
        if prop.model.kind in ("site-dephasing", "custom"):
            prop.generator.spectral_factors()  # materialize shared cache up front
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.fromiter(pool.map(one, t_arr), dtype=np.float64,
                                 count=len(t_arr))
    else:
        values = np.fromiter((one(t) for t in t_arr), dtype=np.float64,
                             count=len(t_arr))
    return KbarCurve(times=t_arr, values=values, quad_points=q)


def k_slice(graph: Graph, model: EvolutionModel, node: int, t: float,
            s_points: int) -> tuple[np.ndarray, np.ndarray]:
    """K(s, t) at fixed t over a uniform s grid with ``s_points`` intervals."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if s_points < 1:
        raise ValueError("s_points must be >= 1")
    prop = Propagator(graph, model)
    rho0 = localized_state(graph, node).matrix
    s_values = np.linspace(0.0, t, s_points + 1)
    return s_values, _k_profile(prop, rho0, s_values, t)


# ---------------------------------------------------------------------------
# Quantum-classical dynamical distance
# ---------------------------------------------------------------------------

def fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Quantum fidelity ``[Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2``."""
    if rho1.dim != rho2.dim:
        raise ValueError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    root = hermitian_sqrt(rho1.matrix)
    w = np.linalg.eigvalsh(root @ rho2.matrix @ root)
    value = float(np.sqrt(np.clip(w, 0.0, None)).sum() ** 2)
    return min(max(value, 0.0), 1.0)


def _classical_state(graph: Graph, node: int, t: float) -> DensityMatrix:
    p = classical_propagate(graph, node, t)
    return DensityMatrix(np.diag(p.probs.astype(np.complex128)))


def dqc_node(graph: Graph, model: EvolutionModel, node: int, t: float,
             _prop: Propagator | None = None) -> float:
    """Distance 1 - F between the walker started at ``node`` and the
    diagonal state of the classical walk started at the same node."""
    prop = _prop if _prop is not None else Propagator(graph, model)
    rho_t = prop.density(localized_state(graph, node), t)
    value = 1.0 - fidelity(_classical_state(graph, node, t), rho_t)
    return min(max(value, 0.0), 1.0)


def dqc(graph: Graph, model: EvolutionModel, t: float) -> float:
    """Quantum-classical dynamical distance, best case over the start node."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    prop = Propagator(graph, model)
    return min(dqc_node(graph, model, nu, t, _prop=prop) for nu in range(graph.n))


def dqc_curve(graph: Graph, model: EvolutionModel,
              times: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    prop = Propagator(graph, model)
    t_arr = np.asarray(list(times), dtype=np.float64)
    values = np.array([
        min(dqc_node(graph, model, nu, t, _prop=prop) for nu in range(graph.n))
        for t in t_arr
    ])
    return t_arr, values


# ---------------------------------------------------------------------------
# Closed-form short-time coefficients, asymptotics, and bounds
# ---------------------------------------------------------------------------

class ShortTimeCoeffs(NamedTuple):
    """Leading coefficients of the averaged violation, kbar ~ c2 t^2 + c3 t^3.

    ``cubic`` is None when no closed form exists (energy dephasing).
    """

    quadratic: float
    cubic: float | None


def _double_commutator(laplacian: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Second power of the coherent part: -[L, [L, x]]."""
    inner = laplacian @ x - x @ laplacian
    return -(laplacian @ inner - inner @ laplacian)


def short_time_coeffs(graph: Graph, node: int,
                      model: EvolutionModel) -> ShortTimeCoeffs:
    """Predicted small-t expansion coefficients of the averaged violation.

    Unitary: (d/3, 0). Site dephasing: (d/3, -gamma d/6) -- the dissipator
    first touches populations at third order. Energy dephasing:
    ((1/12) sum_x |A_x + (gamma^2/4) B_x|, None) with
    ``A_x = <x| C^2 rho0 |x>`` and ``B_x = <x| C^2 (1-Delta) C^2 rho0 |x>``
    where C^2 is the squared coherent generator; decoherence enters already
    at second order because it acts in a basis unlike the measured one.
    """
    if not 0 <= node < graph.n:
        raise ValueError(f"node {node} out of range for {graph.n} vertices")
    degree = float(graph.degrees[node])
    if model.kind == "unitary":
        return ShortTimeCoeffs(degree / 3.0, 0.0)
    if model.kind == "site-dephasing":
        return ShortTimeCoeffs(degree / 3.0, -model.gamma * degree / 6.0)
    if model.kind == "energy-dephasing":
        rho0 = localized_state(graph, node).matrix
        m1 = _double_commutator(graph.laplacian, rho0)
        a = np.real(np.diagonal(m1))
        m2 = m1 - np.diag(np.diagonal(m1))
        b = np.real(np.diagonal(_double_commutator(graph.laplacian, m2)))
        c2 = float(np.abs(a + (model.gamma ** 2 / 4.0) * b).sum() / 12.0)
        return ShortTimeCoeffs(c2, None)
    raise ValueError(f"no short-time expansion for model kind {model.kind!r}")


def eigenspace_overlap_matrix(spec: SpectralDecomposition) -> np.ndarray:
    """Matrix ``F[x, y] = sum_groups |<x| P_g |y>|^2``.

    Symmetric and doubly stochastic (rows sum to 1 because the group
    projectors resolve the identity); it fixes the long-time behavior of
    the averaged violation under energy dephasing.
    """
    out = np.zeros((spec.eigenvectors.shape[0],) * 2)
    for g in range(len(spec.groups)):
        out += np.abs(spec.projector(g)) ** 2
    return out


def asymptotic_kbar_energy(graph: Graph, spec: SpectralDecomposition,
                           node: int) -> float:
    """Long-time limit of the averaged violation under energy dephasing.

    Equals ``(1/2) sum_x |(F - F^2)[x, node]|`` with F the eigenspace
    overlap matrix; strictly positive whenever the Laplacian eigenvectors
    are delocalized over the sites, degenerate or not.
    """
    if not 0 <= node < graph.n:
        raise ValueError(f"node {node} out of range for {graph.n} vertices")
    recon = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
    if np.abs(recon - graph.laplacian).max() > 1e-8:
        raise ValueError("spectral decomposition does not match graph Laplacian")
    f = eigenspace_overlap_matrix(spec)
    return float(0.5 * np.abs((f - f @ f)[:, node]).sum())


def kbar_bound_site_dephasing(graph: Graph, gamma: float, t: float,
                              mu2: float | None = None) -> float:
    """Upper bound ``sqrt(N) (1 - e^{-mu2 t}) / (mu2 t)`` on the averaged
    violation under site dephasing on a connected graph.

    ``mu2`` is the spectral gap of the generator (computed here unless
    supplied). The bound decreases monotonically from sqrt(N) at t -> 0.
    """
    if not graph.connected:
        raise ValueError("bound requires a connected graph (unique stationary state)")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if mu2 is None:
        gen = make_generator(graph, EvolutionModel.site_dephasing(gamma))
        gap = spectral_gap(gen)
        if not gap.has_decay:
            raise ValueError("generator has no decaying eigenvalue")
        mu2 = gap.value
    x = mu2 * t
    return float(np.sqrt(graph.n) * (-np.expm1(-x)) / x)


__all__ = [
    "IMAG_TOL",
    "DEFAULT_QUAD_POINTS",
    "MeasurementRecord",
    "KbarCurve",
    "ShortTimeCoeffs",
    "multi_time_prob",
    "one_time_probs",
    "kolmogorov_k",
    "kbar",
    "kbar_curve",
    "k_slice",
    "fidelity",
    "dqc",
    "dqc_node",
    "dqc_curve",
    "short_time_coeffs",
    "eigenspace_overlap_matrix",
    "asymptotic_kbar_energy",
    "kbar_bound_site_dephasing",
]
