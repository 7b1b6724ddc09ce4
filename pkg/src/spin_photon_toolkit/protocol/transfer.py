"""Heralded photon-to-spin state transfer by spin-dependent cavity reflection.

The spin starts in (|↓⟩+|↑⟩)/√2. The H polarization reflects off the
emitter-loaded cavity with a spin-dependent coefficient r_↓ or r_↑, the V
polarization bounces with r_V. Measuring the photon in the (|H⟩±|V⟩)/√2 basis
heralds a spin state; for a photon α|H⟩ + β|V⟩ and an ideal controlled phase
(r_↓ = −r_↑ = r_V) the plus outcome leaves the spin in
(α+β)/√2·|↓⟩ + (β−α)/√2·|↑⟩, the transferred state in the rotated basis. The
minus outcome is brought onto the same target by a σx feed-forward.

Spin vectors are written in the (down, up) basis throughout.
"""

import logging
from dataclasses import dataclass

import numpy as np

from spin_photon_toolkit.errors import DomainError, NumericalError
from spin_photon_toolkit.models.device import Spin, SpinCavitySystem
from spin_photon_toolkit.models.protocol import (
    BranchNormalization,
    DephasingModel,
    EfficiencyPair,
    HeraldPolicy,
    InputStatePolicy,
    ProtocolConfig,
)
from spin_photon_toolkit.protocol.quadrature import diffusion_nodes
from spin_photon_toolkit.qed.reflection import coherence_rate, reflection_spectrum

logger = logging.getLogger(__name__)

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_NORM_TOLERANCE = 1e-9
_RMS_FLOOR = 1e-12

CARDINAL_STATES: dict[str, tuple[complex, complex]] = {
    "+Z": (1.0, 0.0),
    "-Z": (0.0, 1.0),
    "+X": (_SQRT_HALF, _SQRT_HALF),
    "-X": (_SQRT_HALF, -_SQRT_HALF),
    "+Y": (_SQRT_HALF, 1j * _SQRT_HALF),
    "-Y": (_SQRT_HALF, -1j * _SQRT_HALF),
}

EQUAL_SUPERPOSITION: dict[str, tuple[complex, complex]] = {"+X": (_SQRT_HALF, _SQRT_HALF)}


@dataclass
class HeraldOutcome:
    """Unnormalized heralded spin vectors for one detection outcome.

    spin_vectors has shape (n_samples, 2), one row per diffusion sample.
    """

    label: str
    spin_vectors: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        """Herald probability per sample (squared norm)."""
        return np.sum(np.abs(self.spin_vectors) ** 2, axis=1)


@dataclass
class BranchReflections:
    """H-polarization reflection of both spin branches over the diffusion nodes."""

    r_down: np.ndarray
    r_up: np.ndarray
    weights: np.ndarray

    def mean_reflectance(self) -> float:
        """Spin-averaged, δ-averaged |r|² of the H polarization."""
        down = float(np.sum(self.weights * np.abs(self.r_down) ** 2))
        up = float(np.sum(self.weights * np.abs(self.r_up) ** 2))
        return 0.5 * (down + up)

    def equalized(self) -> "BranchReflections":
        """Each branch divided by its δ-averaged rms amplitude."""
        def scale(r: np.ndarray) -> np.ndarray:
            rms = np.sqrt(np.sum(self.weights * np.abs(r) ** 2))
            return r / rms if rms > _RMS_FLOOR else r

        return BranchReflections(scale(self.r_down), scale(self.r_up), self.weights)


@dataclass
class StateTransfer:
    """Transfer of one photonic input state: target, normalized ρ and fidelity."""

    label: str
    photon_state: tuple[complex, complex]
    target: np.ndarray
    density_matrix: np.ndarray
    herald_probability: float
    fidelity: float


def _check_photon_state(photon_state: tuple[complex, complex]) -> tuple[complex, complex]:
    alpha, beta = complex(photon_state[0]), complex(photon_state[1])
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > _NORM_TOLERANCE:
        raise DomainError(f"Photon state must be normalized, got |α|²+|β|² = {norm:.12g}")
    return alpha, beta


def target_state(photon_state: tuple[complex, complex]) -> np.ndarray:
    """Spin state the photon α|H⟩+β|V⟩ should be transferred to."""
    alpha, beta = _check_photon_state(photon_state)
    return np.array([alpha + beta, beta - alpha]) * _SQRT_HALF


def herald_contributions(
    r_down: np.ndarray | complex,
    r_up: np.ndarray | complex,
    r_v: complex,
    photon_state: tuple[complex, complex],
    herald_policy: HeraldPolicy = HeraldPolicy.BOTH_WITH_FEED_FORWARD,
) -> list[HeraldOutcome]:
    """Heralded spin vectors for given branch reflections.

    Args:
        r_down: H reflection with the spin down (scalar or per-sample array)
        r_up: H reflection with the spin up
        r_v: V reflection
        photon_state: (α, β), normalized
        herald_policy: Which outcomes herald

    Returns:
        One HeraldOutcome per accepted outcome, feed-forward already applied
    """
    alpha, beta = _check_photon_state(photon_state)
    r_down = np.atleast_1d(np.asarray(r_down, dtype=complex))
    r_up = np.atleast_1d(np.asarray(r_up, dtype=complex))
    r_down, r_up = np.broadcast_arrays(r_down, r_up)

    plus = 0.5 * np.stack([alpha * r_down + beta * r_v, alpha * r_up + beta * r_v], axis=1)
    outcomes = [HeraldOutcome("plus", plus)]
    if herald_policy is HeraldPolicy.BOTH_WITH_FEED_FORWARD:
        minus = 0.5 * np.stack([alpha * r_down - beta * r_v, alpha * r_up - beta * r_v], axis=1)
        outcomes.append(HeraldOutcome("minus", minus[:, ::-1]))  # σx correction
    return outcomes


def _probe_offset_hz(system: SpinCavitySystem, config: ProtocolConfig) -> float:
    if config.probe_THz is None:
        return 0.0
    return (config.probe_THz - system.cavity.resonance_THz) * 1e12


def branch_reflections(system: SpinCavitySystem, config: ProtocolConfig) -> BranchReflections:
    """Physical H reflections of both spin branches at the configured diffusion nodes."""
    if config.dephasing_model is DephasingModel.FAST_LINEWIDTH:
        gamma_perp = coherence_rate(system, fold_dephasing=True)
        offsets, weights = np.zeros(1), np.ones(1)
    else:
        gamma_perp = coherence_rate(system)
        offsets, weights = diffusion_nodes(
            system.emitter.gamma_star.value, config.diffusion_points, config.diffusion_truncation
        )
    probe = _probe_offset_hz(system, config)
    return BranchReflections(
        r_down=reflection_spectrum(system, Spin.DOWN, probe, offsets, gamma_perp),
        r_up=reflection_spectrum(system, Spin.UP, probe, offsets, gamma_perp),
        weights=weights,
    )


def _input_states(config: ProtocolConfig) -> dict[str, tuple[complex, complex]]:
    if config.input_state_policy is InputStatePolicy.FIXED_EQUAL_SUPERPOSITION:
        return EQUAL_SUPERPOSITION
    return CARDINAL_STATES


def _density_matrix(outcomes: list[HeraldOutcome], weights: np.ndarray) -> np.ndarray:
    rho = np.zeros((2, 2), dtype=complex)
    for outcome in outcomes:
        v = outcome.spin_vectors
        rho += np.einsum("n,ni,nj->ij", weights, v, v.conj())
    return rho


def _transfers(
    branches: BranchReflections, config: ProtocolConfig
) -> list[StateTransfer]:
    if config.branch_normalization is BranchNormalization.EQUALIZED:
        branches = branches.equalized()
    transfers = []
    for label, state in _input_states(config).items():
        outcomes = herald_contributions(
            branches.r_down, branches.r_up, config.r_v, state, config.herald_policy
        )
        rho = _density_matrix(outcomes, branches.weights)
        trace = float(np.real(np.trace(rho)))
        if not np.isfinite(trace) or trace <= 0:
            raise NumericalError(f"Heralded density matrix for {label} has trace {trace}")
        target = target_state(state)
        fidelity = float(np.real(target.conj() @ rho @ target)) / trace
        transfers.append(
            StateTransfer(
                label=label,
                photon_state=state,
                target=target,
                density_matrix=rho / trace,
                herald_probability=trace,
                fidelity=fidelity,
            )
        )
    return transfers


def heralded_spin_state(
    system: SpinCavitySystem,
    config: ProtocolConfig,
    photon_state: tuple[complex, complex],
    delta_e_hz: float = 0.0,
) -> tuple[np.ndarray, float]:
    """Heralded spin density contribution at a single emitter offset.

    Returns:
        (unnormalized 2×2 spin density summed over heralds, herald weight)
    """
    gamma_perp = coherence_rate(
        system, fold_dephasing=config.dephasing_model is DephasingModel.FAST_LINEWIDTH
    )
    probe = _probe_offset_hz(system, config)
    branches = BranchReflections(
        r_down=np.atleast_1d(reflection_spectrum(system, Spin.DOWN, probe, delta_e_hz, gamma_perp)),
        r_up=np.atleast_1d(reflection_spectrum(system, Spin.UP, probe, delta_e_hz, gamma_perp)),
        weights=np.ones(1),
    )
    if config.branch_normalization is BranchNormalization.EQUALIZED:
        branches = branches.equalized()
    outcomes = herald_contributions(
        branches.r_down, branches.r_up, config.r_v, photon_state, config.herald_policy
    )
    rho = _density_matrix(outcomes, branches.weights)
    return rho, float(np.real(np.trace(rho)))


def transfer_density_matrices(
    system: SpinCavitySystem, config: ProtocolConfig
) -> list[StateTransfer]:
    """Per-input-state targets, normalized density matrices and fidelities."""
    return _transfers(branch_reflections(system, config), config)


def _mean_fidelity(transfers: list[StateTransfer]) -> float:
    fidelity = float(np.mean([t.fidelity for t in transfers]))
    if not np.isfinite(fidelity):
        raise NumericalError("Transfer fidelity is not finite")
    return float(np.clip(fidelity, 0.0, 1.0))


def transfer_fidelity(system: SpinCavitySystem, config: ProtocolConfig) -> float:
    """Heralded transfer fidelity averaged over the configured input states.

    Example:
        >>> from spin_photon_toolkit.data import get_system
        >>> round(transfer_fidelity(get_system("paper-blue-star"), ProtocolConfig()), 1)
        0.5
    """
    return _mean_fidelity(transfer_density_matrices(system, config))


def _success(branches: BranchReflections, efficiencies: EfficiencyPair) -> float:
    p = efficiencies.eta_det * efficiencies.eta_exc * branches.mean_reflectance()
    return float(np.clip(p, 0.0, 1.0))


def success_probability(
    system: SpinCavitySystem, config: ProtocolConfig, efficiencies: EfficiencyPair
) -> float:
    """p_succ = η_det·η_exc·|r̄|², with |r̄|² the spin- and δ-averaged H reflectance."""
    return _success(branch_reflections(system, config), efficiencies)


def evaluate_point(
    system: SpinCavitySystem, config: ProtocolConfig, efficiencies: EfficiencyPair
) -> tuple[float, float]:
    """(fidelity, success probability) from a single reflection evaluation."""
    branches = branch_reflections(system, config)
    return _mean_fidelity(_transfers(branches, config)), _success(branches, efficiencies)
