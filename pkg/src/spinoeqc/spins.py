"""Physics of the {1H, 13C} chloroform spin pair.

Conventions fixed here and relied on everywhere else:

* Basis |H C> with index = 2*H + C; |0> is spin up.
* The rotating frame puts both chemical-shift offsets at zero, so free
  evolution is J-coupling only.
* Thermal and enhancement-scaled states are diagonal:

      rho = I/4 + (u/2) * (eps_H * gr * Z_H + eps_C * Z_C)

  with Z_H = diag(1,1,-1,-1), Z_C = diag(1,-1,1,-1), gr the gyromagnetic
  ratio gamma_H/gamma_C and u the overall polarization unit. eps = 1 is
  thermal equilibrium; negative eps means inverted polarization.
* Population permutations fix a chosen ground state and cycle the other
  three populations. CYCLE moves the content of the non-ground states
  along increasing index order (for ground |00>: 01 -> 10 -> 11 -> 01);
  CYCLE2 is its inverse. The permutation matrix is the contract; for
  ground |00> it coincides with the gate product CNOT(H->C) CNOT(C->H).

Pulses are ideal: instantaneous, no off-resonance or B1 errors, and
relaxation during a sequence is neglected (sequences last well under a
second versus minutes-scale T1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .quantum import DensityMatrix, Unitary

Z_H = np.array([1.0, 1.0, -1.0, -1.0])
Z_C = np.array([1.0, -1.0, 1.0, -1.0])

# spin-1/2 Iz x Iz diagonal, the J-coupling generator
IZIZ_DIAG = np.array([0.25, -0.25, -0.25, 0.25])


class PulseTarget(enum.Enum):
    H = "H"
    C = "C"
    BOTH = "both"


class PermutationId(enum.Enum):
    IDENTITY = "identity"
    CYCLE = "cycle"
    CYCLE2 = "cycle2"


@dataclass(frozen=True)
class SpinSystemConfig:
    """Static constants of the simulated spin pair.

    gamma_ratio defaults to 4 (idealized 1H/13C ratio; the physical value
    is about 3.976). j_coupling is the one-bond CH coupling in Hz and t2
    the transverse decay time used when synthesizing detection.
    """

    gamma_ratio: float = 4.0
    j_coupling: float = 215.0
    t2: float = 0.5
    polarization_unit: float = 1.0

    def __post_init__(self):
        if self.gamma_ratio <= 0:
            raise ValueError("gamma_ratio must be positive")
        if self.j_coupling <= 0:
            raise ValueError("j_coupling must be positive")
        if self.t2 <= 0:
            raise ValueError("t2 must be positive")


@dataclass(frozen=True)
class PulseSpec:
    """One ideal RF rotation: target spin(s), tip angle and phase in degrees.

    Phase 0 rotates about x, phase 90 about y.
    """

    target: PulseTarget
    tip_angle: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0 < self.tip_angle <= 180:
            raise ValueError("tip_angle must be in (0, 180] degrees")


def enhanced_state(cfg: SpinSystemConfig, eps_h: float, eps_c: float) -> DensityMatrix:
    """Diagonal state with per-nucleus enhancement factors.

    Cross-relaxation transfer is incoherent, so enhanced states carry no
    coherences: off-diagonal elements are exactly zero. eps_h = eps_c = 1
    reproduces thermal equilibrium; eps = 0 gives the fully mixed state.
    """
    u = cfg.polarization_unit
    dev = 0.5 * u * (eps_h * cfg.gamma_ratio * Z_H + eps_c * Z_C)
    return DensityMatrix.from_diagonal(0.25 + dev)


def thermal_state(cfg: SpinSystemConfig) -> DensityMatrix:
    """High-temperature equilibrium state (both enhancements equal to 1)."""
    return enhanced_state(cfg, 1.0, 1.0)


def _rotation_2x2(tip_angle_deg: float, phase_deg: float) -> np.ndarray:
    # exp(-i*theta/2*(cos(phi) sx + sin(phi) sy)), written in closed form
    theta = np.radians(tip_angle_deg)
    phi = np.radians(phase_deg)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -1j * s * np.exp(-1j * phi)],
            [-1j * s * np.exp(1j * phi), c],
        ]
    )


def pulse_unitary(p: PulseSpec) -> Unitary:
    """Rotation on the targeted spin(s), identity on the rest."""
    r = _rotation_2x2(p.tip_angle, p.phase)
    eye = np.eye(2)
    if p.target is PulseTarget.H:
        return Unitary(np.kron(r, eye))
    if p.target is PulseTarget.C:
        return Unitary(np.kron(eye, r))
    return Unitary(np.kron(r, r))


def j_evolution(cfg: SpinSystemConfig, duration: float) -> Unitary:
    """Free evolution exp(-i 2π J t Iz⊗Iz) for `duration` seconds.

    Diagonal with phases ±π J t / 2; duration 2/J is the identity up to a
    global phase.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    phases = -2j * np.pi * cfg.j_coupling * duration * IZIZ_DIAG
    return Unitary(np.diag(np.exp(phases)))


def cycle_source_indices(perm_id: PermutationId, ground: int) -> tuple[int, ...]:
    """Index map of a population permutation: new[j] = old[src[j]].

    The ground state stays put; CYCLE shifts the three remaining
    populations one step along increasing index order, CYCLE2 two steps.
    """
    if ground not in (0, 1, 2, 3):
        raise ValueError("ground must be a state index 0..3")
    src = list(range(4))
    ng = [i for i in range(4) if i != ground]
    if perm_id is PermutationId.CYCLE:
        src[ng[1]], src[ng[2]], src[ng[0]] = ng[0], ng[1], ng[2]
    elif perm_id is PermutationId.CYCLE2:
        src[ng[2]], src[ng[0]], src[ng[1]] = ng[0], ng[1], ng[2]
    return tuple(src)


def permutation_pulse_sequence(perm_id: PermutationId, ground: int) -> Unitary:
    """Unitary whose action on populations is the classical cycle.

    Returned directly as the permutation matrix (the contract); for ground
    |00> the CYCLE matrix equals CNOT(H->C) @ CNOT(C->H), i.e. it is a
    short CNOT sequence in gate terms.
    """
    src = cycle_source_indices(perm_id, ground)
    p = np.zeros((4, 4))
    p[np.arange(4), list(src)] = 1.0
    return Unitary(p)


def cnot_unitary(control: PulseTarget, target: PulseTarget) -> Unitary:
    """Controlled-NOT between the two spins (control fires on |1>)."""
    if {control, target} != {PulseTarget.H, PulseTarget.C}:
        raise ValueError("control and target must be H and C in some order")
    m = np.zeros((4, 4))
    for h in (0, 1):
        for c in (0, 1):
            hh, cc = h, c
            if control is PulseTarget.H and h == 1:
                cc ^= 1
            if control is PulseTarget.C and c == 1:
                hh ^= 1
            m[2 * hh + cc, 2 * h + c] = 1.0
    return Unitary(m)
