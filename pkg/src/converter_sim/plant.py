"""Open-loop model of the two-stage bidirectional converter with supercapacitor.

States:
    x1  buck-leg inductor current (A), negative while the supercapacitor charges
    x2  intermediate bus capacitor voltage (V)
    x3  boost-leg inductor current (A)
    x4  output capacitor voltage (V)
    x5  supercapacitor voltage (V)

Inputs are the duty ratios (u1, u2) and the external port current IL
(IL > 0 discharges the supercapacitor into the load).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConverterParams:
    """Physical constants of the converter (strict SI units)."""

    L1: float = 10e-3
    L2: float = 10e-3
    C1: float = 8.8e-3
    C2: float = 2.2e-3
    Csc: float = 62.5
    R1: float = 113.2e-3
    R2: float = 100e-3
    G: float = 50e-6
    Gsc: float = 200e-6

    def __post_init__(self):
        for name in ("L1", "L2", "C1", "C2", "Csc", "R1", "R2", "G", "Gsc"):
            v = getattr(self, name)
            if not (v > 0.0):
                raise ValueError(f"ConverterParams.{name} must be strictly positive, got {v}")


def experimental_params() -> ConverterParams:
    """Alternate preset measured on the hardware test platform.

    The platform datasheet does not list the supercapacitor bank value, so the
    simulation default Csc is kept.
    """
    return ConverterParams(
        L1=8.78e-3, L2=8.55e-3, C1=2.19e-3, C2=7.6e-3,
        R1=1.58, R2=1.69, G=50e-6, Gsc=200e-6, Csc=62.5,
    )


@dataclass(frozen=True)
class PlantState:
    x1: float
    x2: float
    x3: float
    x4: float
    x5: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4, self.x5])

    def voltages_positive(self) -> bool:
        """Physically meaningful operation keeps x2, x4, x5 > 0."""
        return self.x2 > 0.0 and self.x4 > 0.0 and self.x5 > 0.0


@dataclass(frozen=True)
class ControlInput:
    u1: float
    u2: float


@dataclass(frozen=True)
class PortHamiltonianForm:
    """Matrices of Q*xdot = (J(u) - R)*x + g*IL with energy H = x'Qx/2."""

    J: np.ndarray
    R: np.ndarray
    g: np.ndarray
    Q: np.ndarray


def derivative(state: PlantState, u: ControlInput, IL: float, p: ConverterParams):
    """Time derivative (x1dot..x5dot) of the averaged model.

    Returns a plain tuple of floats; this is the hot path of the simulator.
    """
    x1, x2, x3, x4, x5 = state.x1, state.x2, state.x3, state.x4, state.x5
    return (
        (-p.R1 * x1 + x5 - x2 * u.u1) / p.L1,
        (-p.G * x2 + x1 * u.u1 - x3 * u.u2) / p.C1,
        (-p.R2 * x3 - x4 + x2 * u.u2) / p.L2,
        (x3 - IL) / p.C2,
        (-p.Gsc * x5 - x1) / p.Csc,
    )


def ph_matrices(u: ControlInput, p: ConverterParams) -> PortHamiltonianForm:
    """Interconnection/damping/input matrices of the port-Hamiltonian form.

    Besides the duty-dependent entries, J carries the constant +/-1 couplings
    x1<->x5 and x3<->x4; they are required for the matrix form to reproduce
    the model equations.
    """
    J = np.array([
        [0.0, -u.u1, 0.0, 0.0, 1.0],
        [u.u1, 0.0, -u.u2, 0.0, 0.0],
        [0.0, u.u2, 0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0, 0.0],
    ])
    R = np.diag([p.R1, p.G, p.R2, 0.0, p.Gsc])
    g = np.array([0.0, 0.0, 0.0, -1.0, 0.0])
    Q = np.diag([p.L1, p.C1, p.L2, p.C2, p.Csc])
    return PortHamiltonianForm(J=J, R=R, g=g, Q=Q)


def derivative_ph(state: PlantState, u: ControlInput, IL: float, p: ConverterParams) -> np.ndarray:
    """Same vector field evaluated through the port-Hamiltonian matrices."""
    f = ph_matrices(u, p)
    x = state.as_array()
    return np.linalg.solve(f.Q, (f.J - f.R) @ x + f.g * IL)


def stored_energy(state: PlantState, p: ConverterParams) -> float:
    """Stored energy 0.5*x'Qx (J); its rate obeys the power balance."""
    return 0.5 * (
        p.L1 * state.x1 ** 2
        + p.C1 * state.x2 ** 2
        + p.L2 * state.x3 ** 2
        + p.C2 * state.x4 ** 2
        + p.Csc * state.x5 ** 2
    )


def power_balance_residual(state: PlantState, u: ControlInput, IL: float,
                           p: ConverterParams) -> float:
    """Residual of  d/dt(stored energy) = -x'Rx - x4*IL  (W).

    Identically zero in exact arithmetic; useful as a structural self-check.
    """
    x = state.as_array()
    xdot = np.array(derivative(state, u, IL, p))
    Q = np.diag([p.L1, p.C1, p.L2, p.C2, p.Csc])
    stored_rate = x @ Q @ xdot
    dissipated = p.R1 * x[0] ** 2 + p.G * x[1] ** 2 + p.R2 * x[2] ** 2 + p.Gsc * x[4] ** 2
    supplied = -x[3] * IL
    return stored_rate - (-dissipated + supplied)


@dataclass(frozen=True)
class EquilibriumFeasibility:
    feasible: bool
    x5star_squared: float
    x1star: float | None
    x3star: float


def equilibrium_feasibility(x2star: float, x4star: float, IL: float,
                            p: ConverterParams) -> EquilibriumFeasibility:
    """Check whether a true equilibrium exists at the requested setpoints.

    For IL >= 0 the required supercapacitor voltage squared is negative, so no
    equilibrium exists; the closed loop regulates without one.
    """
    if not (x2star > 0.0 and x4star > 0.0):
        raise ValueError("x2star and x4star must be strictly positive")
    x3star = IL
    numerator = -p.G * x2star ** 2 - p.R2 * IL ** 2 - x4star * IL
    x5star_squared = numerator / (p.Gsc * (1.0 + p.R1 * p.Gsc))
    feasible = x5star_squared >= 0.0
    x1star = -p.Gsc * np.sqrt(x5star_squared) if feasible else None
    return EquilibriumFeasibility(
        feasible=feasible,
        x5star_squared=x5star_squared,
        x1star=x1star,
        x3star=x3star,
    )
