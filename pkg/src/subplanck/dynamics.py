"""Split-operator propagation of the driven double-well and Fock projection.

Units follow a = (x + i p)/sqrt(2) with [x, p] = i; the Hamiltonian of
the chaotic run is

    H = 5 p^2 - 8 x^2 + 0.05 x^4 + 65 x cos(2 pi tau),

taken literally in these units.  Strang splitting applies the kinetic
factor in wavenumber space (p maps to k under psi(x) ~ e^{i k x}) and
the time-dependent potential at the half-step midpoint, which is second
order in dt.  The grid is sized so no absorbing boundaries are needed;
mass reaching an edge raises instead of silently wrapping.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryLeakError, GridExtentError, LeakageError
from .fock import PureState

KINETIC_COEFF = 5.0
DRIVE_AMPLITUDE = 65.0
QUADRATIC_COEFF = -8.0
QUARTIC_COEFF = 0.05
DRIVE_FREQ = 2.0 * np.pi

EDGE_TOL = 1e-12


@dataclass(frozen=True)
class SpatialGrid:
    x_min: float = -30.0
    x_max: float = 30.0
    n_points: int = 4096

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 2.5e-4
    t_final: float = 5.0
    grid: SpatialGrid = SpatialGrid()

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError("t_final must be an integer number of steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class WaveFunction:
    samples: np.ndarray
    x_min: float
    dx: float

    @property
    def n_points(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dx)

    @property
    def edge_density(self) -> float:
        return float(max(abs(self.samples[0]) ** 2, abs(self.samples[-1]) ** 2))

    def validate(self):
        if abs(self.norm2 - 1.0) > 1e-10:
            raise ValueError(f"norm^2 off by {self.norm2 - 1.0:.3e}")
        if self.edge_density > EDGE_TOL:
            raise BoundaryLeakError(f"edge density {self.edge_density:.3e}")
        return self

    def moments(self):
        """(mean x, mean p, <x^2>, <p^2>) by grid and spectral sums."""
        psi = self.samples
        prob = np.abs(psi) ** 2 * self.dx
        mx = float(np.sum(self.x * prob))
        mx2 = float(np.sum(self.x**2 * prob))
        phat2 = np.abs(np.fft.fft(psi)) ** 2
        phat2 /= np.sum(phat2)
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        mp = float(np.sum(k * phat2))
        mp2 = float(np.sum(k**2 * phat2))
        return mx, mp, mx2, mp2


def coherent_wavefunction(x0, p0, grid: SpatialGrid = SpatialGrid()) -> WaveFunction:
    """Coherent state pi^{-1/4} exp(-(x - x0)^2/2 + i p0 x) on the grid."""
    width = 1.0 / np.sqrt(2.0)
    if x0 - 5 * width < grid.x_min or x0 + 5 * width > grid.x_max:
        raise GridExtentError(
            f"grid [{grid.x_min}, {grid.x_max}] does not contain x0 = {x0} +- 5 widths"
        )
    x = grid.x
    psi = np.pi**-0.25 * np.exp(-((x - x0) ** 2) / 2.0 + 1j * p0 * x)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WaveFunction(psi, grid.x_min, grid.dx)


def split_step_evolve(psi: WaveFunction, kinetic_coeff, potential_fn,
                      config: EvolutionConfig, t0=0.0, check_edges=True) -> WaveFunction:
    """Strang-split evolution under kinetic_coeff * p^2 + potential_fn(x, tau)."""
    grid = SpatialGrid(psi.x_min, psi.x_min + psi.dx * psi.n_points, psi.n_points)
    x, k = grid.x, grid.k
    dt = config.dt
    kin = np.exp(-1j * kinetic_coeff * k**2 * dt)
    cur = psi.samples.astype(complex)
    tau = t0
    for _ in range(config.n_steps):
        half = np.exp(-0.5j * dt * potential_fn(x, tau + dt / 2.0))
        cur = half * cur
        cur = np.fft.ifft(kin * np.fft.fft(cur))
        cur = half * cur
        tau += dt
        if check_edges:
            edge = max(abs(cur[0]) ** 2, abs(cur[-1]) ** 2)
            if edge > 1e-10:
                raise BoundaryLeakError(
                    f"edge density {edge:.3e} at tau = {tau:.4f}; enlarge the grid"
                )
    return WaveFunction(cur, psi.x_min, psi.dx)


def double_well_potential(x, tau):
    return (
        QUADRATIC_COEFF * x**2
        + QUARTIC_COEFF * x**4
        + DRIVE_AMPLITUDE * x * np.cos(DRIVE_FREQ * tau)
    )


def evolve_chaotic(psi: WaveFunction, config: EvolutionConfig = EvolutionConfig()) -> WaveFunction:
    """Evolve under the driven double-well Hamiltonian from tau = 0."""
    return split_step_evolve(psi, KINETIC_COEFF, double_well_potential, config)


# ---------------------------------------------------------------------------
# oscillator-basis projection
# ---------------------------------------------------------------------------

def hermite_functions(x, n_max):
    """Orthonormal oscillator eigenfunctions phi_0..phi_{n_max-1} on x."""
    out = np.empty((n_max, x.size))
    out[0] = np.pi**-0.25 * np.exp(-(x**2) / 2.0)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def suggest_fock_dim(psi: WaveFunction, sigmas=6.0) -> int:
    mx, mp, mx2, mp2 = psi.moments()
    mean_n = max(0.0, (mx2 + mp2 - 1.0) / 2.0)
    return int(np.ceil(mean_n + sigmas * np.sqrt(mean_n + 1.0) + 10))


def wavefunction_to_fock(psi: WaveFunction, dim=None, leak_tol=1e-3, max_dim=1024):
    """Project onto number states; returns (state, leakage).

    Leakage is the squared norm lost to levels >= dim; exceeding
    leak_tol raises instead of silently renormalizing it away.  With
    dim=None the truncation grows (moment-based start) until leakage is
    within tolerance: far-from-Gaussian states occupy number levels well
    past their mean occupation.
    """
    auto = dim is None
    if auto:
        dim = suggest_fock_dim(psi)
    while True:
        basis = hermite_functions(psi.x, dim)
        coeffs = basis @ psi.samples * psi.dx
        captured = float(np.sum(np.abs(coeffs) ** 2)) / psi.norm2
        leakage = 1.0 - captured
        if leakage <= leak_tol:
            return PureState(coeffs), leakage
        if not auto or dim >= max_dim:
            raise LeakageError(
                f"projection onto {dim} levels leaks {leakage:.3e} > {leak_tol:.0e}",
                leakage=leakage,
            )
        dim = min(max_dim, int(1.4 * dim) + 16)


def fock_to_wavefunction(state: PureState, grid: SpatialGrid) -> WaveFunction:
    basis = hermite_functions(grid.x, state.dim)
    psi = state.coeffs @ basis.astype(complex)
    nrm = np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WaveFunction(psi / nrm, grid.x_min, grid.dx)
