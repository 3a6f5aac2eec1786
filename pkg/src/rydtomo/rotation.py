"""Global Raman rotations and phase-averaged observables.

Both atoms see the same laser field, so a rotation acts as R(theta, phi)
on each atom's qubit subspace and as the identity on the loss levels.
The Raman phase phi is random from shot to shot; every measured quantity
is therefore an average over phi uniform on [0, 2pi).  That average
erases all two-atom coherences except rho[down-up, up-down], whose real
part survives in the joint recapture signal.

The phi-dependence of any rotated matrix element is a trigonometric
polynomial with harmonics bounded by 4 (two phase factors per side of
the conjugation), so averaging over a uniform grid of 5 or more points
is exact; 8 points are used by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qstate import DIM, DensityMatrix, Level, N_LEVELS, pair_index

__all__ = [
    "OMEGA_RAMAN_DEFAULT",
    "RotationParams",
    "ObservableCurves",
    "rotation_matrix",
    "apply_rotation",
    "phase_averaged_state",
    "curves_closed_form",
    "curves_monte_carlo",
    "default_theta_grid",
]

OMEGA_RAMAN_DEFAULT = 2.0 * np.pi * 250e3  # rad/s, qubit Rabi frequency
PHASE_GRID_POINTS = 8
_MAX_PHI_HARMONIC = 4


@dataclass(frozen=True)
class RotationParams:
    """Rotation angle theta = omega_raman * tau and Raman phase phi."""

    theta: float
    phi: float = 0.0
    omega_raman: float = OMEGA_RAMAN_DEFAULT

    def __post_init__(self):
        if self.omega_raman <= 0.0:
            raise ValueError("omega_raman must be positive")

    @property
    def duration(self) -> float:
        """Pulse duration in seconds realizing this angle."""
        return self.theta / self.omega_raman

    @classmethod
    def from_duration(cls, tau: float, phi: float = 0.0,
                      omega_raman: float = OMEGA_RAMAN_DEFAULT) -> "RotationParams":
        return cls(theta=omega_raman * tau, phi=phi, omega_raman=omega_raman)


def rotation_matrix(params: RotationParams) -> np.ndarray:
    """Single-atom 4x4 rotation unitary.

    The qubit block mixes |up> and |down> with cos(theta/2) diagonals and
    i e^{+/- i phi} sin(theta/2) off-diagonals; the two loss levels are
    untouched (they are not coupled by the Raman lasers).
    """
    c = np.cos(params.theta / 2.0)
    s = np.sin(params.theta / 2.0)
    r = np.eye(N_LEVELS, dtype=complex)
    r[Level.UP, Level.UP] = c
    r[Level.DOWN, Level.DOWN] = c
    r[Level.UP, Level.DOWN] = 1j * np.exp(1j * params.phi) * s
    r[Level.DOWN, Level.UP] = 1j * np.exp(-1j * params.phi) * s
    return r


def _two_atom_rotation(theta: float, phi: float) -> np.ndarray:
    r = rotation_matrix(RotationParams(theta=theta, phi=phi))
    return np.kron(r, r)


def _rotate_mat(mat: np.ndarray, theta: float, phi: float) -> np.ndarray:
    u = _two_atom_rotation(theta, phi)
    return u @ mat @ u.conj().T


def apply_rotation(rho: DensityMatrix, params: RotationParams) -> DensityMatrix:
    """Conjugate the state by the identical rotation on both atoms."""
    return DensityMatrix(_rotate_mat(rho.mat, params.theta, params.phi))


def phase_averaged_state(rho: DensityMatrix, theta: float,
                         n_phi: int = PHASE_GRID_POINTS) -> DensityMatrix:
    """Rotated state averaged over the uniform random Raman phase.

    The mean over an ``n_phi``-point uniform grid equals the continuous
    phase average exactly for any ``n_phi > 4``.
    """
    if n_phi <= _MAX_PHI_HARMONIC:
        raise ValueError(f"n_phi must exceed {_MAX_PHI_HARMONIC} for an exact average")
    acc = np.zeros((DIM, DIM), dtype=complex)
    for k in range(n_phi):
        acc += _rotate_mat(rho.mat, theta, 2.0 * np.pi * k / n_phi)
    return DensityMatrix(acc / n_phi)


_A_DOWN = [pair_index(Level.DOWN, m) for m in range(N_LEVELS)]
_B_DOWN = [pair_index(n, Level.DOWN) for n in range(N_LEVELS)]


@dataclass(frozen=True)
class ObservableCurves:
    """Phase-averaged recapture probabilities versus rotation angle.

    ``pi_signal`` is p11 + p00 - p01 - p10, the parity when no atom has
    left the qubit basis.
    """

    thetas: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    p11: np.ndarray
    p00: np.ndarray
    p01: np.ndarray
    p10: np.ndarray
    pi_signal: np.ndarray

    def __post_init__(self):
        for name in ("thetas", "p_a", "p_b", "p11", "p00", "p01", "p10", "pi_signal"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.thetas.shape[0]
        if any(getattr(self, c).shape != (n,) for c in
               ("p_a", "p_b", "p11", "p00", "p01", "p10", "pi_signal")):
            raise ValueError("curve columns must match the theta grid length")

    _COLUMNS = ("theta", "p_a", "p_b", "p11", "p00", "p01", "p10", "pi")

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(self._COLUMNS) + "\n")
            for row in zip(self.thetas, self.p_a, self.p_b, self.p11,
                           self.p00, self.p01, self.p10, self.pi_signal):
                fh.write(",".join(f"{v:.12g}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "ObservableCurves":
        data = np.genfromtxt(path, delimiter=",", names=True)
        data = np.atleast_1d(data)
        return cls(
            thetas=data["theta"], p_a=data["p_a"], p_b=data["p_b"],
            p11=data["p11"], p00=data["p00"], p01=data["p01"],
            p10=data["p10"], pi_signal=data["pi"],
        )


def default_theta_grid() -> np.ndarray:
    """Display grid spanning two full rotation periods, 41 points."""
    return np.linspace(0.0, 4.0 * np.pi, 41)


def _curve_set(thetas, p_a, p_b, p11) -> ObservableCurves:
    """Complete the remaining columns from the exact count identities."""
    p10 = p_a - p11
    p01 = p_b - p11
    p00 = 1.0 - p11 - p01 - p10
    pi = p11 + p00 - p01 - p10
    return ObservableCurves(thetas=np.asarray(thetas, dtype=float), p_a=p_a, p_b=p_b,
                            p11=p11, p00=p00, p01=p01, p10=p10, pi_signal=pi)


def curves_closed_form(rho: DensityMatrix, thetas: np.ndarray) -> ObservableCurves:
    """Analytic phase-averaged curves.

    Each observable is a three-term cosine series y0 + A cos(theta)
    + B cos(2 theta) whose coefficients are read directly off the input
    state: populations, the surviving down-up/up-down coherence, and the
    single- and two-atom loss populations.  This path never builds a
    rotated matrix; the numerically averaged state provides an
    independent cross-check.
    """
    thetas = np.asarray(thetas, dtype=float)
    pops = rho.populations
    p_uu = pops[Level.UP, Level.UP]
    p_dd = pops[Level.DOWN, Level.DOWN]
    p_ud = pops[Level.UP, Level.DOWN]
    p_du = pops[Level.DOWN, Level.UP]
    re_coh = rho.element((Level.DOWN, Level.UP), (Level.UP, Level.DOWN)).real
    x = [Level.X_GONE, Level.X_TRAP]
    # single-loss populations: s_ax[m] with atom a lost, partner in m
    s_xu = float(pops[np.ix_(x, [Level.UP])].sum())    # a lost, b up
    s_xd = float(pops[np.ix_(x, [Level.DOWN])].sum())  # a lost, b down
    s_ux = float(pops[np.ix_([Level.UP], x)].sum())    # b lost, a up
    s_dx = float(pops[np.ix_([Level.DOWN], x)].sum())  # b lost, a down
    p_xx = float(pops[np.ix_(x, x)].sum())

    qsum = p_ud + p_du + p_uu + p_dd
    cos1 = np.cos(thetas)
    cos2 = np.cos(2.0 * thetas)

    p_a = 0.5 * (qsum + s_ux + s_dx) + 0.5 * (p_dd - p_uu + p_du - p_ud + s_dx - s_ux) * cos1
    p_b = 0.5 * (qsum + s_xu + s_xd) + 0.5 * (p_dd - p_uu + p_ud - p_du + s_xd - s_xu) * cos1
    p11 = (
        (p_ud + p_du + 2.0 * re_coh + 3.0 * (p_uu + p_dd)) / 8.0
        + 0.5 * (p_dd - p_uu) * cos1
        + (p_dd + p_uu - p_ud - p_du - 2.0 * re_coh) / 8.0 * cos2
    )
    return _curve_set(thetas, p_a, p_b, p11)


def curves_from_averaged_states(rho: DensityMatrix, thetas: np.ndarray,
                                n_phi: int = PHASE_GRID_POINTS) -> ObservableCurves:
    """Curves read off the diagonals of the phase-averaged states.

    Independent of :func:`curves_closed_form`; the two must agree to
    numerical precision.
    """
    thetas = np.asarray(thetas, dtype=float)
    p_a = np.empty_like(thetas)
    p_b = np.empty_like(thetas)
    p11 = np.empty_like(thetas)
    for i, th in enumerate(thetas):
        diag = np.real(np.diag(phase_averaged_state(rho, th, n_phi=n_phi).mat))
        p_a[i] = diag[_A_DOWN].sum()
        p_b[i] = diag[_B_DOWN].sum()
        p11[i] = diag[pair_index(Level.DOWN, Level.DOWN)]
    return _curve_set(thetas, p_a, p_b, p11)


def phi_harmonics_of_populations(rho_mat: np.ndarray, theta: float,
                                 n_grid: int = 16) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fourier coefficients in phi of the rotated-state populations.

    Returns ``(c0, a, b)`` with ``c0`` of shape (16,) and ``a``, ``b`` of
    shape (4, 16) such that the population vector at Raman phase phi is
    ``c0 + sum_k a[k-1] cos(k phi) + b[k-1] sin(k phi)``.  Exact because
    the harmonic content is bounded by 4 and ``n_grid`` exceeds twice
    that bound.
    """
    if n_grid < 2 * _MAX_PHI_HARMONIC + 1:
        raise ValueError("n_grid too small for exact interpolation")
    samples = np.empty((n_grid, DIM))
    for m in range(n_grid):
        phi = 2.0 * np.pi * m / n_grid
        u = _two_atom_rotation(theta, phi)
        samples[m] = np.real(np.einsum("ij,jk,ik->i", u, rho_mat, u.conj()))
    coef = np.fft.rfft(samples, axis=0) / n_grid
    c0 = coef[0].real
    a = 2.0 * coef[1:_MAX_PHI_HARMONIC + 1].real
    b = -2.0 * coef[1:_MAX_PHI_HARMONIC + 1].imag
    return c0, a, b


def curves_monte_carlo(rho: DensityMatrix, thetas: np.ndarray, shots_phi: int,
                       seed: int) -> ObservableCurves:
    """Curves estimated by sampling the Raman phase uniformly.

    Monte-Carlo oracle for :func:`curves_closed_form`: the estimate is
    the mean over ``shots_phi`` random phases of the exact rotated-state
    populations, converging at the usual 1/sqrt(shots) rate.  The RNG
    stream is keyed on (seed, theta index), so results do not depend on
    evaluation order.
    """
    if shots_phi < 1:
        raise ValueError("shots_phi must be at least 1")
    thetas = np.asarray(thetas, dtype=float)
    p_a = np.empty_like(thetas)
    p_b = np.empty_like(thetas)
    p11 = np.empty_like(thetas)
    ks = np.arange(1, _MAX_PHI_HARMONIC + 1)
    for i, th in enumerate(thetas):
        rng = np.random.default_rng([seed, i])
        phis = rng.uniform(0.0, 2.0 * np.pi, size=shots_phi)
        c0, a, b = phi_harmonics_of_populations(rho.mat, th)
        mean_cos = np.cos(np.outer(ks, phis)).mean(axis=1)
        mean_sin = np.sin(np.outer(ks, phis)).mean(axis=1)
        diag = c0 + mean_cos @ a + mean_sin @ b
        p_a[i] = diag[_A_DOWN].sum()
        p_b[i] = diag[_B_DOWN].sum()
        p11[i] = diag[pair_index(Level.DOWN, Level.DOWN)]
    return _curve_set(thetas, p_a, p_b, p11)
