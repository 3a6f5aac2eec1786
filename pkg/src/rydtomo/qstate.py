"""Two-atom state algebra on the extended per-atom basis.

Each atom lives in a 4-level space: the qubit states plus two aggregated
loss levels.  Basis ordering is fixed here and used by every other module:

    0  UP      qubit |up>   (F=2, M=2)
    1  DOWN    qubit |down> (F=1, M=1), the state read out as a recapture
    2  X_GONE  atom physically absent (left the trap)
    3  X_TRAP  atom trapped but outside the qubit basis (e.g. F=2, M=1)

Two-atom indices are atom-a major: ``index = 4 * level_a + level_b``,
giving a 16x16 density matrix.  Both X levels behave identically under
rotations and push-out detection; they differ only in whether a
no-push-out recapture finds the atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

__all__ = [
    "DIM",
    "Level",
    "DensityMatrix",
    "QubitSummary",
    "NormalizationError",
    "pair_index",
    "index_levels",
    "pure_state",
    "qubit_summary",
    "qubit_trace",
    "bell_psi_plus",
    "bell_psi_minus",
    "bell_phi",
]

N_LEVELS = 4
DIM = N_LEVELS * N_LEVELS

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
NORM_ATOL = 1e-9


class Level(IntEnum):
    UP = 0
    DOWN = 1
    X_GONE = 2
    X_TRAP = 3


LOSS_LEVELS = (Level.X_GONE, Level.X_TRAP)
QUBIT_LEVELS = (Level.UP, Level.DOWN)


class NormalizationError(ValueError):
    """Raised for state vectors or matrices violating normalization."""


def pair_index(level_a: Level | int, level_b: Level | int) -> int:
    """Two-atom basis index for (atom a, atom b) levels."""
    return N_LEVELS * int(level_a) + int(level_b)


def index_levels(index: int) -> tuple[Level, Level]:
    """Inverse of :func:`pair_index`."""
    return Level(index // N_LEVELS), Level(index % N_LEVELS)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated, immutable 16x16 two-atom density matrix.

    Construction enforces Hermiticity (1e-12 absolute), unit trace over
    the full extended basis (1e-12) and positivity (smallest eigenvalue
    >= -1e-10).  The qubit-restricted trace of a lossy state is below 1
    and is computed by :func:`qubit_trace`, not by this invariant.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (DIM, DIM):
            raise ValueError(f"density matrix must be {DIM}x{DIM}, got {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITICITY_ATOL):
            raise NormalizationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise NormalizationError(f"trace {tr!r} != 1 beyond tolerance")
        if np.linalg.eigvalsh(m).min() < EIGENVALUE_FLOOR:
            raise NormalizationError("density matrix has a negative eigenvalue")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def population(self, level_a: Level | int, level_b: Level | int) -> float:
        return self.mat[pair_index(level_a, level_b), pair_index(level_a, level_b)].real

    def element(self, bra: tuple[int, int], ket: tuple[int, int]) -> complex:
        """Matrix element <bra_a, bra_b| rho |ket_a, ket_b>."""
        return self.mat[pair_index(*bra), pair_index(*ket)]

    @property
    def populations(self) -> np.ndarray:
        """Diagonal reshaped to a (4, 4) array indexed [level_a, level_b]."""
        return np.real(np.diag(self.mat)).reshape(N_LEVELS, N_LEVELS)

    def to_json_dict(self) -> dict:
        return {
            "dim": DIM,
            "re": self.mat.real.reshape(-1).tolist(),
            "im": self.mat.imag.reshape(-1).tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DensityMatrix":
        dim = int(data["dim"])
        if dim != DIM:
            raise ValueError(f"unsupported dimension {dim}")
        re = np.asarray(data["re"], dtype=float).reshape(DIM, DIM)
        im = np.asarray(data["im"], dtype=float).reshape(DIM, DIM)
        return cls(re + 1j * im)


def pure_state(amplitudes: np.ndarray) -> DensityMatrix:
    """Density matrix |psi><psi| of a 16-component state vector.

    Raises :class:`NormalizationError` unless the vector has unit norm
    within 1e-9.
    """
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (DIM,):
        raise ValueError(f"state vector must have {DIM} components")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_ATOL:
        raise NormalizationError(f"state vector norm {norm!r} != 1")
    return DensityMatrix(np.outer(psi / norm, psi.conj() / norm))


@dataclass(frozen=True)
class QubitSummary:
    """The eight quantities the analysis extracts from a two-atom state.

    ``p_ud`` is the population with atom a up / atom b down, ``p_du`` the
    reverse; ``re_coh`` is Re(rho[down-up, up-down]); ``p_xx`` is the
    joint population with both atoms in loss levels.
    """

    p_dd: float
    p_uu: float
    p_ud: float
    p_du: float
    re_coh: float
    l_a: float
    l_b: float
    l_total: float
    p_xx: float


def qubit_summary(rho: DensityMatrix) -> QubitSummary:
    """Populations, coherence and loss probabilities of a state.

    Loss sums run over both X levels.  ``l_total`` is defined through the
    normalization condition ``1 - (p_dd + p_uu + p_ud + p_du)``.
    """
    pops = rho.populations
    p_uu = pops[Level.UP, Level.UP]
    p_dd = pops[Level.DOWN, Level.DOWN]
    p_ud = pops[Level.UP, Level.DOWN]
    p_du = pops[Level.DOWN, Level.UP]
    re_coh = rho.element((Level.DOWN, Level.UP), (Level.UP, Level.DOWN)).real

    x = list(LOSS_LEVELS)
    p_xx = float(pops[np.ix_(x, x)].sum())
    # atom a outside qubit basis: x-row populations plus the joint block
    l_a = float(pops[np.ix_(x, list(QUBIT_LEVELS))].sum()) + p_xx
    l_b = float(pops[np.ix_(list(QUBIT_LEVELS), x)].sum()) + p_xx
    l_total = 1.0 - (p_dd + p_uu + p_ud + p_du)
    return QubitSummary(
        p_dd=p_dd,
        p_uu=p_uu,
        p_ud=p_ud,
        p_du=p_du,
        re_coh=re_coh,
        l_a=l_a,
        l_b=l_b,
        l_total=l_total,
        p_xx=p_xx,
    )


def qubit_trace(rho: DensityMatrix) -> float:
    """Trace restricted to pairs still in the qubit basis."""
    pops = rho.populations
    q = list(QUBIT_LEVELS)
    return float(pops[np.ix_(q, q)].sum())


def _two_atom_ket(level_a: Level, level_b: Level) -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    psi[pair_index(level_a, level_b)] = 1.0
    return psi


def bell_psi_plus(phase: float = 0.0) -> DensityMatrix:
    """(|down,up> + e^{i phase} |up,down>) / sqrt(2) as a density matrix."""
    psi = (
        _two_atom_ket(Level.DOWN, Level.UP)
        + np.exp(1j * phase) * _two_atom_ket(Level.UP, Level.DOWN)
    ) / np.sqrt(2.0)
    return pure_state(psi)


def bell_psi_minus() -> DensityMatrix:
    """(|up,down> - |down,up>) / sqrt(2), invariant under global rotations."""
    psi = (
        _two_atom_ket(Level.UP, Level.DOWN) - _two_atom_ket(Level.DOWN, Level.UP)
    ) / np.sqrt(2.0)
    return pure_state(psi)


def bell_phi(sign: int = +1) -> DensityMatrix:
    """(|up,up> +/- |down,down>) / sqrt(2)."""
    psi = (
        _two_atom_ket(Level.UP, Level.UP)
        + float(sign) * _two_atom_ket(Level.DOWN, Level.DOWN)
    ) / np.sqrt(2.0)
    return pure_state(psi)
