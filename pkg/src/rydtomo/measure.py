"""Shot-level synthetic experiment with push-out readout semantics.

Every repetition draws a fresh uniform Raman phase, rotates the state,
then samples the joint 16-outcome level pair from the rotated diagonal,
so correlations between the two traps are kept intact.  A recapture (bit
1) means the atom was found after the push-out pulse, i.e. it was in
|down>; with the push-out disabled it means the atom is simply present.
Detection errors are one-sided 1 -> 0 flips: a trapped atom can be missed
but an absent atom is never seen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .qstate import DIM, DensityMatrix, Level, N_LEVELS
from .rotation import ObservableCurves, phi_harmonics_of_populations, _MAX_PHI_HARMONIC

__all__ = ["ShotRecord", "ShotDataset", "sample_dataset", "sample_p_recap"]

_RECAP_STREAM_KEY = 0x5EC4  # keeps the no-push-out stream clear of theta streams


@dataclass(frozen=True)
class ShotRecord:
    theta: float
    rep_index: int
    outcome_a: int
    outcome_b: int
    pushout_applied: bool


@dataclass(frozen=True)
class ShotDataset:
    """Binary recapture outcomes for every (theta, repetition) pair."""

    theta_grid: np.ndarray
    outcomes_a: np.ndarray  # (n_theta, reps) of 0/1
    outcomes_b: np.ndarray
    seed: int
    repetitions_per_theta: int
    pushout_applied: bool = True
    detect_error: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.theta_grid, dtype=float)
        a = np.asarray(self.outcomes_a, dtype=np.uint8)
        b = np.asarray(self.outcomes_b, dtype=np.uint8)
        shape = (grid.shape[0], self.repetitions_per_theta)
        if a.shape != shape or b.shape != shape:
            raise ValueError(f"outcome arrays must have shape {shape}")
        if a.max(initial=0) > 1 or b.max(initial=0) > 1:
            raise ValueError("outcomes must be bits")
        for name, arr in (("theta_grid", grid), ("outcomes_a", a), ("outcomes_b", b)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_theta(self) -> int:
        return self.theta_grid.shape[0]

    def records(self) -> Iterator[ShotRecord]:
        for i, theta in enumerate(self.theta_grid):
            for r in range(self.repetitions_per_theta):
                yield ShotRecord(theta=float(theta), rep_index=r,
                                 outcome_a=int(self.outcomes_a[i, r]),
                                 outcome_b=int(self.outcomes_b[i, r]),
                                 pushout_applied=self.pushout_applied)

    def joint_counts(self) -> np.ndarray:
        """Per-theta counts of (11, 10, 01, 00) outcomes, shape (n_theta, 4)."""
        a = self.outcomes_a.astype(np.int64)
        b = self.outcomes_b.astype(np.int64)
        n11 = (a & b).sum(axis=1)
        n10 = (a & (1 - b)).sum(axis=1)
        n01 = ((1 - a) & b).sum(axis=1)
        n00 = ((1 - a) & (1 - b)).sum(axis=1)
        return np.stack([n11, n10, n01, n00], axis=1)

    def empirical_curves(self) -> ObservableCurves:
        counts = self.joint_counts().astype(float)
        n = float(self.repetitions_per_theta)
        p11, p10, p01, p00 = (counts[:, k] / n for k in range(4))
        return ObservableCurves(
            thetas=self.theta_grid, p_a=p11 + p10, p_b=p11 + p01,
            p11=p11, p00=p00, p01=p01, p10=p10,
            pi_signal=p11 + p00 - p01 - p10,
        )

    def to_csv(self, csv_path, meta_path, config_hash: str | None = None) -> None:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("theta,rep,outcome_a,outcome_b\n")
            for rec in self.records():
                fh.write(f"{rec.theta:.12g},{rec.rep_index},{rec.outcome_a},{rec.outcome_b}\n")
        meta = {
            "seed": self.seed,
            "reps": self.repetitions_per_theta,
            "theta_grid": [float(t) for t in self.theta_grid],
            "pushout_applied": self.pushout_applied,
            "detect_error": self.detect_error,
            "config_sha256": config_hash,
        }
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_csv(cls, csv_path, meta_path) -> "ShotDataset":
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
        grid = np.asarray(meta["theta_grid"], dtype=float)
        reps = int(meta["reps"])
        a = np.zeros((grid.shape[0], reps), dtype=np.uint8)
        b = np.zeros_like(a)
        raw = np.genfromtxt(csv_path, delimiter=",", names=True)
        raw = np.atleast_1d(raw)
        if raw.shape[0] != grid.shape[0] * reps:
            raise ValueError("shot file row count does not match metadata")
        rows = raw["rep"].astype(int)
        theta_idx = np.repeat(np.arange(grid.shape[0]), reps)
        a[theta_idx, rows] = raw["outcome_a"].astype(np.uint8)
        b[theta_idx, rows] = raw["outcome_b"].astype(np.uint8)
        return cls(theta_grid=grid, outcomes_a=a, outcomes_b=b,
                   seed=int(meta["seed"]), repetitions_per_theta=reps,
                   pushout_applied=bool(meta["pushout_applied"]),
                   detect_error=float(meta.get("detect_error", 0.0)))


def _sample_levels(rng: np.random.Generator, rho_mat: np.ndarray, theta: float,
                   reps: int) -> tuple[np.ndarray, np.ndarray]:
    """Joint level pairs for ``reps`` shots, each with its own Raman phase."""
    phis = rng.uniform(0.0, 2.0 * np.pi, size=reps)
    c0, a, b = phi_harmonics_of_populations(rho_mat, theta)
    ks = np.arange(1, _MAX_PHI_HARMONIC + 1)
    probs = (c0[None, :]
             + np.cos(phis[:, None] * ks[None, :]) @ a
             + np.sin(phis[:, None] * ks[None, :]) @ b)
    np.clip(probs, 0.0, None, out=probs)
    cum = np.cumsum(probs, axis=1)
    u = rng.uniform(0.0, 1.0, size=reps) * cum[:, -1]
    idx = (cum < u[:, None]).sum(axis=1)
    np.clip(idx, 0, DIM - 1, out=idx)
    return idx // N_LEVELS, idx % N_LEVELS


def sample_dataset(rho: DensityMatrix, theta_grid, reps: int,
                   detect_error: float = 0.0, seed: int = 0,
                   pushout: bool = True) -> ShotDataset:
    """Draw a synthetic shot dataset from a two-atom state.

    For each angle and repetition: draw a uniform Raman phase, rotate,
    sample the joint level pair from the rotated diagonal, map levels to
    recapture bits (|down> with push-out, any trapped level without) and
    apply the one-sided detection flip.  The RNG stream is keyed on
    (seed, theta index) with a fixed draw order per angle, so a dataset
    is fully determined by its seed and configuration.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if not 0.0 <= detect_error <= 1.0:
        raise ValueError("detect_error must be a probability")
    grid = np.asarray(theta_grid, dtype=float)
    out_a = np.empty((grid.shape[0], reps), dtype=np.uint8)
    out_b = np.empty_like(out_a)
    for i, theta in enumerate(grid):
        rng = np.random.default_rng([seed, i])
        la, lb = _sample_levels(rng, rho.mat, float(theta), reps)
        if pushout:
            bit_a = (la == Level.DOWN)
            bit_b = (lb == Level.DOWN)
        else:
            bit_a = (la != Level.X_GONE)
            bit_b = (lb != Level.X_GONE)
        if detect_error > 0.0:
            bit_a = bit_a & (rng.uniform(size=reps) >= detect_error)
            bit_b = bit_b & (rng.uniform(size=reps) >= detect_error)
        out_a[i] = bit_a.astype(np.uint8)
        out_b[i] = bit_b.astype(np.uint8)
    return ShotDataset(theta_grid=grid, outcomes_a=out_a, outcomes_b=out_b,
                       seed=seed, repetitions_per_theta=reps,
                       pushout_applied=pushout, detect_error=detect_error)


def sample_p_recap(rho: DensityMatrix, reps: int, seed: int = 0) -> float:
    """No-push-out recapture experiment: fraction of shots with both atoms.

    No rotation is applied; each repetition draws the joint level pair
    from the state's diagonal and counts a success when neither atom is
    in X_GONE (X_TRAP atoms are still trapped and count as recaptured).
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rng = np.random.default_rng([seed, _RECAP_STREAM_KEY])
    probs = np.clip(np.real(np.diag(rho.mat)), 0.0, None)
    cum = np.cumsum(probs)
    u = rng.uniform(0.0, 1.0, size=reps) * cum[-1]
    idx = (cum[None, :] < u[:, None]).sum(axis=1)
    np.clip(idx, 0, DIM - 1, out=idx)
    la, lb = idx // N_LEVELS, idx % N_LEVELS
    both = (la != Level.X_GONE) & (lb != Level.X_GONE)
    return float(both.mean())
