"""Eigenchannel (singular value) layer of a multiple-input transmission matrix.

The Fourier-domain transmittance matrix F of a K_in-transmitter, K_out-receiver
arrangement factors as F = U2 * diag(lambda) * F1inv with U2 and F1inv unitary;
the lambda_i are the non-negative singular values ("eigenchannels") in
descending order, and lambda_i^2 are the eigenvalues of F F^dagger.

Matrix CSV format accepted by :func:`load_matrix_csv`: row-major, one row per
line, entries comma-separated, each entry ``re:im``:

    0.5:0.0,0.1:-0.2
    0.0:1.0,0.3:0.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class TransmittanceMatrix:
    """Complex K_out x K_in transmittance matrix with K_in <= K_out."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2:
            raise ValueError("entries must be a two-dimensional matrix")
        k_out, k_in = m.shape
        if k_in < 1 or k_out < 1:
            raise ValueError(f"matrix must be non-empty, got shape {m.shape}")
        if k_in > k_out:
            raise ValueError(
                f"inputs must not exceed outputs, got {k_in} inputs and {k_out} outputs"
            )
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", m)

    @property
    def k_out(self) -> int:
        return self.entries.shape[0]

    @property
    def k_in(self) -> int:
        return self.entries.shape[1]

    @property
    def n_min(self) -> int:
        return min(self.entries.shape)


def _check_unitary(m: np.ndarray, name: str, tol: float = 1e-10) -> None:
    gram = m.conj().T @ m
    err = np.max(np.abs(gram - np.eye(m.shape[0])))
    if err > tol:
        raise ValueError(f"{name} is not unitary (max deviation {err:.3e})")


@dataclass(frozen=True)
class EigenDecomposition:
    """Factorisation F = u2 * diag(lambdas) * f1_inv of a transmittance matrix."""

    u2: np.ndarray
    lambdas: np.ndarray
    f1_inv: np.ndarray

    def __post_init__(self):
        u2 = np.asarray(self.u2, dtype=complex)
        f1_inv = np.asarray(self.f1_inv, dtype=complex)
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size != min(u2.shape[0], f1_inv.shape[0]):
            raise ValueError("lambdas must hold one value per eigenchannel")
        if np.any(lam < 0):
            raise ValueError("singular values must be non-negative")
        if np.any(np.diff(lam) > 0):
            raise ValueError("singular values must be sorted in descending order")
        _check_unitary(u2, "u2")
        _check_unitary(f1_inv, "f1_inv")
        object.__setattr__(self, "u2", u2)
        object.__setattr__(self, "f1_inv", f1_inv)
        object.__setattr__(self, "lambdas", lam)


class PartitionFlags(NamedTuple):
    s0_within_unit: bool
    s1_within_inverse_snr: bool


def svd_decompose(m: TransmittanceMatrix) -> EigenDecomposition:
    """Singular value decomposition of the transmittance matrix."""
    u, s, vh = np.linalg.svd(m.entries, full_matrices=True)
    return EigenDecomposition(u, s, vh)


def reconstruct(d: EigenDecomposition) -> TransmittanceMatrix:
    """Rebuild the matrix as the sum of rank-one terms
    sum_i lambda_i * u2[:, i] * f1_inv[i, :]."""
    k_out = d.u2.shape[0]
    k_in = d.f1_inv.shape[1]
    m = np.zeros((k_out, k_in), dtype=complex)
    for i, lam in enumerate(d.lambdas):
        m += lam * np.outer(d.u2[:, i], d.f1_inv[i, :])
    return TransmittanceMatrix(m)


def partition_singulars(
    lambdas, multiplex_rate: float, snr: float
) -> tuple[np.ndarray, np.ndarray, PartitionFlags]:
    """Split singular values into the ceil(multiplex_rate) strongest ones and
    the remainder, and report whether the strong set stays within unit gain
    and the weak set below 1/snr."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1:
        raise ValueError("lambdas must be one-dimensional")
    if np.any(np.diff(lam) > 0):
        raise ValueError("lambdas must be sorted in descending order")
    if not multiplex_rate >= 0:
        raise ValueError(f"multiplex_rate must be >= 0, got {multiplex_rate}")
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    k = math.ceil(multiplex_rate)
    if k > lam.size:
        raise ValueError(
            f"ceil(multiplex_rate) = {k} exceeds the {lam.size} available eigenchannels"
        )
    s0, s1 = lam[:k], lam[k:]
    flags = PartitionFlags(
        s0_within_unit=bool(s0.size == 0 or np.max(s0) <= 1.0),
        s1_within_inverse_snr=bool(s1.size == 0 or np.max(s1) <= 1.0 / snr),
    )
    return s0, s1, flags


def rank_epsilon(lambdas, threshold: float) -> int:
    """Numerical rank: the number of singular values strictly above
    ``threshold``."""
    lam = np.asarray(lambdas, dtype=float)
    if not threshold >= 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    return int(np.count_nonzero(lam > threshold))


def load_matrix_csv(path) -> TransmittanceMatrix:
    """Read a complex matrix from the row-major ``re:im`` CSV format."""
    rows: list[list[complex]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            row = []
            for cell in line.split(","):
                re_part, sep, im_part = cell.strip().partition(":")
                if not sep:
                    raise ValueError(f"{path}:{lineno}: expected re:im, got {cell!r}")
                try:
                    row.append(complex(float(re_part), float(im_part)))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad entry {cell!r}") from None
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no matrix rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have inconsistent lengths {sorted(widths)}")
    return TransmittanceMatrix(np.array(rows, dtype=complex))
