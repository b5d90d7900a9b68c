"""Block diagonalization on equivalent or raw channels.

The same machinery serves both schemes: Hy-BD runs it on the per-user
blocks of the ``K*M_MS x K*M_MS`` equivalent channel, the full-complexity
baseline on the raw ``N_MS x N_BS`` user channels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import MultiUserChannel
from .errors import DesignInfeasible, InvalidArgument
from .power import AllocationResult
from .rf import EquivalentChannel, RfCombiner, RfPrecoder, RfStage, SystemConfig

_EPS = np.finfo(float).eps


def _fix_phase(u: np.ndarray, v: np.ndarray | None = None):
    """Rotate columns so the largest-magnitude entry of each ``u`` column is real positive.

    ``v`` receives the same rotation, which keeps ``u @ diag(s) @ v^H`` intact.
    """
    if u.size == 0:
        return u, v
    idx = np.argmax(np.abs(u), axis=0)
    pivot = u[idx, np.arange(u.shape[1])]
    mag = np.abs(pivot)
    rot = np.where(mag > 0, pivot.conj() / np.where(mag > 0, mag, 1.0), 1.0)
    u = u * rot[None, :]
    if v is not None:
        v = v * rot[None, :]
    return u, v


def complement_channel(blocks: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Row-stack of every block except ``blocks[k]``, in user order."""
    if not 0 <= k < len(blocks):
        raise InvalidArgument(f"user index {k} out of range for {len(blocks)} users")
    others = [b for i, b in enumerate(blocks) if i != k]
    if not others:
        return np.zeros((0, blocks[k].shape[1]), dtype=complex)
    return np.vstack(others)


def numerical_rank(s: np.ndarray, shape: tuple[int, int]) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    tol = s[0] * max(shape) * _EPS
    return int(np.count_nonzero(s > tol))


def null_space_basis(h_bar: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the right null space of ``h_bar``, one vector per column."""
    h_bar = np.asarray(h_bar, dtype=complex)
    rows, cols = h_bar.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(h_bar, full_matrices=True)
    r = numerical_rank(s, h_bar.shape)
    if r >= cols:
        raise DesignInfeasible(
            f"null space is empty: complement channel {rows}x{cols} has rank {r}; "
            "need more transmit dimensions than interfering receive dimensions"
        )
    basis, _ = _fix_phase(vh[r:].conj().T)
    return basis


@dataclass(frozen=True)
class Subchannel:
    """SVD ``u @ diag(s) @ v^H`` of one user's interference-free channel."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.conj().T


@dataclass(frozen=True)
class BdDecomposition:
    blocks: tuple[np.ndarray, ...]
    null_bases: tuple[np.ndarray, ...]
    subchannels: tuple[Subchannel, ...]

    @property
    def users(self) -> int:
        return len(self.blocks)

    def effective(self, k: int) -> np.ndarray:
        return self.blocks[k] @ self.null_bases[k]

    def retained_singular_values(self, n_s: int) -> np.ndarray:
        """First ``n_s`` singular values of every user, concatenated in user order."""
        out = []
        for k, sub in enumerate(self.subchannels):
            if sub.s.size < n_s:
                raise InvalidArgument(
                    f"user {k} subchannel supports {sub.s.size} streams, {n_s} requested"
                )
            out.append(sub.s[:n_s])
        return np.concatenate(out)


def _decompose(blocks: Sequence[np.ndarray]) -> BdDecomposition:
    blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
    bases, subs = [], []
    for k in range(len(blocks)):
        v_bar = null_space_basis(complement_channel(blocks, k))
        u, s, vh = np.linalg.svd(blocks[k] @ v_bar, full_matrices=False)
        u, v = _fix_phase(u, vh.conj().T)
        bases.append(v_bar)
        subs.append(Subchannel(u, s, v))
    return BdDecomposition(blocks, tuple(bases), tuple(subs))


def block_diagonalize(eq: EquivalentChannel) -> BdDecomposition:
    if eq.full.shape[0] != eq.full.shape[1]:
        raise InvalidArgument("Hy-BD needs a square equivalent channel")
    return _decompose(eq.per_user_blocks)


def full_bd_decompose(channel: MultiUserChannel) -> BdDecomposition:
    k, n_ms, n_bs = channel.per_user_matrix.shape
    if n_bs <= (k - 1) * n_ms:
        raise DesignInfeasible(
            f"full BD needs N_BS > (K-1)*N_MS, got {n_bs} <= {(k - 1) * n_ms}"
        )
    return _decompose(tuple(channel.per_user_matrix))


@dataclass(frozen=True)
class HybridDesign:
    """Four-matrix transceiver. ``rf_precoder``/``rf_combiners`` are ``None``
    for the fully digital baseline (identity RF stage)."""

    scheme: str
    rf_precoder: RfPrecoder | None
    rf_combiners: tuple[RfCombiner, ...] | None
    baseband_precoder: np.ndarray
    baseband_combiners: tuple[np.ndarray, ...]
    power_scale: float
    streams_per_user: int

    @property
    def users(self) -> int:
        return len(self.baseband_combiners)

    def precoder_block(self, k: int) -> np.ndarray:
        n = self.streams_per_user
        return self.baseband_precoder[:, k * n:(k + 1) * n]

    def transmit_matrix(self) -> np.ndarray:
        """``F @ B``, the overall transmit precoder."""
        if self.rf_precoder is None:
            return self.baseband_precoder
        return self.rf_precoder.matrix @ self.baseband_precoder

    def combiner_matrix(self, k: int) -> np.ndarray | None:
        return None if self.rf_combiners is None else self.rf_combiners[k].matrix

    def effective_channels(self, channel: MultiUserChannel | np.ndarray) -> list[np.ndarray]:
        """``W_k^H H_k F`` for every user (raw ``H_k`` without an RF stage)."""
        h = channel.per_user_matrix if isinstance(channel, MultiUserChannel) else channel
        out = []
        for k in range(self.users):
            h_k = h[k]
            w = self.combiner_matrix(k)
            if w is not None:
                h_k = w.conj().T @ h_k
            if self.rf_precoder is not None:
                h_k = h_k @ self.rf_precoder.matrix
            out.append(h_k)
        return out

    def with_scale(self, factor: float) -> "HybridDesign":
        return HybridDesign(self.scheme, self.rf_precoder, self.rf_combiners,
                            self.baseband_precoder * factor, self.baseband_combiners,
                            self.power_scale * factor, self.streams_per_user)


def assemble_hybrid_design(decomp: BdDecomposition, config: SystemConfig,
                           allocation: AllocationResult, rf: RfStage | None = None,
                           scheme: str | None = None) -> HybridDesign:
    """Combine null-space bases, subchannel SVDs and power loads.

    Per-user precoder ``B_k = Vbar_k V_k[:, :N_S] diag(sqrt(lambda_k))`` and
    combiner ``M_k = U_k[:, :N_S]``; one global scale then sets
    ``||F B||_F^2 = K N_S``.
    """
    n_s = config.streams_per_user
    k_users = decomp.users
    lam = np.asarray(allocation.lam, dtype=float)
    if lam.size != k_users * n_s:
        raise InvalidArgument(f"allocation has {lam.size} loads, need {k_users * n_s}")
    if rf is not None and n_s > rf.combiners[0].matrix.shape[1]:
        raise InvalidArgument("N_S exceeds M_MS")
    b_blocks, m_blocks = [], []
    for k, sub in enumerate(decomp.subchannels):
        if sub.s.size < n_s:
            raise InvalidArgument(f"user {k} subchannel supports only {sub.s.size} streams")
        loads = np.sqrt(lam[k * n_s:(k + 1) * n_s])
        b_blocks.append((decomp.null_bases[k] @ sub.v[:, :n_s]) * loads[None, :])
        m_blocks.append(sub.u[:, :n_s])
    b = np.hstack(b_blocks)
    fb = b if rf is None else rf.precoder.matrix @ b
    scale = np.sqrt(k_users * n_s / np.vdot(fb, fb).real)
    return HybridDesign(
        scheme or ("hybd" if rf is not None else "full_bd"),
        None if rf is None else rf.precoder,
        None if rf is None else rf.combiners,
        b * scale,
        tuple(m_blocks),
        float(scale),
        n_s,
    )


def full_complexity_bd(channel: MultiUserChannel, config: SystemConfig,
                       allocation: AllocationResult,
                       decomp: BdDecomposition | None = None) -> HybridDesign:
    if config.streams_per_user > channel.n_ms:
        raise DesignInfeasible(f"N_S={config.streams_per_user} exceeds N_MS={channel.n_ms}")
    decomp = decomp or full_bd_decompose(channel)
    return assemble_hybrid_design(decomp, config, allocation, None, "full_bd")


# ---------------------------------------------------------------------------
# residual checks shared by tests, the validator and the harness
# ---------------------------------------------------------------------------

def null_space_residual(decomp: BdDecomposition) -> float:
    """Worst ``||Hbar_k Vbar_k||_F / max(1, ||Hbar_k||_F)``."""
    worst = 0.0
    for k in range(decomp.users):
        h_bar = complement_channel(decomp.blocks, k)
        if h_bar.shape[0] == 0:
            continue
        r = np.linalg.norm(h_bar @ decomp.null_bases[k])
        worst = max(worst, r / max(1.0, np.linalg.norm(h_bar)))
    return float(worst)


def leakage_ratio(design: HybridDesign, channel: MultiUserChannel | np.ndarray) -> float:
    """Worst ``||M_i^H Ht_i B_k||_F / ||M_k^H Ht_k B_k||_F`` over ``i != k``."""
    eff = design.effective_channels(channel)
    worst = 0.0
    for k in range(design.users):
        b_k = design.precoder_block(k)
        wanted = np.linalg.norm(design.baseband_combiners[k].conj().T @ eff[k] @ b_k)
        for i in range(design.users):
            if i == k:
                continue
            leak = np.linalg.norm(design.baseband_combiners[i].conj().T @ eff[i] @ b_k)
            if wanted > 0:
                worst = max(worst, leak / wanted)
            elif leak > 0:
                worst = np.inf
    return float(worst)
