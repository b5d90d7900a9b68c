"""Phase-only RF stage.

Each receiver picks ``M_MS`` columns of the ``N_MS``-point DFT basis with the
largest ``||d^H H_k||_1``; the transmitter then applies equal gain
transmission (EGT) on the stacked combined channel, so the resulting
baseband equivalent channel has real, positive diagonal entries equal to the
row l1-norms scaled by ``1/sqrt(N_BS)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .channels import MultiUserChannel
from .errors import InvalidArgument


@dataclass(frozen=True)
class SystemConfig:
    n_bs: int
    n_ms: int
    users: int
    streams_per_user: int
    rf_chains_ms: int
    rf_chains_bs: int
    snr_db: float = 0.0
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("n_bs", "n_ms", "users", "streams_per_user",
                     "rf_chains_ms", "rf_chains_bs"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgument(f"{name} must be a positive integer")
        weights = tuple(float(w) for w in self.weights) or (1.0,) * self.users
        if len(weights) != self.users or min(weights) <= 0:
            raise InvalidArgument("need one positive weight per user")
        object.__setattr__(self, "weights", weights)

    @property
    def total_streams(self) -> int:
        return self.users * self.streams_per_user

    @property
    def snr(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def stream_constraint_violations(self) -> list[str]:
        """Unmet ``N_S <= M_MS <= N_MS`` and ``K N_S <= M_BS <= N_BS`` conditions."""
        out = []
        if not self.streams_per_user <= self.rf_chains_ms <= self.n_ms:
            out.append(f"N_S <= M_MS <= N_MS ({self.streams_per_user}, "
                       f"{self.rf_chains_ms}, {self.n_ms})")
        if not self.total_streams <= self.rf_chains_bs <= self.n_bs:
            out.append(f"K*N_S <= M_BS <= N_BS ({self.total_streams}, "
                       f"{self.rf_chains_bs}, {self.n_bs})")
        return out

    def hybd_violations(self) -> list[str]:
        out = self.stream_constraint_violations()
        if self.rf_chains_bs != self.users * self.rf_chains_ms:
            out.append(f"M_BS = K*M_MS ({self.rf_chains_bs} != "
                       f"{self.users}*{self.rf_chains_ms})")
        return out


@dataclass(frozen=True)
class DftCodebook:
    columns: np.ndarray  # (N_MS, N_MS), column q is d(2 pi q / N_MS)

    @property
    def size(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class RfCombiner:
    matrix: np.ndarray
    selected_indices: tuple[int, ...]
    scores: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class RfPrecoder:
    matrix: np.ndarray
    phases: np.ndarray


@dataclass(frozen=True)
class EquivalentChannel:
    full: np.ndarray
    per_user_blocks: tuple[np.ndarray, ...]
    intermediate: np.ndarray

    @property
    def users(self) -> int:
        return len(self.per_user_blocks)


def build_dft_codebook(n_ms: int) -> DftCodebook:
    if n_ms < 1:
        raise InvalidArgument("codebook size must be >= 1")
    m = np.arange(n_ms)
    cols = np.exp(2j * np.pi * np.outer(m, m) / n_ms) / np.sqrt(n_ms)
    return DftCodebook(cols)


def combiner_scores(h_k: np.ndarray, codebook: DftCodebook) -> np.ndarray:
    """``||d_q^H H_k||_1`` for every codebook column ``q``."""
    return np.asarray(kernels.l1_scores(codebook.columns, h_k))


def select_rf_combiner(h_k: np.ndarray, codebook: DftCodebook, m_ms: int) -> RfCombiner:
    """Pick the ``m_ms`` best-scoring DFT columns.

    Columns are ordered by descending score; equal scores go to the lower
    codebook index.
    """
    h_k = np.asarray(h_k)
    if h_k.shape[0] != codebook.size:
        raise InvalidArgument("channel rows do not match codebook size")
    if not 1 <= m_ms <= codebook.size:
        raise InvalidArgument(f"m_ms={m_ms} outside [1, {codebook.size}]")
    scores = combiner_scores(h_k, codebook)
    order = np.lexsort((np.arange(scores.size), -scores))[:m_ms]
    return RfCombiner(codebook.columns[:, order], tuple(int(i) for i in order), scores)


def build_intermediate_channel(channel: MultiUserChannel | np.ndarray,
                               combiners: Sequence[RfCombiner]) -> np.ndarray:
    h = channel.per_user_matrix if isinstance(channel, MultiUserChannel) else np.asarray(channel)
    if len(combiners) != h.shape[0]:
        raise InvalidArgument(f"{len(combiners)} combiners for {h.shape[0]} users")
    blocks = []
    for h_k, w in zip(h, combiners):
        if w.matrix.shape[0] != h_k.shape[0]:
            raise InvalidArgument("combiner rows do not match receive antennas")
        blocks.append(w.matrix.conj().T @ h_k)
    sizes = {b.shape[0] for b in blocks}
    if len(sizes) != 1:
        raise InvalidArgument("all combiners must have the same number of columns")
    return np.vstack(blocks)


def egt_precoder(h_int: np.ndarray) -> RfPrecoder:
    """``F[i, j] = exp(1j * angle(conj(h_int[j, i]))) / sqrt(N_BS)``.

    ``np.angle`` maps exact zeros to phase 0.
    """
    h_int = np.asarray(h_int)
    if not np.all(np.isfinite(h_int)):
        raise InvalidArgument("intermediate channel has non-finite entries")
    phases = np.angle(h_int.conj().T)
    n_bs = h_int.shape[1]
    return RfPrecoder(np.exp(1j * phases) / np.sqrt(n_bs), phases)


def equivalent_channel(h_int: np.ndarray, f: RfPrecoder,
                       combiners: Sequence[RfCombiner]) -> EquivalentChannel:
    full = np.asarray(h_int) @ f.matrix
    if full.shape[0] != full.shape[1]:
        raise InvalidArgument(
            f"equivalent channel is {full.shape[0]}x{full.shape[1]}; EGT needs M_BS = K*M_MS"
        )
    sizes = [w.matrix.shape[1] for w in combiners]
    if sum(sizes) != full.shape[0]:
        raise InvalidArgument("combiner columns do not add up to the equivalent channel rows")
    edges = np.cumsum([0] + sizes)
    blocks = tuple(full[a:b] for a, b in zip(edges[:-1], edges[1:]))
    return EquivalentChannel(full, blocks, np.asarray(h_int))


@dataclass(frozen=True)
class RfStage:
    combiners: tuple[RfCombiner, ...]
    precoder: RfPrecoder
    equivalent: EquivalentChannel

    @property
    def feedback(self) -> list[list[int]]:
        return [list(w.selected_indices) for w in self.combiners]


def design_rf_stage(channel: MultiUserChannel, m_ms: int) -> RfStage:
    codebook = build_dft_codebook(channel.n_ms)
    combiners = tuple(select_rf_combiner(h_k, codebook, m_ms) for h_k in channel.per_user_matrix)
    h_int = build_intermediate_channel(channel, combiners)
    f = egt_precoder(h_int)
    return RfStage(combiners, f, equivalent_channel(h_int, f, combiners))


def off_diagonal_ratio(h_eq: np.ndarray) -> np.ndarray:
    """``|H_eq[k, j]| / |H_eq[k, k]|`` for all ``k != j``."""
    h_eq = np.asarray(h_eq)
    diag = np.abs(np.diag(h_eq))
    ratio = np.abs(h_eq) / diag[:, None]
    return ratio[~np.eye(h_eq.shape[0], dtype=bool)]
