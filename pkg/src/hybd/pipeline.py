"""End-to-end scheme construction.

The SNR-independent part of each design (RF stage, null spaces, subchannel
SVDs) is computed once per channel; only power allocation and assembly are
repeated per SNR point.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bd import (BdDecomposition, HybridDesign, assemble_hybrid_design,
                 block_diagonalize, full_bd_decompose)
from .channels import MultiUserChannel
from .errors import DesignInfeasible
from .power import AllocationResult, proportional_waterfill, stream_gains
from .rf import RfStage, SystemConfig, design_rf_stage


@dataclass(frozen=True)
class PreparedScheme:
    scheme: str
    decomp: BdDecomposition
    rf: RfStage | None = None


def prepare_hybd(channel: MultiUserChannel, config: SystemConfig) -> PreparedScheme:
    problems = config.hybd_violations()
    if problems:
        raise DesignInfeasible("Hy-BD infeasible: " + "; ".join(problems))
    rf = design_rf_stage(channel, config.rf_chains_ms)
    return PreparedScheme("hybd", block_diagonalize(rf.equivalent), rf)


def prepare_full_bd(channel: MultiUserChannel, config: SystemConfig) -> PreparedScheme:
    if config.streams_per_user > channel.n_ms:
        raise DesignInfeasible(
            f"full BD infeasible: N_S={config.streams_per_user} exceeds N_MS={channel.n_ms}"
        )
    decomp = full_bd_decompose(channel)
    room = min(sub.s.size for sub in decomp.subchannels)
    if room < config.streams_per_user:
        raise DesignInfeasible(
            f"full BD infeasible: subchannels support {room} < N_S streams"
        )
    return PreparedScheme("full_bd", decomp)


PREPARERS = {"hybd": prepare_hybd, "full_bd": prepare_full_bd}


def allocate(prepared: PreparedScheme, config: SystemConfig, snr: float) -> AllocationResult:
    s = prepared.decomp.retained_singular_values(config.streams_per_user)
    gamma = stream_gains(s, snr, config.users, config.streams_per_user)
    return proportional_waterfill(gamma, config.weights)


def design_at(prepared: PreparedScheme, config: SystemConfig, snr: float
              ) -> tuple[HybridDesign, AllocationResult]:
    alloc = allocate(prepared, config, snr)
    design = assemble_hybrid_design(prepared.decomp, config, alloc, prepared.rf,
                                    prepared.scheme)
    return design, alloc
