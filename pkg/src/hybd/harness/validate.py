"""Release gate: every library invariant on small randomized instances."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import oracles
from ..bd import HybridDesign, leakage_ratio, null_space_residual
from ..channels import (ArrayGeometry, MmWaveSpec, sample_mmwave, sample_rayleigh,
                        sample_truncated_laplacian, ula_response, upa_response)
from ..pipeline import design_at, prepare_full_bd, prepare_hybd
from ..power import expand_weights, kkt_residual, proportional_waterfill
from ..rates import db_to_linear, sum_rate_bd_closed_form, sum_rate_general
from ..rf import SystemConfig, build_dft_codebook, select_rf_combiner
from ..streams import derive, generator


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    observed: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.observed) and self.observed <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34s} observed={self.observed:.3e}  tol={self.tolerance:.1e}"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[InvariantCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


DesignHook = Callable[[HybridDesign], HybridDesign]


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def validate(seed: int = 0, corrupt_design: DesignHook | None = None,
             instances: int = 20) -> ValidationReport:
    """Run the invariant suite; ``corrupt_design`` is applied to every design
    before its checks (negative-control hook for tests)."""
    rng = generator(seed, 0xA11)
    hook = corrupt_design or (lambda d: d)
    checks: list[InvariantCheck] = []

    def add(name, observed, tol):
        checks.append(InvariantCheck(name, float(observed), tol))

    # array responses
    ula = ArrayGeometry.ula(16)
    upa = ArrayGeometry.upa(4, 4)
    az = rng.uniform(-math.pi, math.pi, 64)
    el = rng.uniform(-math.pi / 2, math.pi / 2, 64)
    add("ula_unit_norm", np.max(np.abs(np.linalg.norm(ula_response(ula, az), axis=0) - 1)), 1e-12)
    add("upa_unit_norm", np.max(np.abs(np.linalg.norm(upa_response(upa, az, el), axis=0) - 1)), 1e-12)

    x = sample_truncated_laplacian(rng, 0.3, 2.0, 20000)
    add("laplacian_truncation", max(0.0, np.max(np.abs(x - 0.3)) - math.pi), 0.0)

    # channel normalization (aggregate)
    dims = (1, 4, 8)
    ray = np.mean([np.linalg.norm(sample_rayleigh(derive(seed, 1, i),
                                                  dims, [1.0]).normalized) ** 2
                   for i in range(1000)]) / 32
    add("rayleigh_normalization", abs(ray - 1), 0.05)
    spec = MmWaveSpec(clusters=2, paths_per_cluster=3)
    mmw = np.mean([np.linalg.norm(sample_mmwave(derive(seed, 2, i),
                                                spec, dims, [1.0]).normalized) ** 2
                   for i in range(1000)]) / 32
    add("mmwave_normalization", abs(mmw - 1), 0.05)

    # RF stage
    cb = build_dft_codebook(8)
    add("dft_orthonormality", np.max(np.abs(cb.columns.conj().T @ cb.columns - np.eye(8))), 1e-12)

    mismatches = 0
    for _ in range(instances):
        h = (rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10)))
        m = int(rng.integers(1, 4))
        got = tuple(sorted(select_rf_combiner(h, build_dft_codebook(6), m).selected_indices))
        mismatches += got != oracles.combiner_by_exhaustion(h, m)
    add("combiner_bruteforce_oracle", mismatches, 0)

    # full pipeline on small Rayleigh instances
    config = SystemConfig(n_bs=32, n_ms=4, users=3, streams_per_user=2,
                          rf_chains_ms=2, rf_chains_bs=6)
    worst = dict.fromkeys(
        ["precoder_modulus", "combiner_modulus", "heq_diagonal_l1", "null_space_hybd",
         "null_space_full_bd", "leakage_hybd", "leakage_full_bd", "power_constraint",
         "combiner_orthonormality", "svd_reconstruction", "closed_form_consistency",
         "rate_monotone_in_snr"], 0.0)
    snr_grid = [db_to_linear(x) for x in (-40, -20, -10, 0)]
    for i in range(instances):
        ch = sample_rayleigh(derive(seed, 3, i), (3, 4, 32),
                             rng.uniform(0.5, 1.5, 3))
        hy = prepare_hybd(ch, config)
        fb = prepare_full_bd(ch, config)
        f = hy.rf.precoder.matrix
        worst["precoder_modulus"] = max(worst["precoder_modulus"],
                                        np.max(np.abs(np.abs(f) - 1 / math.sqrt(32))))
        for w in hy.rf.combiners:
            worst["combiner_modulus"] = max(worst["combiner_modulus"],
                                            np.max(np.abs(np.abs(w.matrix) - 0.5)))
        eq = hy.rf.equivalent
        l1 = np.abs(eq.intermediate).sum(axis=1) / math.sqrt(32)
        worst["heq_diagonal_l1"] = max(worst["heq_diagonal_l1"],
                                       np.max(np.abs(np.diag(eq.full) - l1)) / l1.max())
        worst["null_space_hybd"] = max(worst["null_space_hybd"], null_space_residual(hy.decomp))
        worst["null_space_full_bd"] = max(worst["null_space_full_bd"], null_space_residual(fb.decomp))
        for prep in (hy, fb):
            for k in range(prep.decomp.users):
                eff = prep.decomp.effective(k)
                sub = prep.decomp.subchannels[k]
                worst["svd_reconstruction"] = max(
                    worst["svd_reconstruction"],
                    np.linalg.norm(sub.reconstruct() - eff) / np.linalg.norm(eff))
            previous = -1.0
            for snr in snr_grid:
                design, alloc = design_at(prep, config, snr)
                design = hook(design)
                key = prep.scheme
                worst[f"leakage_{key}"] = max(worst[f"leakage_{key}"], leakage_ratio(design, ch))
                fbm = design.transmit_matrix()
                worst["power_constraint"] = max(worst["power_constraint"],
                                                _rel(np.linalg.norm(fbm) ** 2, 6.0))
                for k in range(3):
                    m = design.baseband_combiners[k]
                    w = design.combiner_matrix(k)
                    g = m if w is None else w @ m
                    worst["combiner_orthonormality"] = max(
                        worst["combiner_orthonormality"],
                        np.max(np.abs(g.conj().T @ g - np.eye(2))))
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    general = sum_rate_general(ch, design, snr).sum_rate
                closed = sum_rate_bd_closed_form(prep.decomp, alloc, snr, 2,
                                                 design.power_scale).sum_rate
                worst["closed_form_consistency"] = max(worst["closed_form_consistency"],
                                                       _rel(general, closed))
                if general < previous:
                    worst["rate_monotone_in_snr"] = max(worst["rate_monotone_in_snr"],
                                                        previous - general)
                previous = general
    tolerances = {
        "precoder_modulus": 1e-12, "combiner_modulus": 1e-12, "heq_diagonal_l1": 1e-12,
        "null_space_hybd": 1e-10, "null_space_full_bd": 1e-10, "leakage_hybd": 1e-9,
        "leakage_full_bd": 1e-9, "power_constraint": 1e-9, "combiner_orthonormality": 1e-10,
        "svd_reconstruction": 1e-10, "closed_form_consistency": 1e-9,
        "rate_monotone_in_snr": 0.0,
    }
    for name, value in worst.items():
        add(name, value, tolerances[name])

    # power allocation
    kkt = oracle_gap = 0.0
    for _ in range(instances * 5):
        k = int(rng.integers(1, 5))
        n_s = int(rng.integers(1, 3))
        gamma = rng.exponential(2.0, k * n_s)
        weights = rng.uniform(0.5, 3.0, k)
        res = proportional_waterfill(gamma, weights)
        kkt = max(kkt, kkt_residual(res, gamma))
        lam, _ = oracles.waterfill_by_enumeration(gamma, expand_weights(weights, k * n_s),
                                                  float(k * n_s))
        oracle_gap = max(oracle_gap, np.max(np.abs(lam - res.lam)))
    add("waterfill_kkt_residual", kkt, 1e-8)
    add("waterfill_enumeration_oracle", oracle_gap, 1e-6)

    # determinism
    a = sample_rayleigh(seed, (2, 4, 8), [1.0, 1.0])
    b = sample_rayleigh(seed, (2, 4, 8), [1.0, 1.0])
    add("seeded_determinism", 0.0 if a == b else 1.0, 0.0)
    return ValidationReport(tuple(checks))
