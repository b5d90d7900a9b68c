"""Hybrid analog/digital block diagonalization for multi-user MIMO downlinks."""
from .bd import (HybridDesign, assemble_hybrid_design, block_diagonalize,
                 full_bd_decompose, full_complexity_bd, leakage_ratio, null_space_residual)
from .channels import (ArrayGeometry, MmWaveSpec, MultiUserChannel, sample_mmwave,
                       sample_rayleigh, single_path_channel)
from .errors import (ConditioningWarning, ConfigError, DesignInfeasible, HybdError,
                     InvalidArgument, NoUsableStreams)
from .pipeline import design_at, prepare_full_bd, prepare_hybd
from .power import proportional_waterfill, waterfill
from .rates import (RateReport, approx_rate_single_path, sum_rate_bd_closed_form,
                    sum_rate_general)
from .rf import SystemConfig, design_rf_stage

__version__ = "0.1.0"
