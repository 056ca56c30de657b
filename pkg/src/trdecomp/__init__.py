"""Tensor-ring decomposition: contraction, ALS fitting, hard instances,
and seeded experiment runners."""

from .als import AlsConfig, AlsTrace, objective, one_loop, run_als, solve_microstep
from .constructions import (
    SpuriousInstance,
    exact_fit_cores,
    generalized_instance,
    rank_witness_cores,
    spurious_instance,
    spurious_minimizer,
    spurious_target,
)
from .experiments import (
    OneLoopExperimentConfig,
    TrapExperimentConfig,
    perturb,
    run_oneloop_experiment,
    run_trap_experiment,
)
from .ring import (
    GaugeTuple,
    TRCores,
    contract,
    contract_entry,
    dump_cores,
    gauge_transform,
    load_cores,
    max_abs,
    max_abs_last_slice,
    random_cores,
    random_padded_cores,
)
from .tensors import (
    DenseTensor,
    dump_tensor,
    fnorm,
    indicator,
    inner,
    load_tensor,
    outer,
    ravel_index,
    unravel_index,
)
from .unfolding import (
    LSProblem,
    build_ls_problem,
    fold_core,
    full_column_rank,
    reshape_target,
    unfold_chain,
    unfold_core,
    unfold_target,
)

__version__ = "0.1.0"
