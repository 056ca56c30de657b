"""Seeded experiment runners with CSV output.

Two studies are provided: a perturbation sweep measuring how often ALS
stays trapped near the planted wide-ring minimizer, and a single-sweep
convergence study over random bond-r targets at two bond sizes.
Every trial derives its own generator from (base_seed, indices) via
SeedSequence spawn keys, so results are independent of scheduling and
reproducible across platforms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .als import AlsConfig, objective, one_loop, run_als
from .constructions import spurious_instance
from .ring import TRCores, as_generator, contract, random_cores, random_padded_cores

__all__ = [
    "TrapExperimentConfig",
    "TrapTrialResult",
    "TrapExperimentResult",
    "run_trap_experiment",
    "write_trap_csv",
    "OneLoopExperimentConfig",
    "OneLoopTrialResult",
    "OneLoopExperimentResult",
    "run_oneloop_experiment",
    "write_oneloop_csv",
    "perturb",
]

DEFAULT_C_VALUES = tuple(round(0.02 * i, 10) for i in range(16))


def perturb(u: TRCores, c: float, seed) -> TRCores:
    """Add an independent Uniform[-c, c] draw to every core entry."""
    c = float(c)
    if c < 0:
        raise ValueError(f"perturbation size must be >= 0, got {c}")
    if c == 0.0:
        return u
    rng = as_generator(seed)
    return TRCores(tuple(core + rng.uniform(-c, c, core.shape) for core in u.cores))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class TrapExperimentConfig:
    d: int = 3
    r: int = 3
    n: int = 10
    c_values: tuple[float, ...] = DEFAULT_C_VALUES
    trials_per_c: int = 50
    als: AlsConfig = AlsConfig()
    trap_epsilon: float = 1e-6
    base_seed: int = 0

    def __post_init__(self):
        if any(c < 0 for c in self.c_values):
            raise ValueError("perturbation sizes must be non-negative")
        if self.trials_per_c < 1:
            raise ValueError("trials_per_c must be >= 1")


@dataclass(frozen=True)
class TrapTrialResult:
    c_index: int
    c: float
    trial: int
    status: str  # trapped | escaped | failed
    final_objective: float
    loops_run: int
    tau_distance: float


@dataclass
class TrapExperimentResult:
    config: TrapExperimentConfig
    trials: list[TrapTrialResult] = field(default_factory=list)

    def rows(self):
        """Aggregate per perturbation size: counts and mean final objective."""
        out = []
        for ci, c in enumerate(self.config.c_values):
            group = [t for t in self.trials if t.c_index == ci]
            ok = [t for t in group if t.status != "failed"]
            trapped = sum(1 for t in ok if t.status == "trapped")
            escaped = sum(1 for t in ok if t.status == "escaped")
            failed = len(group) - len(ok)
            mean_f = (
                float(np.mean([t.final_objective for t in ok])) if ok else math.nan
            )
            out.append((c, len(group), trapped, escaped, failed, mean_f))
        return out

    def trap_fractions(self):
        return [
            (trapped / trials if trials else math.nan)
            for (_, trials, trapped, _, _, _) in self.rows()
        ]


def run_trap_experiment(
    cfg: TrapExperimentConfig, threads: int = 1
) -> TrapExperimentResult:
    """Run ALS from perturbed copies of the planted minimizer.

    A trial counts as trapped when its final objective stays within
    ``trap_epsilon`` of the minimizer's objective. Numerical failures
    are recorded as their own outcome, never dropped.
    """
    inst = spurious_instance(cfg.d, cfg.r, cfg.n)
    target, u0 = inst.target, inst.local_min
    f_minimizer = objective(target, u0)
    tau0 = contract(u0).values

    def run_one(ci: int, trial: int) -> TrapTrialResult:
        c = cfg.c_values[ci]
        seed = np.random.SeedSequence(cfg.base_seed, spawn_key=(ci, trial))
        try:
            start = perturb(u0, c, seed)
            trace = run_als(target, start, cfg.als)
            f_final = trace.objectives[-1]
            dist = float(
                np.linalg.norm(contract(trace.final_cores).values - tau0)
            )
            if not math.isfinite(f_final):
                raise FloatingPointError(f"non-finite objective {f_final}")
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            return TrapTrialResult(ci, c, trial, "failed", math.nan, 0, math.nan)
        status = "trapped" if f_final >= f_minimizer - cfg.trap_epsilon else "escaped"
        return TrapTrialResult(ci, c, trial, status, f_final, trace.loops_run, dist)

    jobs = [
        (ci, t)
        for ci in range(len(cfg.c_values))
        for t in range(cfg.trials_per_c)
    ]
    result = TrapExperimentResult(config=cfg)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            result.trials = list(pool.map(lambda j: run_one(*j), jobs))
    else:
        result.trials = [run_one(*j) for j in jobs]
    return result


def write_trap_csv(result: TrapExperimentResult, fp) -> None:
    cfg = result.config
    fp.write("# trdecomp-trap-csv v1\n")
    fp.write(
        "# d={} r={} n={} trials_per_c={} trap_epsilon={} base_seed={} "
        "max_loops={} conv_tol={} rank_tol={}\n".format(
            cfg.d,
            cfg.r,
            cfg.n,
            cfg.trials_per_c,
            _fmt(cfg.trap_epsilon),
            cfg.base_seed,
            cfg.als.max_loops,
            _fmt(cfg.als.conv_tol),
            _fmt(cfg.als.rank_tol),
        )
    )
    fp.write("c,trials,trapped,escaped,failed,mean_final_objective\n")
    for c, trials, trapped, escaped, failed, mean_f in result.rows():
        fp.write(
            f"{_fmt(c)},{trials},{trapped},{escaped},{failed},{_fmt(mean_f)}\n"
        )


@dataclass(frozen=True)
class OneLoopExperimentConfig:
    """Parameters of the single-sweep study.

    ``target_support`` selects the law of the random bond-r target
    ring: "full" draws every core entry from N(0,1); "compact" zeroes
    fiber entries beyond position r^2 (the two laws give the same
    contracted tensors up to per-mode rotations, but different spreads
    of the post-sweep objective at narrow bond sizes).
    """

    d: int = 3
    r: int = 3
    n: int = 10
    m_values: tuple[int, ...] | None = None
    trials: int = 20
    als: AlsConfig = AlsConfig()
    base_seed: int = 0
    target_support: str = "full"

    def __post_init__(self):
        if self.n < self.r * self.r:
            raise ValueError(f"need n >= r^2 = {self.r * self.r}, got {self.n}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.target_support not in ("full", "compact"):
            raise ValueError(
                f"target_support must be 'full' or 'compact', got {self.target_support!r}"
            )
        if self.m_values is None:
            wide = self.r ** (self.d - 1)
            object.__setattr__(self, "m_values", (wide, wide - 1))
        else:
            object.__setattr__(
                self, "m_values", tuple(int(m) for m in self.m_values)
            )
        if any(m < 1 for m in self.m_values):
            raise ValueError("bond sizes must be >= 1")


@dataclass(frozen=True)
class OneLoopTrialResult:
    m: int
    trial: int
    status: str  # ok | failed
    f_one_loop: float
    min_sigma_min: float


@dataclass
class OneLoopExperimentResult:
    config: OneLoopExperimentConfig
    trials: list[OneLoopTrialResult] = field(default_factory=list)

    def summary(self):
        """(m, ok_count, failed_count, max_f, min_f, min_sigma) per bond size."""
        out = []
        for m in self.config.m_values:
            group = [t for t in self.trials if t.m == m]
            ok = [t for t in group if t.status == "ok"]
            max_f = max((t.f_one_loop for t in ok), default=math.nan)
            min_f = min((t.f_one_loop for t in ok), default=math.nan)
            min_sigma = min((t.min_sigma_min for t in ok), default=math.nan)
            out.append((m, len(ok), len(group) - len(ok), max_f, min_f, min_sigma))
        return out


def run_oneloop_experiment(
    cfg: OneLoopExperimentConfig, threads: int = 1
) -> OneLoopExperimentResult:
    """Measure the objective after a single ALS sweep.

    Each trial draws a random target ring of bond r (law per
    ``cfg.target_support``), contracts it into the target tensor, draws
    a Gaussian initial ring of bond m, and runs exactly d microsteps.
    """

    draw_target = random_cores if cfg.target_support == "full" else random_padded_cores

    def run_one(mi: int, trial: int) -> OneLoopTrialResult:
        m = cfg.m_values[mi]
        try:
            w = draw_target(
                cfg.d,
                cfg.r,
                cfg.n,
                np.random.SeedSequence(cfg.base_seed, spawn_key=(mi, trial, 0)),
            )
            target = contract(w)
            start = random_cores(
                cfg.d,
                m,
                cfg.n,
                np.random.SeedSequence(cfg.base_seed, spawn_key=(mi, trial, 1)),
            )
            f_after, trace = one_loop(target, start, cfg.als)
            if not math.isfinite(f_after):
                raise FloatingPointError(f"non-finite objective {f_after}")
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            return OneLoopTrialResult(m, trial, "failed", math.nan, math.nan)
        return OneLoopTrialResult(
            m, trial, "ok", f_after, min(trace.sigma_mins)
        )

    jobs = [
        (mi, t) for mi in range(len(cfg.m_values)) for t in range(cfg.trials)
    ]
    result = OneLoopExperimentResult(config=cfg)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            result.trials = list(pool.map(lambda j: run_one(*j), jobs))
    else:
        result.trials = [run_one(*j) for j in jobs]
    return result


def write_oneloop_csv(result: OneLoopExperimentResult, fp) -> None:
    cfg = result.config
    fp.write("# trdecomp-oneloop-csv v1\n")
    fp.write(
        "# d={} r={} n={} m_values={} trials={} base_seed={} rank_tol={} "
        "target_support={}\n".format(
            cfg.d,
            cfg.r,
            cfg.n,
            ";".join(str(m) for m in cfg.m_values),
            cfg.trials,
            cfg.base_seed,
            _fmt(cfg.als.rank_tol),
            cfg.target_support,
        )
    )
    fp.write("d,r,n,m,trial,status,f_u1,min_sigma_min\n")
    for t in result.trials:
        fp.write(
            f"{cfg.d},{cfg.r},{cfg.n},{t.m},{t.trial},{t.status},"
            f"{_fmt(t.f_one_loop)},{_fmt(t.min_sigma_min)}\n"
        )
    for m, _, _, max_f, min_f, min_sigma in result.summary():
        fp.write(
            f"{cfg.d},{cfg.r},{cfg.n},{m},max,summary,{_fmt(max_f)},{_fmt(min_sigma)}\n"
        )
        fp.write(
            f"{cfg.d},{cfg.r},{cfg.n},{m},min,summary,{_fmt(min_f)},{_fmt(min_sigma)}\n"
        )
