"""Chain driver and trace container."""

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, Schedule
from .kernels import DivergenceError


@dataclass
class Trace:
    """Retained post-burn-in samples of one chain.

    ``iterations[k]`` is the 1-based iteration after which ``samples[k]``
    was recorded.  When the chain diverged, ``diverged`` is set and
    ``divergence_iteration`` names the offending iteration; the samples
    collected before it are kept.
    """

    samples: np.ndarray
    energies: np.ndarray
    iterations: np.ndarray
    burn_in: int
    thinning: int
    n_iter: int
    seed: object = None
    diverged: bool = False
    divergence_iteration: int = None
    last_theta: np.ndarray = None
    final_state: object = None
    completed_iterations: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    @property
    def dim(self):
        return self.samples.shape[1]

    def to_csv(self, path, include_theta=True):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["iteration", "energy"]
            if include_theta:
                header += [f"theta_{i}" for i in range(self.samples.shape[1])]
            writer.writerow(header)
            for k in range(len(self)):
                row = [int(self.iterations[k]), repr(float(self.energies[k]))]
                if include_theta:
                    row += [repr(float(v)) for v in self.samples[k]]
                writer.writerow(row)


def expected_sample_count(n_iter, burn_in, thinning):
    return max(0, (n_iter - burn_in) // thinning)


def run_chain(
    model,
    sampler,
    n_iter,
    burn_in=0,
    thinning=1,
    rng=None,
    *,
    schedule=None,
    theta0=None,
    state=None,
    start_iteration=0,
    record_energy=True,
    check_invariants=False,
    max_seconds=None,
    seed=None,
    stop_at=None,
):
    """Drive ``sampler`` on ``model`` for ``n_iter`` iterations.

    The learning rate is looked up per epoch from ``schedule`` (defaulting
    to the sampler's own).  A chain can be resumed by passing ``state`` and
    ``start_iteration``; iteration numbers, burn-in and the schedule then
    continue from where the previous segment stopped, and ``stop_at`` ends
    a segment early while keeping ``n_iter`` as the chain's total.  Divergence (a
    non-finite gradient or parameter) truncates the trace and flags it
    instead of raising.
    """
    if rng is None:
        raise ConfigurationError("run_chain needs an explicit random generator")
    if n_iter < 1 or thinning < 1 or burn_in < 0:
        raise ConfigurationError("need n_iter >= 1, thinning >= 1 and burn_in >= 0")
    if burn_in >= n_iter:
        raise ConfigurationError(f"burn-in ({burn_in}) must be smaller than the iteration count ({n_iter})")
    schedule = sampler.schedule if schedule is None else schedule
    if not isinstance(schedule, Schedule) and not callable(schedule):
        raise ConfigurationError("schedule must be callable on the epoch index")
    if state is None:
        theta0 = model.initial_point(rng) if theta0 is None else np.array(theta0, dtype=float)
        if theta0.shape != (model.dim,):
            raise ConfigurationError(f"initial point must have shape ({model.dim},)")
        state = sampler.init_state(theta0)

    if sampler.objective == "regularized":
        weight_decay = sampler.weight_decay

        def draw_grad(theta):
            return model.regularized_grad(theta, rng, weight_decay)
    else:
        def draw_grad(theta):
            return model.stoch_grad(theta, rng)

    per_epoch = model.iterations_per_epoch
    keep = []
    kept_at = []
    diverged = False
    div_iter = None
    last_theta = state.theta
    bound = sampler.invariant_bound() if check_invariants else None
    worst = 0.0
    deadline = None if max_seconds is None else time.perf_counter() + max_seconds
    t = start_iteration
    tic = time.perf_counter()
    step = sampler.step
    end = n_iter if stop_at is None else min(int(stop_at), n_iter)
    # overflow on the way to a divergence is reported through the trace flag
    with np.errstate(over="ignore", invalid="ignore"):
        while t < end:
            eps = schedule(t // per_epoch)
            try:
                g = draw_grad(state.theta)
                state = step(state, g, eps, rng)
            except (DivergenceError, FloatingPointError):
                diverged, div_iter = True, t + 1
                break
            t += 1
            if not np.all(np.isfinite(state.theta)):
                diverged, div_iter = True, t
                break
            last_theta = state.theta
            if bound is not None:
                ratio = sampler.invariant_value(state)
                worst = max(worst, ratio)
                if ratio > bound:
                    raise AssertionError(f"bias bound violated at iteration {t}: {ratio} > {bound}")
            if t > burn_in and (t - burn_in) % thinning == 0:
                keep.append(state.theta)
                kept_at.append(t)
            if deadline is not None and time.perf_counter() > deadline:
                break

    samples = np.array(keep, dtype=float).reshape(len(keep), model.dim)
    if record_energy:
        with np.errstate(over="ignore"):
            energies = np.array([model.energy(s) for s in samples], dtype=float)
    else:
        energies = np.full(len(samples), np.nan)
    meta = {"wall_clock_seconds": time.perf_counter() - tic, "sampler": type(sampler).__name__}
    if bound is not None:
        meta["max_invariant_value"] = worst
        meta["invariant_bound"] = bound
    return Trace(
        samples=samples,
        energies=energies,
        iterations=np.array(kept_at, dtype=np.int64),
        burn_in=burn_in,
        thinning=thinning,
        n_iter=n_iter,
        seed=seed,
        diverged=diverged,
        divergence_iteration=div_iter,
        last_theta=np.array(last_theta, copy=True),
        final_state=state,
        completed_iterations=t,
        meta=meta,
    )


def concatenate_traces(first, second):
    """Join two consecutive segments of one chain."""
    return Trace(
        samples=np.concatenate([first.samples, second.samples]),
        energies=np.concatenate([first.energies, second.energies]),
        iterations=np.concatenate([first.iterations, second.iterations]),
        burn_in=first.burn_in,
        thinning=first.thinning,
        n_iter=second.n_iter,
        seed=first.seed,
        diverged=first.diverged or second.diverged,
        divergence_iteration=first.divergence_iteration or second.divergence_iteration,
        last_theta=second.last_theta,
        final_state=second.final_state,
        completed_iterations=second.completed_iterations,
        meta={**first.meta, **second.meta},
    )
