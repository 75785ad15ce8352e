"""Time-varying cost and constraint evaluators.

An :class:`Environment` bundles, for an action dimension ``n`` and constraint
count ``m``, a single evaluator producing at ``(t, x)``:

* ``f0(t, x)``   scalar objective value (0 when there is no objective),
* ``g0(t, x)``   an objective subgradient, shape ``(n,)``,
* ``f(t, x)``    constraint values, shape ``(m,)``,
* ``G(t, x)``    constraint subgradients stacked column-wise, shape ``(n, m)``.

Environments are closures over immutable scenario data; evaluation is pure,
deterministic, and thread-safe.  Every constraint and the objective must be
convex in ``x`` and integrable in ``t`` (sample-and-hold discontinuities are
fine, the integrator step resolves them).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

FullEval = Callable[[float, np.ndarray], tuple[float, np.ndarray, np.ndarray, np.ndarray]]
# Optional vectorized constraint evaluator: (ts (K,), x (n,)) -> values (K, m).
BatchConstraints = Callable[[np.ndarray, np.ndarray], np.ndarray]
# Optional vectorized full evaluator:
# (ts (K,), x (n,)) -> (f0 (K,), g0 (K, n), f (K, m), G (K, n, m)).
BatchEval = Callable[[np.ndarray, np.ndarray], tuple]


class EvaluatorError(RuntimeError):
    """Non-finite evaluator output, reported with its location."""


@dataclass(frozen=True)
class Environment:
    n: int
    m: int
    evaluate: FullEval
    has_objective: bool = True
    batch_constraints: Optional[BatchConstraints] = field(default=None, repr=False)
    batch_evaluate: Optional[BatchEval] = field(default=None, repr=False)

    def eval(self, t: float, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Objective and constraint values at (t, x)."""
        f0, _, f, _ = self.eval_full(t, x)
        return f0, f

    def eval_subgradients(self, t: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Objective subgradient (n,) and constraint subgradient matrix (n, m)."""
        _, g0, _, G = self.eval_full(t, x)
        return g0, G

    def eval_full(self, t: float, x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected action of shape ({self.n},), got {x.shape}")
        f0, g0, f, G = self.evaluate(float(t), x)
        # One-pass finiteness guard: any nan/inf poisons the total (inf - inf
        # gives nan), so a single scalar check covers all four outputs.
        total = f0 + float(np.sum(g0)) + float(np.sum(f)) + float(np.sum(G))
        if not np.isfinite(total):
            if np.isfinite(f0) and np.all(np.isfinite(g0)) and np.all(np.isfinite(f)) and np.all(np.isfinite(G)):
                return float(f0), g0, f, G  # benign overflow of the probe sum
            raise EvaluatorError(f"non-finite evaluator output at t={t!r}, x={x!r}")
        return float(f0), g0, f, G

    def saturate(self, delta: float) -> "Environment":
        """Environment with constraints floored at -delta.

        Constraint values become ``max(f_i, -delta)``.  Subgradients keep the
        active branch: the original column where ``f_i >= -delta`` (including
        the tie, which keeps the controller responsive at the kink), zero
        where ``f_i < -delta``.  The objective is untouched.
        """
        if delta <= 0.0:
            raise ValueError("saturation level delta must be positive")
        delta = float(delta)
        base = self.evaluate

        def saturated(t: float, x: np.ndarray):
            f0, g0, f, G = base(t, x)
            f_sat = np.maximum(f, -delta)
            G_sat = np.where(f >= -delta, G, 0.0)
            return f0, g0, f_sat, G_sat

        batch_con = self.batch_constraints
        sat_batch_con = None
        if batch_con is not None:
            def sat_batch_con(ts: np.ndarray, x: np.ndarray) -> np.ndarray:
                return np.maximum(batch_con(ts, x), -delta)

        batch_full = self.batch_evaluate
        sat_batch_full = None
        if batch_full is not None:
            def sat_batch_full(ts: np.ndarray, x: np.ndarray):
                f0s, g0s, fs, Gs = batch_full(ts, x)
                fs_sat = np.maximum(fs, -delta)
                Gs_sat = np.where(fs[:, None, :] >= -delta, Gs, 0.0)
                return f0s, g0s, fs_sat, Gs_sat

        return replace(
            self,
            evaluate=saturated,
            batch_constraints=sat_batch_con,
            batch_evaluate=sat_batch_full,
        )


def from_functions(
    n: int,
    m: int,
    f0: Optional[Callable[[float, np.ndarray], float]] = None,
    g0: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
    f: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
    G: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
) -> Environment:
    """Assemble an Environment from separate callables (test/fixture helper)."""
    has_objective = f0 is not None
    if has_objective and g0 is None:
        raise ValueError("objective supplied without its subgradient")
    if (f is None) != (G is None):
        raise ValueError("constraints and their subgradients must come together")
    if f is None and m != 0:
        raise ValueError("m > 0 but no constraint evaluator supplied")

    zero_g0 = np.zeros(n)
    zero_f = np.zeros(m)
    zero_G = np.zeros((n, m))

    def evaluate(t: float, x: np.ndarray):
        v0 = float(f0(t, x)) if f0 is not None else 0.0
        gv = np.asarray(g0(t, x), dtype=float) if g0 is not None else zero_g0
        fv = np.asarray(f(t, x), dtype=float) if f is not None else zero_f
        Gv = np.asarray(G(t, x), dtype=float) if G is not None else zero_G
        return v0, gv, fv, Gv

    return Environment(n=n, m=m, evaluate=evaluate, has_objective=has_objective)


def finite_diff_check(env: Environment, t: float, x: np.ndarray, h_fd: float) -> float:
    """Max relative error between analytic subgradients and central differences.

    Only meaningful where the evaluator is differentiable at (t, x); callers
    sample random smooth points.  Relative error is measured against
    ``max(1, |finite difference|)`` componentwise.
    """
    x = np.asarray(x, dtype=float)
    _, g0, _, G = env.eval_full(t, x)
    n, m = env.n, env.m
    fd_g0 = np.zeros(n)
    fd_G = np.zeros((n, m))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h_fd
        f0p, fp = env.eval(t, x + e)
        f0m, fm = env.eval(t, x - e)
        fd_g0[i] = (f0p - f0m) / (2.0 * h_fd)
        fd_G[i, :] = (fp - fm) / (2.0 * h_fd)
    err = 0.0
    if env.has_objective:
        err = float(np.max(np.abs(g0 - fd_g0) / np.maximum(1.0, np.abs(fd_g0))))
    if m > 0:
        err = max(err, float(np.max(np.abs(G - fd_G) / np.maximum(1.0, np.abs(fd_G)))))
    return err
