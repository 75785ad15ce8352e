"""Shepherd tracking benchmark.

A planar agent (the shepherd) picks polynomial path coefficients
``x = [x_{1,0..n-1}, x_{2,0..n-1}]`` so that its position
``z_k(t) = sum_j x_{kj} p_j(t)`` stays within radius ``r_i`` of every target
(sheep) at every time.  Sheep follow minimum-acceleration polynomial paths
through random waypoints from (0,0) at t=0 to (1,1) at t=T, perturbed by
frozen sample-and-hold Gaussian noise so the environment is a deterministic,
integrable function shared by the online controller and the offline solver.

Constraints are ``f_i(t,x) = ||z(t) - y_i(t)||^2 - r_i^2``; optional
objectives are the distance to the first sheep (``black_sheep``) or the
acceleration magnitude ``||z''(t)||`` (``min_acceleration``).

The default polynomial basis is Legendre shifted to [0, T]: monomials at
basis size 30 make the path QP and the constraint rows catastrophically
ill-conditioned on [0, 1].  Monomials stay available for fidelity runs at
reduced size; everything downstream is basis-agnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
import scipy.linalg

from .convex_sets import Box, ConvexSet, NonnegativeOrthant
from .environment import Environment
from .offline import TimeGrid, ViabilityResult, check_viability

BASIS_KINDS = ("legendre", "monomial")
SCENARIO_VERSION = 1
GENERATOR_VERSION = 1
MAX_DRAWS = 100


class GeneratorError(RuntimeError):
    """Scenario generation failed (singular path QP or viability loop cap)."""


# ---------------------------------------------------------------------------
# Polynomial bases
# ---------------------------------------------------------------------------

def basis_matrices(kind: str, n: int, ts: np.ndarray, T: float):
    """Values, first and second t-derivatives of the basis at the given times.

    Returns three (len(ts), n) arrays.  Legendre polynomials are shifted to
    [0, T] through u = 2t/T - 1; derivative recurrences are used so endpoint
    evaluation is exact and stable.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    K = ts.shape[0]
    if kind == "monomial":
        j = np.arange(n)
        powers = ts[:, None] ** j[None, :]
        P = powers
        Pd = np.zeros((K, n))
        Pdd = np.zeros((K, n))
        if n > 1:
            Pd[:, 1:] = j[1:] * powers[:, :-1]
        if n > 2:
            Pdd[:, 2:] = (j[2:] * (j[2:] - 1)) * powers[:, :-2]
        return P, Pd, Pdd
    if kind != "legendre":
        raise ValueError(f"unknown basis kind {kind!r}")
    u = 2.0 * ts / T - 1.0
    P = np.empty((K, n))
    Du = np.zeros((K, n))
    Ddu = np.zeros((K, n))
    P[:, 0] = 1.0
    if n > 1:
        P[:, 1] = u
        Du[:, 1] = 1.0
    for j in range(1, n - 1):
        P[:, j + 1] = ((2 * j + 1) * u * P[:, j] - j * P[:, j - 1]) / (j + 1)
        Du[:, j + 1] = (2 * j + 1) * P[:, j] + (Du[:, j - 1] if j >= 1 else 0.0)
        Ddu[:, j + 1] = (2 * j + 1) * Du[:, j] + (Ddu[:, j - 1] if j >= 1 else 0.0)
    s = 2.0 / T
    return P, s * Du, s * s * Ddu


def basis_eval(kind: str, n: int, t: float, T: float):
    """Single-time version of :func:`basis_matrices`; returns three (n,) vectors."""
    # Scalar fast path: plain float recurrences beat length-1 array ops by an
    # order of magnitude, and this sits inside the integrator's hot loop.
    t = float(t)
    p = [0.0] * n
    pd = [0.0] * n
    pdd = [0.0] * n
    if kind == "monomial":
        acc = 1.0
        for j in range(n):
            p[j] = acc
            if j >= 1:
                pd[j] = j * (acc / t if t != 0.0 else (1.0 if j == 1 else 0.0))
            if j >= 2:
                pdd[j] = j * (j - 1) * (t ** (j - 2))
            acc *= t
        return np.array(p), np.array(pd), np.array(pdd)
    if kind != "legendre":
        raise ValueError(f"unknown basis kind {kind!r}")
    u = 2.0 * t / T - 1.0
    p[0] = 1.0
    if n > 1:
        p[1] = u
        pd[1] = 1.0
    for j in range(1, n - 1):
        p[j + 1] = ((2 * j + 1) * u * p[j] - j * p[j - 1]) / (j + 1)
        pd[j + 1] = (2 * j + 1) * p[j] + pd[j - 1]
        pdd[j + 1] = (2 * j + 1) * pd[j] + pdd[j - 1]
    s = 2.0 / T
    return np.array(p), s * np.array(pd), (s * s) * np.array(pdd)


def acceleration_gram(kind: str, n: int, T: float) -> np.ndarray:
    """Exact Gram matrix of second derivatives: G_jk = integral of p_j'' p_k''.

    Closed form in both bases (monomial power integrals; Legendre derivative
    recurrences in coefficient space), no quadrature, so the path QP is exact.
    """
    if kind == "monomial":
        G = np.zeros((n, n))
        j = np.arange(n, dtype=float)
        for a in range(2, n):
            for b in range(2, n):
                G[a, b] = (j[a] * (j[a] - 1) * j[b] * (j[b] - 1)) * T ** (a + b - 3) / (a + b - 3)
        return G
    if kind != "legendre":
        raise ValueError(f"unknown basis kind {kind!r}")
    # Differentiation in Legendre coefficient space: (Dc)_l = (2l+1) sum of
    # c_j over j > l with j - l odd.
    D = np.zeros((n, n))
    for l in range(n):
        for j in range(l + 1, n):
            if (j - l) % 2 == 1:
                D[l, j] = 2 * l + 1
    A = D @ D
    w = 2.0 / (2.0 * np.arange(n) + 1.0)
    return (2.0 / T) ** 3 * (A.T * w) @ A


def _solve_path_qp(G: np.ndarray, con_rows: np.ndarray, b: np.ndarray):
    """Equality-constrained QP min c'Gc s.t. con_rows c = b via the bordered
    KKT system, with symmetric equilibration and iterative refinement.

    Returns (coefficients, condition number of the scaled KKT matrix).
    """
    n = G.shape[0]
    p = con_rows.shape[0]
    kkt = np.zeros((n + p, n + p))
    kkt[:n, :n] = 2.0 * G
    kkt[:n, n:] = con_rows.T
    kkt[n:, :n] = con_rows
    rhs = np.concatenate([np.zeros(n), b])
    scale = np.sqrt(np.maximum(np.abs(kkt).max(axis=1), 1e-30))
    S = 1.0 / scale
    kkt_s = kkt * S[:, None] * S[None, :]
    cond = float(np.linalg.cond(kkt_s))
    try:
        y = S * scipy.linalg.solve(kkt_s, S * rhs, assume_a="sym")
        for _ in range(2):
            r = rhs - kkt @ y
            y = y + S * scipy.linalg.solve(kkt_s, S * r, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise GeneratorError(f"singular path QP system (rank-deficient constraints): {exc}") from exc
    if not np.all(np.isfinite(y)):
        raise GeneratorError("path QP solve produced non-finite coefficients")
    return y[:n], cond


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShepherdScenario:
    m: int
    n: int                      # shepherd basis size (action dim is 2n)
    n_sheep: int                # sheep basis size
    basis: str
    T: float
    radii: np.ndarray           # (m,)
    L: int
    offset_box: float
    noise_std: float
    seed: int
    noise_cells: int
    sheep_coeffs: np.ndarray    # (m, 2, n_sheep)
    noise: np.ndarray           # (m, 2, noise_cells)
    waypoints: np.ndarray       # (L, 2)
    offsets: np.ndarray         # (m, L, 2), first sheep all zeros
    action_half: float
    draws: int
    xdagger: np.ndarray         # viability certificate
    viability_residual: float
    viability_iterations: int
    kkt_condition: float

    @property
    def action_dim(self) -> int:
        return 2 * self.n

    def action_set(self) -> Box:
        hw = np.full(self.action_dim, self.action_half)
        return Box(-hw, hw)

    def multiplier_set(self) -> NonnegativeOrthant:
        return NonnegativeOrthant(self.m)

    def offline_grid(self) -> TimeGrid:
        return TimeGrid(T=self.T, num_steps=self.noise_cells)


def encode_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Stack a (2, n) coefficient matrix into the action vector (2n,)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2 or coeffs.shape[0] != 2:
        raise ValueError("expected a (2, n) coefficient matrix")
    return np.concatenate([coeffs[0], coeffs[1]])


def decode_coeffs(x: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`encode_coeffs`."""
    x = np.asarray(x, dtype=float)
    if x.shape != (2 * n,):
        raise ValueError(f"expected action of shape ({2 * n},)")
    return np.stack([x[:n], x[n:]])


def _noise_cells(scenario_T: float, cells: int, ts: np.ndarray) -> np.ndarray:
    # Half-open cells [j, j+1); the 1e-9 nudge keeps grid times computed with
    # accumulated float rounding on the cell they were meant to sample.
    idx = np.floor(ts / scenario_T * cells + 1e-9).astype(int)
    return np.clip(idx, 0, cells - 1)


def sheep_positions(scenario: ShepherdScenario, ts: np.ndarray) -> np.ndarray:
    """Positions of every sheep at the given times, shape (len(ts), m, 2)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    P, _, _ = basis_matrices(scenario.basis, scenario.n_sheep, ts, scenario.T)
    poly = np.einsum("kj,icj->kic", P, scenario.sheep_coeffs)
    if scenario.noise_std > 0.0:
        cells = _noise_cells(scenario.T, scenario.noise_cells, ts)
        poly = poly + scenario.noise[:, :, cells].transpose(2, 0, 1)
    return poly


def sheep_position(scenario: ShepherdScenario, i: int, t: float) -> np.ndarray:
    """Position of sheep i at time t (basis reconstruction plus held noise)."""
    return sheep_positions(scenario, np.array([t]))[0, i]


def shepherd_position(scenario: ShepherdScenario, x: np.ndarray, t: float) -> np.ndarray:
    """Shepherd position encoded by action x at time t."""
    p, _, _ = basis_eval(scenario.basis, scenario.n, t, scenario.T)
    c = decode_coeffs(x, scenario.n)
    return c @ p


OBJECTIVES = ("none", "black_sheep", "min_acceleration")
NOISE_VARIANTS = ("frozen", "mean", "off")


def shepherd_env(scenario: ShepherdScenario, objective: str = "none",
                 noise: str = "frozen") -> Environment:
    """Environment with the m proximity constraints and the chosen objective.

    ``noise`` picks the path variant:

    * ``frozen``  the benchmark environment: smooth paths plus the scenario's
      frozen sample-and-hold noise table (what the controller runs against);
    * ``mean``    the exact noise average: smooth paths with ``2 sigma^2``
      added to every squared distance (``E||z - y - w||^2``), used for the
      viability certificate and the offline constraint set, which would be
      almost surely infeasible against held noise spikes;
    * ``off``     the smooth paths alone (path diagnostics).
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if noise not in NOISE_VARIANTS:
        raise ValueError(f"noise must be one of {NOISE_VARIANTS}")
    nb = scenario.n
    m = scenario.m
    T = scenario.T
    kind = scenario.basis
    use_noise = noise == "frozen" and scenario.noise_std > 0.0
    shift = 2.0 * scenario.noise_std**2 if noise == "mean" else 0.0
    r2 = scenario.radii**2 - shift
    has_obj = objective != "none"
    zero_g = np.zeros(2 * nb)
    cells = scenario.noise_cells
    W = scenario.noise
    coeff_flat = scenario.sheep_coeffs.reshape(2 * m, scenario.n_sheep)
    same_basis = scenario.n_sheep == nb

    # The offline solvers hammer the same time grid thousands of times; cache
    # basis matrices and sheep positions per grid.  Keyed by shape/endpoints,
    # which identifies a uniform grid uniquely.
    grid_cache: dict = {}

    def _sheep_at(ts: np.ndarray) -> np.ndarray:
        P, _, _ = basis_matrices(kind, scenario.n_sheep, ts, T)
        poly = np.einsum("kj,icj->kic", P, scenario.sheep_coeffs)
        if use_noise:
            idx = _noise_cells(T, cells, ts)
            poly = poly + W[:, :, idx].transpose(2, 0, 1)
        return poly

    def _grid_data(ts: np.ndarray):
        key = (ts.shape[0], float(ts[0]), float(ts[-1]))
        hit = grid_cache.get(key)
        if hit is None:
            hit = basis_matrices(kind, nb, ts, T) + (_sheep_at(ts),)
            grid_cache[key] = hit
        return hit

    def evaluate(t: float, x: np.ndarray):
        p, _, pdd = basis_eval(kind, nb, t, T)
        p_sheep = p if same_basis else basis_eval(kind, scenario.n_sheep, t, T)[0]
        y = (coeff_flat @ p_sheep).reshape(m, 2)
        if use_noise:
            cell = min(int(t / T * cells + 1e-9), cells - 1)
            y = y + W[:, :, cell]
        z1 = float(p @ x[:nb])
        z2 = float(p @ x[nb:])
        d1 = z1 - y[:, 0]
        d2 = z2 - y[:, 1]
        f = d1 * d1 + d2 * d2 - r2
        G = 2.0 * np.concatenate([p[:, None] * d1[None, :], p[:, None] * d2[None, :]])
        if objective == "black_sheep":
            f0 = float(f[0] + r2[0] + shift)
            g0 = G[:, 0].copy()
        elif objective == "min_acceleration":
            a1 = float(pdd @ x[:nb])
            a2 = float(pdd @ x[nb:])
            f0 = float(np.hypot(a1, a2))
            if f0 > 0.0:
                g0 = np.concatenate([pdd * (a1 / f0), pdd * (a2 / f0)])
            else:
                g0 = zero_g
        else:
            f0, g0 = 0.0, zero_g
        return f0, g0, f, G

    def batch_constraints(ts: np.ndarray, x: np.ndarray) -> np.ndarray:
        P, _, _, Y = _grid_data(ts)                          # Y: (K, m, 2)
        z = np.stack([P @ x[:nb], P @ x[nb:]], axis=1)       # (K, 2)
        d = z[:, None, :] - Y
        return np.einsum("kmc,kmc->km", d, d) - r2[None, :]

    def batch_evaluate(ts: np.ndarray, x: np.ndarray):
        P, _, Pdd, Y = _grid_data(ts)
        z = np.stack([P @ x[:nb], P @ x[nb:]], axis=1)
        d = z[:, None, :] - Y                                # (K, m, 2)
        f = np.einsum("kmc,kmc->km", d, d) - r2[None, :]
        G = 2.0 * np.concatenate(
            [P[:, :, None] * d[:, None, :, 0], P[:, :, None] * d[:, None, :, 1]], axis=1
        )                                                    # (K, 2n, m)
        K = ts.shape[0]
        if objective == "black_sheep":
            f0 = f[:, 0] + r2[0] + shift
            g0 = G[:, :, 0].copy()
        elif objective == "min_acceleration":
            a = np.stack([Pdd @ x[:nb], Pdd @ x[nb:]], axis=1)
            f0 = np.linalg.norm(a, axis=1)
            safe = np.where(f0 > 0.0, f0, 1.0)
            g0 = np.concatenate(
                [Pdd * (a[:, 0] / safe)[:, None], Pdd * (a[:, 1] / safe)[:, None]], axis=1
            )
            g0[f0 == 0.0] = 0.0
        else:
            f0 = np.zeros(K)
            g0 = np.zeros((K, 2 * nb))
        return f0, g0, f, G

    return Environment(
        n=2 * nb,
        m=m,
        evaluate=evaluate,
        has_objective=has_obj,
        batch_constraints=batch_constraints,
        batch_evaluate=batch_evaluate,
    )


def generate_sheep_paths(
    seed: int,
    m: int = 5,
    T: float = 1.0,
    radius: float | np.ndarray = 0.3,
    n: int = 30,
    n_sheep: Optional[int] = None,
    basis: str = "legendre",
    L: int = 3,
    offset_box: float = 0.1,
    noise_std: float = 0.1,
    noise_cells: int = 1000,
    action_half: float = 5.0,
    viability_max_iter: int = 200_000,
) -> ShepherdScenario:
    """Draw a viable scenario: waypoints, minimum-acceleration sheep paths,
    frozen noise, and the viability certificate.

    Each sheep's path minimizes the integral of squared acceleration subject
    to the endpoint and waypoint interpolation constraints (an equality
    constrained QP per coordinate).  The first sheep gets zero waypoint
    offsets.  Draw-and-check repeats until the checker certifies viability,
    up to 100 draws; the RNG stream continues across draws so the scenario is
    a pure function of the seed.

    Viability is certified against the noise-mean environment (see
    :func:`shepherd_env`): no smooth trajectory can satisfy the pointwise
    constraints against held white-noise spikes, so the certificate covers
    the exact expected constraints instead, and the online bound checks carry
    the noise fluctuation inside their discretization slack.
    """
    if basis not in BASIS_KINDS:
        raise ValueError(f"basis must be one of {BASIS_KINDS}")
    n_sheep = n if n_sheep is None else n_sheep
    if L < 0:
        raise ValueError("waypoint count L must be nonnegative")
    if n_sheep <= L + 2:
        raise ValueError("sheep basis size must exceed L + 2 equality constraints")
    radii = np.full(m, float(radius)) if np.isscalar(radius) else np.asarray(radius, dtype=float)
    if radii.shape != (m,) or np.any(radii <= 0.0):
        raise ValueError("radii must be m positive reals")

    rng = np.random.default_rng(seed)
    G = acceleration_gram(basis, n_sheep, T)
    con_times = np.concatenate([[0.0], (np.arange(1, L + 1) * T) / (L + 1), [T]])
    con_rows, _, _ = basis_matrices(basis, n_sheep, con_times, T)

    for attempt in range(1, MAX_DRAWS + 1):
        waypoints = rng.uniform(0.0, 1.0, size=(L, 2))
        offsets = np.zeros((m, L, 2))
        if m > 1 and L > 0:
            offsets[1:] = rng.uniform(-offset_box, offset_box, size=(m - 1, L, 2))
        noise = noise_std * rng.standard_normal((m, 2, noise_cells))

        coeffs = np.zeros((m, 2, n_sheep))
        cond_max = 0.0
        for i in range(m):
            targets = waypoints + offsets[i]
            for c in range(2):
                b = np.concatenate([[0.0], targets[:, c], [1.0]])
                coeffs[i, c], cond = _solve_path_qp(G, con_rows, b)
                cond_max = max(cond_max, cond)

        scenario = ShepherdScenario(
            m=m, n=n, n_sheep=n_sheep, basis=basis, T=T, radii=radii, L=L,
            offset_box=offset_box, noise_std=noise_std, seed=seed,
            noise_cells=noise_cells, sheep_coeffs=coeffs, noise=noise,
            waypoints=waypoints, offsets=offsets, action_half=action_half,
            draws=attempt, xdagger=np.zeros(2 * n), viability_residual=np.inf,
            viability_iterations=0, kkt_condition=cond_max,
        )
        env = shepherd_env(scenario, "none", noise="mean")
        # Warm start at the herd-center path: the mean of polynomial paths is
        # the polynomial of the mean coefficients, so when the bases agree it
        # is exact; otherwise fit it on the grid.
        grid = scenario.offline_grid()
        if n_sheep == n:
            x_init = encode_coeffs(coeffs.mean(axis=0))
        else:
            ts = grid.nodes()
            P_shep, _, _ = basis_matrices(basis, n, ts, T)
            P_sheep, _, _ = basis_matrices(basis, n_sheep, ts, T)
            center = np.einsum("kj,cj->kc", P_sheep, coeffs.mean(axis=0))
            cx, *_ = np.linalg.lstsq(P_shep, center[:, 0], rcond=None)
            cy, *_ = np.linalg.lstsq(P_shep, center[:, 1], rcond=None)
            x_init = np.concatenate([cx, cy])
        via = check_viability(env, grid, scenario.action_set(),
                              max_iter=viability_max_iter, interior_target=3e-2,
                              x_init=x_init)
        if via.viable:
            return ShepherdScenario(
                **{**_scenario_fields(scenario),
                   "xdagger": via.xdagger,
                   "viability_residual": via.residual,
                   "viability_iterations": via.iterations}
            )
    raise GeneratorError(f"no viable environment in {MAX_DRAWS} draws for seed {seed}")


def _scenario_fields(s: ShepherdScenario) -> dict:
    return {f: getattr(s, f) for f in s.__dataclass_fields__}


def regenerate(scenario: ShepherdScenario, T: float | None = None,
               seed: int | None = None) -> ShepherdScenario:
    """Fresh scenario with the same parameters but a new horizon or seed."""
    return generate_sheep_paths(
        seed=scenario.seed if seed is None else seed,
        m=scenario.m,
        T=scenario.T if T is None else T,
        radius=scenario.radii,
        n=scenario.n,
        n_sheep=scenario.n_sheep,
        basis=scenario.basis,
        L=scenario.L,
        offset_box=scenario.offset_box,
        noise_std=scenario.noise_std,
        noise_cells=scenario.noise_cells,
        action_half=scenario.action_half,
    )


def viability_certificate(scenario: ShepherdScenario) -> ViabilityResult:
    return ViabilityResult(
        viable=scenario.viability_residual <= 1e-6,
        xdagger=scenario.xdagger,
        residual=scenario.viability_residual,
        iterations=scenario.viability_iterations,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = {
    "version", "kind", "m", "n", "n_sheep", "basis", "T", "radii", "L",
    "offset_box", "noise_std", "seed", "noise_cells", "sheep_coeffs", "noise",
    "waypoints", "offsets", "action_half", "draws", "xdagger",
    "viability_residual", "viability_iterations", "kkt_condition",
    "generator_version",
}


def scenario_to_dict(s: ShepherdScenario) -> dict:
    d = {k: v for k, v in asdict(s).items()}
    for k, v in d.items():
        if isinstance(v, np.ndarray):
            d[k] = v.tolist()
    d["version"] = SCENARIO_VERSION
    d["generator_version"] = GENERATOR_VERSION
    d["kind"] = "shepherd"
    return d


def scenario_from_dict(d: dict) -> ShepherdScenario:
    unknown = set(d) - _SCENARIO_KEYS
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    if d.get("version") != SCENARIO_VERSION:
        raise ValueError(f"unsupported scenario version {d.get('version')!r}")
    if d.get("kind") != "shepherd":
        raise ValueError(f"unsupported scenario kind {d.get('kind')!r}")
    return ShepherdScenario(
        m=int(d["m"]), n=int(d["n"]), n_sheep=int(d["n_sheep"]), basis=d["basis"],
        T=float(d["T"]), radii=np.asarray(d["radii"], dtype=float), L=int(d["L"]),
        offset_box=float(d["offset_box"]), noise_std=float(d["noise_std"]),
        seed=int(d["seed"]), noise_cells=int(d["noise_cells"]),
        sheep_coeffs=np.asarray(d["sheep_coeffs"], dtype=float),
        noise=np.asarray(d["noise"], dtype=float),
        waypoints=np.asarray(d["waypoints"], dtype=float).reshape(int(d["L"]), 2),
        offsets=np.asarray(d["offsets"], dtype=float).reshape(int(d["m"]), int(d["L"]), 2),
        action_half=float(d["action_half"]), draws=int(d["draws"]),
        xdagger=np.asarray(d["xdagger"], dtype=float),
        viability_residual=float(d["viability_residual"]),
        viability_iterations=int(d["viability_iterations"]),
        kkt_condition=float(d["kkt_condition"]),
    )


def save_scenario(s: ShepherdScenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(s), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_scenario(path) -> ShepherdScenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
