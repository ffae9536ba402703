"""Monte Carlo population of heterogeneous Merton traders.

Each trader ``i`` holds the frictionless Merton position
``pi_i = (mu_i - r) / (sigma_i^2 (1 - gamma_i)) * x_i`` so that

    d ln pi_i = (r + alpha_i^2 (1/2 - gamma_i)) dt + alpha_i dW_i,
    alpha_i   = (mu_i - r) / (sigma_i (1 - gamma_i)).

With ``alpha_i = mu_alpha + sigma_alpha * eps_i`` and ``gamma_i = mu_gamma +
sigma_gamma * phi_i`` (``eps``, ``phi`` zero-mean, unit-variance, independent)
the one-step log-strategy increments ``xi_i`` have, as the population grows,

    mean     (r + (mu_alpha^2 + sigma_alpha^2)(1/2 - mu_gamma)) dt
    variance (mu_alpha^2 + sigma_alpha^2) dt + o(dt)

which are the moments of the generator process
``d pi / pi = (r + A (1 - mu_gamma)) dt + sqrt(A) dW`` with
``A = mu_alpha^2 + sigma_alpha^2``.

Random numbers come from counter-based Philox streams keyed by
``(seed, purpose, block)`` where a block is a fixed run of ``BLOCK`` traders,
so results are bit-identical for any number of worker threads.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import InvalidSpecError, NonPositiveSigmaError, RiskAversionUnityError

logger = logging.getLogger(__name__)

BLOCK = 8192
DISTRIBUTIONS = ("normal", "shifted-uniform")

# stream purposes
_POPULATION, _XI, _PATH_SHOCKS, _PATH_GAMMA, _RESAMPLE, _GENERATOR = range(6)

_SQRT3 = math.sqrt(3.0)
_UNITY_TOL = 1e-12


@dataclass(frozen=True)
class TraderPopulationSpec:
    n_traders: int = 10_000
    mu_alpha: float = 0.5
    sigma_alpha: float = 0.1
    mu_gamma: float = 0.5
    sigma_gamma: float = 0.1
    r: float = 0.02
    dt_years: float = 1.0 / 252
    n_steps: int = 252
    seed: int = 0
    alpha_dist: str = "normal"
    gamma_dist: str = "normal"
    # draw a fresh risk aversion for every trader at every step (paths only)
    redraw_each_step: bool = False

    def __post_init__(self):
        if self.n_traders < 1:
            raise InvalidSpecError("n_traders must be >= 1")
        if self.n_steps < 1:
            raise InvalidSpecError("n_steps must be >= 1")
        if self.sigma_alpha < 0 or self.sigma_gamma < 0:
            raise InvalidSpecError("sigma_alpha and sigma_gamma must be >= 0")
        if not self.dt_years > 0:
            raise InvalidSpecError("dt_years must be > 0")
        for name in ("alpha_dist", "gamma_dist"):
            if getattr(self, name) not in DISTRIBUTIONS:
                raise InvalidSpecError(f"{name} must be one of {DISTRIBUTIONS}, got {getattr(self, name)!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer")
        for name in ("mu_alpha", "sigma_alpha", "mu_gamma", "sigma_gamma", "r", "dt_years"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpecError(f"{name} must be finite")

    def replace(self, **changes) -> "TraderPopulationSpec":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def alpha_second_moment(self) -> float:
        """``E[alpha^2] = mu_alpha^2 + sigma_alpha^2``."""
        return self.mu_alpha ** 2 + self.sigma_alpha ** 2


def _rng(seed: int, purpose: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, purpose, block])))


def _standard(rng: np.random.Generator, dist: str, size) -> np.ndarray:
    """Zero-mean, unit-variance draws."""
    if dist == "normal":
        return rng.standard_normal(size)
    return rng.uniform(-_SQRT3, _SQRT3, size)


def _blocks(n: int) -> list[tuple[int, int, int]]:
    return [(b, lo, min(lo + BLOCK, n)) for b, lo in enumerate(range(0, n, BLOCK))]


def _map_blocks(fn: Callable, n: int, workers: int) -> list:
    blocks = _blocks(n)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def sample_population(spec: TraderPopulationSpec, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(alpha_i, gamma_i)`` for every trader; deterministic in ``spec.seed``."""

    def block(b, lo, hi):
        rng = _rng(spec.seed, _POPULATION, b)
        eps = _standard(rng, spec.alpha_dist, hi - lo)
        phi = _standard(rng, spec.gamma_dist, hi - lo)
        return spec.mu_alpha + spec.sigma_alpha * eps, spec.mu_gamma + spec.sigma_gamma * phi

    parts = _map_blocks(block, spec.n_traders, workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def theoretical_moments(spec: TraderPopulationSpec, form: str = "second-moment") -> tuple[float, float]:
    """Large-population mean and variance of the one-step increment ``xi``.

    ``form="second-moment"`` uses ``E[alpha^2] = mu_alpha^2 + sigma_alpha^2``.
    ``form="squared-sum"`` uses ``(mu_alpha + sigma_alpha)^2`` instead; it is
    only kept for comparison since it does not equal ``E[alpha^2]``.
    """
    if form == "second-moment":
        a2 = spec.alpha_second_moment
    elif form == "squared-sum":
        a2 = (spec.mu_alpha + spec.sigma_alpha) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    dt = spec.dt_years
    return (spec.r + a2 * (0.5 - spec.mu_gamma)) * dt, a2 * dt


def xi_increments(spec: TraderPopulationSpec, eps, phi, dW) -> np.ndarray:
    """One-step log-strategy increments for given standardized draws."""
    alpha = spec.mu_alpha + spec.sigma_alpha * eps
    gamma = spec.mu_gamma + spec.sigma_gamma * phi
    return (spec.r + alpha * alpha * (0.5 - gamma)) * spec.dt_years + alpha * dW


def residual_terms(spec: TraderPopulationSpec, eps, phi, form: str = "exact") -> np.ndarray:
    """Remainder of ``xi`` after its mean-field drift and ``alpha * dW`` parts.

    ``form="exact"`` is the full remainder, so that
    ``xi = (r + A (1/2 - mu_gamma)) dt + alpha dW + res`` holds identically.
    ``form="truncated"`` drops the ``-sigma_gamma phi sigma_alpha^2 (eps^2 - 1) dt``
    term.  Both have zero mean and a second moment of order ``dt^2``.
    """
    ma, sa, mg, sg, dt = spec.mu_alpha, spec.sigma_alpha, spec.mu_gamma, spec.sigma_gamma, spec.dt_years
    half = 0.5 - mg
    res = (
        2.0 * ma * sa * eps * half
        - sg * phi * (ma * ma + sa * sa + 2.0 * ma * sa * eps)
        + sa * sa * (eps * eps - 1.0) * half
    ) * dt
    if form == "exact":
        res = res - sg * phi * sa * sa * (eps * eps - 1.0) * dt
    elif form != "truncated":
        raise ValueError(f"unknown form {form!r}")
    return res


@dataclass(frozen=True)
class AggregationReport:
    n_traders: int
    sample_mean_xi: float
    sample_var_xi: float
    theory_mean_xi: float
    theory_var_xi: float
    residual_mean: float
    residual_sq_mean: float
    # same moments with (mu_alpha + sigma_alpha)^2 in place of E[alpha^2]
    theory_mean_xi_squared_sum: float = field(default=math.nan)
    theory_var_xi_squared_sum: float = field(default=math.nan)


def _xi_draws(spec: TraderPopulationSpec, b: int, n: int):
    rng = _rng(spec.seed, _XI, b)
    eps = _standard(rng, spec.alpha_dist, n)
    phi = _standard(rng, spec.gamma_dist, n)
    dW = rng.standard_normal(n) * math.sqrt(spec.dt_years)
    return eps, phi, dW


def _xi_block(spec: TraderPopulationSpec, b: int, lo: int, hi: int) -> np.ndarray:
    eps, phi, dW = _xi_draws(spec, b, hi - lo)
    xi = xi_increments(spec, eps, phi, dW)
    res = residual_terms(spec, eps, phi)
    return np.array([xi.sum(), (xi * xi).sum(), res.sum(), (res * res).sum()])


def draw_xi(spec: TraderPopulationSpec) -> np.ndarray:
    """The raw increments ``xi_i`` behind :func:`simulate_xi`."""
    return np.concatenate([
        xi_increments(spec, *_xi_draws(spec, b, hi - lo)) for b, lo, hi in _blocks(spec.n_traders)
    ])


def simulate_xi(spec: TraderPopulationSpec, workers: int = 1) -> AggregationReport:
    """Sample one step of every trader and compare moments with the large-N limit.

    Block sums are combined with ``math.fsum`` so the report does not depend
    on the order in which blocks finish.
    """
    sums = _map_blocks(lambda b, lo, hi: _xi_block(spec, b, lo, hi), spec.n_traders, workers)
    s = np.array(sums)
    n = spec.n_traders
    mean = math.fsum(s[:, 0]) / n
    second = math.fsum(s[:, 1]) / n
    theory_mean, theory_var = theoretical_moments(spec)
    alt_mean, alt_var = theoretical_moments(spec, "squared-sum")
    return AggregationReport(
        n_traders=n,
        sample_mean_xi=mean,
        sample_var_xi=max(second - mean * mean, 0.0),
        theory_mean_xi=theory_mean,
        theory_var_xi=theory_var,
        residual_mean=math.fsum(s[:, 2]) / n,
        residual_sq_mean=math.fsum(s[:, 3]) / n,
        theory_mean_xi_squared_sum=alt_mean,
        theory_var_xi_squared_sum=alt_var,
    )


def convergence_study(spec: TraderPopulationSpec, n_grid: Sequence[int], workers: int = 1) -> list[AggregationReport]:
    """One :func:`simulate_xi` report per population size in ``n_grid``."""
    grid = list(n_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidSpecError("n_grid must be strictly ascending")
    return [simulate_xi(spec.replace(n_traders=int(n)), workers) for n in grid]


def residual_rms(spec: TraderPopulationSpec, n_grid: Sequence[int], n_seeds: int,
                 workers: int = 1) -> np.ndarray:
    """Root-mean-square of ``residual_mean`` over seeds ``spec.seed .. spec.seed + n_seeds - 1``."""
    vals = np.array([
        [r.residual_mean for r in convergence_study(spec.replace(seed=spec.seed + k), n_grid, workers)]
        for k in range(n_seeds)
    ])
    return np.sqrt((vals ** 2).mean(axis=0))


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


@dataclass(frozen=True)
class TraderPath:
    times: np.ndarray
    wealth: np.ndarray
    strategy: np.ndarray
    riskfree_holding: np.ndarray
    shocks: np.ndarray
    mu: float
    sigma: float
    gamma: np.ndarray | float
    alpha: np.ndarray | float

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.wealth > 0))


@dataclass(frozen=True)
class TraderPaths(Sequence):
    """Batch of trader paths; row ``i`` of every array belongs to trader ``i``.

    ``gamma`` and ``alpha`` have one column per step when risk aversions are
    redrawn each step, otherwise one value per trader.
    """

    times: np.ndarray
    wealth: np.ndarray
    strategy: np.ndarray
    shocks: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray
    r: float
    resampled: int = 0

    @property
    def riskfree_holding(self) -> np.ndarray:
        return self.wealth - self.strategy

    @property
    def merton_fraction(self) -> np.ndarray:
        """``pi / x`` prescribed at each step, shape ``(n_traders, n_steps + 1)``."""
        f = (self.mu - self.r)[:, None] / (self.sigma ** 2)[:, None] / (1.0 - self._gamma_steps())
        return f

    def _gamma_steps(self) -> np.ndarray:
        n_cols = self.wealth.shape[1]
        if self.gamma.ndim == 1:
            return np.repeat(self.gamma[:, None], n_cols, axis=1)
        return self.gamma

    @property
    def infeasible(self) -> np.ndarray:
        return ~np.all(self.wealth > 0, axis=1)

    def __len__(self) -> int:
        return self.wealth.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        return TraderPath(
            times=self.times,
            wealth=self.wealth[i],
            strategy=self.strategy[i],
            riskfree_holding=self.wealth[i] - self.strategy[i],
            shocks=self.shocks[i],
            mu=float(self.mu[i]),
            sigma=float(self.sigma[i]),
            gamma=self.gamma[i] if self.gamma.ndim > 1 else float(self.gamma[i]),
            alpha=self.alpha[i] if self.alpha.ndim > 1 else float(self.alpha[i]),
        )


def _fix_unity(spec: TraderPopulationSpec, gamma: np.ndarray, block: int) -> tuple[np.ndarray, int]:
    """Redraw risk aversions within ``_UNITY_TOL`` of 1 (singular Merton fraction)."""
    bad = np.abs(1.0 - gamma) < _UNITY_TOL
    if not bad.any():
        return gamma, 0
    if spec.sigma_gamma == 0:
        raise RiskAversionUnityError("every trader has risk aversion 1; the Merton fraction is undefined")
    gamma = gamma.copy()
    rng = _rng(spec.seed, _RESAMPLE, block)
    count = 0
    while bad.any():
        k = int(bad.sum())
        count += k
        gamma[bad] = spec.mu_gamma + spec.sigma_gamma * _standard(rng, spec.gamma_dist, k)
        bad = np.abs(1.0 - gamma) < _UNITY_TOL
    return gamma, count


def simulate_trader_paths(spec: TraderPopulationSpec, mu, sigma, x0: float = 1.0,
                          workers: int = 1) -> TraderPaths:
    """Euler-Maruyama integration of every trader's self-financing wealth.

    ``mu`` and ``sigma`` are each trader's perceived drift and volatility
    (scalars broadcast to the whole population).  Risk aversions come from
    :func:`sample_population`; at every step the risky position is set to the
    Merton fraction of current wealth and wealth moves by

        x[k+1] = x[k] + r (x[k] - pi[k]) dt + pi[k] (mu dt + sigma dW).
    """
    n, steps, dt, r = spec.n_traders, spec.n_steps, spec.dt_years, spec.r
    mu = np.broadcast_to(np.asarray(mu, float), (n,)).copy()
    sigma = np.broadcast_to(np.asarray(sigma, float), (n,)).copy()
    if not np.all(sigma > 0):
        raise NonPositiveSigmaError("every trader needs a positive perceived volatility")
    _, gamma0 = sample_population(spec)

    def block(b, lo, hi):
        m = hi - lo
        g = gamma0[lo:hi]
        g, count = _fix_unity(spec, g, b)
        if spec.redraw_each_step:
            grng = _rng(spec.seed, _PATH_GAMMA, b)
            g_steps = np.empty((m, steps))
            g_steps[:, 0] = g
            if steps > 1:
                g_steps[:, 1:] = spec.mu_gamma + spec.sigma_gamma * _standard(grng, spec.gamma_dist, (m, steps - 1))
            fixed, c2 = _fix_unity(spec, g_steps.ravel(), b)
            g_steps = fixed.reshape(m, steps)
            count += c2
        else:
            g_steps = np.repeat(g[:, None], steps, axis=1)

        dW = _rng(spec.seed, _PATH_SHOCKS, b).standard_normal((m, steps)) * math.sqrt(dt)
        excess = (mu[lo:hi] - r)[:, None]
        frac = excess / (sigma[lo:hi] ** 2)[:, None] / (1.0 - g_steps)

        x = np.empty((m, steps + 1))
        pi = np.empty((m, steps + 1))
        x[:, 0] = x0
        for k in range(steps):
            pi[:, k] = frac[:, k] * x[:, k]
            x[:, k + 1] = x[:, k] + r * (x[:, k] - pi[:, k]) * dt + pi[:, k] * (mu[lo:hi] * dt + sigma[lo:hi] * dW[:, k])
        # position at the horizon uses the last step's risk aversion
        pi[:, steps] = frac[:, -1] * x[:, steps]
        return x, pi, dW, (g_steps if spec.redraw_each_step else g), count

    parts = _map_blocks(block, n, workers)
    wealth = np.concatenate([p[0] for p in parts])
    strategy = np.concatenate([p[1] for p in parts])
    shocks = np.concatenate([p[2] for p in parts])
    gamma = np.concatenate([p[3] for p in parts])
    resampled = sum(p[4] for p in parts)
    if resampled:
        logger.warning("resampled %d risk-aversion draw(s) equal to 1", resampled)

    if gamma.ndim == 1:
        alpha = (mu - r) / (sigma * (1.0 - gamma))
        gamma_cols = gamma
    else:
        alpha = (mu - r)[:, None] / (sigma[:, None] * (1.0 - gamma))
        gamma_cols = np.concatenate([gamma, gamma[:, -1:]], axis=1)

    paths = TraderPaths(
        times=np.arange(steps + 1) * dt,
        wealth=wealth,
        strategy=strategy,
        shocks=shocks,
        mu=mu,
        sigma=sigma,
        gamma=gamma_cols,
        alpha=alpha,
        r=r,
        resampled=resampled,
    )
    bad = int(paths.infeasible.sum())
    if bad:
        logger.warning("%d trader path(s) reached non-positive wealth", bad)
    return paths


def generator_path(mu_alpha: float, sigma_alpha: float, mu_gamma: float, r: float, dt: float,
                   n_steps: int, seed: int = 0, n_paths: int | None = None, pi0: float = 1.0) -> np.ndarray:
    """Exact simulation of the generator process on a grid of ``n_steps`` steps.

    ``ln pi`` moves by ``(r + A (1/2 - mu_gamma)) dt + sqrt(A) dW`` per step,
    ``A = mu_alpha^2 + sigma_alpha^2``.  Returns ``n_steps + 1`` values starting
    at ``pi0``, or an ``(n_paths, n_steps + 1)`` array when ``n_paths`` is given.
    """
    if not dt > 0:
        raise InvalidSpecError("dt must be positive")
    if n_steps < 1:
        raise InvalidSpecError("n_steps must be >= 1")
    a2 = mu_alpha ** 2 + sigma_alpha ** 2
    shape = (n_steps,) if n_paths is None else (n_paths, n_steps)
    z = _rng(seed, _GENERATOR, 0).standard_normal(shape)
    inc = (r + a2 * (0.5 - mu_gamma)) * dt + math.sqrt(a2 * dt) * z
    log_path = np.concatenate([np.zeros(shape[:-1] + (1,)), np.cumsum(inc, axis=-1)], axis=-1)
    return pi0 * np.exp(log_path)
