"""Univariate self-exciting point processes on a bank of exponential kernels.

Cluster intensities are pure self-excitation:

    lambda(t) = sum_{t_i < t} sum_l alpha_l * (1/tau_l) * exp(-(t - t_i)/tau_l)

with a truncation window W so that only events in (t - W, t) are consulted.
Simulation adds a constant baseline; inference of the kernel weights runs an
EM over latent parent attributions (with a background component, discarded in
the returned weights).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

DEFAULT_TIMESCALES = (0.5, 2.0, 8.0)
DEFAULT_BRANCHING = 0.5
TRUNCATION_FACTOR = 10.0


@dataclass(frozen=True)
class KernelBank:
    """Fixed set of normalized exponential decay kernels.

    Kernel l is kappa_l(dt) = (1/tau_l) * exp(-dt/tau_l) for dt >= 0, which
    integrates to 1 over [0, inf).
    """

    timescales: tuple = DEFAULT_TIMESCALES

    def __post_init__(self):
        taus = tuple(float(t) for t in self.timescales)
        if not taus:
            raise ConfigurationError("kernel bank needs at least one timescale")
        if any(t <= 0 for t in taus):
            raise ConfigurationError("kernel timescales must be positive")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ConfigurationError("kernel timescales must be strictly increasing")
        object.__setattr__(self, "timescales", taus)

    @property
    def size(self):
        return len(self.timescales)

    @property
    def taus(self):
        return np.asarray(self.timescales)

    @property
    def truncation_window(self):
        """Window beyond which kernel mass (< e^-10) is dropped."""
        return TRUNCATION_FACTOR * max(self.timescales)

    def eval(self, dt):
        """Kernel values (kappa_1(dt), ..., kappa_L(dt)) for a scalar dt >= 0."""
        if dt < 0:
            raise DomainError(f"kernel argument must be non-negative, got {dt}")
        taus = self.taus
        return np.exp(-dt / taus) / taus

    def eval_many(self, dts):
        """Kernel values for an array of lags; returns shape (L, len(dts))."""
        dts = np.asarray(dts, dtype=float)
        if dts.size and dts.min() < 0:
            raise DomainError("kernel arguments must be non-negative")
        taus = self.taus[:, None]
        return np.exp(-dts[None, :] / taus) / taus

    def integral(self, dt):
        """Per-kernel integral of kappa_l over [0, dt]; shape (L,)."""
        return 1.0 - np.exp(-np.maximum(dt, 0.0) / self.taus)

    def default_weights(self, branching=DEFAULT_BRANCHING):
        """Uninformative prior weights: total branching spread evenly."""
        return np.full(self.size, branching / self.size)


def kernel_eval(bank, dt):
    """Evaluate every kernel of the bank at lag dt."""
    return bank.eval(dt)


@dataclass
class EventHistory:
    """Sorted event timestamps with a truncation window for intensity queries."""

    times: list = field(default_factory=list)
    truncation_window: float = TRUNCATION_FACTOR * max(DEFAULT_TIMESCALES)

    def __post_init__(self):
        if self.truncation_window <= 0:
            raise ConfigurationError("truncation window must be positive")
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise DomainError("event times must be non-decreasing")

    def __len__(self):
        return len(self.times)

    @property
    def span(self):
        return self.times[-1] - self.times[0] if self.times else 0.0

    def push(self, t):
        if self.times and t < self.times[-1]:
            raise DomainError(f"event time {t} precedes last event {self.times[-1]}")
        self.times.append(float(t))

    def window_times(self, t):
        """Events in (t - W, t), as an array (events at or after t excluded)."""
        lo = bisect.bisect_right(self.times, t - self.truncation_window)
        hi = bisect.bisect_left(self.times, t)
        return np.asarray(self.times[lo:hi])

    def copy(self):
        return EventHistory(list(self.times), self.truncation_window)


@dataclass(frozen=True)
class HawkesParams:
    """Simulation parameters: baseline rate and per-kernel excitation weights."""

    baseline: float
    weights: tuple

    def __post_init__(self):
        if self.baseline < 0:
            raise ConfigurationError("baseline must be non-negative")
        w = tuple(float(x) for x in self.weights)
        if any(x < 0 for x in w):
            raise ConfigurationError("excitation weights must be non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def branching_ratio(self):
        return float(sum(self.weights))


def _check_weights(weights, bank):
    w = np.asarray(weights, dtype=float)
    if w.shape != (bank.size,):
        raise ConfigurationError(
            f"got {w.size} weights for a bank of {bank.size} kernels"
        )
    return w


def intensity(history, weights, bank, t):
    """Self-excitation intensity at time t given the (truncated) history."""
    w = _check_weights(weights, bank)
    past = history.window_times(t)
    if past.size == 0:
        return 0.0
    k = bank.eval_many(t - past)  # (L, n)
    return float(w @ k.sum(axis=1))


def simulate_hawkes(params, bank, horizon, seed):
    """Simulate a Hawkes process on [0, horizon] by Ogata thinning.

    Uses the exact decreasing-intensity upper bound between events; the
    exponential-kernel state is maintained recursively, so no truncation is
    applied during simulation.
    """
    if horizon < 0:
        raise DomainError("horizon must be non-negative")
    w = _check_weights(params.weights, bank)
    if params.branching_ratio >= 1:
        raise ConfigurationError(
            f"branching ratio {params.branching_ratio} >= 1: process is non-stationary"
        )
    rng = np.random.default_rng(seed)
    taus = bank.taus
    coeff = w / taus  # jump size of each kernel term at dt=0+
    state = np.zeros(bank.size)  # sum_i exp(-(t - t_i)/tau_l)
    t = 0.0
    events = []
    while True:
        bound = params.baseline + float(coeff @ state)
        if bound <= 0:
            break
        t_new = t + rng.exponential(1.0 / bound)
        if t_new > horizon:
            break
        state = state * np.exp(-(t_new - t) / taus)
        t = t_new
        lam = params.baseline + float(coeff @ state)
        if rng.uniform() * bound <= lam:
            events.append(t)
            state = state + 1.0
    return EventHistory(events, bank.truncation_window)


def self_excitation_log_likelihood(history, weights, bank, horizon):
    """Log-likelihood of the self-excitation model, conditioned on the first event.

    sum_{i >= 2} log lambda(t_i) - integral of lambda up to the horizon, with
    the compensator computed analytically (truncated consistently with the
    intensity window). Returns -inf when some event has zero intensity.
    """
    w = _check_weights(weights, bank)
    times = [t for t in history.times if t <= horizon]
    if len(times) < 2:
        raise DomainError("need at least 2 events for a conditional likelihood")
    hist = EventHistory(times, history.truncation_window)
    log_term = 0.0
    for t in times[1:]:
        lam = intensity(hist, w, bank, t)
        if lam <= 0:
            return float("-inf")
        log_term += np.log(lam)
    W = history.truncation_window
    dts = np.minimum(horizon - np.asarray(times), W)
    # (L, n) truncated kernel integrals
    comp = w @ (1.0 - np.exp(-dts[None, :] / bank.taus[:, None])).sum(axis=1)
    return float(log_term - comp)


@dataclass
class WeightEstimate:
    """Result of EM weight estimation."""

    weights: np.ndarray
    background: float
    informative: bool
    loglik_trace: list


def _parent_pairs(times, window):
    """Child/lag arrays of all (i, j) pairs with 0 < t_i - t_j <= window."""
    t = np.asarray(times)
    n = t.size
    lo = np.searchsorted(t, t - window, side="left")
    counts = np.arange(n) - lo  # candidate parents per child
    counts[counts < 0] = 0
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.intp), np.empty(0)
    child = np.repeat(np.arange(n), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    parent = lo[child] + (np.arange(total) - np.repeat(offsets, counts))
    return child, t[child] - t[parent]


def estimate_weights(history, bank, n_sweeps, init_weights=None, horizon=None,
                     max_events=None, track_loglik=True):
    """Estimate kernel weights by EM over latent parent attributions.

    A background component is estimated jointly (events need not be explained
    by self-excitation) and discarded; only the excitation weights feed back
    into the cluster intensity. Each sweep is a closed-form M-step; the joint
    log-likelihood trace is non-decreasing.

    max_events caps the fit to the most recent events, bounding per-call cost
    in streaming use.
    """
    if init_weights is None:
        init_weights = bank.default_weights()
    alpha = _check_weights(init_weights, bank).copy()
    times = history.times
    if max_events is not None and len(times) > max_events:
        times = times[-max_events:]
    n = len(times)
    if n < 2 or n_sweeps == 0:
        return WeightEstimate(alpha, 0.0, False, [])
    if horizon is None:
        horizon = times[-1]
    t_obs = horizon - times[0]
    if t_obs <= 0:
        return WeightEstimate(alpha, 0.0, False, [])

    window = history.truncation_window
    child, dts = _parent_pairs(times, window)
    kern = bank.eval_many(dts)  # (L, nnz)
    # per-kernel compensator mass each event can emit before the horizon
    g = (1.0 - np.exp(
        -np.minimum(horizon - np.asarray(times), window)[None, :]
        / bank.taus[:, None])).sum(axis=1)  # (L,)

    mu = 0.5 * (n - 1) / t_obs
    trace = []

    def loglik(mu, alpha):
        exc = np.bincount(child, (alpha @ kern), minlength=n)
        return float(np.log(mu + exc[1:]).sum() - mu * t_obs - alpha @ g)

    for _ in range(n_sweeps):
        if track_loglik:
            trace.append(loglik(mu, alpha))
        exc = alpha[:, None] * kern  # (L, nnz)
        lam_i = mu + np.bincount(child, exc.sum(axis=0), minlength=n)
        inv = 1.0 / lam_i[child]
        resp = exc * inv[None, :]  # parent responsibilities per kernel
        alpha = np.where(g > 0, resp.sum(axis=1) / np.maximum(g, 1e-300), 0.0)
        mu = float((mu / lam_i[1:]).sum()) / t_obs
    if track_loglik:
        trace.append(loglik(mu, alpha))
    return WeightEstimate(alpha, mu, True, trace)
