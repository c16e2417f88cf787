"""Monte Carlo validation oracle for the closed-form performance metrics.

Sampling is organised in fixed-size batches.  Batch ``i`` always draws from
the generator seeded with ``SeedSequence(entropy=seed, spawn_key=(i,))`` and
batch statistics are combined with an ordered pairwise reduction, so results
are bit-identical for any worker count, including 1.

The DEP estimator draws channel states and fading, then evaluates the exact
conditional minimum-DEP kernel per draw: given the received power and the
noise-uncertainty bounds, the infinite-observation radiometer statistic is
deterministic, so no per-threshold simulation is needed.  A separate
finite-observation radiometer estimator is provided as a slow cross-check of
that limit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (
    NoiseModel,
    path_loss,
    rician_factor,
    sample_nakagami_power,
    sample_noise_power,
    sample_rician_power,
)
from .detection import min_dep_values, threshold_breakpoints
from .errors import DomainError
from .geometry import alice_main_lobe_covers_willie, lobe_gains
from .scenario import NodePosition, Scenario

__all__ = [
    "McEstimate",
    "BATCH_SIZE",
    "mc_expected_min_dep",
    "mc_outage",
    "mc_ergodic_capacity",
    "mc_min_dep_radiometer",
]

BATCH_SIZE = 65536


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error and provenance."""

    mean: float
    std_error: float
    n_samples: int
    seed: int


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(batch,)))


def _pairwise(values: list[float]) -> float:
    """Ordered pairwise reduction; the tree shape depends only on the count."""
    if not values:
        return 0.0
    while len(values) > 1:
        nxt = [values[i] + values[i + 1] if i + 1 < len(values) else values[i]
               for i in range(0, len(values), 2)]
        values = nxt
    return values[0]


def _run_batches(sample_batch, n: int, seed: int, workers: int) -> McEstimate:
    """Split n draws into fixed batches, evaluate, reduce deterministically."""
    if n < 1:
        raise DomainError("need at least one sample")
    sizes = [BATCH_SIZE] * (n // BATCH_SIZE)
    if n % BATCH_SIZE:
        sizes.append(n % BATCH_SIZE)
    tasks = list(enumerate(sizes))

    def run(task):
        idx, m = task
        vals = sample_batch(_batch_rng(seed, idx), m)
        vals = np.asarray(vals, dtype=float)
        return float(np.sum(vals)), float(np.sum(vals * vals))

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, tasks))
    else:
        stats = [run(t) for t in tasks]
    total = _pairwise([s for s, _ in stats])
    total_sq = _pairwise([q for _, q in stats])
    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
        se = math.sqrt(var / n)
    else:
        se = float("inf")
    return McEstimate(mean=mean, std_error=se, n_samples=n, seed=seed)


def _check_common(scn: Scenario, mode: str, p_a: float, n: int):
    if mode not in ("om", "dm"):
        raise DomainError(f"unknown mode {mode!r}")
    if p_a < 0:
        raise DomainError("transmit power must be nonnegative")
    if n < 1000:
        raise DomainError("oracle estimates need n >= 1000")


def _willie_fading(scn: Scenario, mode: str, link, rng, m: int):
    """Draw (per-sample deterministic gain-times-loss, fading power)."""
    los = rng.random(m) < link.p_los
    if mode == "om":
        k_los = rician_factor(link.theta_rad, scn.om.rician, True)
        k = np.where(los, k_los, 0.0)
        h2 = sample_rician_power(k, rng)
        loss = np.where(los,
                        path_loss(link.d, scn.om.pl_los),
                        path_loss(link.d, scn.om.pl_nlos))
        return loss, h2
    nak = scn.dm.nakagami
    s = np.where(los, nak.s_los, nak.s_nlos)
    h2 = sample_nakagami_power(s, rng)
    loss = np.where(los,
                    path_loss(link.d, scn.dm.pl_los),
                    path_loss(link.d, scn.dm.pl_nlos))
    return loss, h2


def mc_expected_min_dep(scn: Scenario, alice: NodePosition | None = None,
                        p_a: float | None = None, mode: str = "om",
                        n: int = 10**6, seed: int | None = None,
                        rho: float | None = None,
                        workers: int = 1) -> McEstimate:
    """Estimate the fading-averaged minimum DEP by direct sampling."""
    alice = alice if alice is not None else scn.alice
    p_a = scn.p_a if p_a is None else float(p_a)
    seed = scn.seed if seed is None else int(seed)
    rho = scn.noise.rho if rho is None else float(rho)
    _check_common(scn, mode, p_a, n)
    link = scn.link(alice, scn.willie)
    sigma_n2 = scn.noise.sigma_n2

    if mode == "dm":
        a_tab = lobe_gains(scn.ant_alice)
        w_tab = lobe_gains(scn.ant_willie)
        g_alice = (a_tab.g_main
                   if alice_main_lobe_covers_willie(alice, scn.bob, scn.willie,
                                                    scn.ant_alice)
                   else a_tab.g_side)

    def batch(rng, m):
        loss, h2 = _willie_fading(scn, mode, link, rng, m)
        if mode == "dm":
            main = rng.random(m) < w_tab.p_main
            gain = g_alice * np.where(main, w_tab.g_main, w_tab.g_side)
        else:
            gain = 1.0
        k_a = p_a * gain * loss * h2
        return min_dep_values(k_a, sigma_n2, rho)

    return _run_batches(batch, n, seed, workers)


def _bob_snr_batch(scn: Scenario, mode: str, alice: NodePosition,
                   p_a: float, rho: float, rng, m: int):
    """One batch of receiver SNR draws (fading, lobe state, noise)."""
    link = scn.link(alice, scn.bob)
    los = rng.random(m) < link.p_los
    if mode == "om":
        k_los = rician_factor(link.theta_rad, scn.om.rician, True)
        k = np.where(los, k_los, 0.0)
        h2 = sample_rician_power(k, rng)
        loss = np.where(los,
                        path_loss(link.d, scn.om.pl_los),
                        path_loss(link.d, scn.om.pl_nlos))
        gain = 1.0
    else:
        nak = scn.dm.nakagami
        s = np.where(los, nak.s_los, nak.s_nlos)
        h2 = sample_nakagami_power(s, rng)
        loss = np.where(los,
                        path_loss(link.d, scn.dm.pl_los),
                        path_loss(link.d, scn.dm.pl_nlos))
        a_tab = lobe_gains(scn.ant_alice)
        b_tab = lobe_gains(scn.ant_bob)
        main = rng.random(m) < b_tab.p_main
        gain = a_tab.g_main * np.where(main, b_tab.g_main, b_tab.g_side)
    noise = NoiseModel(sigma_n2=scn.noise.sigma_n2, rho=rho)
    sigma_b2 = sample_noise_power(noise, rng, size=m)
    return p_a * gain * loss * h2 / sigma_b2


def mc_outage(scn: Scenario, alice: NodePosition | None = None,
              p_a: float | None = None, gamma_th: float | None = None,
              mode: str = "om", n: int = 10**6, seed: int | None = None,
              rho: float | None = None, workers: int = 1) -> McEstimate:
    """Estimate P(SNR < gamma_th) at the receiver by direct sampling."""
    alice = alice if alice is not None else scn.alice
    p_a = scn.p_a if p_a is None else float(p_a)
    seed = scn.seed if seed is None else int(seed)
    rho = scn.noise.rho if rho is None else float(rho)
    _check_common(scn, mode, p_a, n)
    if gamma_th is None:
        from .throughput import snr_threshold
        gamma_th = float(snr_threshold(scn.r_b, scn.band(mode).bandwidth_hz))
    if gamma_th < 0:
        raise DomainError("gamma_th must be nonnegative")

    def batch(rng, m):
        snr = _bob_snr_batch(scn, mode, alice, p_a, rho, rng, m)
        return (snr < gamma_th).astype(float)

    return _run_batches(batch, n, seed, workers)


def mc_ergodic_capacity(scn: Scenario, alice: NodePosition | None = None,
                        p_a: float | None = None, mode: str = "om",
                        n: int = 10**6, seed: int | None = None,
                        rho: float | None = None,
                        workers: int = 1) -> McEstimate:
    """Estimate E[W log2(1 + SNR)] at the receiver by direct sampling."""
    alice = alice if alice is not None else scn.alice
    p_a = scn.p_a if p_a is None else float(p_a)
    seed = scn.seed if seed is None else int(seed)
    rho = scn.noise.rho if rho is None else float(rho)
    _check_common(scn, mode, p_a, n)
    w = scn.band(mode).bandwidth_hz

    def batch(rng, m):
        snr = _bob_snr_batch(scn, mode, alice, p_a, rho, rng, m)
        return w * np.log2(1.0 + snr)

    return _run_batches(batch, n, seed, workers)


def mc_min_dep_radiometer(k_a: float, sigma_n2: float, rho: float,
                          n_trials: int = 2000, n_uses: int = 10**4,
                          n_tau: int = 201, seed: int = 0) -> float:
    """Finite-observation radiometer cross-check of the minimum-DEP kernel.

    Simulates the averaged energy statistic over ``n_uses`` channel uses per
    trial under both hypotheses, then minimises the empirical error sum over
    a threshold grid anchored at the analytic breakpoints.  Slow; intended
    only to validate the infinite-observation limit used everywhere else.
    """
    if k_a < 0 or sigma_n2 <= 0 or rho <= 1:
        raise DomainError("invalid radiometer parameters")
    if n_trials < 100 or n_uses < 100 or n_tau < 11:
        raise DomainError("radiometer cross-check needs more samples")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    dof = 2 * n_uses
    sigma_w2 = sigma_n2 * rho ** rng.uniform(-1.0, 1.0, size=n_trials)
    t0 = sigma_w2 * rng.chisquare(dof, size=n_trials) / dof
    sigma_w2_1 = sigma_n2 * rho ** rng.uniform(-1.0, 1.0, size=n_trials)
    nonc = dof * k_a / sigma_w2_1
    t1 = sigma_w2_1 * rng.noncentral_chisquare(dof, nonc, size=n_trials) / dof
    anchors = threshold_breakpoints(k_a, sigma_n2, rho)
    taus = np.unique(np.concatenate([
        np.linspace(anchors[0] * 0.5, anchors[-1] * 1.5, n_tau), anchors]))
    p_fa = (t0[None, :] > taus[:, None]).mean(axis=1)
    p_md = (t1[None, :] <= taus[:, None]).mean(axis=1)
    return float(np.min(p_fa + p_md))
