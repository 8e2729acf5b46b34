"""Shared builders for tests: quick profiles, environments matched to
estimator inputs, and seeded random problem instances."""

from __future__ import annotations

import numpy as np

from tiersplit.estimator import NodeRates
from tiersplit.link import LinkModel
from tiersplit.profiling import ModelProfile
from tiersplit.simenv import HopSpec, NodeSpec, NoiseSpec, SimEnvironment


def make_profile(
    weights, bytes_, name: str = "test-model"
) -> ModelProfile:
    """weights has one more entry than bytes_ (the head share)."""
    return ModelProfile(
        name=name,
        activation_bytes=tuple(int(b) for b in bytes_),
        compute_weights=tuple(float(w) for w in weights),
    )


def make_env(
    sigma=(1.0, 0.5, 0.1),
    powers=(12.0, 15.0, 30.0),
    omegas=(0.005, 0.005),
    betas=(1e7, 1e7),
    noise_sigma: float = 0.0,
    seed: int = 0,
    node_traces=((), (), ()),
    hop_traces=((), ()),
) -> SimEnvironment:
    tiers = ("edge", "fog", "cloud")
    nodes = {
        t: NodeSpec(tier=t, true_sigma=s, true_power=p, trace=tr)
        for t, s, p, tr in zip(tiers, sigma, powers, node_traces)
    }
    hops = {
        name: HopSpec(name=name, true_omega=o, true_beta=b, trace=tr)
        for name, o, b, tr in zip(
            ("edge-fog", "fog-cloud"), omegas, betas, hop_traces
        )
    }
    return SimEnvironment(nodes=nodes, hops=hops, noise=NoiseSpec(noise_sigma, seed))


def random_instance(rng: np.random.Generator, n_min: int = 3, n_max: int = 40):
    """One random problem: profile, true rates, true links, and the
    matching noiseless environment. Estimator inputs equal simulator truth,
    so predictions must reproduce measurements exactly."""
    n = int(rng.integers(n_min, n_max + 1))
    raw = rng.uniform(0.05, 1.0, size=n + 1)
    weights = tuple(float(w) for w in raw / raw.sum())
    bytes_ = tuple(int(b) for b in rng.integers(1, 1_000_000, size=n))
    profile = make_profile(weights, bytes_, name=f"rand-{n}")
    sigma = tuple(float(s) for s in rng.uniform(0.01, 2.0, size=3))
    rho = tuple(float(r) for r in rng.uniform(1.0, 40.0, size=2))
    omegas = tuple(float(o) for o in rng.uniform(0.0, 0.05, size=2))
    betas = tuple(float(b) for b in rng.uniform(1e5, 1e9, size=2))
    rates = NodeRates(
        sigma_edge=sigma[0],
        sigma_fog=sigma[1],
        sigma_cloud=sigma[2],
        rho_fog=rho[0],
        rho_cloud=rho[1],
    )
    link_ef = LinkModel(omega=omegas[0], beta=betas[0])
    link_fc = LinkModel(omega=omegas[1], beta=betas[1])
    env = make_env(
        sigma=sigma,
        powers=(12.0, rho[0], rho[1]),
        omegas=omegas,
        betas=betas,
    )
    return profile, rates, link_ef, link_fc, env
