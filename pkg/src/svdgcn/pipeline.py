"""End-to-end helpers shared by the CLI and the experiment tests."""
from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .framelets import ChebFilter, ModulationSet, cheb_fit_error
from .graph import normalized_adjacency, normalized_adjacency_sparse
from .layers import ModelVariant, build_model
from .operators import (
    FrameletConfig,
    Variant,
    build_cheb_operators,
    build_exact_operators,
    build_exact_sq_operators,
)
from .spectral import compute_svd
from .training import TrainConfig, inject_noise, train

__all__ = [
    "modulation_set",
    "framelet_config",
    "prepare_model",
    "run_training",
    "denoise_bench",
    "cheb_bench",
    "DEFAULT_NOISE_LEVELS",
]

DEFAULT_NOISE_LEVELS = (0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0)


def modulation_set(cfg: TrainConfig) -> ModulationSet:
    return ModulationSet(cfg.framelet, cfg.alpha)


def framelet_config(cfg: TrainConfig, variant: Variant) -> FrameletConfig:
    return FrameletConfig(levels=cfg.levels, scale=cfg.scale, variant=variant,
                          cheb_degree=cfg.cheb_degree, raw_scale=cfg.raw_scale)


def build_operators(graph, cfg: TrainConfig, variant: ModelVariant):
    """``(a_hat, ops)`` for the requested model variant; ``ops`` is None for the baseline."""
    variant = ModelVariant(variant)
    mset = modulation_set(cfg)
    if variant is ModelVariant.BASELINE:
        return normalized_adjacency_sparse(graph, cfg.transpose_adjacency), None
    if variant is ModelVariant.FRAMELET3:
        a_hat = normalized_adjacency_sparse(graph, cfg.transpose_adjacency)
        fcfg = framelet_config(cfg, Variant.CHEBYSHEV)
        return a_hat, build_cheb_operators(a_hat, ChebFilter.fit(mset, cfg.cheb_degree), fcfg)
    a_hat = normalized_adjacency(graph, cfg.transpose_adjacency)
    svd = compute_svd(a_hat)
    return a_hat, build_exact_operators(svd, mset, framelet_config(cfg, Variant.EXACT), a_hat)


def prepare_model(dataset, cfg: TrainConfig, variant=None, seed=None):
    variant = ModelVariant(variant or cfg.variant)
    a_hat, ops = build_operators(dataset.graph, cfg, variant)
    model = build_model(variant, dataset.num_features, cfg.hidden, dataset.num_classes,
                        ops=ops, a_hat=a_hat, activation=cfg.activation,
                        seed=cfg.seed if seed is None else seed)
    model.meta.update({
        "framelet": cfg.framelet, "alpha": cfg.alpha, "scale": cfg.scale,
        "levels": cfg.levels, "cheb_degree": cfg.cheb_degree,
        "transpose_adjacency": cfg.transpose_adjacency, "raw_scale": cfg.raw_scale,
        "hidden": cfg.hidden,
    })
    return model


def run_training(dataset, cfg: TrainConfig, variant=None):
    return train(prepare_model(dataset, cfg, variant), dataset, cfg)


def denoise_bench(dataset, cfg: TrainConfig, sigmas=DEFAULT_NOISE_LEVELS, seeds=range(5),
                  variants=(None, ModelVariant.BASELINE)):
    """Test accuracy per noise level and model over several seeds.

    Returns rows ``(model, sigma, mean, std, accuracies)``. Each seed draws
    its own noise and its own initialization.
    """
    rows = []
    for variant in variants:
        name = ModelVariant(variant or cfg.variant).value
        for sigma in sigmas:
            accs = []
            for seed in seeds:
                noisy = dataset.with_features(inject_noise(dataset.features, sigma, seed=1000 + seed))
                run_cfg = _with_seed(cfg, seed)
                accs.append(run_training(noisy, run_cfg, variant).test_acc)
            accs = np.array(accs)
            rows.append((name, float(sigma), float(accs.mean()), float(accs.std()), accs))
    return rows


def _with_seed(cfg: TrainConfig, seed: int) -> TrainConfig:
    return replace(cfg, seed=int(seed))


def cheb_bench(graph, mset: ModulationSet, degrees=(2, 6, 10, 12, 16), levels: int = 0,
               scale: float = 2.0, transpose: bool = False, operator_limit: int = 256):
    """Scalar fit error per band and degree, operator error and build times.

    The operator comparison against the exact squared-spectrum bank is only
    made for graphs with at most ``operator_limit`` nodes.
    """
    report = []
    n = graph.num_nodes
    a_sparse = normalized_adjacency_sparse(graph, transpose)
    svd_time = None
    exact = None
    if n <= operator_limit:
        t0 = time.perf_counter()
        a_dense = normalized_adjacency(graph, transpose)
        svd = compute_svd(a_dense)
        cfg = FrameletConfig(levels=levels, scale=scale, variant=Variant.CHEBYSHEV)
        exact = build_exact_sq_operators(svd, mset, cfg, a_dense)
        svd_time = time.perf_counter() - t0
    for degree in degrees:
        errs = [cheb_fit_error(mset, k, degree) for k in range(mset.K + 1)]
        cfg = FrameletConfig(levels=levels, scale=scale, variant=Variant.CHEBYSHEV,
                             cheb_degree=degree)
        t0 = time.perf_counter()
        ops = build_cheb_operators(a_sparse, ChebFilter.fit(mset, degree), cfg)
        cheb_time = time.perf_counter() - t0
        op_err = None
        if exact is not None:
            num = sum(np.linalg.norm(c - e) ** 2 for c, e in zip(ops.decomp, exact.decomp))
            den = sum(np.linalg.norm(e) ** 2 for e in exact.decomp)
            op_err = float(np.sqrt(num / den))
        report.append({
            "degree": degree,
            "band_errors": errs,
            "max_error": max(errs),
            "operator_error": op_err,
            "cheb_build_s": cheb_time,
            "svd_build_s": svd_time,
        })
    return report

