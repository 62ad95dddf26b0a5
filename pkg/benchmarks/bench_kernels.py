"""Compare the compiled kernels with the NumPy/SciPy fallback.

    python benchmarks/bench_kernels.py [--nodes 20000] [--dim 64] [--repeat 3]

Times the fused Chebyshev filter (degree 10) and the Gram product on a
directed SBM, checks that both backends agree, and times a full
Chebyshev bank build plus one framelet3 forward pass with each backend.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from svdgcn import _pykernels
from svdgcn.datasets import generate_sbm_digraph
from svdgcn.framelets import ChebFilter, ModulationSet
from svdgcn.graph import normalized_adjacency_sparse

try:
    from svdgcn import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=20000)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--degree", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    n = args.nodes
    per_class = n / args.classes
    # about 2.5 in-class and 0.75 cross-class out-edges per node
    p_in = min(1.0, 2.5 / per_class)
    p_out = 0.75 / (n - per_class)
    ds = generate_sbm_digraph(n, args.classes, p_in, p_out, feat_dim=args.dim,
                              per_class_train=None)
    a = normalized_adjacency_sparse(ds.graph)
    x = np.random.default_rng(0).standard_normal((n, args.dim))
    coeffs = ChebFilter.fit(ModulationSet("linear"), args.degree).band(0)
    alpha = 2.0 / np.pi
    print(f"graph: {n} nodes, {ds.graph.num_edges} edges; block width {args.dim}; "
          f"degree {args.degree}")

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels not available; timing the fallback only")

    results = {}
    for name, mod in backends:
        t_cheb, y = best_of(lambda: mod.cheb_filter_apply(a.indptr, a.indices, a.data, x,
                                                           coeffs, alpha), args.repeat)
        t_gram, _ = best_of(lambda: mod.gram_apply(a.indptr, a.indices, a.data, x, 1.0),
                            args.repeat)
        results[name] = y
        print(f"{name:>7}: cheb_filter_apply {t_cheb * 1e3:9.2f} ms   "
              f"gram_apply {t_gram * 1e3:8.2f} ms")
    if len(results) == 2:
        diff = np.max(np.abs(results["python"] - results["cython"]))
        print(f"max |python - cython| = {diff:.3e}")

    script = (
        "import time;"
        "from svdgcn import kernels;"
        "from svdgcn.datasets import generate_sbm_digraph;"
        "from svdgcn.training import TrainConfig;"
        "from svdgcn.pipeline import build_operators;"
        "from svdgcn.layers import build_model, forward_III;"
        f"ds=generate_sbm_digraph({n},{args.classes},{p_in!r},{p_out!r},feat_dim={args.dim},"
        "per_class_train=None);"
        "t=time.perf_counter();"
        "a,ops=build_operators(ds.graph,TrainConfig(variant='framelet3',levels=0),'framelet3');"
        f"m=build_model('framelet3',{args.dim},64,{args.classes},ops=ops,a_hat=a);"
        "forward_III(m,ds.features);"
        "print(kernels.BACKEND, round(time.perf_counter()-t,3))"
    )
    # the backend is fixed at import, so each one gets a fresh interpreter
    for env_value in ("1", "0"):
        env = dict(os.environ, SVDGCN_PURE_PYTHON=env_value)
        out = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"{out[0]:>7}: bank build + framelet3 forward {float(out[1]):.3f} s")


if __name__ == "__main__":
    main()
