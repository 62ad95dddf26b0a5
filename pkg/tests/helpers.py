"""Shared oracles and fixtures-in-functions for the test suite."""
import numpy as np

from svdgcn.graph import DirectedGraph

# (criterion, passed, detail) rows filled by the acceptance module
ACCEPTANCE_REPORT = []


def report(criterion, passed, detail):
    line = f"[acceptance {criterion}] {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_REPORT.append(line)
    print(line)
    return passed


def random_digraph(n, p=0.3, seed=0, self_loops=False):
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    if not self_loops:
        np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return DirectedGraph(n, np.stack([src, dst], axis=1))


def normalized_adjacency_oracle(n, edges):
    """Dense arithmetic straight from the definition, one edge at a time."""
    a = np.zeros((n, n))
    for s, t in edges:
        if s != t:
            a[t, s] = 1.0
    d_in = a.sum(axis=1)
    d_out = a.sum(axis=0)
    left = np.diag(1.0 / np.sqrt(d_in + 1.0))
    right = np.diag(1.0 / np.sqrt(d_out + 1.0))
    return left @ (a + np.eye(n)) @ right


def finite_difference_errors(model, x, upstream, names, h=1e-5):
    """Relative error per parameter between analytic and central-difference gradients."""
    from svdgcn.layers import backward, logits

    def objective():
        return float(np.sum(upstream * logits(model, x)))

    analytic = backward(model, x, upstream)
    errors = {}
    for name in names:
        p = model.params[name]
        numeric = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + h
            up = objective()
            p[idx] = orig - h
            down = objective()
            p[idx] = orig
            numeric[idx] = (up - down) / (2 * h)
        scale = max(np.linalg.norm(numeric), 1e-12)
        errors[name] = float(np.linalg.norm(analytic[name] - numeric) / scale)
    return errors
