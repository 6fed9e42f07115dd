"""Mean-field Gaussian MLP: sampling, forward pass, analytic gradients, SNR pruning.

Each weight and bias has an independent Gaussian posterior N(mu, sigma^2) with
sigma = softplus(rho). Draws use the reparameterization values =
mask * (mu + sigma * eps), so gradients flow to both mu and rho through the
pathwise derivative. A {0,1} prune mask forces pruned parameters to contribute
exactly zero.

The network is a plain MLP: pass-through input, affine hidden layers with
tanh/relu activations, affine linear output. Gradients are hand-derived
reverse mode on numpy arrays; no autodiff framework.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyBatch

_ACTIVATIONS = ("tanh", "relu")


@dataclass(frozen=True)
class NetLayout:
    """Layer sizes: input width, ((hidden width, activation), ...), output width."""

    input_dim: int = 11
    hidden_layers: tuple = ((4, "tanh"),)
    output_dim: int = 4

    def __post_init__(self):
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("layer widths must be >= 1")
        for width, act in self.hidden_layers:
            if width < 1:
                raise ValueError("hidden widths must be >= 1")
            if act not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}")

    @property
    def dims(self) -> list[int]:
        return [self.input_dim] + [w for w, _ in self.hidden_layers] + [self.output_dim]

    @property
    def activations(self) -> list[str]:
        return [a for _, a in self.hidden_layers] + ["linear"]

    @property
    def param_count(self) -> int:
        dims = self.dims
        return sum(dims[i] * dims[i + 1] + dims[i + 1] for i in range(len(dims) - 1))

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_layers": [[w, a] for w, a in self.hidden_layers],
            "output_dim": self.output_dim,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetLayout":
        return cls(
            input_dim=int(d["input_dim"]),
            hidden_layers=tuple((int(w), str(a)) for w, a in d["hidden_layers"]),
            output_dim=int(d["output_dim"]),
        )


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_inv(y: float) -> float:
    # log(exp(y) - 1), stable for small y
    return y + math.log(-math.expm1(-y))


@dataclass(frozen=True)
class BayesianMLP:
    """Posterior means mu, unconstrained spreads rho and the prune mask."""

    layout: NetLayout
    mu: np.ndarray
    rho: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        n = self.layout.param_count
        if not (len(self.mu) == len(self.rho) == len(self.mask) == n):
            raise ValueError(f"parameter vectors must have length {n}")

    @property
    def sigma(self) -> np.ndarray:
        return softplus(self.rho)

    @property
    def active_count(self) -> int:
        return int(self.mask.sum())

    def mean_values(self) -> np.ndarray:
        return self.mask * self.mu


@dataclass(frozen=True)
class ParamSample:
    """One deterministic draw from the posterior, with the noise that produced it."""

    values: np.ndarray
    epsilon: np.ndarray


def init(layout: NetLayout, seed: int, init_sigma: float = 0.05) -> BayesianMLP:
    """Glorot-uniform weight means, zero bias means, uniform sigma = init_sigma."""
    if init_sigma <= 0:
        raise ValueError("init_sigma must be positive")
    rng = np.random.default_rng(seed)
    dims = layout.dims
    mu = np.empty(layout.param_count)
    pos = 0
    for i in range(len(dims) - 1):
        fan_in, fan_out = dims[i], dims[i + 1]
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        nw = fan_in * fan_out
        mu[pos : pos + nw] = rng.uniform(-bound, bound, nw)
        pos += nw
        mu[pos : pos + fan_out] = 0.0
        pos += fan_out
    rho = np.full(layout.param_count, softplus_inv(init_sigma))
    mask = np.ones(layout.param_count)
    return BayesianMLP(layout, mu, rho, mask)


def sample_params(net: BayesianMLP, seed) -> ParamSample:
    """Reparameterized draw: values = mask * (mu + softplus(rho) * eps)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eps = rng.standard_normal(len(net.mu))
    values = net.mask * (net.mu + net.sigma * eps)
    return ParamSample(values, eps)


def unpack(values: np.ndarray, layout: NetLayout) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into (W, b) per affine layer."""
    dims = layout.dims
    out = []
    pos = 0
    for i in range(len(dims) - 1):
        fan_in, fan_out = dims[i], dims[i + 1]
        w = values[pos : pos + fan_in * fan_out].reshape(fan_out, fan_in)
        pos += fan_in * fan_out
        b = values[pos : pos + fan_out]
        pos += fan_out
        out.append((w, b))
    return out


def forward(values: np.ndarray, layout: NetLayout, feature: np.ndarray) -> np.ndarray:
    """Evaluate the network; accepts a single feature vector or a (rows, in) batch."""
    single = np.ndim(feature) == 1
    a = np.atleast_2d(np.asarray(feature, dtype=float))
    for (w, b), act in zip(unpack(values, layout), layout.activations):
        z = a @ w.T + b
        if act == "tanh":
            a = np.tanh(z)
        elif act == "relu":
            a = np.maximum(0.0, z)
        else:
            a = z
    return a[0] if single else a


def _forward_cached(values, layout, features):
    """Forward pass keeping pre/post-activation caches for backprop."""
    a = features
    cache = []
    for (w, b), act in zip(unpack(values, layout), layout.activations):
        z = a @ w.T + b
        if act == "tanh":
            out = np.tanh(z)
        elif act == "relu":
            out = np.maximum(0.0, z)
        else:
            out = z
        cache.append((a, out, act, w))
        a = out
    return a, cache


def _backward(layout, cache, d_out):
    """Reverse-mode pass; returns the flat gradient w.r.t. the parameter vector."""
    grads = []
    delta = d_out
    for a_in, a_out, act, w in reversed(cache):
        if act == "tanh":
            delta = delta * (1.0 - a_out * a_out)
        elif act == "relu":
            delta = delta * (a_out > 0.0)
        dw = delta.T @ a_in
        db = delta.sum(axis=0)
        grads.append((dw, db))
        delta = delta @ w
    flat = []
    for dw, db in reversed(grads):
        flat.append(dw.ravel())
        flat.append(db)
    return np.concatenate(flat)


def loss_and_grad(
    net: BayesianMLP,
    features: np.ndarray,
    targets: np.ndarray,
    batch,
    n_mc: int,
    sparsity_lambda: float,
    seed,
):
    """Monte-Carlo squared-error loss with L1 penalty on active means.

    loss = mean over n_mc samples and batch rows of ||target - f(sample, feature)||^2
           + sparsity_lambda * ||mask * mu||_1

    Returns (loss, grad_mu, grad_rho). The L1 subgradient at mu = 0 is taken
    as 0; masked parameters get exactly zero gradient.
    """
    batch = np.asarray(batch)
    if len(batch) == 0:
        raise EmptyBatch("batch has no rows")
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    f = features[batch]
    y = targets[batch]
    scale = 1.0 / (n_mc * len(batch))
    sigma = net.sigma
    dsigma_drho = 1.0 / (1.0 + np.exp(-net.rho))  # softplus'
    data_loss = 0.0
    grad_mu = np.zeros_like(net.mu)
    grad_rho = np.zeros_like(net.rho)
    for _ in range(n_mc):
        eps = rng.standard_normal(len(net.mu))
        values = net.mask * (net.mu + sigma * eps)
        pred, cache = _forward_cached(values, net.layout, f)
        resid = pred - y
        data_loss += scale * float((resid * resid).sum())
        grad_v = _backward(net.layout, cache, 2.0 * scale * resid)
        grad_v *= net.mask
        grad_mu += grad_v
        grad_rho += grad_v * eps * dsigma_drho
    penalty = sparsity_lambda * float(np.abs(net.mask * net.mu).sum())
    grad_mu += sparsity_lambda * net.mask * np.sign(net.mu)
    return data_loss + penalty, grad_mu, grad_rho


def snr_prune(net: BayesianMLP, threshold: float) -> BayesianMLP:
    """Mask out parameters whose |mu| / sigma falls below the threshold.

    Already-pruned parameters stay pruned.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    snr = np.abs(net.mu) / net.sigma
    mask = np.where((net.mask > 0) & (snr >= threshold), 1.0, 0.0)
    return replace(net, mask=mask)
