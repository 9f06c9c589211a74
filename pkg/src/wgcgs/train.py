"""Gumbel-softmax training of a soft cluster-assignment matrix.

Forward chain for one step, with ``L`` the (n, k) logits and ``A`` the
weighted adjacency::

    S = softmax_rows((L + g) / tau)       g ~ Gumbel(0, 1)
    R = S^T A S                           cluster strength, (k, k)
    P = softmax_rows(c * R)               c = 1 or 1 / mean|R|
    loss = -mean_a log P[a, a]            cross-entropy against I_k

``backward`` walks the chain in reverse, one vector-Jacobian product per
stage. After training, node ``i`` belongs to ``argmax_a softmax(L)[i, a]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .graph import Assignment, DomainError, GraphError, WeightedGraph, adjacency

__all__ = [
    "DomainError",
    "ClusterModel",
    "TrainConfig",
    "RunResult",
    "TrainReport",
    "softmax_rows",
    "gumbel_softmax_rows",
    "cluster_strength",
    "wgcgs_loss",
    "backward",
    "temperature",
    "train",
    "assign",
    "restart_rng",
]

ANNEAL_KINDS = ("exponential", "linear", "constant")
OPTIMIZERS = ("sgd", "adam")
SELECTIONS = ("loss", "modularity")
_SEED_MASK = (1 << 64) - 1


@dataclass
class ClusterModel:
    """Trainable logits behind the soft assignment matrix (n x k)."""

    logits: np.ndarray

    def __post_init__(self):
        self.logits = np.asarray(self.logits, dtype=float)
        if self.logits.ndim != 2 or 0 in self.logits.shape:
            raise GraphError(f"logits must be a non-empty matrix, got shape {self.logits.shape}")
        if not np.all(np.isfinite(self.logits)):
            raise DomainError("logits must be finite")

    @property
    def n(self) -> int:
        return self.logits.shape[0]

    @property
    def k(self) -> int:
        return self.logits.shape[1]

    def probabilities(self) -> np.ndarray:
        return softmax_rows(self.logits)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 300
    learning_rate: float = 0.05
    tau_start: float = 5.0
    tau_end: float = 0.5
    anneal: str = "exponential"
    seed: int = 0
    optimizer: str = "adam"
    restarts: int = 10
    # Divide R by its mean absolute entry before the softmax. Raw weighted
    # sums run into the hundreds and saturate the softmax otherwise.
    rescale: bool = True
    # How the returned restart is chosen: lowest final loss, or highest
    # weighted modularity of the hard assignment.
    selection: str = "loss"

    def __post_init__(self):
        if int(self.epochs) < 1:
            raise GraphError(f"epochs must be >= 1, got {self.epochs}")
        if int(self.restarts) < 1:
            raise GraphError(f"restarts must be >= 1, got {self.restarts}")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise GraphError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0 < self.tau_end <= self.tau_start and math.isfinite(self.tau_start)):
            raise GraphError(
                f"need 0 < tau_end <= tau_start, got {self.tau_end}, {self.tau_start}")
        if self.anneal not in ANNEAL_KINDS:
            raise GraphError(f"anneal must be one of {ANNEAL_KINDS}, got {self.anneal!r}")
        if self.optimizer not in OPTIMIZERS:
            raise GraphError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.selection not in SELECTIONS:
            raise GraphError(f"selection must be one of {SELECTIONS}, got {self.selection!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    restart: int
    loss_history: list[float]
    model: ClusterModel

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


@dataclass
class TrainReport:
    final_loss: float
    loss_history: list[float]
    best_restart: int
    model: ClusterModel
    config: TrainConfig
    runs: list[RunResult] = field(default_factory=list, repr=False)

    @property
    def assignment(self) -> Assignment:
        return assign(self.model)

    def to_dict(self) -> dict:
        return {
            "final_loss": self.final_loss,
            "loss_history": list(self.loss_history),
            "best_restart": self.best_restart,
            "assignment": list(self.assignment.cluster_of),
            "k": self.model.k,
            "restart_final_losses": [run.final_loss for run in self.runs],
            "config": self.config.to_dict(),
        }


def softmax_rows(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _softmax_rows_vjp(p: np.ndarray, grad_p: np.ndarray) -> np.ndarray:
    return p * (grad_p - (grad_p * p).sum(axis=1, keepdims=True))


def _check_noise(noise: np.ndarray, shape) -> np.ndarray:
    noise = np.asarray(noise, dtype=float)
    if noise.shape != shape:
        raise GraphError(f"noise shape {noise.shape} does not match logits {shape}")
    if not np.all((noise > 0) & (noise < 1)):
        raise DomainError("uniform noise must lie strictly inside (0, 1)")
    return noise


def gumbel_softmax_rows(logits: np.ndarray, tau: float, noise: np.ndarray) -> np.ndarray:
    """Row-wise ``softmax((logits + g) / tau)`` with ``g = -log(-log(noise))``."""
    if not tau > 0:
        raise DomainError(f"temperature must be positive, got {tau}")
    logits = np.asarray(logits, dtype=float)
    noise = _check_noise(noise, logits.shape)
    gumbel = -np.log(-np.log(noise))
    return softmax_rows((logits + gumbel) / tau)


def cluster_strength(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``R = S^T A S``: diagonal holds within-cluster weight, off-diagonal between."""
    A = np.asarray(A, dtype=float)
    S = np.asarray(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or S.ndim != 2 or S.shape[0] != A.shape[0]:
        raise GraphError(f"shape mismatch: A {A.shape}, S {S.shape}")
    return S.T @ A @ S


def _cluster_strength_vjp(A: np.ndarray, S: np.ndarray, grad_r: np.ndarray) -> np.ndarray:
    return A @ S @ grad_r.T + A.T @ S @ grad_r


def _rescale_factor(R: np.ndarray) -> float:
    mean_abs = np.abs(R).mean()
    return 1.0 / mean_abs if mean_abs > 0 else 1.0


def wgcgs_loss(R: np.ndarray, rescale: bool = False) -> tuple[float, np.ndarray]:
    """Mean row-wise cross-entropy between ``softmax_rows(R)`` and the identity.

    Returns ``(loss, P)``. With ``rescale`` the rows are taken of
    ``R / mean|R|`` instead of ``R``.
    """
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise GraphError(f"R must be square, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise DomainError("cluster-strength matrix is not finite")
    X = R * _rescale_factor(R) if rescale else R
    shifted = X - X.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_diag = np.diag(shifted) - log_norm
    P = np.exp(shifted - log_norm[:, None])
    loss = max(0.0, -float(log_diag.mean()))
    return loss, P


def _loss_and_grad(A, logits, tau, noise, rescale):
    if not tau > 0:
        raise DomainError(f"temperature must be positive, got {tau}")
    k = logits.shape[1]
    gumbel = -np.log(-np.log(noise))
    S = softmax_rows((logits + gumbel) / tau)
    R = cluster_strength(A, S)
    loss, P = wgcgs_loss(R, rescale=rescale)

    grad_x = (P - np.eye(k)) / k
    if rescale:
        c = _rescale_factor(R)
        grad_r = c * grad_x
        if np.abs(R).mean() > 0:
            # c = 1/mean|R| depends on R as well: dc/dR = -c^2 sign(R) / k^2
            grad_c = float((grad_x * R).sum())
            grad_r -= grad_c * c * c * np.sign(R) / R.size
    else:
        grad_r = grad_x
    grad_s = _cluster_strength_vjp(A, S, grad_r)
    grad_z = _softmax_rows_vjp(S, grad_s)
    return loss, grad_z / tau


def backward(A: np.ndarray, logits: np.ndarray, tau: float, noise: np.ndarray,
             rescale: bool = False) -> np.ndarray:
    """Gradient of the training loss with respect to the logits."""
    A = np.asarray(A, dtype=float)
    logits = np.asarray(logits, dtype=float)
    noise = _check_noise(noise, logits.shape)
    return _loss_and_grad(A, logits, tau, noise, rescale)[1]


def loss_at(A: np.ndarray, logits: np.ndarray, tau: float, noise: np.ndarray,
            rescale: bool = False) -> float:
    """Forward pass only; the scalar whose gradient :func:`backward` returns."""
    S = gumbel_softmax_rows(logits, tau, noise)
    return wgcgs_loss(cluster_strength(A, S), rescale=rescale)[0]


def temperature(config: TrainConfig, epoch: int) -> float:
    """Gumbel temperature at ``epoch`` (0-based) under the configured schedule."""
    if config.anneal == "constant" or config.epochs == 1:
        return config.tau_start
    frac = epoch / (config.epochs - 1)
    if config.anneal == "linear":
        return config.tau_start + frac * (config.tau_end - config.tau_start)
    return config.tau_start * (config.tau_end / config.tau_start) ** frac


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Independent stream per (seed, restart), so restarts can run in any order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & _SEED_MASK, restart]))


class _Adam:
    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = self.v = None
        self.t = 0

    def step(self, params, grad):
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _SGD:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params, grad):
        params -= self.lr * grad


def _run(A: np.ndarray, k: int, config: TrainConfig, restart: int) -> RunResult:
    rng = restart_rng(config.seed, restart)
    n = A.shape[0]
    logits = rng.uniform(-0.01, 0.01, size=(n, k))
    opt = _Adam(config.learning_rate) if config.optimizer == "adam" else _SGD(config.learning_rate)
    tiny = np.finfo(float).tiny
    history = []
    for epoch in range(config.epochs):
        noise = rng.uniform(tiny, 1.0, size=(n, k))
        loss, grad = _loss_and_grad(A, logits, temperature(config, epoch), noise, config.rescale)
        history.append(loss)
        opt.step(logits, grad)
    return RunResult(restart, history, ClusterModel(logits))


def train(graph: WeightedGraph, k: int, config: Optional[TrainConfig] = None) -> TrainReport:
    """Train ``config.restarts`` independently seeded models and keep the best.

    Each restart starts from logits drawn uniformly in (-0.01, 0.01) and draws
    fresh Gumbel noise every epoch while the temperature anneals.
    """
    config = config or TrainConfig()
    if not 1 <= k <= graph.n_nodes:
        raise GraphError(f"k must lie in 1..{graph.n_nodes}, got {k}")
    A = adjacency(graph)
    runs = [_run(A, k, config, r) for r in range(config.restarts)]

    if config.selection == "modularity" and graph.n_edges:
        from .metrics import modularity

        def score(run):
            return (-modularity(graph, assign(run.model)), run.final_loss, run.restart)
    else:
        def score(run):
            return (run.final_loss, run.restart)
    best = min(runs, key=score)
    return TrainReport(best.final_loss, best.loss_history, best.restart,
                       best.model, config, runs)


def assign(model: ClusterModel) -> Assignment:
    """Hard assignment: row-wise argmax of the softmax, ties to the lowest index."""
    probs = model.probabilities()
    return Assignment(tuple(int(c) for c in np.argmax(probs, axis=1)), model.k)
