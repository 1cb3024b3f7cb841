"""Temporal Gaussian-blob generator.

Agent n at time t answers query m with replicate r drawn as
O_m (mu_{y_n}^(t) + eta_n) + eps, where the signal-class mean moves from a
front-loaded to a back-loaded profile with effect size tau.
"""

import logging

import numpy as np
from scipy import linalg

from src.domain.entities.arrays import FloatArray
from src.domain.entities.response_tensor import ResponseTensor
from src.domain.entities.simulation import SimulatedDataset, SimulationConfig
from src.domain.exceptions import InvalidArgumentError
from src.domain.services.streams import SeedLike, derive_stream

logger = logging.getLogger(__name__)

SIGNAL_CLASS = 0
NULL_CLASS = 1

# Substream roots below the dataset seed.
_LABEL_STREAM = 0
_ROTATION_STREAM = 1
_EFFECT_STREAM = 2
_NOISE_STREAM = 3


def _front_profile(signal_dims: int, decay: float) -> FloatArray:
    result: FloatArray = np.exp(-decay * np.arange(signal_dims, dtype=np.float64))
    return result


def _back_profile(signal_dims: int, decay: float) -> FloatArray:
    result: FloatArray = np.exp(
        -decay * (signal_dims - 1 - np.arange(signal_dims, dtype=np.float64))
    )
    return result


def gamma_norm(tau: float, signal_dims: int, decay: float, scale: float) -> float:
    """Normalization keeping the signal-class norm equal across timepoints.

    Returns ||front|| / ||(1 - tau) front + tau back|| on the signal
    dimensions. The scale cancels; it is accepted for symmetry with the
    mean formula.

    Raises:
        InvalidArgumentError: If tau is outside (0, 1]
    """
    if not 0.0 < tau <= 1.0:
        raise InvalidArgumentError(f"gamma is defined for tau in (0, 1], got {tau}")
    if scale <= 0.0:
        raise InvalidArgumentError(f"scale must be positive, got {scale}")
    front = _front_profile(signal_dims, decay)
    mixed = (1.0 - tau) * front + tau * _back_profile(signal_dims, decay)
    return float(np.linalg.norm(front) / np.linalg.norm(mixed))


def class_mean(t: int, label: int, config: SimulationConfig) -> FloatArray:
    """Class mean mu_label at timepoint t (1 or 2), a vector of length p."""
    if t not in (1, 2):
        raise InvalidArgumentError(f"simulated timepoints are 1 and 2, got {t}")
    if label not in (SIGNAL_CLASS, NULL_CLASS):
        raise InvalidArgumentError(f"class label must be 0 or 1, got {label}")
    mean = np.zeros(config.dim)
    if label == NULL_CLASS:
        return mean
    front = _front_profile(config.signal_dims, config.decay)
    tau = config.effect_size
    if t == 1 or tau == 0.0:
        mean[: config.signal_dims] = config.scale * front
    else:
        gamma = gamma_norm(tau, config.signal_dims, config.decay, config.scale)
        back = _back_profile(config.signal_dims, config.decay)
        mean[: config.signal_dims] = config.scale * gamma * ((1.0 - tau) * front + tau * back)
    return mean


def sample_orthogonal(rng: np.random.Generator, p: int) -> FloatArray:
    """Haar-distributed rotation in SO(p).

    QR-decomposes a standard Gaussian matrix, fixes column signs by the
    diagonal of R, then negates the first column if the determinant is -1.
    """
    if p < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {p}")
    q, r = linalg.qr(rng.standard_normal((p, p)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    result: FloatArray = q
    return result


def sample_agent_effect(rng: np.random.Generator, config: SimulationConfig) -> FloatArray:
    """Persistent trait eta_n: N(0, agent_var) on signal dims, zero elsewhere."""
    effect = np.zeros(config.dim)
    draws = rng.standard_normal(config.signal_dims)
    effect[: config.signal_dims] = np.sqrt(config.agent_var) * draws
    return effect


def generate_dataset(config: SimulationConfig, seed: SeedLike | None = None) -> SimulatedDataset:
    """Draw a two-timepoint tensor and keep its ground truth.

    Labels, rotations, agent effects and noise each come from their own
    substream keyed by entity index, so the output depends only on the seed.

    Args:
        config: Generator parameters
        seed: Master seed; defaults to ``config.seed``
    """
    root: SeedLike = config.seed if seed is None else seed
    n, m, r, p = config.n_agents, config.n_queries, config.n_replicates, config.dim

    draws = derive_stream(root, _LABEL_STREAM).random(n)
    labels = tuple(int(u < config.class_prob) for u in draws)

    orthogonals = np.stack(
        [sample_orthogonal(derive_stream(root, _ROTATION_STREAM, q), p) for q in range(m)]
    )
    effects = np.stack(
        [sample_agent_effect(derive_stream(root, _EFFECT_STREAM, a), config) for a in range(n)]
    )
    class_means = np.stack(
        [[class_mean(t, label, config) for t in (1, 2)] for label in (SIGNAL_CLASS, NULL_CLASS)]
    )

    # latent[t, n] = mu_{y_n}^(t) + eta_n
    latent = class_means[np.asarray(labels)].transpose(1, 0, 2) + effects[np.newaxis]
    rotated = np.einsum("mij,tnj->tnmi", orthogonals, latent)

    noise_sd = np.sqrt(config.noise_var)
    values = np.empty((2, n, m, r, p))
    for agent in range(n):
        noise = noise_sd * derive_stream(root, _NOISE_STREAM, agent).standard_normal(
            (2, m, r, p)
        )
        values[:, agent] = rotated[:, agent, :, np.newaxis, :] + noise

    logger.debug(
        "Dataset generated",
        extra={
            "n_agents": n,
            "signal_agents": labels.count(SIGNAL_CLASS),
            "effect_size": config.effect_size,
        },
    )
    return SimulatedDataset(
        tensor=ResponseTensor(values=values),
        labels=labels,
        class_means=class_means,
        agent_effects=effects,
        orthogonals=orthogonals,
        config=config,
    )
