"""Adversarial training harness for one-bit range-Doppler reconstruction.

Consumes the interchange files exported by the ``pmcwrd`` toolkit and
trains either a denoise-only model on conventionally processed maps
(hybrid) or a model with a learnable correlation kernel in front (E2E).
"""

from .data import InterchangeCorpus, RdPairDataset
from .losses import LossConfig, discriminator_loss, generator_loss, gradient_penalty, ssim
from .networks import Discriminator, Generator
from .rd_layer import RdLayer
from .train import TrainConfig, train

__all__ = [
    "Discriminator",
    "Generator",
    "InterchangeCorpus",
    "LossConfig",
    "RdLayer",
    "RdPairDataset",
    "TrainConfig",
    "discriminator_loss",
    "generator_loss",
    "gradient_penalty",
    "ssim",
    "train",
]
