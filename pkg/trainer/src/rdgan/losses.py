"""Loss terms: weighted L1 + structural-similarity + adversarial for the
generator, Wasserstein-with-gradient-penalty for the discriminator.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F


@dataclass(frozen=True)
class LossConfig:
    lambda_l1: float = 50.0
    lambda_ssim: float = 5.0
    lambda_gp: float = 10.0

    def __post_init__(self):
        if not 1.0 <= self.lambda_l1 <= 50.0:
            raise ValueError("lambda_l1 must lie in [1, 50]")
        if not 1.0 <= self.lambda_ssim <= 50.0:
            raise ValueError("lambda_ssim must lie in [1, 50]")
        if self.lambda_gp <= 0.0:
            raise ValueError("lambda_gp must be positive")


def _gaussian_window(size, sigma, dtype, device):
    coords = torch.arange(size, dtype=dtype, device=device) - (size - 1) / 2.0
    g = torch.exp(-(coords**2) / (2.0 * sigma**2))
    g = g / g.sum()
    return torch.outer(g, g)


def ssim(a, b, window_size=11, sigma=1.5, value_range=2.0):
    """Mean structural similarity of two (B, C, H, W) batches.

    ``value_range`` is the data span; map channels live in [-1, 1], so the
    default is 2.  Returns a scalar in [-1, 1]; identical inputs give 1.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")
    channels = a.shape[1]
    window = _gaussian_window(window_size, sigma, a.dtype, a.device)
    window = window.expand(channels, 1, window_size, window_size)
    pad = window_size // 2

    def filt(x):
        return F.conv2d(x, window, padding=pad, groups=channels)

    mu_a, mu_b = filt(a), filt(b)
    var_a = filt(a * a) - mu_a**2
    var_b = filt(b * b) - mu_b**2
    cov = filt(a * b) - mu_a * mu_b
    c1 = (0.01 * value_range) ** 2
    c2 = (0.03 * value_range) ** 2
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return (num / den).mean()


def generator_loss(fake, reference, critic_scores, cfg):
    """Returns (total, parts dict); the adversarial term is the negated
    mean critic score, so it is sign-indefinite by construction."""
    l1 = torch.mean(torch.abs(fake - reference))
    ssim_term = 1.0 - ssim(fake, reference)
    adversarial = -critic_scores.mean()
    total = cfg.lambda_l1 * l1 + cfg.lambda_ssim * ssim_term + adversarial
    return total, {
        "l1": l1.item(),
        "ssim_term": ssim_term.item(),
        "adversarial": adversarial.item(),
    }


def gradient_penalty(critic, real, fake):
    """Mean squared deviation of the critic's gradient norm from 1,
    evaluated at random interpolates between real and fake samples."""
    eps_shape = (real.shape[0],) + (1,) * (real.dim() - 1)
    eps = torch.rand(eps_shape, dtype=real.dtype, device=real.device)
    interp = (eps * real + (1.0 - eps) * fake).requires_grad_(True)
    scores = critic(interp)
    grads = torch.autograd.grad(
        outputs=scores,
        inputs=interp,
        grad_outputs=torch.ones_like(scores),
        create_graph=True,
    )[0]
    norms = grads.flatten(start_dim=1).norm(dim=1)
    return ((norms - 1.0) ** 2).mean()


def discriminator_loss(real_scores, fake_scores, gp_term, lambda_gp):
    wasserstein = real_scores.mean() - fake_scores.mean()
    return -wasserstein + lambda_gp * gp_term
