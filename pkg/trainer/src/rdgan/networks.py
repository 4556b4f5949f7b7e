"""Generator and patch discriminator.

The generator is an encoder/decoder with skip connections, residual
blocks after every stage, a three-block bottleneck, and a global residual
path: a 1x1 convolution links the input directly to the output.  The
final 3x3 convolution is zero-initialized and the global residual starts
as the identity, so an untrained generator is exactly the identity map
and training only has to learn the correction.

The discriminator scores local patches: three strided 4x4 convolutions
with leaky rectifiers, then two 4x4 convolution heads ending in a sigmoid
grid of authenticity scores.
"""

from __future__ import annotations

import torch
from torch import nn


def _norm(kind, channels):
    # instance norm behaves identically in train and eval and tolerates
    # tiny batches; batch norm is available for larger-batch runs
    if kind == "instance":
        return nn.InstanceNorm2d(channels, affine=True)
    if kind == "batch":
        return nn.BatchNorm2d(channels)
    raise ValueError(f"unknown norm kind: {kind}")


class ResidualBlock(nn.Module):
    """x + ReLU(Norm(Conv3x3(x)))."""

    def __init__(self, channels, norm="instance"):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(channels, channels, 3, padding=1, bias=False),
            _norm(norm, channels),
            nn.ReLU(inplace=True),
        )

    def forward(self, x):
        return x + self.body(x)


def _down(in_ch, out_ch, norm):
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 4, stride=2, padding=1, bias=False),
        _norm(norm, out_ch),
        nn.ReLU(inplace=True),
        ResidualBlock(out_ch, norm),
    )


def _up(in_ch, out_ch, norm):
    return nn.Sequential(
        nn.ConvTranspose2d(in_ch, out_ch, 4, stride=2, padding=1, bias=False),
        _norm(norm, out_ch),
        nn.ReLU(inplace=True),
        ResidualBlock(out_ch, norm),
    )


class Generator(nn.Module):
    def __init__(self, in_channels=2, out_channels=2, base_channels=32,
                 norm="instance"):
        super().__init__()
        b = base_channels
        self.initial = nn.Sequential(
            nn.Conv2d(in_channels, b, 3, padding=1), nn.ReLU(inplace=True)
        )
        self.encoders = nn.ModuleList(
            [_down(b, 2 * b, norm), _down(2 * b, 4 * b, norm),
             _down(4 * b, 8 * b, norm), _down(8 * b, 8 * b, norm)]
        )
        self.bottleneck = nn.Sequential(
            *[ResidualBlock(8 * b, norm) for _ in range(3)]
        )
        self.decoders = nn.ModuleList(
            [_up(16 * b, 8 * b, norm), _up(16 * b, 4 * b, norm),
             _up(8 * b, 2 * b, norm), _up(4 * b, b, norm)]
        )
        self.final = nn.Conv2d(b, out_channels, 3, padding=1)
        self.global_residual = nn.Conv2d(in_channels, out_channels, 1)
        self._init_identity(in_channels, out_channels)

    def _init_identity(self, in_channels, out_channels):
        nn.init.zeros_(self.final.weight)
        nn.init.zeros_(self.final.bias)
        nn.init.zeros_(self.global_residual.weight)
        nn.init.zeros_(self.global_residual.bias)
        with torch.no_grad():
            for c in range(min(in_channels, out_channels)):
                self.global_residual.weight[c, c, 0, 0] = 1.0

    def forward(self, x):
        h = self.initial(x)
        skips = []
        for encoder in self.encoders:
            h = encoder(h)
            skips.append(h)
        h = self.bottleneck(h)
        for decoder, skip in zip(self.decoders, reversed(skips)):
            h = decoder(torch.cat([h, skip], dim=1))
        return torch.tanh(self.final(h)) + self.global_residual(x)


class Discriminator(nn.Module):
    """Patch scores for a (condition, candidate) map pair, channels concatenated."""

    def __init__(self, in_channels=4, base_channels=64):
        super().__init__()
        d = base_channels
        self.net = nn.Sequential(
            nn.Conv2d(in_channels, d, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(d, 2 * d, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(2 * d, 4 * d, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(4 * d, 8 * d, 4, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(8 * d, 1, 4, padding=1),
            nn.Sigmoid(),
        )

    def forward(self, pair):
        return self.net(pair)
