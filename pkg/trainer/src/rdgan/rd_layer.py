"""Range-Doppler transform as a differentiable layer.

The layer mirrors the conventional pipeline: coherent accumulation of
slow-time columns, cyclic fast-time correlation against a real-valued
kernel via frequency-domain multiplication with the conjugate kernel
spectrum, then a slow-time FFT.  With the transmit code as a fixed kernel
this reproduces the conventional map; with ``trainable=True`` the kernel
is a parameter and gradients flow through both FFTs.
"""

from __future__ import annotations

import torch
from torch import nn


class RdLayer(nn.Module):
    def __init__(self, kernel, accumulation=1, trainable=False, init_noise=0.0,
                 generator=None):
        super().__init__()
        kernel = torch.as_tensor(kernel)
        if kernel.is_complex():
            raise ValueError("kernel must be real-valued")
        if not kernel.dtype.is_floating_point:
            kernel = kernel.to(torch.get_default_dtype())
        if init_noise:
            noise = torch.randn(kernel.shape, generator=generator,
                                dtype=kernel.dtype)
            kernel = kernel + init_noise * noise
        if trainable:
            self.kernel = nn.Parameter(kernel)
        else:
            self.register_buffer("kernel", kernel)
        self.accumulation = int(accumulation)
        if self.accumulation < 1:
            raise ValueError("accumulation must be positive")

    def forward(self, cube):
        """(..., N, M_raw) complex cube -> (..., N, M_raw/accumulation) map."""
        n = cube.shape[-2]
        if self.kernel.numel() != n:
            raise ValueError(
                f"kernel length {self.kernel.numel()} does not match "
                f"fast-time length {n}"
            )
        if self.accumulation > 1:
            m_raw = cube.shape[-1]
            if m_raw % self.accumulation:
                raise ValueError(
                    f"slow-time length {m_raw} not divisible by "
                    f"{self.accumulation}"
                )
            cube = cube.reshape(
                *cube.shape[:-1], m_raw // self.accumulation, self.accumulation
            ).sum(dim=-1)
        spectrum = torch.conj(torch.fft.fft(self.kernel))
        profile = torch.fft.ifft(
            torch.fft.fft(cube, dim=-2) * spectrum.unsqueeze(-1), dim=-2
        )
        return torch.fft.fft(profile, dim=-1)
