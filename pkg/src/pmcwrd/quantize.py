"""One-bit complex quantization of ADC cubes."""

from __future__ import annotations

import numpy as np

from .scene import AdcCube


def one_bit(cube):
    """Keep only the signs of the real and imaginary parts.

    sign(0) = +1 on both components, so every output element is one of
    (+-1) + j*(+-1) and has magnitude sqrt(2).
    """
    if cube.quantized:
        raise ValueError("double quantization: cube is already one-bit")
    re = np.where(cube.data.real >= 0.0, 1.0, -1.0)
    im = np.where(cube.data.imag >= 0.0, 1.0, -1.0)
    return AdcCube(data=re + 1j * im, quantized=True)
