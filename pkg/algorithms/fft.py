"""
Discrete Fourier transforms: a direct-summation reference and a fast transform
for any length (iterative radix-2, Bluestein chirp-z for the rest)
"""
from functools import lru_cache

import numpy as np

from utils.validation import validate_signal


def dft_naive(signal):
    """
    Compute the DFT by direct summation, X_k = sum_n x_n exp(-2*pi*i*k*n/N).

    O(N^2); the exponent index k*n is reduced modulo N before the complex
    exponential so large products do not lose precision.

    Raises:
    - NonFiniteInput: If the signal is empty or holds NaN/inf
    """
    x = validate_signal(signal)
    n = x.shape[0]
    positions = np.arange(n, dtype=np.int64)
    result = np.empty(n, dtype=np.complex128)
    for k in range(n):
        phase = (k * positions) % n
        result[k] = np.dot(np.exp(-2j * np.pi * phase / n), x)
    return result


def fft(signal):
    """
    Fast DFT of a real signal of any length, unscaled forward convention.

    Raises:
    - NonFiniteInput: If the signal is empty or holds NaN/inf
    """
    x = validate_signal(signal)
    return fft_rows(x.reshape(1, -1))[0]


def fft_rows(rows):
    """Transform every row of a 2-D array; rows are assumed finite"""
    data = np.asarray(rows, dtype=np.complex128)
    n = data.shape[-1]
    if n == 1:
        return data.copy()
    if n & (n - 1) == 0:
        return _radix2(data)
    return _bluestein(data)


@lru_cache(maxsize=32)
def _bit_reversal(n):
    levels = n.bit_length() - 1
    index = np.arange(n, dtype=np.int64)
    reversed_index = np.zeros(n, dtype=np.int64)
    for bit in range(levels):
        reversed_index |= ((index >> bit) & 1) << (levels - 1 - bit)
    reversed_index.setflags(write=False)
    return reversed_index


@lru_cache(maxsize=64)
def _twiddles(size):
    half = size // 2
    factors = np.exp(-2j * np.pi * np.arange(half) / size)
    factors.setflags(write=False)
    return factors


def _radix2(data):
    """Iterative decimation-in-time transform along the last axis (power-of-two length)"""
    batch, n = data.shape
    work = data[:, _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        blocks = work.reshape(batch, n // size, size)
        even = blocks[:, :, :half]
        odd = blocks[:, :, half:] * _twiddles(size)
        work = np.concatenate([even + odd, even - odd], axis=2).reshape(batch, n)
        size *= 2
    return work


@lru_cache(maxsize=16)
def _chirp_tables(n):
    """Chirp w_m = exp(-i*pi*m^2/n) and the transformed convolution filter for length n"""
    m = np.arange(n, dtype=np.int64)
    # m^2 mod 2n keeps the phase argument small for long records
    chirp = np.exp(-1j * np.pi * ((m * m) % (2 * n)) / n)
    size = 1 << int(2 * n - 1).bit_length()
    kernel = np.zeros(size, dtype=np.complex128)
    kernel[:n] = np.conj(chirp)
    kernel[size - n + 1:] = np.conj(chirp[1:])[::-1]
    kernel_spectrum = _radix2(kernel.reshape(1, -1))[0]
    chirp.setflags(write=False)
    kernel_spectrum.setflags(write=False)
    return chirp, kernel_spectrum, size


def _bluestein(data):
    """Arbitrary-length DFT as a circular convolution of power-of-two length"""
    batch, n = data.shape
    chirp, kernel_spectrum, size = _chirp_tables(n)
    padded = np.zeros((batch, size), dtype=np.complex128)
    padded[:, :n] = data * chirp
    product = _radix2(padded) * kernel_spectrum
    # inverse transform via conjugation
    convolved = np.conj(_radix2(np.conj(product))) / size
    return convolved[:, :n] * chirp
