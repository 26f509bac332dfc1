# src/convolution/discrete.py
"""
Reduksi konvolusi kontinu ke konvolusi diskrit 3x3.

Piksel (row, col) menjadi titik lattice integer. Basis box dengan 3x3
kernel points di {-1, 0, 1}^2 dan estimator sum memilih tepat satu tap
per neighbor, jadi hasilnya sama dengan cross-correlation zero-padded.
"""
from typing import Tuple

import numpy as np
from scipy import ndimage

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import ConvLayer, EstimatorSpec, FeatureMatrix, PointCloud
from src.convolution.layer import conv_forward
from src.geometry.neighbors import radius_neighbors
from src.kernels.basis import make_box_basis
from src.kernels.kernel_points import make_kernel_points

# 1.5 memuat 8 tetangga diagonal (jarak sqrt 2) tapi bukan jarak 2
GRID_RECEPTIVE_RADIUS = 1.5


def _check_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        image = image[:, :, None]
    if image.ndim != 3:
        raise InvalidArgumentError(f"image harus H x W x C, didapat shape {image.shape}")
    return image


def _check_kernel(kernel: np.ndarray, channels: int) -> np.ndarray:
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim == 2:
        kernel = kernel[:, :, None]
    if kernel.shape != (3, 3, channels):
        raise InvalidArgumentError(f"kernel harus 3 x 3 x {channels}, didapat shape {kernel.shape}")
    return kernel


def discrete_conv_reference(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """
    Cross-correlation 3x3 dengan zero padding, dijumlah atas channel.

    out[r, c] = Σ_ch Σ_{a,b} image[r+a-1, c+b-1, ch] * kernel[a, b, ch]
    """
    image = _check_image(image)
    kernel = _check_kernel(kernel, image.shape[2])
    output = np.zeros(image.shape[:2])
    for channel in range(image.shape[2]):
        output += ndimage.correlate(image[:, :, channel], kernel[:, :, channel], mode="constant", cval=0.0)
    return output


def image_to_point_features(image: np.ndarray) -> Tuple[PointCloud, FeatureMatrix]:
    """Piksel ke titik (row, col); index titik = row * W + col"""
    image = _check_image(image)
    height, width, channels = image.shape
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    positions = np.stack([rows.ravel(), cols.ravel()], axis=1).astype(np.float64)
    return PointCloud(positions), FeatureMatrix(image.reshape(height * width, channels))


def discrete_kernel_to_layer(kernel: np.ndarray) -> ConvLayer:
    """Kernel 3x3xC menjadi layer box basis: w[c, 3a + b, 0] = kernel[a, b, c]"""
    kernel = np.asarray(kernel, dtype=np.float64)
    kernel = _check_kernel(kernel, kernel.shape[2] if kernel.ndim == 3 else 1)
    channels = kernel.shape[2]
    basis = make_box_basis(make_kernel_points("grid", 2, 3, 1.0), GRID_RECEPTIVE_RADIUS)
    weights = kernel.reshape(9, channels).T[:, :, None]
    return ConvLayer(
        basis=basis,
        estimator=EstimatorSpec("sum"),
        radius=GRID_RECEPTIVE_RADIUS,
        in_channels=channels,
        out_channels=1,
        weights=weights,
    )


def point_conv_image(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Menjalankan conv_forward pada image yang dipetakan ke lattice, hasil H x W"""
    image = _check_image(image)
    cloud, features = image_to_point_features(image)
    layer = discrete_kernel_to_layer(_check_kernel(kernel, image.shape[2]))
    neighbors = radius_neighbors(cloud, cloud, layer.radius)
    output = conv_forward(layer, features, cloud, cloud, neighbors)
    return output.values[:, 0].reshape(image.shape[:2])
