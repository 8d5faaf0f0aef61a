"""Geometry, consistency and sampling kernels for RGB-D scene generation."""

from ._core import (
    Camera,
    Error,
    Intrinsics,
    Pose,
    back_project,
    decode_depth16,
    downsample_mask,
    encode_depth16,
    filter_dataset,
    rasterize_boxes,
    render_points,
    sample_gaussian,
    select_keyframes,
    warp_loss,
    warp_loss_gradient,
    yaw_rotation,
)

__all__ = [
    "Camera",
    "Error",
    "Intrinsics",
    "Pose",
    "back_project",
    "decode_depth16",
    "downsample_mask",
    "encode_depth16",
    "filter_dataset",
    "rasterize_boxes",
    "render_points",
    "sample_gaussian",
    "select_keyframes",
    "warp_loss",
    "warp_loss_gradient",
    "yaw_rotation",
]
