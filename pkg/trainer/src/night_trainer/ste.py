"""Straight-through threshold: hard mask forward, identity gradient back."""

from __future__ import annotations

import torch


class _SteThreshold(torch.autograd.Function):
    @staticmethod
    def forward(ctx, depth: torch.Tensor, eps: float) -> torch.Tensor:
        return (depth > eps).to(depth.dtype)

    @staticmethod
    def backward(ctx, grad_output):
        return grad_output, None


def ste_threshold(depth: torch.Tensor, eps: float) -> torch.Tensor:
    """Binary object mask from a depth map (strictly greater than ``eps``).

    The forward pass matches the reference hard threshold bit for bit; the
    backward pass treats the operation as identity so gradients reach the
    depth estimate.
    """
    if eps <= 0:
        raise ValueError("threshold must be positive")
    return _SteThreshold.apply(depth, eps)
