"""Network contract: shapes, finiteness, gradient flow."""

import pytest
import torch

from night_trainer.losses import combined_loss
from night_trainer.model import PhasorUNet


def test_zero_input_gives_finite_output_of_correct_shape():
    model = PhasorUNet()
    y = model(torch.zeros(2, 7, 48, 64))
    assert y.shape == (2, 2, 48, 64)
    assert torch.isfinite(y).all()


@pytest.mark.parametrize("h,w", [(48, 64), (18, 24), (30, 50), (17, 23)])
def test_output_spatial_dims_match_input(h, w):
    model = PhasorUNet()
    y = model(torch.zeros(1, 7, h, w))
    assert y.shape == (1, 2, h, w)


def test_output_depends_on_input():
    torch.manual_seed(0)
    model = PhasorUNet()
    a = model(torch.randn(1, 7, 24, 32))
    b = model(torch.randn(1, 7, 24, 32))
    assert not torch.allclose(a, b)


def test_shape_mismatch_rejected():
    model = PhasorUNet()
    with pytest.raises(ValueError):
        model(torch.zeros(1, 3, 24, 32))
    with pytest.raises(ValueError):
        model(torch.zeros(7, 24, 32))


def test_untrained_model_predicts_zero_depth():
    # the final bias starts at (1, 0): zero phase everywhere
    torch.manual_seed(0)
    model = PhasorUNet()
    y = model(torch.zeros(1, 7, 24, 32))
    phase = torch.atan2(y[:, 1], y[:, 0])
    assert phase.abs().max() < 0.5


def test_loss_gradients_finite_for_every_parameter():
    torch.manual_seed(1)
    model = PhasorUNet()
    x = torch.randn(2, 7, 24, 32)
    depth = torch.zeros(2, 24, 32)
    depth[:, 8:12, 10:16] = 2.5
    mask = (depth > 0).float()
    loss = combined_loss(model(x), depth, mask)
    loss.backward()
    for name, p in model.named_parameters():
        assert p.grad is not None, name
        assert torch.isfinite(p.grad).all(), name
