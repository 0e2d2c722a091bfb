from night.render.brdf import brdf_eval, specular_exponent
from night.render.renderer import (
    RenderConfig,
    TransientImage,
    render_los_gt,
    render_transient_mirrorwall,
    render_transient_nlos,
)
from night.render.kernels import backend_name

__all__ = [
    "RenderConfig",
    "TransientImage",
    "backend_name",
    "brdf_eval",
    "render_los_gt",
    "render_transient_mirrorwall",
    "render_transient_nlos",
    "specular_exponent",
]
