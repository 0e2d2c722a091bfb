"""Diffuse-to-glossy surface reflectance.

The wall BRDF blends a Lambertian term with a normalized Phong lobe around
the mirror direction:

    f = albedo * [ alpha / pi
                   + (1 - alpha) * (e + 2) / (2 pi) * max(0, r . w_out)^e ]

where ``r`` is the mirror direction of the incoming light and the exponent
``e`` grows as roughness ``alpha`` drops (alpha = 1 is pure Lambertian,
alpha = 0.3 a sharp lobe).  The (e + 2) / (2 pi) normalization keeps the
hemispherical albedo bounded by ``albedo``.  Ideal mirrors are delta paths
handled by the renderer, never through this function.
"""

from __future__ import annotations

import numpy as np

from night.scene import Material


def specular_exponent(roughness: float) -> float:
    """Monotone roughness -> Phong exponent mapping (1 -> 0, 0.3 -> sharp)."""
    return 2.0 / roughness**4 - 2.0


def brdf_terms(material: Material):
    """(diffuse coefficient, specular coefficient, exponent) of the blend."""
    if material.ideal_specular:
        raise ValueError("ideal specular material has no finite BRDF")
    a = material.roughness
    e = specular_exponent(a)
    kd = material.albedo * a / np.pi
    ks = material.albedo * (1.0 - a) * (e + 2.0) / (2.0 * np.pi)
    return kd, ks, e


def brdf_from_cosines(material: Material, cos_r):
    """BRDF value given the cosine between w_out and the mirror direction.

    Vectorized core shared by the renderer; ``cos_r`` may be an array.
    """
    kd, ks, e = brdf_terms(material)
    if ks == 0.0:
        return np.broadcast_to(np.float64(kd), np.shape(cos_r)).copy() if np.ndim(cos_r) else kd
    return kd + ks * np.clip(cos_r, 0.0, None) ** e


def brdf_eval(material: Material, w_in, w_out, normal):
    """Reflectance per steradian for unit vectors in the normal hemisphere.

    ``w_in`` points from the surface toward the light, ``w_out`` toward the
    viewer.  Non-unit inputs are rejected.
    """
    w_in = np.asarray(w_in, dtype=np.float64)
    w_out = np.asarray(w_out, dtype=np.float64)
    normal = np.asarray(normal, dtype=np.float64)
    for v in (w_in, w_out, normal):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("brdf_eval expects unit vectors")
    if w_in @ normal < 0 or w_out @ normal < 0:
        raise ValueError("directions must lie in the hemisphere of the normal")
    r = 2.0 * (normal @ w_in) * normal - w_in
    return float(brdf_from_cosines(material, r @ w_out))
