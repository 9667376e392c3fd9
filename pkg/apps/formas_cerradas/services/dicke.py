"""Número de fotones del modelo de Dicke a orden λ²."""

from __future__ import annotations

import numpy as np

from apps.base.utils import uno_menos_coseno_sobre_cuadrado
from apps.reservorio.services.gaussiano import DiscretizedField


def dicke_number_leading(field: DiscretizedField, p: float, omega0: float, lam: float, t):
    """λ² Σ_k w_k|g_k|² [p·(1 − cos Δ₋t)/Δ₋² + (1 − p)·(1 − cos Δ₊t)/Δ₊²],
    con Δ∓ = ω₀ ∓ ω_k. La resonancia usa el límite t²/2.

    Para un campo continuo el jacobiano de d³k va dentro de |g|² (ver
    discretize_radial)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p debe estar en [0, 1]")
    omega = field.frecuencias
    peso = field.pesos * np.abs(field.form_factor) ** 2

    def en_t(s):
        emision = uno_menos_coseno_sobre_cuadrado(omega0 - omega, s)
        contrarrotante = uno_menos_coseno_sobre_cuadrado(omega0 + omega, s)
        return float(lam**2 * np.sum(peso * (p * emision + (1.0 - p) * contrarrotante)))

    if np.ndim(t) == 0:
        return en_t(float(t))
    return np.array([en_t(float(s)) for s in t])
