"""Funciones de correlación analíticas y discretización de campos continuos."""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from apps.reservorio.services.gaussiano import (
    CampoGaussiano,
    CorrelationFunction,
    DiscretizedField,
    forma_campo,
)

logger = logging.getLogger(__name__)


def correlation_vacuum(field: DiscretizedField) -> CorrelationFunction:
    """C(s,s′) = ½ Σ_k w_k|g_k|² e^{−iω_k(s−s′)}."""
    peso = 0.5 * field.pesos * np.abs(field.form_factor) ** 2
    omega = field.frecuencias

    def evaluar(s, s_prima):
        delta = np.multiply.outer(s - s_prima, omega)
        return np.sum(peso * np.exp(-1j * delta), axis=-1)

    return CorrelationFunction(
        evaluar, "vacuum", CampoGaussiano.vacio(omega), field.amplitudes
    )


def correlation_thermal(field: DiscretizedField, beta: float) -> CorrelationFunction:
    """C(s,s′) = ½ Σ_k w_k|g_k|² [coth(βω_k/2) cos ω_kΔ − i sin ω_kΔ]."""
    if beta <= 0:
        raise ValueError("β debe ser positivo")
    if np.isinf(beta):
        return correlation_vacuum(field)
    peso = 0.5 * field.pesos * np.abs(field.form_factor) ** 2
    omega = field.frecuencias
    cotangente = 1.0 / np.tanh(0.5 * beta * omega)

    def evaluar(s, s_prima):
        delta = np.multiply.outer(s - s_prima, omega)
        return np.sum(peso * (cotangente * np.cos(delta) - 1j * np.sin(delta)), axis=-1)

    return CorrelationFunction(
        evaluar, f"thermal({beta:g})", CampoGaussiano.termico(omega, beta), field.amplitudes
    )


def correlation_coherent(field: DiscretizedField, alfas) -> CorrelationFunction:
    """Vacío desplazado: C = C_vac + μ(B(s))μ(B(s′))."""
    estado = CampoGaussiano.coherente(field.frecuencias, alfas)
    vacio = correlation_vacuum(field)
    amplitudes = field.amplitudes

    def evaluar(s, s_prima):
        media_s = estado.media(forma_campo(amplitudes, s, estado.frecuencias))
        media_sp = estado.media(forma_campo(amplitudes, s_prima, estado.frecuencias))
        return vacio.evaluator(s, s_prima) + media_s * media_sp

    return CorrelationFunction(evaluar, "coherent-shifted", estado, amplitudes)


def discretize_radial(
    densidad: Callable[[np.ndarray], np.ndarray], omega_max: float, K: int
) -> DiscretizedField:
    """Nodos y pesos de Gauss–Legendre en [0, ω_max] con |g(ω_k)|² = ρ(ω_k).

    El jacobiano 4π|k|² de la medida d³k va incluido en ρ por quien llama."""
    if K < 2:
        raise ValueError("Se necesitan al menos 2 modos")
    if not omega_max > 0:
        raise ValueError("ω_max debe ser positivo")
    x, w = np.polynomial.legendre.leggauss(K)
    nodos = 0.5 * omega_max * (x + 1.0)
    pesos = 0.5 * omega_max * w
    valores = np.asarray(densidad(nodos), dtype=float)
    if valores.shape != nodos.shape or not np.all(np.isfinite(valores)) or np.any(valores < 0):
        raise ValueError("Densidad radial no integrable o negativa sobre la malla")
    logger.debug("Campo radial discretizado: K=%s, ω_max=%s", K, omega_max)
    return DiscretizedField(nodos, np.sqrt(valores), pesos)


def norma_desplazamiento(field: DiscretizedField, t: float) -> float:
    """‖(e^{iωt} − 1) g/ω‖² = Σ_k w_k|g_k|² 2(1 − cos ω_k t)/ω_k²."""
    omega = field.frecuencias
    return float(
        np.sum(field.pesos * np.abs(field.form_factor) ** 2 * 4.0 * np.sin(0.5 * omega * t) ** 2 / omega**2)
    )
