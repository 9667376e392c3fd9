"""Fluctuaciones de un espín ½ con el reservorio de un modo en estado coherente.

Aquí α va en la normalización en que μ_r(B(s)) = 2 Re(e^{iω_r s} α) con
B = φ(1). El autovalor de a correspondiente es √2·conj(α) (ver `alfa_modo`).
"""

from __future__ import annotations

import logging
from math import exp, inf, tanh

import numpy as np

from apps.base.services.operadores import OperatorMatrix, heisenberg
from apps.base.services.presets import estado_gibbs, hamiltoniano_espin, matriz_preset
from apps.base.utils import seno_sobre

logger = logging.getLogger(__name__)

DERIVADA = "derivada"
LITERAL = "literal"
NODOS_INTEGRAL = 64
TOL_REAL = 1e-12


def alfa_modo(alpha: complex) -> complex:
    """Autovalor de a del estado coherente con μ_r(B(s)) = 2 Re(e^{iω_r s} α)."""
    return np.sqrt(2.0) * np.conj(complex(alpha))


def _beta(T: float) -> float:
    if T < 0:
        raise ValueError("La temperatura debe ser ≥ 0")
    return inf if T == 0 else 1.0 / T


def _coherencia(A) -> float:
    """A_{↑↓}, que debe ser real."""
    valor = complex(A.entries[0, 1]) if isinstance(A, OperatorMatrix) else complex(A)
    if abs(valor.imag) > TOL_REAL:
        raise ValueError("La coherencia A_{↑↓} debe ser real")
    return valor.real


def integral_fluctuacion(
    A: OperatorMatrix, alpha: complex, omega0: float, omega_r: float, T: float, lam: float, t: float
) -> float:
    """−4λ ∫₀^t Im μ_S([e^{isω₀}σ₊, A(t)]) · Re(e^{isω_r} α) ds por Gauss–Legendre."""
    if t == 0:
        return 0.0
    h = hamiltoniano_espin(omega0)
    mu = estado_gibbs(h, _beta(T)).entries
    sigma_mas = matriz_preset("sigma-mas").entries
    A_t = heisenberg(h, A, t).entries
    x, w = np.polynomial.legendre.leggauss(NODOS_INTEGRAL)
    s = 0.5 * t * (x + 1.0)
    conmutador = sigma_mas @ A_t - A_t @ sigma_mas
    valor_base = np.trace(mu @ conmutador)
    integrando = np.imag(np.exp(1j * omega0 * s) * valor_base) * np.real(np.exp(1j * omega_r * s) * alpha)
    return float(-4.0 * lam * 0.5 * t * np.sum(w * integrando))


def fluctuation_closed(
    alpha: float,
    A,
    omega0: float,
    omega_r: float,
    T: float,
    lam: float,
    t: float,
    forma: str = DERIVADA,
) -> float:
    """Orden λ de lim_N ω_N(F_N(A, t)) para α real y A_{↑↓} real.

    derivada: −2λαA_{↑↓} ω₀ tanh(ω₀/2T) S((ω₀+ω_r)/2) S((ω₀−ω_r)/2), S(x) = sin(xt)/x.
    literal: −4λαA_{↑↓}/(1 + e^{−ω₀/T}) · sin(ω₀t)[S(ω₀+ω_r) + S(ω₀−ω_r)].
    """
    if abs(complex(alpha).imag) > TOL_REAL:
        raise ValueError("α debe ser real")
    alpha = complex(alpha).real
    coherencia = _coherencia(A)
    beta = _beta(T)
    if forma == DERIVADA:
        termico = 1.0 if beta == inf else tanh(0.5 * omega0 * beta)
        return float(
            -2.0 * lam * alpha * coherencia * omega0 * termico
            * seno_sobre(0.5 * (omega0 + omega_r), t) * seno_sobre(0.5 * (omega0 - omega_r), t)
        )
    if forma == LITERAL:
        termico = 1.0 if beta == inf else 1.0 / (1.0 + exp(-omega0 * beta))
        return float(
            -4.0 * lam * alpha * coherencia * termico * np.sin(omega0 * t)
            * (seno_sobre(omega0 + omega_r, t) + seno_sobre(omega0 - omega_r, t))
        )
    raise ValueError(f"Forma desconocida: {forma}")
