"""Coeficientes X_{ν,N}, Y_{ν,N} del desarrollo en 1/√N y sus límites N → ∞.

    ω_N(τ^t(A)) = ω_n(A(t)) + Σ_ν N^{−ν} X_{ν,N} + N^{−ν−1/2} Y_{ν,N}

X recibe solo órdenes r pares y Y solo impares: con (A0) las partículas
fuera del soporte de A aparecen un número par de veces, así que la paridad
de r es la de p₁+…+p_n.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings

from apps.base.excepciones import CondicionA0Violada, ErrorDimension, ErrorModelo
from apps.base.services.cuadratura import QuadratureSpec, integrate_simplex
from apps.conmutadores.services.clases import (
    IndexClass,
    composiciones,
    enumerate_class,
    formas_canonicas,
)
from apps.conmutadores.services.factorizado import (
    EvaluadorFactorizado,
    datos_particula,
    proveedor_para,
)
from apps.modelo.services.sistema import Observable, SystemModel
from apps.wick.services.cotas import BoundCertificate, certify, cola_coeficiente

logger = logging.getLogger(__name__)

X = "X"
Y = "Y"
FLUCTUACION = "F"
TOL_A0 = 1e-10
MUESTRAS_A0 = 8


@dataclass
class ValorCoeficiente:
    """Valor truncado en r_max con su error de cuadratura y la cota de la cola."""

    kind: str
    nu: int
    N: Optional[int]
    value: complex = 0j
    r_max: int = 0
    quadrature_error: float = 0.0
    tail: float = 0.0
    ordenes: dict = field(default_factory=dict)

    @property
    def error_bound(self) -> float:
        return self.quadrature_error + self.tail

    def __complex__(self):
        return complex(self.value)


def verificar_a0(model: SystemModel, N: Optional[int] = None, k_max: int = 2, semilla: Optional[int] = None):
    """Comprueba μ_j(G_j(t₁)…G_j(t_{2k+1})) = 0 para k ≤ k_max en tiempos al azar.

    Lanza CondicionA0Violada con el índice de la primera partícula que falla."""
    semilla = int(getattr(settings, "MFD_SEMILLA", 0)) if semilla is None else semilla
    total = len(model.particles) if N is None else min(N, len(model.particles))
    for j in range(1, total + 1):
        E, G, rho, _ = datos_particula(model.particula(j))
        escala = max(1.0, float(np.max(np.abs(G))))
        generador = np.random.Generator(np.random.Philox(key=semilla + j))
        diferencias = E[:, None] - E[None, :]
        for k in range(k_max + 1):
            tiempos = generador.uniform(0.0, 10.0, size=(MUESTRAS_A0, 2 * k + 1))
            tiempos[0] = 0.0
            peor = 0.0
            for fila in tiempos:
                producto = np.eye(G.shape[0], dtype=complex)
                for s in fila:
                    producto = producto @ (G * np.exp(1j * s * diferencias))
                peor = max(peor, abs(np.trace(rho @ producto)))
            if peor >= TOL_A0 * escala ** (2 * k + 1):
                raise CondicionA0Violada(j, peor)
    logger.debug("Condición (A0) verificada en %s partícula(s)", total)


def tuplas_coeficiente(model: SystemModel, r: int, n: int, suma: int, N: int) -> list:
    """(tupla, peso) de las clases C_r con Σ_{j≤n} p_j = suma y p_j par fuera del soporte."""
    tuplas = []
    for perfil in composiciones(suma, n):
        if model.symmetric:
            tuplas.extend(formas_canonicas(r, n, perfil, N))
            continue
        for pares in composiciones(r - suma, N - n, 2):
            tuplas.extend((tupla, 1) for tupla in enumerate_class(IndexClass(perfil + pares)))
    return tuplas


def tuplas_limite(r: int, n: int, suma: int) -> list:
    """Formas canónicas de D_r / E_r; cada una representa m! tuplas."""
    return [forma for perfil in composiciones(suma, n) for forma in formas_canonicas(r, n, perfil, exactamente_pares=True)]


def _impar(kind: str) -> int:
    if kind not in (X, Y):
        raise ValueError(f"Tipo de coeficiente desconocido: {kind}")
    return 1 if kind == Y else 0


def _ordenes(kind: str, nu: int, r_max: int) -> range:
    impar = _impar(kind)
    r_min = max(2 * nu + impar, 2 - impar)
    return range(r_min, r_max + 1, 2)


def _cola(kind, nu, r_max, certificado: BoundCertificate, n) -> float:
    c = certificado
    return cola_coeficiente(kind, nu, r_max, c.beta, c.lam, c.g, c.t, n, c.norma_AS)


def _coeficiente_finito(kind, nu, N, model, A, t, r_max, quad, proveedor, certificado):
    n = A.n
    if n >= N:
        raise ErrorDimension(f"Se requiere n < N (n={n}, N={N})")
    impar = _impar(kind)
    resultado = ValorCoeficiente(kind, nu, N, r_max=r_max)
    lam = model.coupling
    if lam == 0.0 or t == 0.0 or (n == 0 and (nu > 0 or impar)):
        return resultado
    verificar_a0(model, N)
    evaluador = EvaluadorFactorizado(model, N, A, t, proveedor_para(model, A, t, proveedor))
    for r in _ordenes(kind, nu, r_max):
        tuplas = tuplas_coeficiente(model, r, n, 2 * nu + impar, N)
        if not tuplas:
            continue
        integral, error = integrate_simplex(evaluador.integrando(tuplas, r), t, r, quad)
        prefactor = (1j * lam) ** r * float(N) ** (nu + impar / 2 - r / 2)
        resultado.ordenes[r] = prefactor * integral
        resultado.value += resultado.ordenes[r]
        resultado.quadrature_error += abs(prefactor) * error
        logger.debug("%s_{%s,%s} orden r=%s: %s (%s tuplas)", kind, nu, N, r, resultado.ordenes[r], len(tuplas))
    certificado = certificado or certify(model, A, lam=lam, t=t, n=n, nu_max=nu)
    resultado.tail = _cola(kind, nu, r_max, certificado, n)
    return resultado


def coefficient_X(
    nu: int,
    N: int,
    model: SystemModel,
    A: Observable,
    t: float,
    r_max: int,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
    certificado: Optional[BoundCertificate] = None,
) -> ValorCoeficiente:
    """X_{ν,N}: órdenes pares r ≥ max(2ν, 2), con Σ_{j≤n} p_j = 2ν."""
    return _coeficiente_finito(X, nu, N, model, A, t, r_max, quad, proveedor, certificado)


def coefficient_Y(
    nu: int,
    N: int,
    model: SystemModel,
    A: Observable,
    t: float,
    r_max: int,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
    certificado: Optional[BoundCertificate] = None,
) -> ValorCoeficiente:
    """Y_{ν,N}: órdenes impares r ≥ 2ν+1, con Σ_{j≤n} p_j = 2ν+1."""
    return _coeficiente_finito(Y, nu, N, model, A, t, r_max, quad, proveedor, certificado)


def limit_coefficient(
    kind: str,
    nu: int,
    model: SystemModel,
    A: Observable,
    t: float,
    r_max: int,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
    certificado: Optional[BoundCertificate] = None,
) -> ValorCoeficiente:
    """lim_N X_{ν,N} o lim_N Y_{ν,N} en un modelo simétrico.

    Cada orden r se evalúa sobre n + m partículas, m las partículas nuevas
    que aparecen exactamente dos veces."""
    if not model.symmetric:
        raise ErrorModelo("El límite N → ∞ requiere un modelo simétrico")
    impar = _impar(kind)
    n = A.n
    resultado = ValorCoeficiente(kind, nu, None, r_max=r_max)
    lam = model.coupling
    if lam == 0.0 or t == 0.0 or (n == 0 and (nu > 0 or impar)):
        return resultado
    verificar_a0(model)
    fuente = proveedor_para(model, A, t, proveedor)
    for r in _ordenes(kind, nu, r_max):
        m = (r - 2 * nu - impar) // 2
        tuplas = tuplas_limite(r, n, 2 * nu + impar)
        if not tuplas:
            continue
        evaluador = EvaluadorFactorizado(model, n + m, A, t, fuente)
        integral, error = integrate_simplex(evaluador.integrando(tuplas, r), t, r, quad)
        prefactor = (1j * lam) ** r
        resultado.ordenes[r] = prefactor * integral
        resultado.value += resultado.ordenes[r]
        resultado.quadrature_error += abs(prefactor) * error
        logger.debug("%s_%s límite, orden r=%s sobre %s partículas: %s", kind, nu, r, n + m, resultado.ordenes[r])
    certificado = certificado or certify(model, A, lam=lam, t=t, n=n, nu_max=nu)
    resultado.tail = _cola(kind, nu, r_max, certificado, n)
    return resultado
