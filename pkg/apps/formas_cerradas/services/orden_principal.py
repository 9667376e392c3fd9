"""Órdenes principales del desarrollo (ν = 0) para modelos no necesariamente simétricos.

    ω_N(τ^t(A)) ≈ μ_{≤n}(A_S(t)) μ_r(A_r(t))
        − 2(λ²/N) μ_{≤n}(A_S(t)) Σ_{j>n} ∫∫_{s′≤s} Re{μ_j(G(s′)G(s)) μ_r(B(s′)[B(s), A_r(t)])}
        − 2(λ/√N) Σ_{j≤n} ∫ Im{μ_{≤n}(G_j(s)A_S(t)) μ_r(B_j(s)A_r(t))}
"""

from __future__ import annotations

import logging
from math import sqrt
from typing import Optional

import numpy as np

from apps.base.excepciones import ErrorDimension
from apps.base.services.cuadratura import QuadratureSpec, integrate_simplex
from apps.conmutadores.services.factorizado import EvaluadorFactorizado, proveedor_para
from apps.conmutadores.services.plantillas import CommutatorTerm
from apps.modelo.services.sistema import Observable, SystemModel

logger = logging.getLogger(__name__)


def _doble_integral(evaluador: EvaluadorFactorizado, j: int, t: float, quad) -> float:
    """∫_0^t ds ∫_0^s ds′ Re{μ_j(G(s′)G(s)) μ_r(B(s′)[B(s), A_r(t)])}.

    Columna 1 = s, columna 2 = s′."""
    directo = CommutatorTerm(1, ((j, 2), (j, 1)), ())
    cruzado = CommutatorTerm(-1, ((j, 2),), ((j, 1),))

    def f(nodos):
        return np.real(evaluador.termino(directo, nodos) + evaluador.termino(cruzado, nodos)).astype(complex)

    valor, _ = integrate_simplex(f, t, 2, quad)
    return valor.real


def leading_order(
    model: SystemModel,
    A: Observable,
    N: int,
    t: float,
    quad: Optional[QuadratureSpec] = None,
    limite: bool = False,
    proveedor: Optional[str] = None,
) -> complex:
    """Suma de los tres términos de orden principal.

    Con `limite` (modelo simétrico) el factor (N − n)/N del término λ² se
    reemplaza por 1, la forma asintótica válida salvo o(1/N)."""
    n = A.n
    if n >= N:
        raise ErrorDimension(f"Se requiere n < N (n={n}, N={N})")
    lam = model.coupling
    evaluador = EvaluadorFactorizado(model, N, A, t, proveedor_para(model, A, t, proveedor))
    base = evaluador.base()
    if lam == 0.0 or t == 0.0:
        return base

    A_S = Observable(sistema=A.sistema)
    A_r = Observable(reservorio=A.reservorio, campo=A.campo)
    libre_S = EvaluadorFactorizado(model, N, A_S, t, proveedor_para(model, A_S, t)).base()
    evaluador_r = EvaluadorFactorizado(model, N, A_r, t, proveedor_para(model, A_r, t, proveedor))

    if model.symmetric:
        multiplicidad = N if limite else N - n
        integrales = multiplicidad * _doble_integral(evaluador_r, n + 1, t, quad)
    else:
        if limite:
            logger.warning("La forma asintótica solo aplica a modelos simétricos; se usa la suma exacta")
        integrales = sum(_doble_integral(evaluador_r, j, t, quad) for j in range(n + 1, N + 1))
    cuadratico = -2.0 * lam**2 / N * libre_S * integrales

    lineal = 0.0
    for j in range(1, n + 1):
        termino = CommutatorTerm(1, ((j, 1),), ())
        valor, _ = integrate_simplex(
            lambda nodos, termino=termino: np.imag(evaluador.termino(termino, nodos)).astype(complex), t, 1, quad
        )
        lineal += valor.real
    lineal *= -2.0 * lam / sqrt(N)
    logger.debug("Orden principal N=%s: base %s, λ² %s, λ/√N %s", N, base, cuadratico, lineal)
    return base + cuadratico + lineal
