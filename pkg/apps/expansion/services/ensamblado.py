"""Ensamblado del desarrollo completo y serie de fluctuaciones."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import inf, isfinite
from typing import Optional

from django.conf import settings

from apps.base.excepciones import ErrorDimension, ErrorModelo
from apps.base.services.cuadratura import QuadratureSpec, integrate_simplex
from apps.base.utils import SumaCompensada
from apps.conmutadores.services.clases import formas_canonicas
from apps.conmutadores.services.factorizado import EvaluadorFactorizado, proveedor_para
from apps.expansion.services.coeficientes import (
    FLUCTUACION,
    X,
    Y,
    ValorCoeficiente,
    coefficient_X,
    coefficient_Y,
    limit_coefficient,
    verificar_a0,
)
from apps.modelo.services.sistema import Observable, SystemModel
from apps.wick.services.cotas import BoundCertificate, certify

logger = logging.getLogger(__name__)

NU_EXTRA = 3
TOL_REAL = 1e-8


@dataclass
class ExpansionResult:
    base: complex
    value: complex
    remainder: float
    certified: bool
    N: Optional[int]
    nu_max: int
    r_max: int
    coefficients: dict = field(default_factory=dict)
    certificado: Optional[BoundCertificate] = field(default=None, repr=False)

    def coeficiente(self, nu: int, kind: str = X) -> ValorCoeficiente:
        return self.coefficients[(nu, kind, self.N if self.N is not None else inf)]

    def as_dict(self) -> dict:
        return {
            "base": self.base,
            "value": self.value,
            "remainder": self.remainder,
            "certified": self.certified,
            "N": self.N,
            "nu_max": self.nu_max,
            "r_max": self.r_max,
            "coefficients": {
                f"{kind}{nu}": {
                    "value": c.value,
                    "quadrature_error": c.quadrature_error,
                    "tail": c.tail,
                }
                for (nu, kind, _), c in self.coefficients.items()
            },
        }


def _peso(N: Optional[int], nu: int, kind: str) -> float:
    if N is None:
        return 1.0 if (nu, kind) == (0, X) else 0.0
    return float(N) ** (-nu - (0.5 if kind == Y else 0.0))


def _resto_no_calculado(certificado: BoundCertificate, N: Optional[int], nu_max: int) -> float:
    """Cota de los ν > ν_max, con extrapolación geométrica tras NU_EXTRA términos."""
    if N is None:
        return 0.0
    terminos = [
        _peso(N, nu, X) * certificado.cota_X(nu) + _peso(N, nu, Y) * certificado.cota_Y(nu)
        for nu in range(nu_max + 1, nu_max + 1 + NU_EXTRA)
    ]
    if not all(isfinite(v) for v in terminos):
        return inf
    total = sum(terminos)
    if terminos[-2] > 0:
        q = terminos[-1] / terminos[-2]
        total += terminos[-1] * q / (1 - q) if q < 1 else inf
    return total


def assemble(
    model: SystemModel,
    A: Observable,
    t: float,
    nu_max: Optional[int] = None,
    r_max: int = 4,
    quad: Optional[QuadratureSpec] = None,
    N: Optional[int] = None,
    proveedor: Optional[str] = None,
    hilos: Optional[int] = None,
) -> ExpansionResult:
    """ω_n(A(t)) + Σ_{ν ≤ ν_max} N^{−ν}X_{ν,N} + N^{−ν−1/2}Y_{ν,N}.

    Con N = None se ensambla el límite simétrico ω_n(A(t)) + X_ν(ν=0); los
    demás coeficientes límite se calculan y se informan sin peso."""
    nu_max = int(getattr(settings, "MFD_NU_MAXIMO", 2)) if nu_max is None else nu_max
    if N is None and not model.symmetric:
        raise ErrorModelo("El límite N → ∞ requiere un modelo simétrico")
    n = A.n
    verificar_a0(model, N)
    lam = model.coupling
    certificado = certify(model, A, lam=lam, t=t, n=n, nu_max=nu_max + NU_EXTRA)
    fuente = proveedor_para(model, A, t, proveedor)
    base = EvaluadorFactorizado(model, N if N is not None else max(n, 1), A, t, fuente).base()

    def calcular(tarea):
        nu, kind = tarea
        if N is None:
            return limit_coefficient(kind, nu, model, A, t, r_max, quad, proveedor, certificado)
        calculo = coefficient_X if kind == X else coefficient_Y
        return calculo(nu, N, model, A, t, r_max, quad, proveedor, certificado)

    tareas = [(nu, kind) for nu in range(nu_max + 1) for kind in (X, Y)]
    hilos = hilos or int(getattr(settings, "MFD_HILOS", 1))
    if hilos <= 1:
        valores = [calcular(tarea) for tarea in tareas]
    else:
        with ThreadPoolExecutor(max_workers=min(hilos, len(tareas))) as pool:
            valores = list(pool.map(calcular, tareas))

    clave_N = N if N is not None else inf
    coeficientes = {}
    acumulado = SumaCompensada()
    acumulado.agregar(base)
    resto = 0.0
    for (nu, kind), coeficiente in zip(tareas, valores):
        coeficientes[(nu, kind, clave_N)] = coeficiente
        peso = _peso(N, nu, kind)
        acumulado.agregar(peso * coeficiente.value)
        resto += peso * coeficiente.error_bound
    resto += _resto_no_calculado(certificado, N, nu_max)

    valor = acumulado.valor
    if A.hermitico and abs(valor.imag) > TOL_REAL:
        logger.warning("Valor ensamblado con parte imaginaria %.2e en un observable hermítico", valor.imag)
    certificado_ok = certificado.certified and isfinite(resto)
    logger.info(
        "Desarrollo ensamblado (N=%s, ν≤%s, r≤%s): %s ± %.3e%s",
        N if N is not None else "∞", nu_max, r_max, valor, resto, "" if certificado_ok else " [no certificado]",
    )
    return ExpansionResult(
        base=base,
        value=valor,
        remainder=resto,
        certified=certificado_ok,
        N=N,
        nu_max=nu_max,
        r_max=r_max,
        coefficients=coeficientes,
        certificado=certificado,
    )


def serie_fluctuaciones(
    model: SystemModel,
    A: Observable,
    t: float,
    r_max: int,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
) -> ValorCoeficiente:
    """lim_N ω_N(F_N(A, t)) truncado en r_max (órdenes impares).

    La partícula observada ocupa solo el nivel t₁ y las demás posiciones
    se reparten en pares exactos sobre partículas nuevas; el factor 1/m!
    se cancela con las m! etiquetas de cada forma canónica."""
    if not model.symmetric:
        raise ErrorModelo("Las fluctuaciones requieren un modelo simétrico")
    if A.n != 1 or not A.solo_sistema:
        raise ErrorDimension("El observable de fluctuación debe actuar sobre una sola partícula")
    resultado = ValorCoeficiente(FLUCTUACION, 0, None, r_max=r_max)
    lam = model.coupling
    if lam == 0.0 or t == 0.0:
        return resultado
    verificar_a0(model)
    fuente = proveedor_para(model, A, t, proveedor)
    for r in range(1, r_max + 1, 2):
        m = (r - 1) // 2
        tuplas = [((1,) + tuple(j + 1 for j in forma), peso) for forma, peso in formas_canonicas(r - 1, 0, (), exactamente_pares=True)]
        evaluador = EvaluadorFactorizado(model, 1 + m, A, t, fuente)
        integral, error = integrate_simplex(evaluador.integrando(tuplas, r), t, r, quad)
        prefactor = (1j * lam) ** r
        resultado.ordenes[r] = prefactor * integral
        resultado.value += resultado.ordenes[r]
        resultado.quadrature_error += abs(prefactor) * error
        logger.debug("Fluctuación orden r=%s: %s", r, resultado.ordenes[r])
    return resultado


def fluctuation_series(
    model: SystemModel,
    A: Observable,
    t: float,
    r_max: int = 1,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
) -> complex:
    return serie_fluctuaciones(model, A, t, r_max, quad, proveedor).value
