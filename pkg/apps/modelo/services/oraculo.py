"""Oráculo exacto: H_N denso sobre el producto tensorial completo.

Sirve de verdad de referencia para N pequeño. La serie de Dyson directa
(`dyson_direct`) suma sobre tuplas (j₁,…,j_r) sin reagrupar por perfiles,
así que es un camino independiente del de los coeficientes X/Y.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import inf, isfinite, sqrt
from typing import Optional, Sequence, Union

import numpy as np
from django.conf import settings

from apps.base.excepciones import ErrorDimension
from apps.base.services.cuadratura import QuadratureSpec, integrate_simplex
from apps.base.services.operadores import (
    OperatorMatrix,
    embed,
    embed_slots,
    expectation,
    propagador_para,
)
from apps.base.utils import SumaCompensada
from apps.conmutadores.services.factorizado import EvaluadorFactorizado, proveedor_para
from apps.modelo.services.sistema import Observable, SystemModel
from apps.reservorio.services.fock import certificar_truncamiento
from apps.wick.services.cotas import certify, cota_orden

logger = logging.getLogger(__name__)

TOL_IMAGINARIA = 1e-9
TERMINOS_COLA = 8


def _slots_reservorio(model: SystemModel, N: int) -> tuple[int, ...]:
    return tuple(range(N, N + len(model.reservoir.dims)))


def build_hamiltonian(model: SystemModel, N: int) -> OperatorMatrix:
    """H_N = Σ h_j + H_r + (λ/√N) Σ G_j ⊗ B_j como matriz densa."""
    if N < 1:
        raise ValueError("N debe ser ≥ 1")
    if not model.admite(N):
        raise ErrorDimension(f"El modelo no define {N} partículas")
    tope = int(getattr(settings, "MFD_DIMENSION_MAXIMA", 4096))
    dimension = model.dimension(N)
    if dimension > tope:
        raise ErrorDimension(f"Dimensión {dimension} por encima del tope del oráculo ({tope})")
    return _hamiltoniano(model, N)


@lru_cache(maxsize=16)
def _hamiltoniano(model: SystemModel, N: int) -> OperatorMatrix:
    dims = model.dims(N)
    reservorio = model.reservoir
    slots_r = _slots_reservorio(model, N)
    total = embed_slots(reservorio.hamiltoniano(), slots_r, dims).entries.copy()
    for j in range(1, N + 1):
        total += embed(model.particula(j).h, j - 1, dims).entries
    if model.coupling != 0.0:
        prefactor = model.coupling / sqrt(N)
        for j in range(1, N + 1):
            acople = model.particula(j).G.kron(reservorio.operador_B(j))
            total += prefactor * embed_slots(acople, (j - 1,) + slots_r, dims).entries
    logger.debug("H_N construido: N=%s, dimensión %s", N, total.shape[0])
    return OperatorMatrix(dims, total, hermitian=True)


def densidad_inicial(model: SystemModel, N: int) -> OperatorMatrix:
    """μ_1 ⊗ … ⊗ μ_N ⊗ μ_r."""
    entradas = np.ones((1, 1), dtype=complex)
    for j in range(1, N + 1):
        entradas = np.kron(entradas, model.particula(j).mu.entries)
    entradas = np.kron(entradas, model.reservoir.densidad().entries)
    return OperatorMatrix(model.dims(N), entradas, hermitian=True)


def _observable_sumergido(model: SystemModel, N: int, A: Union[Observable, OperatorMatrix]) -> OperatorMatrix:
    dims = model.dims(N)
    slots_r = _slots_reservorio(model, N)
    if isinstance(A, Observable):
        matriz = A.completo(model.reservoir)
        n = A.n
    else:
        matriz = A
        n = len(A.dims) - len(slots_r)
    if n < 0 or n > N:
        raise ErrorDimension(f"El observable usa {n} partículas y el sistema tiene N={N}")
    return embed_slots(matriz, tuple(range(n)) + slots_r, dims)


def evolve_expectation(
    model: SystemModel,
    N: int,
    A: Union[Observable, OperatorMatrix],
    t: Union[float, Sequence[float]],
    hilos: Optional[int] = None,
):
    """ω_N(τ^t(A)) exacto salvo truncamiento de Fock.

    Con una secuencia de tiempos devuelve un arreglo en el mismo orden."""
    H = build_hamiltonian(model, N)
    propagador = propagador_para(H)
    rho = densidad_inicial(model, N)
    A_N = _observable_sumergido(model, N, A)
    slots_fock = model.reservoir.slots_fock(N)
    hermitico = A.hermitico if isinstance(A, Observable) else A.hermitian

    def en_t(s):
        rho_t = propagador.schrodinger(rho, float(s))
        if slots_fock:
            certificar_truncamiento(rho_t, slots_fock)
        valor = expectation(rho_t, A_N)
        if hermitico and abs(valor.imag) > TOL_IMAGINARIA:
            logger.warning("Parte imaginaria %.2e en un observable hermítico (t=%s)", valor.imag, s)
        return valor

    if np.ndim(t) == 0:
        return en_t(t)
    tiempos = [float(s) for s in t]
    hilos = hilos or int(getattr(settings, "MFD_HILOS", 1))
    if hilos <= 1 or len(tiempos) == 1:
        return np.array([en_t(s) for s in tiempos], dtype=complex)
    with ThreadPoolExecutor(max_workers=hilos) as pool:
        return np.array(list(pool.map(en_t, tiempos)), dtype=complex)


@dataclass
class ResultadoDyson:
    """Suma parcial de la serie de Dyson hasta r_max."""

    value: complex
    base: complex
    tail: float
    quadrature_error: float
    r_max: int
    a1_ok: bool
    ordenes: dict = field(default_factory=dict)

    @property
    def error_bound(self) -> float:
        return self.tail + self.quadrature_error


def cola_dyson(certificado, r_max: int, N: Optional[int], terminos: int = TERMINOS_COLA) -> float:
    """Cota de Σ_{r > r_max} del orden r con la tasa del certificado.

    Los términos se suman explícitamente y el resto se acota, por paridad,
    con una geométrica de paso 2."""
    c = certificado
    if c.lam == 0 or c.t == 0:
        return 0.0
    valores = [
        cota_orden(r, c.beta(r), c.lam, c.g, c.t, c.n, N, c.norma_AS)
        for r in range(r_max + 1, r_max + 1 + terminos)
    ]
    if not all(isfinite(v) for v in valores):
        return inf
    razones = [valores[-1 - k] / valores[-3 - k] for k in (0, 1) if valores[-3 - k] > 0]
    q = max(razones, default=0.0)
    if q >= 1:
        return inf
    return sum(valores) + (valores[-1] + valores[-2]) * q / (1 - q)


def dyson_direct(
    model: SystemModel,
    N: int,
    A: Observable,
    t: float,
    r_max: int,
    quad: Optional[QuadratureSpec] = None,
    proveedor: Optional[str] = None,
) -> ResultadoDyson:
    """Σ_{r ≤ r_max} (iλ)^r N^{−r/2} Σ_{j₁…j_r} ∫_{t ≥ t₁ ≥ … ≥ t_r ≥ 0} ω_N(T_t)."""
    if r_max < 0:
        raise ValueError("r_max debe ser ≥ 0")
    lam = model.coupling
    evaluador = EvaluadorFactorizado(model, N, A, t, proveedor_para(model, A, t, proveedor))
    base = evaluador.base()
    acumulado = SumaCompensada()
    acumulado.agregar(base)
    error = 0.0
    ordenes = {}
    if lam != 0.0 and t != 0.0:
        for r in range(1, r_max + 1):
            tuplas = [(tupla, 1.0) for tupla in product(range(1, N + 1), repeat=r)]
            integral, err = integrate_simplex(evaluador.integrando(tuplas, r), t, r, quad)
            prefactor = (1j * lam) ** r * N ** (-r / 2)
            ordenes[r] = prefactor * integral
            acumulado.agregar(ordenes[r])
            error += abs(prefactor) * err
            logger.debug("Dyson directo N=%s r=%s: %s", N, r, ordenes[r])

    certificado = certify(model, A, lam=lam, t=t, n=A.n)
    if not certificado.a1_ok:
        logger.warning("Dyson directo fuera de (A1): margen %.3f", certificado.A1_margin)
    return ResultadoDyson(
        value=acumulado.valor,
        base=base,
        tail=cola_dyson(certificado, r_max, N),
        quadrature_error=error,
        r_max=r_max,
        a1_ok=certificado.a1_ok,
        ordenes=ordenes,
    )
