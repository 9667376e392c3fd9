"""Integrales ordenadas en el tiempo sobre el r-símplex t ≥ t₁ ≥ … ≥ t_r ≥ 0.

El integrando recibe un bloque de nodos con forma (m, r) (columna k = t_{k+1})
y devuelve m valores complejos. Los bloques se evalúan en paralelo y se
reducen en orden fijo.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from math import factorial
from typing import Callable, Optional

import numpy as np
from django.conf import settings

from apps.base.excepciones import ErrorCuadratura

logger = logging.getLogger(__name__)

NESTED_GAUSS = "nested-gauss"
MONTE_CARLO = "simplex-monte-carlo"
METODOS = (NESTED_GAUSS, MONTE_CARLO)

MUESTRAS_POR_DEFECTO = 100_000

Integrando = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSpec:
    """Cómo integrar. `order=None` aplica la política por profundidad:
    Gauss–Legendre de orden 12 por nivel hasta r=4, 8 para r∈{5,6} y
    Monte Carlo más allá."""

    method: str = NESTED_GAUSS
    order: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    tolerance: float = 1e-6
    max_refinements: int = 1

    def __post_init__(self):
        if self.method not in METODOS:
            raise ValueError(f"Método de cuadratura desconocido: {self.method}")
        if self.order is not None and self.order < 2:
            raise ValueError("El orden de Gauss–Legendre debe ser ≥ 2 por nivel")
        if self.samples is not None and self.samples < 1000:
            raise ValueError("Monte Carlo requiere al menos 10³ muestras")
        if self.method == MONTE_CARLO and self.seed is None:
            raise ValueError("Monte Carlo requiere semilla explícita")
        if self.tolerance <= 0:
            raise ValueError("La tolerancia debe ser positiva")

    def para_orden(self, r: int) -> "QuadratureSpec":
        """Resuelve la política por defecto para la profundidad r."""
        if self.method == MONTE_CARLO:
            return replace(self, samples=self.samples or MUESTRAS_POR_DEFECTO)
        if self.order is not None:
            return self
        if r <= 4:
            return replace(self, order=12)
        if r <= 6:
            return replace(self, order=8)
        semilla = self.seed if self.seed is not None else getattr(settings, "MFD_SEMILLA", 0)
        return QuadratureSpec(
            method=MONTE_CARLO,
            samples=self.samples or MUESTRAS_POR_DEFECTO,
            seed=semilla,
            tolerance=max(self.tolerance, 1e-2),
            max_refinements=self.max_refinements,
        )


def nodos_simplex(t: float, r: int, orden: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss–Legendre tensorizados sobre el símplex.

    Cambio de variables por nivel t_k = t_{k−1}·u_k con u_k ∈ [0,1] (t₀ = t),
    de jacobiano Π_k t_{k−1}.
    """
    x, w = np.polynomial.legendre.leggauss(orden)
    u, wu = 0.5 * (x + 1.0), 0.5 * w
    mallas = np.meshgrid(*([u] * r), indexing="ij")
    pesos_mallas = np.meshgrid(*([wu] * r), indexing="ij")
    U = np.stack([m.ravel() for m in mallas], axis=1)
    W = np.prod(np.stack([m.ravel() for m in pesos_mallas], axis=1), axis=1)
    tiempos = t * np.cumprod(U, axis=1)
    anteriores = np.concatenate([np.full((U.shape[0], 1), float(t)), tiempos[:, :-1]], axis=1)
    return tiempos, W * np.prod(anteriores, axis=1)


def muestras_simplex(t: float, r: int, muestras: int, semilla: int) -> np.ndarray:
    """Uniformes ordenados de mayor a menor; Philox es un generador por
    contador, así que la muestra depende solo de la semilla."""
    generador = np.random.Generator(np.random.Philox(key=semilla))
    return -np.sort(-generador.uniform(0.0, t, size=(muestras, r)), axis=1)


def _evaluar_bloques(f: Integrando, nodos: np.ndarray, hilos: int) -> np.ndarray:
    bloque = max(1, int(getattr(settings, "MFD_BLOQUE_NODOS", 4096)))
    trozos = [nodos[i:i + bloque] for i in range(0, nodos.shape[0], bloque)]
    if hilos <= 1 or len(trozos) == 1:
        valores = [np.asarray(f(trozo), dtype=complex) for trozo in trozos]
    else:
        with ThreadPoolExecutor(max_workers=hilos) as pool:
            valores = list(pool.map(lambda trozo: np.asarray(f(trozo), dtype=complex), trozos))
    return np.concatenate(valores)


def _gauss(f, t, r, orden, hilos):
    nodos, pesos = nodos_simplex(t, r, orden)
    valores = _evaluar_bloques(f, nodos, hilos)
    return complex(np.sum(pesos * valores)), float(np.max(np.abs(valores))) if valores.size else 0.0


def integrate_simplex(
    f: Integrando, t: float, r: int, spec: Optional[QuadratureSpec] = None, hilos: Optional[int] = None
) -> tuple[complex, float]:
    """∫₀^t dt₁ ∫₀^{t₁} dt₂ … ∫₀^{t_{r−1}} dt_r f(t₁,…,t_r) y su error estimado.

    Gauss anidado: el error es |Q_n − Q_{⌈n/2⌉}|. Monte Carlo: error estándar.
    Si el error supera tolerance·max(|Q|, vol·max|f|) se refina (orden o
    muestras ×2) hasta `max_refinements` veces y luego falla.
    """
    if r < 1:
        raise ValueError("La profundidad del símplex debe ser ≥ 1")
    if t < 0:
        raise ValueError("El límite superior del símplex debe ser ≥ 0")
    if t == 0:
        return 0j, 0.0
    spec = (spec or QuadratureSpec()).para_orden(r)
    hilos = hilos or int(getattr(settings, "MFD_HILOS", 1))
    volumen = abs(t) ** r / factorial(r)

    for intento in range(spec.max_refinements + 1):
        if spec.method == NESTED_GAUSS:
            valor, maximo = _gauss(f, t, r, spec.order, hilos)
            grueso, _ = _gauss(f, t, r, max(2, (spec.order + 1) // 2), hilos)
            error = abs(valor - grueso)
        else:
            nodos = muestras_simplex(t, r, spec.samples, spec.seed)
            valores = _evaluar_bloques(f, nodos, hilos)
            valor = volumen * complex(np.mean(valores))
            dispersion = np.sqrt(np.var(valores.real, ddof=1) + np.var(valores.imag, ddof=1))
            error = volumen * float(dispersion) / np.sqrt(valores.size)
            maximo = float(np.max(np.abs(valores)))
        escala = max(abs(valor), volumen * maximo)
        if error <= spec.tolerance * escala or escala == 0.0:
            return valor, error
        if intento < spec.max_refinements:
            logger.debug("Refinando cuadratura r=%s (error %.3e, escala %.3e)", r, error, escala)
            if spec.method == NESTED_GAUSS:
                spec = replace(spec, order=2 * spec.order)
            else:
                spec = replace(spec, samples=2 * spec.samples)
    raise ErrorCuadratura(
        f"Cuadratura r={r} sin converger: error {error:.3e} > {spec.tolerance:.1e}·{escala:.3e}"
    )
