"""Utilidades numéricas comunes: suma compensada, límites removibles y ajustes."""

from __future__ import annotations

import numpy as np

# Por debajo de este |x| los cocientes con singularidad removible se evalúan por serie
UMBRAL_SERIE = 1e-4


def _paso_neumaier(suma, comp, valor):
    nueva = suma + valor
    comp = comp + np.where(
        np.abs(suma) >= np.abs(valor), (suma - nueva) + valor, (valor - nueva) + suma
    )
    return nueva, comp


class SumaCompensada:
    """Acumulador de Neumaier (Kahan mejorado) para escalares o arreglos
    complejos. Las partes real e imaginaria se compensan por separado."""

    def __init__(self, forma=()):
        self._re = np.zeros(forma)
        self._im = np.zeros(forma)
        self._comp_re = np.zeros(forma)
        self._comp_im = np.zeros(forma)

    def agregar(self, valor):
        valor = np.asarray(valor, dtype=complex)
        self._re, self._comp_re = _paso_neumaier(self._re, self._comp_re, valor.real)
        self._im, self._comp_im = _paso_neumaier(self._im, self._comp_im, valor.imag)
        return self

    @property
    def valor(self):
        total = (self._re + self._comp_re) + 1j * (self._im + self._comp_im)
        return complex(total) if np.ndim(total) == 0 else total


def sumar(valores, forma=()):
    acumulador = SumaCompensada(forma)
    for valor in valores:
        acumulador.agregar(valor)
    return acumulador.valor


def seno_sobre(x, t):
    """sin(x t)/x con el límite t en x → 0."""
    x = np.asarray(x, dtype=float)
    pequeno = np.abs(x) < UMBRAL_SERIE
    seguro = np.where(pequeno, 1.0, x)
    return np.where(pequeno, t - x**2 * t**3 / 6.0, np.sin(seguro * t) / seguro)


def uno_menos_coseno_sobre_cuadrado(x, t):
    """(1 − cos x t)/x² con el límite t²/2 en x → 0."""
    x = np.asarray(x, dtype=float)
    pequeno = np.abs(x) < UMBRAL_SERIE
    seguro = np.where(pequeno, 1.0, x)
    serie = t**2 / 2.0 - x**2 * t**4 / 24.0
    # 1 − cos(y) = 2 sin²(y/2) evita la cancelación para y moderado
    return np.where(pequeno, serie, 2.0 * np.sin(seguro * t / 2.0) ** 2 / seguro**2)


def pendiente_loglog(x, y):
    """Pendiente de mínimos cuadrados de log|y| contra log x.

    Devuelve None si hay menos de dos puntos con y no nulo."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=complex))
    validos = (x > 0) & (y > 0)
    if validos.sum() < 2:
        return None
    pendiente, _ = np.polyfit(np.log(x[validos]), np.log(y[validos]), 1)
    return float(pendiente)
