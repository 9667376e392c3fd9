"""Resumación del caso conservativo ([G, h] = 0).

En el límite N → ∞ las partículas actúan sobre el reservorio como un único
oscilador de frecuencia cero acoplado linealmente:
    H = H_r + c·φ_HO ⊗ B,   μ_HO el vacío,
con c = √(2κ), κ = λ²μ_S(G²). Esa constante reproduce el oráculo de N
finito (la suma de G_j/√N es gaussiana de varianza μ_S(G²) y μ_HO(φ²) = ½).
La convención "literal" usa c = 2√κ y las fórmulas con κ en lugar de κ/2.
"""

from __future__ import annotations

import logging
from math import sqrt
from typing import Optional, Sequence, Union

import numpy as np
from django.conf import settings

from apps.base.excepciones import ErrorModelo
from apps.base.services.operadores import (
    OperatorMatrix,
    embed_slots,
    expectation,
    propagador_para,
)
from apps.modelo.services.sistema import Observable, SystemModel
from apps.reservorio.services.correlaciones import norma_desplazamiento
from apps.reservorio.services.fock import FockMode, campo, certificar_truncamiento, estado_vacio
from apps.reservorio.services.gaussiano import CampoGaussiano, DiscretizedField

logger = logging.getLogger(__name__)

ANCILLA = "ancilla"
LITERAL = "literal"
CONVENCIONES = (ANCILLA, LITERAL)


def _factor(convencion: str) -> float:
    """Varianza efectiva del acoplamiento en unidades de κ."""
    if convencion not in CONVENCIONES:
        raise ValueError(f"Convención desconocida: {convencion}")
    return 1.0 if convencion == ANCILLA else 2.0


def kappa(model: SystemModel, lam: Optional[float] = None) -> float:
    """κ = λ² μ_S(G²)."""
    lam = model.coupling if lam is None else lam
    particula = model.particula(1)
    return float(lam**2 * np.real(np.trace(particula.mu.entries @ particula.G.entries @ particula.G.entries)))


def _verificar(model: SystemModel):
    if not model.symmetric:
        raise ErrorModelo("La resumación requiere un modelo simétrico")
    if not model.energy_conserving:
        raise ErrorModelo("La resumación requiere [G, h] = 0 (‖[G, h]‖ > 1e−12)")


def energy_conserving_limit(
    model: SystemModel,
    A_r: Union[Observable, OperatorMatrix],
    t: Union[float, Sequence[float]],
    convencion: str = ANCILLA,
    corte: Optional[int] = None,
):
    """μ_HO ⊗ μ_r(e^{itH} (1 ⊗ A_r) e^{−itH}) con el oscilador auxiliar truncado."""
    _verificar(model)
    c = sqrt(_factor(convencion) * kappa(model))
    corte = corte or int(getattr(settings, "MFD_CORTE_ANCILLA", 40))
    ancilla = FockMode(corte, 0.0)
    reservorio = model.reservoir
    dims = (ancilla.dim,) + tuple(reservorio.dims)
    slots_r = tuple(range(1, len(dims)))

    H = embed_slots(reservorio.hamiltoniano(), slots_r, dims)
    if c != 0.0:
        acople = campo(ancilla, 1.0).kron(reservorio.operador_B(1))
        H = H + embed_slots(acople, (0,) + slots_r, dims).escalar(c)
    matriz = A_r.matriz_reservorio(reservorio) if isinstance(A_r, Observable) else A_r
    A = embed_slots(matriz, slots_r, dims)
    rho = estado_vacio(ancilla).kron(reservorio.densidad())
    propagador = propagador_para(OperatorMatrix(dims, H.entries, hermitian=True))
    slots_fock = (0,) + tuple(s + 1 for s in reservorio.slots_fock(0))

    def en_t(s):
        rho_t = propagador.schrodinger(rho, float(s))
        certificar_truncamiento(rho_t, slots_fock)
        return expectation(rho_t, A)

    if np.ndim(t) == 0:
        return en_t(t)
    return np.array([en_t(s) for s in t], dtype=complex)


def esperanza_weyl(estado: CampoGaussiano, f) -> complex:
    """μ(W(f)) = e^{i√2 Re⟨f, α⟩} e^{−Σ|f_k|²(1 + 2n̄_k)/4}."""
    f = np.asarray(f, dtype=complex)
    gaussiana = np.exp(-0.25 * np.sum(np.abs(f) ** 2 * (1.0 + 2.0 * estado.ocupaciones)))
    if estado.medias is None:
        return complex(gaussiana)
    fase = np.sqrt(2.0) * np.real(np.sum(np.conj(f) * estado.medias))
    return complex(gaussiana * np.exp(1j * fase))


def weyl_limit(
    field: DiscretizedField,
    h,
    kappa_valor: float,
    t: float,
    estado: Optional[CampoGaussiano] = None,
    convencion: str = ANCILLA,
) -> complex:
    """e^{−(κ/2)X²}·μ_r(W(e^{iωt}h)), X = Re⟨g, (1 − e^{iωt})h/ω⟩.

    `h` son amplitudes en la base de modos, como las de B = φ(√w g)."""
    h = np.asarray(h, dtype=complex)
    omega = field.frecuencias
    estado = estado or CampoGaussiano.vacio(omega)
    X = float(np.real(np.sum(np.conj(field.amplitudes) * (1.0 - np.exp(1j * omega * t)) * h / omega)))
    amortiguamiento = np.exp(-0.5 * _factor(convencion) * kappa_valor * X**2)
    return complex(amortiguamiento * esperanza_weyl(estado, np.exp(1j * omega * t) * h))


def number_limit(
    field: DiscretizedField, kappa_valor: float, t, N0: float = 0.0, convencion: str = ANCILLA
):
    """N(t) = N₀ + (κ/2)‖(e^{iωt} − 1)g/ω‖²."""
    factor = 0.5 * _factor(convencion) * kappa_valor
    if np.ndim(t) == 0:
        return N0 + factor * norma_desplazamiento(field, float(t))
    return np.array([N0 + factor * norma_desplazamiento(field, float(s)) for s in t])
