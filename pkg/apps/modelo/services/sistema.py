"""Especificación del sistema de N partículas acopladas a un reservorio común.

    H_N = Σ_j h_j + H_r + (λ/√N) Σ_j G_j ⊗ B_j

Los factores tensoriales se ordenan así: partículas 1..N y después los
factores del reservorio (un modo de Fock por factor, o los factores del
reservorio acotado).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from math import prod
from typing import Optional, Sequence, Union

import numpy as np

from apps.base.excepciones import ErrorDimension, ErrorHermiticidad, ErrorModelo
from apps.base.services.operadores import OperatorMatrix
from apps.base.services.presets import (
    estado_diagonal,
    estado_gibbs,
    estado_mixto,
    hamiltoniano_espin,
    matriz_preset,
    tridiagonal,
)
from apps.reservorio.services.correlaciones import (
    correlation_coherent,
    correlation_thermal,
    correlation_vacuum,
)
from apps.reservorio.services.fock import (
    FockMode,
    campo_multimodo,
    estado_coherente,
    estado_gibbs as gibbs_fock,
    estado_vacio,
    hamiltoniano_libre,
    numero_total,
)
from apps.reservorio.services.gaussiano import (
    IDENTIDAD,
    NUMERO,
    PRODUCTO_CAMPOS,
    CampoGaussiano,
    CorrelationFunction,
    DiscretizedField,
    ObservableCampo,
)

logger = logging.getLogger(__name__)

TOL_CONSERVATIVO = 1e-12

VACIO = "vacuum"
TERMICO = "thermal"
COHERENTE = "coherent"
ESTADOS_RESERVORIO = (VACIO, TERMICO, COHERENTE)


@dataclass(frozen=True, eq=False)
class ParticleSpec:
    """(h_j, G_j, μ_j) de una partícula."""

    h: OperatorMatrix
    G: OperatorMatrix
    mu: OperatorMatrix

    def __post_init__(self):
        if not (self.h.hermitian and self.G.hermitian):
            raise ErrorHermiticidad("h_j y G_j deben ser hermíticos")
        if not self.mu.density:
            raise ErrorHermiticidad("μ_j debe ser una densidad")
        if not (len(self.h.dims) == 1 and self.h.dims == self.G.dims == self.mu.dims):
            raise ErrorDimension(
                f"h, G y μ de una partícula deben compartir un único factor: "
                f"{self.h.dims}, {self.G.dims}, {self.mu.dims}"
            )

    @property
    def dim(self) -> int:
        return self.h.dims[0]

    @property
    def energia_conservada(self) -> bool:
        return self.G.conmutador(self.h).norma() <= TOL_CONSERVATIVO

    def misma_que(self, otra: "ParticleSpec") -> bool:
        return self is otra or all(
            a.dims == b.dims and np.array_equal(a.entries, b.entries)
            for a, b in ((self.h, otra.h), (self.G, otra.G), (self.mu, otra.mu))
        )


@dataclass(frozen=True, eq=False)
class ReservoirSpec:
    """Campo discretizado truncado en Fock con su estado inicial.

    `alfas` son los autovalores de a_k (a_k|ψ⟩ = α_k|ψ⟩) del estado coherente.
    `acoplamientos` da amplitudes por partícula (se recorren cíclicamente);
    si falta, todas las partículas se acoplan a φ(√w g)."""

    campo: DiscretizedField
    cortes: tuple
    estado: str = VACIO
    beta: Optional[float] = None
    alfas: tuple = ()
    acoplamientos: Optional[tuple] = None

    gaussiano = True

    def __post_init__(self):
        cortes = tuple(int(c) for c in np.broadcast_to(self.cortes, (len(self.campo),)))
        if self.estado not in ESTADOS_RESERVORIO:
            raise ValueError(f"Estado de reservorio desconocido: {self.estado}")
        if self.estado == TERMICO and (self.beta is None or self.beta <= 0):
            raise ValueError("El estado térmico necesita β > 0")
        alfas = tuple(complex(a) for a in self.alfas)
        if self.estado == COHERENTE and len(alfas) != len(self.campo):
            raise ErrorDimension("Un estado coherente necesita una amplitud por modo")
        acoplamientos = None
        if self.acoplamientos is not None:
            acoplamientos = tuple(np.asarray(f, dtype=complex) for f in self.acoplamientos)
            if not acoplamientos or any(f.shape != (len(self.campo),) for f in acoplamientos):
                raise ErrorDimension("Cada acoplamiento necesita una amplitud por modo")
        object.__setattr__(self, "cortes", cortes)
        object.__setattr__(self, "alfas", alfas)
        object.__setattr__(self, "acoplamientos", acoplamientos)

    @classmethod
    def un_modo(cls, omega: float, corte: int, g: complex = 1.0, **estado) -> "ReservoirSpec":
        return cls(DiscretizedField.un_modo(omega, g), (corte,), **estado)

    @property
    def modos(self) -> list[FockMode]:
        return [FockMode(c, w) for c, w in zip(self.cortes, self.campo.frecuencias)]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.cortes)

    @property
    def frecuencias(self) -> np.ndarray:
        return self.campo.frecuencias

    @property
    def compartido(self) -> bool:
        return self.acoplamientos is None or len(self.acoplamientos) == 1

    def indice_B(self, j: int) -> int:
        return 0 if self.acoplamientos is None else (j - 1) % len(self.acoplamientos)

    def amplitud(self, j: int = 1) -> np.ndarray:
        if self.acoplamientos is None:
            return self.campo.amplitudes
        return self.acoplamientos[self.indice_B(j)]

    def hamiltoniano(self) -> OperatorMatrix:
        return hamiltoniano_libre(self.modos)

    def operador_B(self, j: int = 1) -> OperatorMatrix:
        return campo_multimodo(self.modos, self.amplitud(j))

    def densidad(self) -> OperatorMatrix:
        entradas = np.ones((1, 1), dtype=complex)
        for k, modo in enumerate(self.modos):
            if self.estado == TERMICO:
                factor = gibbs_fock(modo, self.beta)
            elif self.estado == COHERENTE:
                factor = estado_coherente(modo, self.alfas[k])
            else:
                factor = estado_vacio(modo)
            entradas = np.kron(entradas, factor.entries)
        return OperatorMatrix(self.dims, entradas, density=True)

    def estado_gaussiano(self) -> CampoGaussiano:
        if self.estado == TERMICO:
            return CampoGaussiano.termico(self.frecuencias, self.beta)
        if self.estado == COHERENTE:
            return CampoGaussiano.coherente(self.frecuencias, self.alfas)
        return CampoGaussiano.vacio(self.frecuencias)

    def correlacion(self, j: int = 1) -> CorrelationFunction:
        campo = (
            self.campo
            if self.acoplamientos is None
            else DiscretizedField(self.frecuencias, self.amplitud(j))
        )
        if self.estado == TERMICO:
            return correlation_thermal(campo, self.beta)
        if self.estado == COHERENTE:
            return correlation_coherent(campo, self.alfas)
        return correlation_vacuum(campo)

    def matriz_observable(self, campo: ObservableCampo) -> OperatorMatrix:
        """A_r truncado en Fock a partir de su descripción gaussiana."""
        if campo.tipo == IDENTIDAD:
            return OperatorMatrix.identidad(self.dims)
        if campo.tipo == NUMERO:
            return numero_total(self.modos)
        if campo.tipo == PRODUCTO_CAMPOS:
            producto = OperatorMatrix.identidad(self.dims)
            for h in campo.amplitudes:
                producto = producto @ campo_multimodo(self.modos, h)
            return producto
        raise ValueError("El observable excluido no tiene matriz")

    def slots_fock(self, desplazamiento: int) -> tuple[int, ...]:
        return tuple(range(desplazamiento, desplazamiento + len(self.cortes)))


@dataclass(frozen=True, eq=False)
class ReservorioAcotado:
    """Reservorio de dimensión finita con B_j acotados."""

    H_r: OperatorMatrix
    B: tuple
    rho: OperatorMatrix

    gaussiano = False

    def __post_init__(self):
        B = (self.B,) if isinstance(self.B, OperatorMatrix) else tuple(self.B)
        if not B or any(not b.hermitian or b.dims != self.H_r.dims for b in B):
            raise ErrorDimension("Los B_j deben ser hermíticos y vivir en el espacio de H_r")
        if not self.H_r.hermitian or not self.rho.density or self.rho.dims != self.H_r.dims:
            raise ErrorHermiticidad("H_r hermítico y ρ_r densidad con las mismas dims")
        object.__setattr__(self, "B", B)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.H_r.dims

    @property
    def compartido(self) -> bool:
        return len(self.B) == 1

    def indice_B(self, j: int) -> int:
        return (j - 1) % len(self.B)

    def hamiltoniano(self) -> OperatorMatrix:
        return self.H_r

    def operador_B(self, j: int = 1) -> OperatorMatrix:
        return self.B[self.indice_B(j)]

    def densidad(self) -> OperatorMatrix:
        return self.rho

    @property
    def g_r(self) -> float:
        return max(b.norma() for b in self.B)

    def matriz_observable(self, campo: ObservableCampo) -> OperatorMatrix:
        if campo.tipo == IDENTIDAD:
            return OperatorMatrix.identidad(self.dims)
        raise ValueError("Un reservorio acotado solo admite A_r explícito como matriz")

    def slots_fock(self, desplazamiento: int) -> tuple[int, ...]:
        return ()


Reservorio = Union[ReservoirSpec, ReservorioAcotado]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Partículas, reservorio y acoplamiento λ.

    Con una sola entrada en `particles` todas las partículas son idénticas
    (sistema simétrico) y el modelo vale para cualquier N."""

    particles: tuple
    reservoir: Reservorio
    coupling: float = 0.0

    def __post_init__(self):
        particulas = tuple(self.particles)
        if not particulas:
            raise ErrorModelo("El modelo necesita al menos una partícula")
        if not np.isfinite(self.coupling):
            raise ValueError("λ debe ser finito")
        object.__setattr__(self, "particles", particulas)
        object.__setattr__(self, "coupling", float(self.coupling))

    def particula(self, j: int) -> ParticleSpec:
        """Especificación de la partícula j (desde 1)."""
        if len(self.particles) == 1:
            return self.particles[0]
        if not 1 <= j <= len(self.particles):
            raise ErrorDimension(f"El modelo define {len(self.particles)} partículas, se pidió la {j}")
        return self.particles[j - 1]

    def admite(self, N: int) -> bool:
        return len(self.particles) == 1 or N <= len(self.particles)

    @property
    def symmetric(self) -> bool:
        primera = self.particles[0]
        return self.reservoir.compartido and all(p.misma_que(primera) for p in self.particles[1:])

    @property
    def g(self) -> float:
        return max(p.G.norma() for p in self.particles)

    @property
    def energy_conserving(self) -> bool:
        return all(p.energia_conservada for p in self.particles)

    def dims(self, N: int) -> tuple[int, ...]:
        return tuple(self.particula(j).dim for j in range(1, N + 1)) + tuple(self.reservoir.dims)

    def dimension(self, N: int) -> int:
        return prod(self.dims(N))

    def con_acoplamiento(self, lam: float) -> "SystemModel":
        return replace(self, coupling=lam)

    def con_reservorio(self, reservorio: Reservorio) -> "SystemModel":
        return replace(self, reservoir=reservorio)


@dataclass(frozen=True, eq=False)
class Observable:
    """A = A_S ⊗ A_r con A_S sobre las partículas 1..n.

    `campo` describe A_r para los caminos gaussianos; `reservorio` da la
    matriz explícita (reservorio acotado, operadores de Weyl...). Si ambos
    faltan A_r es la identidad."""

    sistema: Optional[OperatorMatrix] = None
    reservorio: Optional[OperatorMatrix] = None
    campo: Optional[ObservableCampo] = None

    @property
    def n(self) -> int:
        return 0 if self.sistema is None else len(self.sistema.dims)

    @property
    def matriz_sistema(self) -> OperatorMatrix:
        return self.sistema if self.sistema is not None else OperatorMatrix((), np.ones((1, 1)), hermitian=True)

    @property
    def campo_efectivo(self) -> Optional[ObservableCampo]:
        """Descripción gaussiana de A_r, o None si solo hay matriz."""
        if self.campo is not None:
            return self.campo
        return ObservableCampo.identidad() if self.reservorio is None else None

    @property
    def solo_sistema(self) -> bool:
        return self.reservorio is None and (self.campo is None or self.campo.tipo == IDENTIDAD)

    def matriz_reservorio(self, reservorio: Reservorio) -> OperatorMatrix:
        if self.reservorio is not None:
            if self.reservorio.dims != tuple(reservorio.dims):
                raise ErrorDimension("A_r no vive en el espacio del reservorio")
            return self.reservorio
        return reservorio.matriz_observable(self.campo_efectivo)

    def completo(self, reservorio: Reservorio) -> OperatorMatrix:
        return self.matriz_sistema.kron(self.matriz_reservorio(reservorio))

    @property
    def hermitico(self) -> bool:
        hermitico_r = self.reservorio.hermitian if self.reservorio is not None else (
            self.campo is None or self.campo.tipo in (IDENTIDAD, NUMERO) or len(self.campo.amplitudes) == 1
        )
        return self.matriz_sistema.hermitian and hermitico_r


def _espin(omega0: float, G: Union[str, OperatorMatrix], mu: OperatorMatrix) -> ParticleSpec:
    G = matriz_preset(G) if isinstance(G, str) else G
    return ParticleSpec(hamiltoniano_espin(omega0), G, mu)


def modelo_espin(
    omega0: float, beta: float, reservorio: Reservorio, lam: float = 0.0, G="pauli-x"
) -> SystemModel:
    """Espines h = ω₀σ_z/2 en estado de Gibbs, G = σ_x por defecto."""
    mu = estado_gibbs(hamiltoniano_espin(omega0), beta)
    return SystemModel((_espin(omega0, G, mu),), reservorio, lam)


def modelo_dicke(omega0: float, p: float, reservorio: Reservorio, lam: float = 0.0) -> SystemModel:
    """h = ω₀σ_z/2, G = σ_x y μ = p|↑⟩⟨↑| + (1−p)|↓⟩⟨↓|."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p debe estar en [0, 1]")
    return SystemModel((_espin(omega0, "pauli-x", estado_diagonal([p, 1.0 - p])),), reservorio, lam)


def modelo_defasaje(omega0: float, reservorio: Reservorio, lam: float = 0.0) -> SystemModel:
    """Modelo conservativo: G = σ_z conmuta con h y μ_S = 𝟙/2."""
    return SystemModel((_espin(omega0, "pauli-z", estado_mixto(2)),), reservorio, lam)


def modelo_tridiagonal(
    energias: Sequence[float], saltos: Sequence[float], beta: float, reservorio: Reservorio, lam: float = 0.0
) -> SystemModel:
    h, G = tridiagonal(energias, saltos)
    return SystemModel((ParticleSpec(h, G, estado_gibbs(h, beta)),), reservorio, lam)
