"""Estados cuasilibres (gaussianos) de un campo bosónico discretizado.

Un operador lineal de campo se guarda como forma L = Σ_k x_k a_k + y_k a_k†.
Para estados invariantes gauge (vacío, Gibbs) desplazados por medias α_k
(coherentes):
    ⟨a_k a_l†⟩_c = δ_kl (1 + n̄_k),   ⟨a_k† a_l⟩_c = δ_kl n̄_k,   ⟨a_k⟩ = α_k.
Las formas admiten coeficientes por nodo (forma (m, K)) para evaluar muchos
tiempos a la vez.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from apps.base.excepciones import ErrorDimension

RAIZ2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DiscretizedField:
    """Modos (ω_k, g_k) con pesos de cuadratura w_k.

    La amplitud en la base de modos es f_k = √w_k g_k y el acoplamiento es
    B = φ(f)."""

    frecuencias: np.ndarray
    form_factor: np.ndarray
    pesos: np.ndarray = field(default=None)

    def __post_init__(self):
        frecuencias = np.atleast_1d(np.asarray(self.frecuencias, dtype=float))
        form_factor = np.atleast_1d(np.asarray(self.form_factor, dtype=complex))
        pesos = (
            np.ones_like(frecuencias)
            if self.pesos is None
            else np.atleast_1d(np.asarray(self.pesos, dtype=float))
        )
        if not (frecuencias.shape == form_factor.shape == pesos.shape) or frecuencias.size == 0:
            raise ErrorDimension("El campo necesita igual número (≥1) de frecuencias, pesos y g_k")
        if np.any(frecuencias <= 0) or not np.all(np.isfinite(frecuencias)):
            raise ValueError("Las frecuencias de un campo discretizado deben ser finitas y > 0")
        if np.any(pesos < 0) or not np.all(np.isfinite(pesos)):
            raise ValueError("Pesos de cuadratura inválidos")
        object.__setattr__(self, "frecuencias", frecuencias)
        object.__setattr__(self, "form_factor", form_factor)
        object.__setattr__(self, "pesos", pesos)

    @classmethod
    def un_modo(cls, omega: float, g: complex = 1.0) -> "DiscretizedField":
        return cls(np.array([omega]), np.array([g]))

    @property
    def modes(self):
        return list(zip(self.frecuencias.tolist(), self.form_factor.tolist()))

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.pesos) * self.form_factor

    @property
    def norma_cuadrada(self) -> float:
        return float(np.sum(self.pesos * np.abs(self.form_factor) ** 2))

    def __len__(self):
        return self.frecuencias.size


@dataclass(frozen=True, eq=False)
class FormaLineal:
    x: np.ndarray
    y: np.ndarray


def forma_campo(f, s, frecuencias) -> FormaLineal:
    """φ(e^{iωs} f): x = conj(f)e^{−iωs}/√2, y = f e^{iωs}/√2. `s` escalar o (m,)."""
    f = np.asarray(f, dtype=complex)
    fase = np.exp(1j * np.multiply.outer(np.asarray(s, dtype=float), frecuencias))
    return FormaLineal(x=np.conj(f) * np.conj(fase) / RAIZ2, y=f * fase / RAIZ2)


def forma_aniquilacion(k: int, K: int) -> FormaLineal:
    x = np.zeros(K, dtype=complex)
    x[k] = 1.0
    return FormaLineal(x=x, y=np.zeros(K, dtype=complex))


def forma_creacion(k: int, K: int) -> FormaLineal:
    y = np.zeros(K, dtype=complex)
    y[k] = 1.0
    return FormaLineal(x=np.zeros(K, dtype=complex), y=y)


@dataclass(frozen=True, eq=False)
class CampoGaussiano:
    """Estado cuasilibre del campo: ocupaciones n̄_k y medias α_k."""

    frecuencias: np.ndarray
    ocupaciones: np.ndarray
    medias: Optional[np.ndarray] = None

    def __post_init__(self):
        frecuencias = np.asarray(self.frecuencias, dtype=float)
        ocupaciones = np.asarray(self.ocupaciones, dtype=float)
        if frecuencias.shape != ocupaciones.shape:
            raise ErrorDimension("Una ocupación por modo")
        if np.any(ocupaciones < 0):
            raise ValueError("Ocupaciones negativas")
        medias = None
        if self.medias is not None:
            medias = np.asarray(self.medias, dtype=complex)
            if medias.shape != frecuencias.shape:
                raise ErrorDimension("Una media por modo")
            if not np.any(medias):
                medias = None
        object.__setattr__(self, "frecuencias", frecuencias)
        object.__setattr__(self, "ocupaciones", ocupaciones)
        object.__setattr__(self, "medias", medias)

    @classmethod
    def vacio(cls, frecuencias) -> "CampoGaussiano":
        frecuencias = np.asarray(frecuencias, dtype=float)
        return cls(frecuencias, np.zeros_like(frecuencias))

    @classmethod
    def termico(cls, frecuencias, beta: float) -> "CampoGaussiano":
        if beta <= 0:
            raise ValueError("β debe ser positivo")
        frecuencias = np.asarray(frecuencias, dtype=float)
        if np.isinf(beta):
            return cls.vacio(frecuencias)
        return cls(frecuencias, 1.0 / np.expm1(beta * frecuencias))

    @classmethod
    def coherente(cls, frecuencias, alfas) -> "CampoGaussiano":
        frecuencias = np.asarray(frecuencias, dtype=float)
        return cls(frecuencias, np.zeros_like(frecuencias), np.asarray(alfas, dtype=complex))

    @property
    def invariante_gauge(self) -> bool:
        return self.medias is None

    def conexo(self, L1: FormaLineal, L2: FormaLineal):
        """⟨L1 L2⟩ − ⟨L1⟩⟨L2⟩."""
        n = self.ocupaciones
        return np.sum(L1.x * L2.y * (1.0 + n) + L1.y * L2.x * n, axis=-1)

    def media(self, L: FormaLineal):
        if self.medias is None:
            return np.zeros(np.shape(L.x)[:-1], dtype=complex)
        return np.sum(L.x * self.medias + L.y * np.conj(self.medias), axis=-1)

    def dos_puntos(self, L1: FormaLineal, L2: FormaLineal):
        return self.conexo(L1, L2) + self.media(L1) * self.media(L2)


@dataclass(frozen=True, eq=False)
class CorrelationFunction:
    """C(s, s′) = μ_r(B(s)B(s′)) evaluable con broadcasting de numpy.

    Si se construyó desde un campo, guarda el estado gaussiano y la amplitud
    de acoplamiento, que permiten correlaciones cruzadas con otros campos."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str
    estado: Optional[CampoGaussiano] = None
    acoplamiento: Optional[np.ndarray] = None

    def __call__(self, s, s_prima):
        return self.evaluator(np.asarray(s, dtype=float), np.asarray(s_prima, dtype=float))

    def gram(self, tiempos) -> np.ndarray:
        tiempos = np.asarray(tiempos, dtype=float)
        return self(tiempos[:, None], tiempos[None, :])

    def forma_acoplamiento(self, s) -> FormaLineal:
        if self.estado is None:
            raise ValueError(f"La correlación '{self.label}' no tiene campo asociado")
        return forma_campo(self.acoplamiento, s, self.estado.frecuencias)

    def maximo(self, t: float, puntos: int = 64) -> float:
        """max_{0≤s≤s′≤t} |C(s,s′)| sobre una malla."""
        malla = np.linspace(0.0, t, max(2, puntos))
        return float(np.max(np.abs(self.gram(malla))))


IDENTIDAD = "identity"
PRODUCTO_CAMPOS = "field-product"
NUMERO = "number"
EXCLUIDO = "excluded-observable"
TIPOS_OBSERVABLE = (IDENTIDAD, PRODUCTO_CAMPOS, NUMERO, EXCLUIDO)


@dataclass(frozen=True, eq=False)
class ObservableCampo:
    """Descripción de A_r para los caminos gaussianos.

    - identity: A_r = 1.
    - field-product: A_r = φ(h₁)…φ(h_k), amplitudes en la base de modos.
    - number: A_r = N̂ = Σ_k a_k†a_k.
    - excluded-observable: A_r acotado arbitrario de norma `norma`; solo entra
      en las cotas (Cauchy–Schwarz), nunca en momentos exactos.
    """

    tipo: str = IDENTIDAD
    amplitudes: tuple = ()
    norma: Optional[float] = None

    def __post_init__(self):
        if self.tipo not in TIPOS_OBSERVABLE:
            raise ValueError(f"Tipo de observable de reservorio desconocido: {self.tipo}")
        if self.tipo == PRODUCTO_CAMPOS and not self.amplitudes:
            raise ValueError("Un producto de campos necesita al menos una amplitud")
        if self.tipo == EXCLUIDO and (self.norma is None or self.norma < 0):
            raise ValueError("El observable excluido necesita su norma")
        object.__setattr__(
            self, "amplitudes", tuple(np.asarray(h, dtype=complex) for h in self.amplitudes)
        )

    @classmethod
    def identidad(cls) -> "ObservableCampo":
        return cls(IDENTIDAD)

    @classmethod
    def campos(cls, *amplitudes) -> "ObservableCampo":
        return cls(PRODUCTO_CAMPOS, tuple(amplitudes))

    @classmethod
    def numero(cls) -> "ObservableCampo":
        return cls(NUMERO)

    @classmethod
    def excluido(cls, norma: float) -> "ObservableCampo":
        return cls(EXCLUIDO, norma=norma)

    def terminos(self, t: float, frecuencias) -> list[tuple[complex, list[FormaLineal]]]:
        """A_r(t) como suma de productos de formas lineales (libre en t)."""
        K = len(frecuencias)
        if self.tipo == IDENTIDAD:
            return [(1.0, [])]
        if self.tipo == PRODUCTO_CAMPOS:
            return [(1.0, [forma_campo(h, t, frecuencias) for h in self.amplitudes])]
        if self.tipo == NUMERO:
            return [(1.0, [forma_creacion(k, K), forma_aniquilacion(k, K)]) for k in range(K)]
        raise ValueError("El observable excluido no admite momentos exactos")
