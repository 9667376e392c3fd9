"""Cotas de convergencia: β_r, b, S_ν y el certificado de un punto (λ, t).

    β_r = sup_{t_i∈[0,t]} max_{σ, posición} |μ_r(B(t_σ1)…[A_r(t)]…B(t_σr))|
    b   = limsup_r β_r^{1/r}/√r
    S_ν = Σ_{s≥δ_{ν0}} (2|λ|gt)^{2s}/s! · β_{2(ν+s)}

Los β analíticos vienen de Wick + Cauchy–Schwarz + Stirling para campos
gaussianos invariantes gauge; para reservorios acotados β_r = ‖A_r‖g_r^r.
Los supremos y limsup numéricos son siempre proxies sobre rangos finitos.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from math import ceil, e, exp, factorial, inf, isfinite, pi, sqrt
from typing import Callable, Optional, Union

import numpy as np
from django.conf import settings

from apps.base.services.operadores import propagador_para
from apps.modelo.services.sistema import VACIO, Observable, ReservorioAcotado, SystemModel
from apps.reservorio.services.gaussiano import (
    EXCLUIDO,
    IDENTIDAD,
    NUMERO,
    PRODUCTO_CAMPOS,
    CampoGaussiano,
    CorrelationFunction,
    ObservableCampo,
    forma_campo,
)
from apps.wick.services.momentos import wick_moment

logger = logging.getLogger(__name__)

MAX_TUPLAS_MALLA = 200_000
MUESTRAS_MALLA = 20_000
R_PROXY = 8
TERMINOS_S = 12


# Stirling: √(2π) n^{n+1/2} e^{−n} ≤ n! ≤ e n^{n+1/2} e^{−n}, n ≥ 1


def cotas_stirling(n: int) -> tuple[float, float]:
    base = n ** (n + 0.5) * exp(-n)
    return sqrt(2 * pi) * base, e * base


def cota_factorial_doble(n: int) -> float:
    """Cota superior de (2n)!/n!: (e/√π)(4/e)^n n^n."""
    return e / sqrt(pi) * (4 / e) ** n * float(n) ** n


def numero_pares(r: int) -> float:
    """r!/(2^{r/2}(r/2)!) emparejamientos."""
    if r % 2:
        return 0.0
    return factorial(r) / (2 ** (r // 2) * factorial(r // 2))


def constante_C(estado: CampoGaussiano, amplitudes, t: float, puntos: int = 64) -> float:
    """max_{f,f′} max_{s,s′∈[0,t]} |μ_r(φ(e^{ish}f) φ(e^{is′h}f′))| sobre una malla."""
    malla = np.linspace(0.0, t, max(2, puntos))
    frecuencias = estado.frecuencias
    maximo = 0.0
    for f in amplitudes:
        izquierda = forma_campo(f, malla[:, None], frecuencias)
        for f_prima in amplitudes:
            derecha = forma_campo(f_prima, malla[None, :], frecuencias)
            maximo = max(maximo, float(np.max(np.abs(estado.dos_puntos(izquierda, derecha)))))
    return maximo


def beta_analitica(
    r: int, campo: ObservableCampo, C: float, norma: float = 1.0, n0: Optional[int] = None
) -> float:
    """Cota superior de β_r para un campo gaussiano invariante gauge (inf si no hay)."""
    if r < 1:
        raise ValueError("β_r está definido para r ≥ 1")
    if campo.tipo == IDENTIDAD:
        return e / sqrt(pi) * norma * (C / e) ** (r / 2) * float(r) ** (r / 2)
    if campo.tipo == PRODUCTO_CAMPOS:
        m = r + len(campo.amplitudes)
        return e / sqrt(pi) * (C / e) ** (m / 2) * float(m) ** (m / 2)
    if campo.tipo == NUMERO:
        if n0 is None:
            return inf
        # ‖N̂ P(N ≤ n₀ + r/2)‖ = n₀ + r/2
        return (n0 + r / 2) * beta_analitica(r, ObservableCampo.identidad(), C)
    return cota_cauchy_schwarz(r, C, campo.norma if campo.tipo == EXCLUIDO else norma)


def cota_cauchy_schwarz(r: int, C: float, norma: float) -> float:
    """‖A‖(C/2)^{r/2} max_j {(2(j−1))!/(j−1)! · (2(r−j+1))!/(r−j+1)!}^{1/2}."""
    mejor = 0.0
    for ell in range(r + 1):
        mejor = max(
            mejor,
            sqrt(factorial(2 * ell) / factorial(ell) * factorial(2 * (r - ell)) / factorial(r - ell)),
        )
    return norma * (C / 2) ** (r / 2) * mejor


def malla_tiempos(t: float, r: int, puntos: int, semilla: int) -> np.ndarray:
    """Todas las r-tuplas de la malla si caben, si no una muestra Philox."""
    malla = np.linspace(0.0, t, max(2, puntos))
    if malla.size**r <= MAX_TUPLAS_MALLA:
        rejillas = np.meshgrid(*([malla] * r), indexing="ij")
        return np.stack([g.ravel() for g in rejillas], axis=1)
    generador = np.random.Generator(np.random.Philox(key=semilla + r))
    return generador.choice(malla, size=(MUESTRAS_MALLA, r))


def _maximo_en_malla(momento: Callable[[np.ndarray, int], np.ndarray], r, t, puntos, semilla) -> float:
    tiempos = malla_tiempos(t, r, puntos, semilla)
    return max(float(np.max(np.abs(momento(tiempos, posicion)))) for posicion in range(r + 1))


@dataclass
class CotaBeta:
    r: int
    malla: Optional[float]
    analitica: float

    @property
    def efectiva(self) -> float:
        """La analítica si es finita; si no, el proxy de malla."""
        if isfinite(self.analitica):
            return self.analitica
        return self.malla if self.malla is not None else inf


def beta_r(
    r: int,
    A_r_spec: ObservableCampo,
    C: CorrelationFunction,
    t: float,
    puntos: int = 8,
    n0: Optional[int] = None,
    semilla: Optional[int] = None,
) -> CotaBeta:
    """β_r por búsqueda en malla (cota inferior del supremo) junto a la cota analítica."""
    semilla = int(getattr(settings, "MFD_SEMILLA", 0)) if semilla is None else semilla
    amplitudes = [C.acoplamiento] if C.acoplamiento is not None else []
    if A_r_spec.tipo == PRODUCTO_CAMPOS:
        amplitudes += list(A_r_spec.amplitudes)
    constante = constante_C(C.estado, amplitudes, t) if C.estado is not None else C.maximo(t)
    if C.estado is not None and not C.estado.invariante_gauge:
        analitica = inf
    else:
        analitica = beta_analitica(r, A_r_spec, constante, n0=n0)
    malla = None
    if A_r_spec.tipo != EXCLUIDO:
        malla = _maximo_en_malla(
            lambda tiempos, posicion: wick_moment(tiempos, posicion, C, A_r_spec, t), r, t, puntos, semilla
        )
    return CotaBeta(r, malla, analitica)


def beta_r_acotado(r: int, reservorio: ReservorioAcotado, A_r, t: float, puntos: int = 8, semilla: int = 0) -> CotaBeta:
    """Reservorio acotado: malla con matrices y cota exacta ‖A_r‖ g_r^r."""
    propagador = propagador_para(reservorio.H_r)
    V, E = propagador.vectores, propagador.energias
    diferencias = E[:, None] - E[None, :]
    rho = V.conj().T @ reservorio.rho.entries @ V
    Bs = [V.conj().T @ b.entries @ V for b in reservorio.B]
    A = V.conj().T @ A_r.entries @ V * np.exp(1j * t * diferencias)

    def momento(tiempos, posicion):
        valores = np.zeros(tiempos.shape[0])
        for B in Bs:
            ops = [B[None] * np.exp(1j * np.multiply.outer(tiempos[:, k], diferencias)) for k in range(r)]
            ops.insert(posicion, np.broadcast_to(A, ops[0].shape))
            producto = ops[0]
            for M in ops[1:]:
                producto = producto @ M
            valores = np.maximum(valores, np.abs(np.einsum("ab,mba->m", rho, producto)))
        return valores

    malla = _maximo_en_malla(momento, r, t, puntos, semilla)
    return CotaBeta(r, malla, A_r.norma() * reservorio.g_r**r)


def b_estimate(betas: dict[int, float]) -> float:
    """max_r β_r^{1/r}/√r sobre el rango dado; un β infinito da b infinito."""
    valores = [b ** (1.0 / r) / sqrt(r) for r, b in betas.items() if r >= 1 and b > 0]
    return max(valores, default=0.0)


@dataclass
class ValorS:
    nu: float
    valor: float
    cola: float
    terminos: int

    @property
    def total(self) -> float:
        return self.valor + self.cola


def S_nu(
    nu: float,
    beta: Callable[[int], float],
    lam: float,
    g: float,
    t: float,
    s_max: int = TERMINOS_S,
    margen_A1: float = 0.0,
) -> ValorS:
    """Suma parcial de S_ν hasta s_max más una cola geométrica.

    `nu` puede ser semientero (S_{ν+1/2} usa β impares). La razón de la cola
    es el mayor entre margen_A1² y el cociente de los dos últimos términos."""
    dos_nu = int(round(2 * nu))
    x = (2 * abs(lam) * g * t) ** 2
    inicio = 1 if dos_nu == 0 else 0
    terminos = []
    for s in range(inicio, s_max + 1):
        terminos.append(x**s / factorial(s) * beta(dos_nu + 2 * s))
    valor = float(sum(terminos))
    if not isfinite(valor):
        return ValorS(nu, inf, inf, len(terminos))
    ultimo = terminos[-1] if terminos else 0.0
    if ultimo == 0.0:
        return ValorS(nu, valor, 0.0, len(terminos))
    cociente = terminos[-1] / terminos[-2] if len(terminos) >= 2 and terminos[-2] > 0 else 1.0
    q = max(margen_A1**2, cociente)
    cola = ultimo * q / (1 - q) if q < 1 else inf
    return ValorS(nu, valor, cola, len(terminos))


def cota_orden(r: int, beta_r_valor: float, lam: float, g: float, t: float, n: int, N: Optional[int], norma_AS: float) -> float:
    """Cota del orden r de la serie de Dyson, sumando los ν que aporta con su peso N^{−ν}.

    Con N = None se toman solo los términos del límite (ν = 0 en órdenes pares)."""
    base = norma_AS * (2 * abs(lam) * g * t) ** r * beta_r_valor
    if r % 2 == 0:
        if N is None:
            return base / factorial(r // 2)
        pesos = (
            n ** (2 * nu) * float(N) ** (-nu) / (factorial(r // 2 - nu) * factorial(2 * nu))
            for nu in range(r // 2 + 1)
        )
    else:
        if N is None:
            return 0.0
        pesos = (
            n ** (2 * nu + 1) * float(N) ** (-nu - 0.5) / (factorial((r - 1) // 2 - nu) * factorial(2 * nu + 1))
            for nu in range((r - 1) // 2 + 1)
        )
    return base * sum(pesos)


def cola_coeficiente(
    kind: str, nu: int, r_max: int, beta: Callable[[int], float], lam, g, t, n, norma_AS, terminos: int = 6
) -> float:
    """Cota de Σ_{r > r_max} de X_ν (kind 'X') o Y_ν (kind 'Y')."""
    total = 0.0
    previo = None
    q = 0.0
    impar = 1 if kind == "Y" else 0
    r = max(r_max + 1, 2 * nu + impar)
    if (r - impar) % 2:
        r += 1
    for _ in range(terminos):
        s = (r - impar) // 2 - nu
        termino = (
            norma_AS * n ** (2 * nu + impar) / factorial(2 * nu + impar)
            * (2 * abs(lam) * g * t) ** r * beta(r) / factorial(s)
        )
        if not isfinite(termino):
            return inf
        if previo:
            q = termino / previo
        total += termino
        previo = termino
        r += 2
    if previo:
        total += previo * q / (1 - q) if q < 1 else inf
    return total


@dataclass
class BoundCertificate:
    g: float
    lam: float
    t: float
    n: int
    b_estimate: float
    b_proxy: Optional[float]
    C: Optional[float]
    A1_margin: float
    radius_lower_bound: float
    S: dict = field(default_factory=dict)
    cotas_X: dict = field(default_factory=dict)
    cotas_Y: dict = field(default_factory=dict)
    thmbnd_margin: float = 0.0
    suficiente_valor: Optional[float] = None
    gaussiano: bool = True
    beta_analitica: bool = True
    a1_ok: bool = True
    suficiente_ok: Optional[bool] = None
    thmbnd_ok: bool = True
    beta: Callable[[int], float] = field(default=None, repr=False, compare=False)
    norma_AS: float = 1.0

    @property
    def certified(self) -> bool:
        if not self.a1_ok:
            return False
        if self.suficiente_ok is not None:
            return self.suficiente_ok
        return self.thmbnd_ok

    def cota_X(self, nu: int) -> float:
        return self.cotas_X.get(nu, inf)

    def cota_Y(self, nu: int) -> float:
        return self.cotas_Y.get(nu, inf)

    def as_dict(self) -> dict:
        datos = asdict(self)
        datos.pop("beta")
        datos["certified"] = self.certified
        datos["S"] = {str(k): asdict(v) for k, v in self.S.items()}
        datos["cotas_X"] = {str(k): v for k, v in self.cotas_X.items()}
        datos["cotas_Y"] = {str(k): v for k, v in self.cotas_Y.items()}
        return datos


def _fuente_beta(model: SystemModel, A: Observable, t: float, puntos: int):
    """(β(r), C, gaussiano, analítica, b analítico, b proxy) según el reservorio."""
    reservorio = model.reservoir
    if isinstance(reservorio, ReservorioAcotado):
        norma = A.matriz_reservorio(reservorio).norma()
        g_r = reservorio.g_r
        return (lambda r: norma * g_r**r), None, False, True, 0.0, None

    correlacion = reservorio.correlacion()
    estado = reservorio.estado_gaussiano()
    campo = A.campo_efectivo
    if campo is None:
        campo = ObservableCampo.excluido(A.matriz_reservorio(reservorio).norma())
    amplitudes = list(reservorio.acoplamientos or (reservorio.campo.amplitudes,))
    if campo.tipo == PRODUCTO_CAMPOS:
        amplitudes += list(campo.amplitudes)
    C = constante_C(estado, amplitudes, t)
    n0 = 0 if reservorio.estado == VACIO else None

    if estado.invariante_gauge and (campo.tipo != NUMERO or n0 is not None):
        return (lambda r: beta_analitica(r, campo, C, n0=n0)), C, True, True, sqrt(C / e), None

    if campo.tipo == EXCLUIDO:
        # |μ(X A Y)| ≤ ‖A‖ μ(XX*)^{1/2} μ(Y*Y)^{1/2}: momentos pares de campos a ambos lados
        campos, _ = _beta_por_malla(ObservableCampo.identidad(), correlacion, t, puntos)
        norma = campo.norma

        def beta(r):
            return norma * max(sqrt(campos(2 * j) * campos(2 * (r - j))) for j in range(r + 1))

        proxy = b_estimate({r: beta(r) for r in range(1, R_PROXY + 1)})
        return beta, C, estado.invariante_gauge, False, proxy, proxy

    beta, proxy = _beta_por_malla(campo, correlacion, t, puntos)
    return beta, C, estado.invariante_gauge, False, proxy, proxy


def _beta_por_malla(campo: ObservableCampo, correlacion: CorrelationFunction, t: float, puntos: int):
    """β_r por malla hasta R_PROXY y extrapolación (b√r)^r; β_0 = 1."""
    medidas = {}
    for r in range(1, R_PROXY + 1):
        malla = beta_r(r, campo, correlacion, t, puntos).malla
        medidas[r] = inf if malla is None else malla
    proxy = b_estimate(medidas)

    def beta(r):
        if r == 0:
            return 1.0
        return medidas[r] if r in medidas else (proxy * sqrt(r)) ** r

    return beta, proxy


def certify(
    model: SystemModel,
    A_r_spec: Union[Observable, ObservableCampo],
    lam: Optional[float] = None,
    t: float = 0.0,
    n: Optional[int] = None,
    nu_max: Optional[int] = None,
    s_max: int = TERMINOS_S,
    puntos: Optional[int] = None,
) -> BoundCertificate:
    """Margen (A1), radio R, cotas de X/Y, proxy de la condición sobre S_ν y
    la condición suficiente 16λ²g²t²C < 1 en el caso gaussiano."""
    A = A_r_spec if isinstance(A_r_spec, Observable) else Observable(campo=A_r_spec)
    lam = model.coupling if lam is None else float(lam)
    n = A.n if n is None else int(n)
    nu_max = int(getattr(settings, "MFD_NU_MAXIMO", 2)) if nu_max is None else nu_max
    g = model.g
    puntos = puntos or max(8, ceil(8 * abs(lam) * g * t))
    norma_AS = A.matriz_sistema.norma()

    beta, C, gaussiano, analitica, b, b_proxy = _fuente_beta(model, A, t, puntos)
    margen = 2 * sqrt(2 * e) * abs(lam) * g * t * b
    radio = inf if g * t * b == 0 else 1.0 / (2 * sqrt(2 * e) * g * t * b)

    certificado = BoundCertificate(
        g=g, lam=lam, t=t, n=n, b_estimate=b, b_proxy=b_proxy, C=C,
        A1_margin=margen, radius_lower_bound=radio, gaussiano=gaussiano,
        beta_analitica=analitica, beta=beta, norma_AS=norma_AS,
    )
    certificado.a1_ok = margen < 1
    for nu in range(nu_max + 1):
        S = S_nu(nu, beta, lam, g, t, s_max, margen)
        S_medio = S_nu(nu + 0.5, beta, lam, g, t, s_max, margen)
        certificado.S[nu] = S
        certificado.S[nu + 0.5] = S_medio
        x = 2 * n * abs(lam) * g * t
        certificado.cotas_X[nu] = norma_AS * x ** (2 * nu) / factorial(2 * nu) * S.total
        certificado.cotas_Y[nu] = norma_AS * x ** (2 * nu + 1) / factorial(2 * nu + 1) * S_medio.total

    if not gaussiano and analitica:
        # Reservorio acotado: S_ν ≤ ‖A_r‖ g_r^{2ν} e^{(2λ g g_r t)²}, la raíz ν-ésima sobre ν² tiende a 0
        certificado.thmbnd_margin = 0.0
    else:
        superior = max((nu for nu in range(1, nu_max + 1) if certificado.S[nu].total > 0), default=None)
        proxy = 0.0 if superior is None else certificado.S[superior].total ** (1.0 / superior) / superior**2
        certificado.thmbnd_margin = (n * e * abs(lam) * g * t) ** 2 * proxy
    certificado.thmbnd_ok = certificado.thmbnd_margin < 1
    if C is not None and gaussiano and analitica:
        certificado.suficiente_valor = 16 * lam**2 * g**2 * t**2 * C
        certificado.suficiente_ok = certificado.suficiente_valor < 1

    if certificado.certified:
        logger.info("Certificado (λ=%s, t=%s): margen A1 %.3f", lam, t, margen)
    else:
        logger.warning(
            "Régimen no certificado (λ=%s, t=%s): margen A1 %.3f, condición S %.3f",
            lam, t, margen, certificado.thmbnd_margin,
        )
    return certificado
