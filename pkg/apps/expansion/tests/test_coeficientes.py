import numpy as np
from django.test import SimpleTestCase

from apps.base.excepciones import CondicionA0Violada, ErrorDimension, ErrorModelo
from apps.base.services.presets import estado_diagonal, hamiltoniano_espin, matriz_preset
from apps.base.utils import pendiente_loglog
from apps.expansion.services.coeficientes import (
    X,
    Y,
    coefficient_X,
    coefficient_Y,
    limit_coefficient,
    tuplas_coeficiente,
    verificar_a0,
)
from apps.modelo.services.sistema import (
    COHERENTE,
    Observable,
    ParticleSpec,
    ReservoirSpec,
    SystemModel,
    modelo_defasaje,
    modelo_espin,
)
from apps.reservorio.services.gaussiano import DiscretizedField, ObservableCampo
from apps.wick.services.cotas import certify


def _modelo(lam=0.1, corte=6):
    return modelo_espin(1.0, 1.0, ReservoirSpec.un_modo(1.0, corte), lam)


class CondicionA0Tests(SimpleTestCase):
    def test_gibbs_con_sigma_x_la_cumple(self):
        verificar_a0(_modelo())

    def test_poblacion_pura_con_sigma_z_la_viola(self):
        polarizada = ParticleSpec(hamiltoniano_espin(1.0), matriz_preset("pauli-z"), estado_diagonal([1.0, 0.0]))
        sana = modelo_espin(1.0, 1.0, ReservoirSpec.un_modo(1.0, 4)).particles[0]
        model = SystemModel((sana, polarizada), ReservoirSpec.un_modo(1.0, 4), 0.1)
        with self.assertRaises(CondicionA0Violada) as contexto:
            verificar_a0(model, 2)
        self.assertEqual(contexto.exception.particula, 2)


class CoeficientesTests(SimpleTestCase):
    def setUp(self):
        self.A = Observable(sistema=matriz_preset("pauli-z"))

    def test_tuplas_simetricas_y_explicitas_pesan_igual(self):
        model = _modelo()
        # Tres acoplamientos iguales: mismos valores pero sin marcar el modelo como simétrico
        reservorio = ReservoirSpec(DiscretizedField.un_modo(1.0), (6,), acoplamientos=([1.0], [1.0], [1.0]))
        asimetrico = model.con_reservorio(reservorio)
        self.assertFalse(asimetrico.symmetric)
        for r, suma in ((2, 0), (2, 2), (4, 2), (3, 1)):
            simetricas = sum(peso for _, peso in tuplas_coeficiente(model, r, 1, suma, 3))
            explicitas = sum(peso for _, peso in tuplas_coeficiente(asimetrico, r, 1, suma, 3))
            self.assertEqual(simetricas, explicitas)

    def test_Y_nulo_en_vacio(self):
        # Órdenes impares: número impar de campos en el vacío
        Y0 = coefficient_Y(0, 2, _modelo(), self.A, 1.0, 3)
        self.assertLess(abs(Y0.value), 1e-14)

    def test_sin_particulas_en_el_soporte(self):
        A = Observable(campo=ObservableCampo.numero())
        model = _modelo()
        self.assertEqual(coefficient_X(1, 2, model, A, 1.0, 4).value, 0)
        self.assertEqual(coefficient_Y(0, 2, model, A, 1.0, 3).value, 0)
        self.assertNotEqual(coefficient_X(0, 2, model, A, 1.0, 2).value, 0)

    def test_lambda_cero(self):
        X0 = coefficient_X(0, 2, _modelo(0.0), self.A, 1.0, 4)
        self.assertEqual(X0.value, 0)
        self.assertEqual(X0.error_bound, 0.0)

    def test_n_no_menor_que_N(self):
        A = Observable(sistema=matriz_preset("pauli-z").kron(matriz_preset("pauli-z")))
        with self.assertRaises(ErrorDimension):
            coefficient_X(0, 2, _modelo(), A, 1.0, 2)

    def test_ordenes_por_paridad(self):
        X1 = coefficient_X(1, 3, _modelo(), self.A, 1.0, 4)
        self.assertEqual(sorted(X1.ordenes), [2, 4])
        self.assertGreater(X1.tail, 0.0)


class LimiteTests(SimpleTestCase):
    def setUp(self):
        self.A = Observable(sistema=matriz_preset("pauli-z"))

    def test_X0_se_anula_en_observables_de_particula(self):
        X0 = limit_coefficient(X, 0, _modelo(0.2), self.A, 1.5, 4)
        self.assertLess(abs(X0.value), 1e-10)

    def test_coeficiente_finito_tiende_al_limite(self):
        model = _modelo(0.2)
        limite = limit_coefficient(X, 1, model, self.A, 1.0, 4).value
        brechas = [abs(coefficient_X(1, N, model, self.A, 1.0, 4).value - limite) for N in (10, 40, 160)]
        self.assertGreater(abs(limite), 1e-6)
        self.assertLess(brechas[1], brechas[0])
        self.assertLess(brechas[2], brechas[1])
        self.assertLess(brechas[2], 0.05 * abs(limite))

    def test_requiere_simetria(self):
        model = _modelo()
        otra = modelo_espin(2.0, 1.0, model.reservoir).particles[0]
        asimetrico = SystemModel((model.particles[0], otra), model.reservoir, 0.1)
        with self.assertRaises(ErrorModelo):
            limit_coefficient(Y, 0, asimetrico, self.A, 1.0, 3)

    def test_tipo_desconocido(self):
        with self.assertRaises(ValueError):
            limit_coefficient("Z", 0, _modelo(), self.A, 1.0, 2)


class CotaCertificadaTests(SimpleTestCase):
    """|X_{ν,N}| y |Y_{ν,N}| quedan bajo las cotas uniformes en N del certificado."""

    def setUp(self):
        self.A = Observable(sistema=matriz_preset("pauli-z"))

    def _verificar(self, model, coeficiente, cota):
        certificado = certify(model, self.A, t=1.0, nu_max=1)
        self.assertTrue(certificado.a1_ok)
        for nu in (0, 1):
            for N in (2, 3, 6):
                valor = coeficiente(nu, N, model, self.A, 1.0, 4, certificado=certificado)
                self.assertLessEqual(abs(valor.value), cota(certificado, nu))

    def test_X_en_vacio(self):
        self._verificar(_modelo(0.1), coefficient_X, lambda c, nu: c.cota_X(nu))

    def test_Y_en_estado_coherente(self):
        reservorio = ReservoirSpec.un_modo(1.0, 12, estado=COHERENTE, alfas=(0.4,))
        model = modelo_espin(1.0, 1.0, reservorio, 0.1)
        self._verificar(model, coefficient_Y, lambda c, nu: c.cota_Y(nu))


class ConvergenciaSimetricaTests(SimpleTestCase):
    """En el defasaje con A_r = N̂² el orden λ⁴ lleva E[s⁴] = 3 − 2/N, s = ΣG_j/√N."""

    def test_pendiente_menos_uno_en_N(self):
        reservorio = ReservoirSpec.un_modo(1.0, 6)
        model = modelo_defasaje(1.0, reservorio, 0.2)
        N2 = reservorio.matriz_observable(ObservableCampo.numero())
        A = Observable(reservorio=N2 @ N2)
        limite = limit_coefficient(X, 0, model, A, 1.5, 4).value
        Ns = [2, 4, 8, 16]
        brechas = [abs(coefficient_X(0, N, model, A, 1.5, 4).value - limite) for N in Ns]
        pendiente = pendiente_loglog(Ns, brechas)
        self.assertIsNotNone(pendiente)
        self.assertAlmostEqual(pendiente, -1.0, delta=0.3)
