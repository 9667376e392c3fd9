import numpy as np
from django.test import SimpleTestCase

from apps.base.excepciones import CondicionA0Violada
from apps.base.utils import (
    SumaCompensada,
    pendiente_loglog,
    seno_sobre,
    sumar,
    uno_menos_coseno_sobre_cuadrado,
)


class SumaCompensadaTests(SimpleTestCase):
    def test_cancelacion_catastrofica(self):
        self.assertEqual(sumar([1e16, 1.0, -1e16]), 1.0)

    def test_partes_real_e_imaginaria(self):
        suma = SumaCompensada()
        for valor in (1e16j, 1.0 + 1.0j, -1e16j):
            suma.agregar(valor)
        self.assertEqual(suma.valor, 1.0 + 1.0j)

    def test_arreglos(self):
        total = sumar([np.array([1.0, 2.0]), np.array([0.5j, -2.0])], forma=(2,))
        np.testing.assert_allclose(total, [1.0 + 0.5j, 0.0])


class LimitesRemoviblesTests(SimpleTestCase):
    def test_seno_sobre_en_cero(self):
        self.assertAlmostEqual(float(seno_sobre(0.0, 2.5)), 2.5)

    def test_seno_sobre_continuo(self):
        x = 2e-4
        self.assertAlmostEqual(float(seno_sobre(x, 3.0)), np.sin(x * 3.0) / x, places=10)

    def test_uno_menos_coseno_en_cero(self):
        self.assertAlmostEqual(float(uno_menos_coseno_sobre_cuadrado(0.0, 2.0)), 2.0)

    def test_uno_menos_coseno_generico(self):
        self.assertAlmostEqual(float(uno_menos_coseno_sobre_cuadrado(0.7, 1.3)), (1 - np.cos(0.91)) / 0.49, places=12)


class PendienteTests(SimpleTestCase):
    def test_ley_de_potencia(self):
        x = np.array([2.0, 4.0, 8.0, 16.0])
        self.assertAlmostEqual(pendiente_loglog(x, 3.0 / x), -1.0, places=10)

    def test_puntos_insuficientes(self):
        self.assertIsNone(pendiente_loglog([1.0, 2.0], [0.0, 1.0]))


class ExcepcionesTests(SimpleTestCase):
    def test_condicion_a0_nombra_la_particula(self):
        error = CondicionA0Violada(3, 0.25)
        self.assertEqual(error.particula, 3)
        self.assertIn("partícula 3", str(error))
        self.assertIsInstance(error, ValueError)
