from itertools import permutations
from math import factorial

import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from apps.base.excepciones import ErrorCuadratura
from apps.base.services.cuadratura import (
    MONTE_CARLO,
    NESTED_GAUSS,
    QuadratureSpec,
    integrate_simplex,
    muestras_simplex,
    nodos_simplex,
)


def _uno(nodos):
    return np.ones(nodos.shape[0])


class SimplexGaussTests(SimpleTestCase):
    """Gauss–Legendre anidado sobre t ≥ t₁ ≥ … ≥ t_r ≥ 0."""

    def test_volumen_del_simplex(self):
        for r in (1, 2, 3, 4):
            valor, _ = integrate_simplex(_uno, 1.7, r)
            self.assertAlmostEqual(valor.real, 1.7**r / factorial(r), places=12)

    def test_polinomio(self):
        # ∫₀^t dt₁ ∫₀^{t₁} dt₂ t₁t₂ = t⁴/8
        valor, error = integrate_simplex(lambda x: x[:, 0] * x[:, 1], 2.0, 2)
        self.assertAlmostEqual(valor.real, 2.0**4 / 8, places=12)
        self.assertLess(error, 1e-10)

    def test_nodos_ordenados(self):
        nodos, pesos = nodos_simplex(1.0, 3, 5)
        self.assertTrue(np.all(np.diff(nodos, axis=1) <= 0))
        self.assertAlmostEqual(pesos.sum(), 1.0 / 6.0, places=12)

    def test_t_cero(self):
        self.assertEqual(integrate_simplex(_uno, 0.0, 3), (0j, 0.0))

    def test_profundidad_invalida(self):
        with self.assertRaises(ValueError):
            integrate_simplex(_uno, 1.0, 0)

    def test_sin_convergencia(self):
        spec = QuadratureSpec(order=4, tolerance=1e-12, max_refinements=0)
        with self.assertRaises(ErrorCuadratura):
            integrate_simplex(lambda x: np.cos(50.0 * x[:, 0]), 3.0, 1, spec)

    def test_refinamiento_alcanza_tolerancia(self):
        spec = QuadratureSpec(order=8, tolerance=1e-9, max_refinements=3)
        valor, _ = integrate_simplex(lambda x: np.cos(5.0 * x[:, 0]), 3.0, 1, spec)
        self.assertAlmostEqual(valor.real, np.sin(15.0) / 5.0, places=9)

    @override_settings(MFD_BLOQUE_NODOS=7)
    def test_bloques_en_paralelo_igual_que_en_serie(self):
        f = lambda x: np.exp(1j * x[:, 0]) * x[:, 1]  # noqa: E731
        serie, _ = integrate_simplex(f, 1.2, 2, hilos=1)
        paralelo, _ = integrate_simplex(f, 1.2, 2, hilos=3)
        self.assertAlmostEqual(serie, paralelo, places=13)


class PoliticaOrdenTests(SimpleTestCase):
    def test_politica_por_profundidad(self):
        spec = QuadratureSpec()
        self.assertEqual(spec.para_orden(4).order, 12)
        self.assertEqual(spec.para_orden(6).order, 8)
        self.assertEqual(spec.para_orden(7).method, MONTE_CARLO)

    def test_orden_explicito_se_respeta(self):
        self.assertEqual(QuadratureSpec(order=5).para_orden(3).order, 5)

    def test_monte_carlo_sin_semilla(self):
        with self.assertRaises(ValueError):
            QuadratureSpec(method=MONTE_CARLO)

    def test_metodo_desconocido(self):
        with self.assertRaises(ValueError):
            QuadratureSpec(method="trapecio")


class MonteCarloTests(SimpleTestCase):
    def _spec(self, semilla=11):
        return QuadratureSpec(method=MONTE_CARLO, samples=200_000, seed=semilla, tolerance=1e-2)

    def test_muestras_ordenadas_y_reproducibles(self):
        a = muestras_simplex(2.0, 3, 100, 5)
        b = muestras_simplex(2.0, 3, 100, 5)
        assert_allclose(a, b)
        self.assertTrue(np.all(np.diff(a, axis=1) <= 0))

    def test_lineal(self):
        # ∫∫ t₁ sobre el símplex r=2 es t³/3
        valor, error = integrate_simplex(lambda x: x[:, 0], 1.5, 2, self._spec())
        self.assertLess(abs(valor.real - 1.5**3 / 3), 6 * error)

    def test_misma_semilla_mismo_valor(self):
        f = lambda x: np.sin(x[:, 0] - x[:, 1])  # noqa: E731
        self.assertEqual(integrate_simplex(f, 1.0, 2, self._spec()), integrate_simplex(f, 1.0, 2, self._spec()))

    def test_metodo_por_defecto(self):
        self.assertEqual(QuadratureSpec().method, NESTED_GAUSS)


def _no_simetrica(x):
    r = x.shape[1]
    pesos = np.array([1.0, -2.0, 0.5])[:r]
    return np.exp(x @ pesos) * np.cos(x[:, 0] * x[:, -1])


def _integral_en_cubo(f, t, r, orden=30):
    u, w = np.polynomial.legendre.leggauss(orden)
    u, w = 0.5 * t * (u + 1.0), 0.5 * t * w
    mallas = np.meshgrid(*([u] * r), indexing="ij")
    pesos = np.meshgrid(*([w] * r), indexing="ij")
    nodos = np.stack([m.ravel() for m in mallas], axis=1)
    return np.sum(np.prod(np.stack([p.ravel() for p in pesos], axis=1), axis=1) * f(nodos))


class SimetrizacionTests(SimpleTestCase):
    """Las r! copias permutadas del símplex recubren el cubo [0,t]^r."""

    def test_suma_sobre_permutaciones_es_el_cubo(self):
        t = 1.3
        for r in (2, 3):
            suma = sum(
                integrate_simplex(lambda x, p=list(p): _no_simetrica(x[:, p]), t, r)[0]
                for p in permutations(range(r))
            )
            assert_allclose(suma, _integral_en_cubo(_no_simetrica, t, r), rtol=1e-9)

    def test_integrando_simetrico_es_el_cubo_entre_r_factorial(self):
        t = 0.9
        simetrica = lambda x: np.prod(np.cos(x) + x, axis=1)  # noqa: E731
        for r in (2, 3):
            valor, _ = integrate_simplex(simetrica, t, r)
            assert_allclose(valor, (np.sin(t) + t**2 / 2) ** r / factorial(r), rtol=1e-10)
