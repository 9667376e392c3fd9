import numpy as np
from django.test import SimpleTestCase

from apps.base.excepciones import ErrorDimension
from apps.base.services.presets import matriz_preset
from apps.base.utils import pendiente_loglog
from apps.formas_cerradas.services.dicke import dicke_number_leading
from apps.formas_cerradas.services.orden_principal import leading_order
from apps.modelo.services.oraculo import evolve_expectation
from apps.modelo.services.sistema import (
    COHERENTE,
    Observable,
    ReservoirSpec,
    modelo_defasaje,
    modelo_dicke,
    modelo_espin,
)
from apps.reservorio.services.gaussiano import DiscretizedField, ObservableCampo

NUMERO = Observable(campo=ObservableCampo.numero())


class DickeTests(SimpleTestCase):
    def test_coincide_con_el_orden_principal(self):
        reservorio = ReservoirSpec.un_modo(1.4, 8)
        model = modelo_dicke(1.0, 0.7, reservorio, 0.1)
        for t in (0.6, 1.5):
            esperado = dicke_number_leading(reservorio.campo, 0.7, 1.0, 0.1, t)
            self.assertAlmostEqual(leading_order(model, NUMERO, 2, t).real, esperado, places=10)

    def test_oraculo_a_lambda_chico(self):
        reservorio = ReservoirSpec.un_modo(1.4, 8)
        model = modelo_dicke(1.0, 0.7, reservorio, 0.05)
        tiempos = [0.6, 1.5]
        exacto = evolve_expectation(model, 2, NUMERO, tiempos).real
        np.testing.assert_allclose(exacto, dicke_number_leading(reservorio.campo, 0.7, 1.0, 0.05, tiempos), rtol=2e-2)

    def test_resonancia(self):
        campo = DiscretizedField.un_modo(1.0)
        # Δ₋ = 0: el término de emisión crece como t²/2
        self.assertAlmostEqual(dicke_number_leading(campo, 1.0, 1.0, 0.1, 2.0), 0.01 * 2.0, places=12)

    def test_p_fuera_de_rango(self):
        with self.assertRaises(ValueError):
            dicke_number_leading(DiscretizedField.un_modo(1.0), -0.1, 1.0, 0.1, 1.0)


class OrdenPrincipalTests(SimpleTestCase):
    def test_defasaje_es_exacto_a_orden_lambda_cuadrado(self):
        lam = 0.3
        model = modelo_defasaje(1.0, ReservoirSpec.un_modo(1.0, 4), lam)
        for limite in (False, True):
            valor = leading_order(model, NUMERO, 3, 1.2, limite=limite)
            self.assertAlmostEqual(valor.real, lam**2 * (1 - np.cos(1.2)), places=10)

    def test_sin_campo_medio_solo_queda_la_base(self):
        model = modelo_espin(1.0, 1.0, ReservoirSpec.un_modo(1.0, 4), 0.2)
        valor = leading_order(model, Observable(sistema=matriz_preset("pauli-z")), 2, 1.0)
        self.assertAlmostEqual(valor, -np.tanh(0.5), places=12)

    def test_termino_lineal_con_estado_coherente(self):
        # μ_r(B) ≠ 0: el término λ/√N aparece y escala como N^{−1/2}
        reservorio = ReservoirSpec.un_modo(0.8, 6, estado=COHERENTE, alfas=(0.4,))
        model = modelo_espin(1.0, 2.0, reservorio, 0.1)
        A = Observable(sistema=matriz_preset("pauli-x"))
        base = leading_order(model.con_acoplamiento(0.0), A, 2, 1.3)
        desvio_2 = leading_order(model, A, 2, 1.3) - base
        desvio_8 = leading_order(model, A, 8, 1.3) - base
        self.assertGreater(abs(desvio_2), 1e-6)
        self.assertAlmostEqual(desvio_8 / desvio_2, 0.5, places=10)

    def test_n_no_menor_que_N(self):
        model = modelo_espin(1.0, 1.0, ReservoirSpec.un_modo(1.0, 4), 0.2)
        with self.assertRaises(ErrorDimension):
            leading_order(model, Observable(sistema=matriz_preset("pauli-z")), 1, 1.0)


class DickeSignoTests(SimpleTestCase):
    def test_no_negativo_en_p_y_t(self):
        campo = DiscretizedField([0.4, 1.0, 1.9], [1.0, 0.5j, 0.3], [0.2, 0.5, 0.3])
        tiempos = np.linspace(0.0, 20.0, 41)
        for p in np.linspace(0.0, 1.0, 6):
            numero = dicke_number_leading(campo, p, 1.0, 0.1, tiempos)
            self.assertTrue(np.all(numero >= 0.0))
            self.assertEqual(numero[0], 0.0)


class DickeRestoTests(SimpleTestCase):
    """Oráculo de seis espines menos el orden λ²: el resto es O(λ⁴)."""

    def test_exponente_del_resto(self):
        reservorio = ReservoirSpec.un_modo(1.1, 5)
        lams = [0.1, 0.05, 0.025]
        for p in (0.0, 0.5, 1.0):
            restos = []
            for lam in lams:
                model = modelo_dicke(1.0, p, reservorio, lam)
                oraculo = evolve_expectation(model, 6, NUMERO, 2.0).real
                restos.append(oraculo - dicke_number_leading(reservorio.campo, p, 1.0, lam, 2.0))
            self.assertGreaterEqual(pendiente_loglog(lams, restos), 3.5, p)
