import numpy as np
from django.test import SimpleTestCase

from apps.base.services.operadores import heisenberg
from apps.modelo.services.sistema import COHERENTE, TERMICO, ReservoirSpec
from apps.reservorio.services.gaussiano import DiscretizedField, ObservableCampo
from apps.wick.services.momentos import numero_emparejamientos, suma_emparejamientos, wick_moment

TIEMPOS = [0.3, 1.1, 0.7, 0.2]


def _fock(reservorio, tiempos, posicion=None, A_r=None):
    """μ_r(B(t₁)…A_r…B(t_r)) con matrices truncadas."""
    H = reservorio.hamiltoniano()
    B = reservorio.operador_B()
    producto = np.eye(H.dim, dtype=complex)
    for k, s in enumerate(tiempos):
        if posicion == k:
            producto = producto @ A_r.entries
        producto = producto @ heisenberg(H, B, s).entries
    if posicion == len(tiempos):
        producto = producto @ A_r.entries
    return np.trace(reservorio.densidad().entries @ producto)


class EmparejamientosTests(SimpleTestCase):
    def test_cuenta_de_emparejamientos(self):
        for r in range(0, 9):
            total = suma_emparejamientos(r, lambda i, j: 1.0)
            self.assertEqual(total, numero_emparejamientos(r))
        self.assertEqual(numero_emparejamientos(6), 15)

    def test_con_medias_cuenta_involuciones(self):
        # Emparejamientos más singletes de 4 elementos: 10
        self.assertEqual(suma_emparejamientos(4, lambda i, j: 1.0, lambda i: 1.0), 10)


class WickMomentTests(SimpleTestCase):
    def test_vacio_contra_fock(self):
        reservorio = ReservoirSpec.un_modo(1.0, 8, g=0.7)
        esperado = _fock(reservorio, TIEMPOS)
        self.assertAlmostEqual(wick_moment(TIEMPOS, 0, reservorio.correlacion()), esperado, places=12)

    def test_termico_contra_fock(self):
        reservorio = ReservoirSpec.un_modo(1.0, 45, estado=TERMICO, beta=1.0)
        esperado = _fock(reservorio, TIEMPOS)
        self.assertAlmostEqual(wick_moment(TIEMPOS, 0, reservorio.correlacion()), esperado, places=9)

    def test_coherente_impar_contra_fock(self):
        reservorio = ReservoirSpec.un_modo(0.8, 40, estado=COHERENTE, alfas=(0.4 + 0.2j,))
        tiempos = TIEMPOS[:3]
        esperado = _fock(reservorio, tiempos)
        self.assertAlmostEqual(wick_moment(tiempos, 0, reservorio.correlacion()), esperado, places=9)

    def test_impares_nulos_en_vacio(self):
        reservorio = ReservoirSpec.un_modo(1.0, 6)
        self.assertEqual(wick_moment([0.1, 0.5, 0.9], 1, reservorio.correlacion()), 0)

    def test_numero_insertado(self):
        reservorio = ReservoirSpec.un_modo(1.0, 10)
        C = reservorio.correlacion()
        N = reservorio.matriz_observable(ObservableCampo.numero())
        for posicion in range(3):
            obtenido = wick_moment([0.2, 0.6], posicion, C, ObservableCampo.numero(), t_obs=0.4)
            self.assertAlmostEqual(obtenido, _fock(reservorio, [0.2, 0.6], posicion, N), places=12)

    def test_lote(self):
        reservorio = ReservoirSpec.un_modo(1.0, 8)
        C = reservorio.correlacion()
        lote = np.array([TIEMPOS, TIEMPOS[::-1]])
        valores = wick_moment(lote, 0, C)
        self.assertEqual(valores.shape, (2,))
        self.assertAlmostEqual(valores[1], wick_moment(TIEMPOS[::-1], 0, C), places=14)

    def test_excluido_no_tiene_momento(self):
        C = ReservoirSpec.un_modo(1.0, 4).correlacion()
        with self.assertRaises(ValueError):
            wick_moment([0.1, 0.2], 0, C, ObservableCampo.excluido(1.0))

    def test_posicion_fuera_de_rango(self):
        C = ReservoirSpec.un_modo(1.0, 4).correlacion()
        with self.assertRaises(ValueError):
            wick_moment([0.1, 0.2], 3, C)


class DosModosTests(SimpleTestCase):
    """Momentos de hasta ocho campos con dos modos, contra matrices de Fock."""

    campo = DiscretizedField([1.0, 1.7], [0.8, 0.5 + 0.2j])
    h1 = np.array([0.3, -0.6j])
    h2 = np.array([1.0 + 0.4j, 0.2])

    def _comparar(self, reservorio, tiempos, A_r_spec=None, t_obs=0.0, places=10):
        C = reservorio.correlacion()
        if A_r_spec is None:
            self.assertAlmostEqual(wick_moment(tiempos, 0, C), _fock(reservorio, tiempos), places=places)
            return
        A_r = heisenberg(reservorio.hamiltoniano(), reservorio.matriz_observable(A_r_spec), t_obs)
        for posicion in range(len(tiempos) + 1):
            esperado = _fock(reservorio, tiempos, posicion, A_r)
            obtenido = wick_moment(tiempos, posicion, C, A_r_spec, t_obs=t_obs)
            self.assertAlmostEqual(obtenido, esperado, places=places)

    def test_vacio_ocho_campos(self):
        # con corte 4 por modo los productos de hasta ocho campos son exactos en el vacío
        reservorio = ReservoirSpec(self.campo, (4, 4))
        self._comparar(reservorio, [0.3, 1.1, 0.7, 0.2, 0.9, 0.05, 1.4, 0.6])
        self._comparar(reservorio, [0.3, 1.1, 0.7, 0.2, 0.9, 0.05], ObservableCampo.campos(self.h1, self.h2), 0.5)
        self._comparar(
            reservorio, TIEMPOS, ObservableCampo.campos(self.h1, self.h2, self.h2, self.h1), 0.8
        )

    def test_vacio_impar_con_campo_insertado(self):
        reservorio = ReservoirSpec(self.campo, (4, 4))
        self._comparar(reservorio, [0.3, 1.1, 0.7], ObservableCampo.campos(self.h1), 0.2)

    def test_termico_seis_campos(self):
        reservorio = ReservoirSpec(self.campo, (18, 18), estado=TERMICO, beta=2.0)
        self._comparar(reservorio, TIEMPOS, ObservableCampo.campos(self.h1, self.h2), 0.4, places=8)
        self._comparar(reservorio, TIEMPOS[:2], ObservableCampo.numero(), 0.4, places=8)

    def test_coherente_cinco_campos(self):
        reservorio = ReservoirSpec(self.campo, (16, 16), estado=COHERENTE, alfas=(0.3, 0.2j))
        self._comparar(reservorio, TIEMPOS[:3], ObservableCampo.campos(self.h1, self.h2), 0.7, places=8)
