import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.base.excepciones import ErrorDimension, ErrorHermiticidad
from apps.base.services.operadores import (
    OperatorMatrix,
    ProductState,
    embed,
    embed_slots,
    expectation,
    heisenberg,
    partial_trace,
    propagador_para,
)
from apps.base.services.presets import (
    estado_diagonal,
    estado_gibbs,
    hamiltoniano_espin,
    matriz_preset,
    tridiagonal,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


class EmbedTests(SimpleTestCase):
    """embed coloca el factor en su slot y deja identidades en el resto."""

    def test_embed_en_segundo_slot(self):
        sx = matriz_preset("pauli-x")
        assert_allclose(embed(sx, 1, (2, 2)).entries, np.kron(np.eye(2), SX))

    def test_embed_slots_permutados(self):
        op = OperatorMatrix.de_arreglo(np.kron(SX, SZ), dims=(2, 2), hermitian=True)
        # op actúa sobre (slot 1, slot 0): el primer factor va al slot 1
        assert_allclose(embed_slots(op, (1, 0), (2, 2)).entries, np.kron(SZ, SX))

    def test_embed_en_espacio_mixto(self):
        op = matriz_preset("pauli-z")
        esperado = np.kron(np.kron(np.eye(3), SZ), np.eye(4))
        assert_allclose(embed(op, 1, (3, 2, 4)).entries, esperado)

    def test_slot_fuera_de_rango(self):
        with self.assertRaises(ErrorDimension):
            embed(matriz_preset("pauli-x"), 2, (2, 2))

    def test_dimension_incompatible(self):
        with self.assertRaises(ErrorDimension):
            embed(matriz_preset("pauli-x"), 0, (3, 2))

    def test_producto_con_dims_distintas(self):
        with self.assertRaises(ErrorDimension):
            matriz_preset("pauli-x") @ OperatorMatrix.identidad((3,))


class ValidacionMatrizTests(SimpleTestCase):
    def test_hermitica_falsa(self):
        with self.assertRaises(ErrorHermiticidad):
            OperatorMatrix.de_arreglo([[0, 1], [0, 0]], hermitian=True)

    def test_densidad_sin_traza_uno(self):
        with self.assertRaises(ErrorHermiticidad):
            OperatorMatrix.de_arreglo(np.eye(2), density=True)

    def test_densidad_no_positiva(self):
        with self.assertRaises(ErrorHermiticidad):
            OperatorMatrix.de_arreglo(np.diag([1.5, -0.5]), density=True)

    def test_entradas_inmutables(self):
        sx = matriz_preset("pauli-x")
        with self.assertRaises(ValueError):
            sx.entries[0, 0] = 1.0


class EvolucionTests(SimpleTestCase):
    def test_heisenberg_de_sigma_x(self):
        # σ_x(t) = cos(ω₀t)σ_x − sin(ω₀t)σ_y con h = ω₀σ_z/2
        omega0, t = 1.3, 0.7
        h = hamiltoniano_espin(omega0)
        evolucionado = heisenberg(h, matriz_preset("pauli-x"), t)
        assert_allclose(evolucionado.entries, np.cos(omega0 * t) * SX - np.sin(omega0 * t) * SY, atol=1e-12)

    def test_observable_conmutante_no_evoluciona(self):
        h = hamiltoniano_espin(2.0)
        assert_allclose(heisenberg(h, matriz_preset("pauli-z"), 5.0).entries, SZ, atol=1e-12)

    def test_schrodinger_conserva_traza(self):
        h = OperatorMatrix.de_arreglo(np.kron(SX, SX) + np.kron(SZ, np.eye(2)), dims=(2, 2), hermitian=True)
        rho = ProductState((estado_diagonal([0.7, 0.3]), estado_diagonal([0.2, 0.8]))).densidad()
        rho_t = propagador_para(h).schrodinger(rho, 1.1)
        self.assertAlmostEqual(rho_t.traza().real, 1.0, places=12)

    def test_imagen_de_heisenberg_igual_a_schrodinger(self):
        h = OperatorMatrix.de_arreglo(np.kron(SX, SZ) + 0.5 * np.kron(SZ, np.eye(2)), dims=(2, 2), hermitian=True)
        rho = ProductState((estado_diagonal([0.6, 0.4]), estado_diagonal([0.9, 0.1]))).densidad()
        A = embed(matriz_preset("pauli-x"), 0, (2, 2))
        propagador = propagador_para(h)
        heis = expectation(rho, propagador.heisenberg(A, 0.8))
        schr = expectation(propagador.schrodinger(rho, 0.8), A)
        self.assertAlmostEqual(heis, schr, places=12)

    def test_propagador_en_cache(self):
        h = hamiltoniano_espin(1.0)
        self.assertIs(propagador_para(h), propagador_para(h))

    def test_propagador_rechaza_no_hermitico(self):
        with self.assertRaises(ErrorHermiticidad):
            propagador_para(matriz_preset("sigma-mas"))


class TrazaParcialTests(SimpleTestCase):
    def test_traza_parcial_de_producto(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        B = np.array([[2.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 3.0]])
        op = OperatorMatrix.de_arreglo(np.kron(A, B), dims=(2, 3))
        assert_allclose(partial_trace(op, (0,)).entries, A * np.trace(B))
        assert_allclose(partial_trace(op, (1,)).entries, B * np.trace(A))

    def test_traza_total(self):
        op = OperatorMatrix.identidad((2, 3))
        self.assertEqual(partial_trace(op, ()).entries[0, 0], 6.0)

    def test_esperanza_en_estado_producto(self):
        estado = ProductState((estado_diagonal([1.0, 0.0]), estado_diagonal([0.25, 0.75])))
        A = embed(matriz_preset("pauli-z"), 1, (2, 2))
        self.assertAlmostEqual(expectation(estado, A), -0.5)


class PresetsTests(SimpleTestCase):
    def test_gibbs_a_temperatura_cero(self):
        # h = ω₀σ_z/2: el fundamental es |↓⟩ (índice 1)
        rho = estado_gibbs(hamiltoniano_espin(1.0), np.inf)
        assert_allclose(rho.entries, np.diag([0.0, 1.0]), atol=1e-14)

    def test_gibbs_poblaciones(self):
        beta, omega0 = 0.8, 1.5
        rho = estado_gibbs(hamiltoniano_espin(omega0), beta)
        arriba = np.exp(-beta * omega0 / 2) / (2 * np.cosh(beta * omega0 / 2))
        self.assertAlmostEqual(rho.entries[0, 0].real, arriba, places=12)

    def test_tridiagonal_con_saltos_mal_contados(self):
        with self.assertRaises(ErrorDimension):
            tridiagonal([0.0, 1.0, 2.0], [0.5])

    def test_preset_desconocido(self):
        with self.assertRaises(KeyError):
            matriz_preset("pauli-w")


def _hermitica_al_azar(generador, dims):
    n = int(np.prod(dims))
    M = generador.normal(size=(n, n)) + 1j * generador.normal(size=(n, n))
    return OperatorMatrix.de_arreglo(M + M.conj().T, dims=dims, hermitian=True)


class PropiedadesDinamicaTests(SimpleTestCase):
    """Ley de grupo, derivada en t y conmutación de slots distintos."""

    def setUp(self):
        generador = np.random.default_rng(11)
        self.H = _hermitica_al_azar(generador, (2, 3)).escalar(0.5)
        self.A = OperatorMatrix.de_arreglo(
            generador.normal(size=(6, 6)) + 1j * generador.normal(size=(6, 6)), dims=(2, 3)
        )
        self.rho = ProductState((estado_diagonal([0.7, 0.3]), estado_diagonal([0.5, 0.3, 0.2]))).densidad()

    def test_ley_de_grupo(self):
        for s, t in ((0.3, 0.9), (-1.2, 0.5), (2.0, -2.0)):
            compuesta = heisenberg(self.H, heisenberg(self.H, self.A, s), t)
            assert_allclose(compuesta.entries, heisenberg(self.H, self.A, s + t).entries, atol=1e-10)

    def test_derivada_por_diferencias_finitas(self):
        t, paso = 0.8, 1e-6
        adelante = expectation(self.rho, heisenberg(self.H, self.A, t + paso))
        atras = expectation(self.rho, heisenberg(self.H, self.A, t - paso))
        derivada = (adelante - atras) / (2 * paso)
        esperada = 1j * expectation(self.rho, self.H.conmutador(heisenberg(self.H, self.A, t)))
        self.assertAlmostEqual(derivada, esperada, places=6)

    def test_slots_distintos_conmutan(self):
        generador = np.random.default_rng(5)
        dims = (2, 3, 2)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            X = _hermitica_al_azar(generador, (dims[i],))
            Y = _hermitica_al_azar(generador, (dims[j],))
            conmutador = embed(X, i, dims).conmutador(embed(Y, j, dims))
            assert_allclose(conmutador.entries, np.zeros((12, 12)), atol=1e-12)
