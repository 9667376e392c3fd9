from django.test import SimpleTestCase

from apps.conmutadores.services.clases import (
    LIMITE_X,
    LIMITE_Y,
    IndexClass,
    canonica,
    conteo_limite,
    enumerate_class,
    enumerate_limit_classes,
    factorial_descendente,
    formas_canonicas,
    pares_nuevos,
    perfiles,
)


class ClasesTests(SimpleTestCase):
    def test_perfiles_cubren_todas_las_tuplas(self):
        for r, N in ((3, 2), (4, 3), (5, 2)):
            self.assertEqual(sum(c.miembros for c in perfiles(r, N)), N**r)

    def test_enumeracion_sin_repetir(self):
        clase = IndexClass((2, 1, 1))
        tuplas = list(enumerate_class(clase))
        self.assertEqual(len(tuplas), clase.miembros)
        self.assertEqual(len(set(tuplas)), 12)
        self.assertEqual(tuplas, sorted(tuplas))
        self.assertTrue(all(t.count(1) == 2 for t in tuplas))

    def test_perfil_negativo(self):
        with self.assertRaises(ValueError):
            IndexClass((1, -1))

    def test_clase_vacia(self):
        self.assertEqual(list(enumerate_class(IndexClass((0, 0)))), [()])

    def test_pares_nuevos(self):
        self.assertEqual(pares_nuevos(LIMITE_X, 6, 1), 2)
        self.assertEqual(pares_nuevos(LIMITE_Y, 5, 1), 1)
        with self.assertRaises(ValueError):
            pares_nuevos(LIMITE_X, 5, 1)
        with self.assertRaises(ValueError):
            pares_nuevos("Z", 4, 0)

    def test_clases_limite(self):
        tuplas = list(enumerate_limit_classes(LIMITE_X, 4, 1, (2,)))
        self.assertEqual(len(tuplas), conteo_limite(4, (2,), 1))
        self.assertEqual(len(tuplas), 6)
        self.assertTrue(all(t.count(2) == 2 for t in tuplas))
        with self.assertRaises(ValueError):
            list(enumerate_limit_classes(LIMITE_Y, 4, 1, (2,)))

    def test_canonica(self):
        self.assertEqual(canonica((5, 1, 5, 7), 1), (2, 1, 2, 3))
        self.assertEqual(canonica((3, 3, 2, 2), 0), (1, 1, 2, 2))

    def test_factorial_descendente(self):
        self.assertEqual(factorial_descendente(5, 2), 20)
        self.assertEqual(factorial_descendente(2, 3), 0)
        self.assertEqual(factorial_descendente(4, 0), 1)

    def test_formas_canonicas_pesan_lo_que_las_tuplas(self):
        # n = 1, perfil (1,), r = 3, N = 4: la partícula 1 una vez y un par sobre {2, 3, 4}
        formas = list(formas_canonicas(3, 1, (1,), N=4))
        self.assertEqual(sum(peso for _, peso in formas), 3 * 3)
        self.assertEqual({forma for forma, _ in formas}, {(1, 2, 2), (2, 1, 2), (2, 2, 1)})

    def test_formas_con_pares_exactos(self):
        formas = list(formas_canonicas(4, 0, (), exactamente_pares=True))
        self.assertEqual(sorted(f for f, _ in formas), [(1, 1, 2, 2), (1, 2, 1, 2), (1, 2, 2, 1)])
        self.assertTrue(all(peso == 1 for _, peso in formas))

    def test_formas_pares_cuentan_bloques_de_cuatro(self):
        # Sin exigir pares exactos aparece también (1, 1, 1, 1)
        formas = dict(formas_canonicas(4, 0, (), N=3))
        self.assertEqual(formas[(1, 1, 1, 1)], 3)
        self.assertEqual(formas[(1, 1, 2, 2)], 6)
