import unittest

import numpy as np

from src.errores import AristaInvalida, TopologiaInvalida
from src.topologia import construir_ciclo, construir_grilla, desde_lista_aristas, topologia_ciclica


class TestCiclo(unittest.TestCase):
    def test_distancias_ciclo(self):
        T = construir_ciclo(6)
        self.assertEqual(T.diametro(), 3)
        self.assertEqual(T.distancia[0, 3], 3)
        self.assertEqual(T.distancia[0, 5], 1)
        self.assertEqual(T.vecinos(0), [1, 5])
        self.assertTrue(T.conexa())
        self.assertTrue(T.verificar_metrica())

    def test_ciclo_necesita_tres_agentes(self):
        with self.assertRaises(TopologiaInvalida):
            construir_ciclo(2)

    def test_ciclo_de_dos_es_una_arista(self):
        T = topologia_ciclica(2)
        self.assertEqual(len(T.aristas), 1)
        self.assertEqual(T.diametro(), 1)

    def test_dimensiones(self):
        T = construir_ciclo(4, dim_estado=2, dim_entrada=1)
        self.assertEqual(T.n_x, 8)
        self.assertEqual(T.n_u, 4)

    def test_distancia_solo_lectura(self):
        T = construir_ciclo(5)
        with self.assertRaises(ValueError):
            T.distancia[0, 1] = 7


class TestGrilla(unittest.TestCase):
    def test_indices_y_diametro(self):
        T = construir_grilla(2, 3)
        self.assertEqual(T.n_agentes, 6)
        # agente (1, 2) = 1·3 + 2
        self.assertEqual(T.distancia[0, 5], 3)
        self.assertEqual(T.diametro(), 3)
        self.assertEqual(T.vecinos(4), [1, 3, 5])

    def test_grilla_vacia(self):
        with self.assertRaises(TopologiaInvalida):
            construir_grilla(0, 3)


class TestListaAristas(unittest.TestCase):
    def test_arista_fuera_de_rango(self):
        with self.assertRaises(AristaInvalida):
            desde_lista_aristas(3, [(0, 5)], [1] * 3, [1] * 3)

    def test_lazo(self):
        with self.assertRaises(AristaInvalida):
            desde_lista_aristas(3, [(1, 1)], [1] * 3, [1] * 3)

    def test_duplicadas_y_pesos(self):
        T = desde_lista_aristas(3, [(0, 1, 2.5), (1, 0), (1, 2)], [1] * 3, [1] * 3)
        self.assertEqual(len(T.aristas), 2)
        self.assertEqual(T.peso(1, 0), 2.5)
        self.assertEqual(T.peso(1, 2, defecto=-1.0), -1.0)

    def test_no_conexa(self):
        T = desde_lista_aristas(3, [(0, 1)], [1] * 3, [1] * 3)
        self.assertFalse(T.conexa())
        self.assertEqual(T.distancia[0, 2], -1)
        self.assertTrue(T.verificar_metrica())

    def test_dimensiones_inconsistentes(self):
        with self.assertRaises(TopologiaInvalida):
            desde_lista_aristas(3, [(0, 1)], [1] * 2, [1] * 3)

    def test_distancia_simetrica(self):
        T = desde_lista_aristas(5, [(0, 1), (1, 2), (2, 3), (3, 4)], [1] * 5, [1] * 5)
        np.testing.assert_array_equal(T.distancia, T.distancia.T)
        self.assertEqual(T.distancia[0, 4], 4)


if __name__ == '__main__':
    unittest.main()
