import math
import unittest

import numpy as np

from src.bloques import (
    CertificadoSed, MatrizBloques, ajustar_sed, ajustar_sed_a_tasa, bloque, cota_lambda_max_bloques,
    norma_espectral, normas_bloque, perfil_fila, perfil_normas, reensamblar, verificar_certificado,
    verificar_producto_sed,
)
from src.constantes import GAMMA_CAP
from src.errores import EntradaInvalida, ErrorDimensiones, ErrorNumerico, IndiceInvalido, TopologiaInvalida
from src.topologia import construir_ciclo, construir_grilla, desde_lista_aristas


def matriz_exponencial(T, tasa=1.0):
    """X_ij = e^{-tasa·dist(i,j)} sobre bloques 1×1."""
    D = np.asarray(T.distancia, dtype=float)
    return MatrizBloques(np.exp(-tasa * D), T.dims_estado, T.dims_estado)


class TestMatrizBloques(unittest.TestCase):
    def test_particion_incompatible(self):
        with self.assertRaises(ErrorDimensiones):
            MatrizBloques(np.zeros((3, 3)), (1, 1), (1, 2))

    def test_bloque_y_reensamblar(self):
        X = MatrizBloques(np.arange(16.0).reshape(4, 4), (1, 3), (2, 2))
        np.testing.assert_array_equal(bloque(X, 1, 0), np.arange(16.0).reshape(4, 4)[1:, :2])
        bloques = [[bloque(X, i, j) for j in range(2)] for i in range(2)]
        np.testing.assert_array_equal(reensamblar(bloques, (1, 3), (2, 2)).datos, X.datos)

    def test_bloque_fuera_de_rango(self):
        X = MatrizBloques(np.eye(2), (1, 1), (1, 1))
        with self.assertRaises(IndiceInvalido):
            bloque(X, 2, 0)

    def test_normas_bloque_particion_mixta(self):
        rng = np.random.default_rng(3)
        X = MatrizBloques(rng.standard_normal((5, 5)), (2, 3), (3, 2))
        normas = normas_bloque(X)
        for i in range(2):
            for j in range(2):
                self.assertAlmostEqual(normas[i, j], np.linalg.norm(bloque(X, i, j), 2), places=12)

    def test_normas_bloque_uniforme(self):
        rng = np.random.default_rng(4)
        X = MatrizBloques(rng.standard_normal((6, 6)), (2, 2, 2), (2, 2, 2))
        self.assertAlmostEqual(normas_bloque(X)[2, 1], np.linalg.norm(X.datos[4:6, 2:4], 2), places=12)

    def test_norma_no_finita(self):
        with self.assertRaises(ErrorNumerico):
            norma_espectral(np.array([[1.0, np.nan]]))

    def test_cota_lambda_max_bloques(self):
        rng = np.random.default_rng(5)
        Y = rng.standard_normal((6, 6))
        X = MatrizBloques(Y + Y.T, (2, 2, 2), (2, 2, 2))
        self.assertGreaterEqual(cota_lambda_max_bloques(X), np.linalg.eigvalsh(X.datos)[-1] - 1e-12)


class TestPerfiles(unittest.TestCase):
    def test_perfil_normas(self):
        T = construir_ciclo(6)
        perfil = perfil_normas(matriz_exponencial(T), T)
        self.assertEqual([d for d, _ in perfil], [0, 1, 2, 3])
        for d, p in perfil:
            self.assertAlmostEqual(p, math.exp(-d), places=14)

    def test_perfil_fila(self):
        T = construir_ciclo(6)
        fila = perfil_fila(matriz_exponencial(T), T, 2)
        self.assertEqual(len(fila), 6)
        self.assertEqual(fila[5][:2], (5, 3))

    def test_fila_fuera_de_rango(self):
        T = construir_ciclo(4)
        with self.assertRaises(IndiceInvalido):
            perfil_fila(matriz_exponencial(T), T, 4)


class TestCertificados(unittest.TestCase):
    def test_envolvente_exponencial(self):
        T = construir_ciclo(8)
        cert = ajustar_sed(matriz_exponencial(T, 0.7), T, "envolvente")
        self.assertAlmostEqual(cert.c, 1.0)
        self.assertAlmostEqual(cert.gamma, 0.7, places=5)
        self.assertEqual(cert.max_violacion, 0.0)
        self.assertFalse(cert.limitado_por_soporte)

    def test_regresion_exponencial(self):
        T = construir_ciclo(8)
        cert = ajustar_sed(matriz_exponencial(T, 0.7), T, "regresion")
        self.assertAlmostEqual(cert.gamma, 0.7, places=10)
        self.assertAlmostEqual(cert.c, 1.0, places=10)
        self.assertLess(cert.max_violacion, 1e-9)

    def test_regresion_bajo_el_piso(self):
        T = construir_ciclo(4)
        X = MatrizBloques(1e-15 * np.eye(4), T.dims_estado, T.dims_estado)
        cert = ajustar_sed(X, T, "regresion")
        self.assertAlmostEqual(cert.c, 1e-15, delta=1e-27)
        self.assertEqual(cert.gamma, GAMMA_CAP)
        self.assertTrue(cert.limitado_por_soporte)
        self.assertEqual(cert.modo, "regresion")
        self.assertEqual(verificar_certificado(X, T, cert), 0.0)

    def test_envolvente_eleva_c(self):
        T = construir_ciclo(5)
        X = np.eye(5)
        X[0, 2] = X[2, 0] = 3.0
        cert = ajustar_sed(MatrizBloques(X, T.dims_estado, T.dims_estado), T)
        self.assertEqual(cert.c, 3.0)
        self.assertEqual(verificar_certificado(MatrizBloques(X, T.dims_estado, T.dims_estado), T, cert), 0.0)

    def test_matriz_nula(self):
        T = construir_ciclo(4)
        cert = ajustar_sed(MatrizBloques(np.zeros((4, 4)), T.dims_estado, T.dims_estado), T)
        self.assertTrue(cert.degenerado)
        self.assertEqual(cert.c, 0.0)
        self.assertTrue(math.isinf(cert.gamma))

    def test_diagonal_limitada_por_soporte(self):
        T = construir_ciclo(4)
        cert = ajustar_sed(MatrizBloques(2 * np.eye(4), T.dims_estado, T.dims_estado), T)
        self.assertTrue(cert.limitado_por_soporte)
        self.assertEqual(cert.gamma, GAMMA_CAP)

    def test_topologia_no_conexa(self):
        T = desde_lista_aristas(3, [(0, 1)], [1] * 3, [1] * 3)
        with self.assertRaises(TopologiaInvalida):
            ajustar_sed(MatrizBloques(np.eye(3), T.dims_estado, T.dims_estado), T)

    def test_modo_desconocido(self):
        T = construir_ciclo(4)
        with self.assertRaises(EntradaInvalida):
            ajustar_sed(matriz_exponencial(T), T, "otro")

    def test_ajuste_a_tasa(self):
        T = construir_ciclo(6)
        cert = ajustar_sed_a_tasa(matriz_exponencial(T, 1.0), T, 0.5)
        self.assertAlmostEqual(cert.c, 1.0)
        self.assertEqual(cert.max_violacion, 0.0)

    def test_como_fila(self):
        fila = CertificadoSed(2.0, 0.5, 0.0).como_fila("K")
        self.assertEqual(fila, {"name": "K", "c": 2.0, "gamma": 0.5, "max_violation": 0.0, "mode": "envolvente"})


class TestProductoSed(unittest.TestCase):
    def test_producto_cumple(self):
        T = construir_ciclo(6)
        X = matriz_exponencial(T)
        cert = CertificadoSed(1.0, 1.0, 0.0)
        self.assertTrue(verificar_producto_sed(X, X, cert, cert, T))

    def test_certificado_demasiado_chico(self):
        T = construir_grilla(1, 1)
        X = MatrizBloques(np.array([[2.0]]), (1,), (1,))
        cert = CertificadoSed(1.0, 1.0, 0.0)
        self.assertFalse(verificar_producto_sed(X, X, cert, cert, T))

    def test_tasas_distintas(self):
        T = construir_ciclo(4)
        X = matriz_exponencial(T)
        with self.assertRaises(EntradaInvalida):
            verificar_producto_sed(X, X, CertificadoSed(1.0, 1.0, 0.0), CertificadoSed(1.0, 0.5, 0.0), T)


if __name__ == '__main__':
    unittest.main()
