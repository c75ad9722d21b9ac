import math
import unittest

import numpy as np

from src.bloques import MatrizBloques, ajustar_sed, normas_bloque
from src.errores import EntradaInvalida, UmbralIndefinido
from src.lqr import CertificadoEstabilidad, ajustar_estabilidad, costo_lazo_cerrado, resolver_dare
from src.sistemas import contraejemplo, ecuacion_calor_estable
from src.topologia import construir_ciclo, desde_lista_aristas
from src.truncamiento import (
    barrido_brecha, cota_desempeno, cotas_error_truncamiento, diferencia_costo, informe_umbral, truncar,
    umbral_kappa,
)


class TestTruncar(unittest.TestCase):
    def setUp(self):
        self.T = construir_ciclo(6)
        self.K = MatrizBloques(np.arange(36, dtype=float).reshape(6, 6) + 1, (1,) * 6, (1,) * 6)

    def test_kappa_uno_deja_la_diagonal(self):
        recortada = truncar(self.K, self.T, 1)
        np.testing.assert_array_equal(recortada.datos, np.diag(np.diag(self.K.datos)))

    def test_vecinos(self):
        recortada = truncar(self.K, self.T, 2)
        D = np.asarray(self.T.distancia)
        np.testing.assert_array_equal(recortada.datos != 0, D <= 1)
        np.testing.assert_array_equal(recortada.datos[D <= 1], self.K.datos[D <= 1])

    def test_soporte_completo(self):
        recortada = truncar(self.K, self.T, self.T.diametro() + 1)
        np.testing.assert_array_equal(recortada.datos, self.K.datos)

    def test_kappa_invalido(self):
        with self.assertRaises(EntradaInvalida):
            truncar(self.K, self.T, 0)

    def test_componentes_inalcanzables(self):
        T = desde_lista_aristas(4, [(0, 1), (2, 3)], [1] * 4, [1] * 4)
        K = MatrizBloques(np.ones((4, 4)), (1,) * 4, (1,) * 4)
        recortada = truncar(K, T, 10)
        self.assertEqual(recortada.datos[0, 2], 0.0)
        self.assertEqual(recortada.datos[0, 1], 1.0)

    def test_bloques(self):
        T = construir_ciclo(4, 2, 1)
        K = MatrizBloques(np.ones((4, 8)), (1,) * 4, (2,) * 4)
        normas = normas_bloque(truncar(K, T, 1))
        np.testing.assert_allclose(normas, np.sqrt(2) * np.eye(4))


class TestCotas(unittest.TestCase):
    def setUp(self):
        self.problema = ecuacion_calor_estable(10, 0.1, 0.1)
        self.solucion = resolver_dare(self.problema)
        self.T = self.problema.topologia

    def test_error_de_truncamiento(self):
        cert_K = ajustar_sed(self.solucion.K, self.T, "envolvente")
        for kappa in range(1, self.T.diametro() + 2):
            errores = cotas_error_truncamiento(self.solucion.K, self.T, kappa, cert_K)
            self.assertTrue(errores["cumple"], f"kappa={kappa}")
            self.assertLessEqual(errores["cota_espectral_enunciado"], errores["cota_espectral"])
        self.assertEqual(errores["espectral"], 0.0)

    def test_umbral_indefinido(self):
        cert = CertificadoEstabilidad(tau=1.0, rho=0.5, horizonte=10)
        with self.assertRaises(UmbralIndefinido):
            umbral_kappa(cert, 1.0, 0.0, 1.0, 10)

    def test_umbral(self):
        cert = CertificadoEstabilidad(tau=1.0, rho=math.log(2), horizonte=10)
        self.assertEqual(umbral_kappa(cert, 0.0, 1.0, 1.0, 10), 1.0)
        # 2·1·1·√4·1/(1 − 1/2) = 8
        self.assertAlmostEqual(umbral_kappa(cert, 1.0, 0.5, 1.0, 4), math.log(8) / 0.5, places=12)

    def test_cota_de_desempeno(self):
        cert = CertificadoEstabilidad(tau=1.0, rho=math.log(2), horizonte=10)
        T = construir_ciclo(4)
        self.assertEqual(cota_desempeno(cert, 1.0, T, 0.0, 1.0, 2), 0.0)
        self.assertAlmostEqual(cota_desempeno(cert, 1.0, T, 1.0, 1.0, 2), 4 * 2 * math.exp(-2), places=12)

    def test_informe_umbral(self):
        A, B, _, _, _ = self.problema.matrices()
        cert = ajustar_estabilidad(A - B @ self.solucion.K.datos)
        cert_K = ajustar_sed(self.solucion.K, self.T, "envolvente")
        informe = informe_umbral(self.problema, self.solucion, cert, cert_K)
        self.assertTrue(informe["estable"])
        self.assertLessEqual(informe["kappa"], self.T.diametro() + 1)
        self.assertGreaterEqual(informe["kappa"], 1)


class TestBarrido(unittest.TestCase):
    def setUp(self):
        self.problema = ecuacion_calor_estable(10, 0.1, 0.1)
        self.solucion = resolver_dare(self.problema)
        self.diametro = self.problema.topologia.diametro()

    def test_filas_ordenadas(self):
        reportes = barrido_brecha(self.problema, self.solucion, range(1, self.diametro + 2), hilos=2)
        self.assertEqual([r.kappa for r in reportes], list(range(1, self.diametro + 2)))

    def test_soporte_completo_sin_brecha(self):
        reportes = barrido_brecha(self.problema, self.solucion, [self.diametro + 1])
        self.assertEqual(reportes[0].brecha, 0.0)
        self.assertTrue(reportes[0].estable)

    def test_brechas_no_negativas(self):
        for r in barrido_brecha(self.problema, self.solucion, range(1, self.diametro + 2)):
            if r.estable:
                self.assertGreaterEqual(r.brecha, -1e-9 * r.costo_optimo)
            else:
                self.assertEqual(r.costo_truncado, math.inf)

    def test_cota_sobre_el_umbral(self):
        for r in barrido_brecha(self.problema, self.solucion, range(1, self.diametro + 2)):
            if r.kappa >= r.umbral_kappa:
                self.assertTrue(r.estable)
                self.assertLessEqual(r.brecha, r.cota_desempeno * (1 + 1e-9) + 1e-12)

    def test_como_fila(self):
        fila = barrido_brecha(self.problema, self.solucion, [2])[0].como_fila()
        self.assertEqual(list(fila), ["kappa", "stable", "cost_trunc", "cost_opt", "gap", "bound", "threshold"])
        self.assertEqual(fila["kappa"], 2)

    def test_contraejemplo_estable_a_pesar_de_A(self):
        problema = contraejemplo(12, 1.1)
        solucion = resolver_dare(problema)
        reportes = barrido_brecha(problema, solucion, [problema.topologia.diametro() + 1])
        self.assertTrue(reportes[0].estable)
        self.assertAlmostEqual(reportes[0].costo_optimo, float(np.trace(solucion.P)), places=6)


class TestDiferenciaCosto(unittest.TestCase):
    def test_identidad_y_cota(self):
        problema = ecuacion_calor_estable(8, 0.1, 0.1)
        solucion = resolver_dare(problema)
        resultado = diferencia_costo(problema, solucion, 0.9 * solucion.K.datos)
        self.assertGreater(resultado["directa"], 0.0)
        self.assertAlmostEqual(resultado["directa"], resultado["identidad"],
                               delta=1e-8 * max(1.0, resultado["directa"]))
        self.assertTrue(resultado["cumple"])

    def test_sin_cambio(self):
        problema = ecuacion_calor_estable(6, 0.1, 0.1)
        solucion = resolver_dare(problema)
        resultado = diferencia_costo(problema, solucion, solucion.K)
        self.assertAlmostEqual(resultado["directa"], 0.0, places=12)
        self.assertAlmostEqual(resultado["identidad"], 0.0, places=12)
        self.assertAlmostEqual(costo_lazo_cerrado(problema, solucion.K), float(np.trace(solucion.P)), places=8)


if __name__ == '__main__':
    unittest.main()
