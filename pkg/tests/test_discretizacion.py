import unittest

import numpy as np
from scipy.linalg import expm

from src.discretizacion import (
    SistemaContinuo, discretizar, exponencial_matriz, integral_phi, verificar_decaimiento_discreto,
)
from src.errores import EntradaInvalida
from src.sistemas import laplaciano
from src.topologia import construir_ciclo


def phi_referencia(A, dt):
    n = A.shape[0]
    aumentada = np.zeros((2 * n, 2 * n))
    aumentada[:n, :n] = A
    aumentada[:n, n:] = np.eye(n)
    return expm(dt * aumentada)[:n, n:]


class TestExponencial(unittest.TestCase):
    def test_contra_expm(self):
        rng = np.random.default_rng(0)
        for escala in (0.1, 1.0, 5.0):
            A = escala * rng.standard_normal((6, 6))
            referencia = expm(A)
            np.testing.assert_allclose(exponencial_matriz(A), referencia, rtol=1e-8,
                                       atol=1e-10 * np.abs(referencia).max())

    def test_con_paso(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        np.testing.assert_allclose(exponencial_matriz(A, 0.5), expm(0.5 * A), atol=1e-13)

    def test_integral_serie_y_aumentada(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((4, 4))
        # dt·‖A‖₁ chico usa la serie; grande, la exponencial aumentada
        for dt in (1e-3, 2.0):
            referencia = phi_referencia(A, dt)
            np.testing.assert_allclose(integral_phi(A, dt), referencia, rtol=1e-8,
                                       atol=1e-10 * np.abs(referencia).max())

    def test_paso_no_positivo(self):
        with self.assertRaises(EntradaInvalida):
            integral_phi(np.eye(2), 0.0)


class TestDiscretizar(unittest.TestCase):
    def setUp(self):
        self.T = construir_ciclo(6)

    def sistema(self, escala):
        return SistemaContinuo(A_c=-escala * laplaciano(self.T), B_c=np.eye(6), Q_c=np.eye(6), R_c=np.eye(6),
                               topologia=self.T)

    def test_matrices_discretas(self):
        sistema = self.sistema(0.5)
        problema = discretizar(sistema, 0.1)
        np.testing.assert_allclose(problema.A.datos, expm(0.1 * sistema.A_c), atol=1e-13)
        np.testing.assert_allclose(problema.B.datos, phi_referencia(sistema.A_c, 0.1), atol=1e-13)
        np.testing.assert_allclose(problema.Q.datos, 0.1 * np.eye(6))
        self.assertTrue(problema.informe_discretizacion["cumple"])

    def test_Ac_nula(self):
        sistema = SistemaContinuo(A_c=np.zeros((6, 6)), B_c=2 * np.eye(6), Q_c=np.eye(6), R_c=np.eye(6),
                                  topologia=self.T)
        problema = discretizar(sistema, 0.5)
        np.testing.assert_array_equal(problema.A.datos, np.eye(6))
        np.testing.assert_allclose(problema.B.datos, np.eye(6))
        self.assertTrue(problema.informe_discretizacion["cumple"])

    def test_decaimiento_omitido(self):
        sistema = self.sistema(1.0)
        dt = 1.5 / np.linalg.norm(sistema.A_c, 2)
        informe = verificar_decaimiento_discreto(sistema, dt, discretizar(sistema, dt))
        self.assertTrue(informe["omitido"])
        self.assertIsNone(informe["cumple"])

    def test_constante_literal_se_informa(self):
        informe = discretizar(self.sistema(0.5), 0.1).informe_discretizacion
        self.assertIn("c_B_literal", informe)
        self.assertLess(informe["c_B_literal"], informe["c_B"])

    def test_acoplamiento_lejano(self):
        A_c = np.zeros((6, 6))
        A_c[0, 3] = 1.0
        with self.assertRaises(EntradaInvalida):
            SistemaContinuo(A_c=A_c, B_c=np.eye(6), Q_c=np.eye(6), R_c=np.eye(6), topologia=self.T)

    def test_paso_invalido(self):
        with self.assertRaises(EntradaInvalida):
            discretizar(self.sistema(0.5), -1.0)


if __name__ == '__main__':
    unittest.main()
