import math
import unittest

import numpy as np

from src.errores import EntradaInvalida, ErrorUso, TopologiaInvalida
from src.sistemas import (
    SISTEMAS_INTEGRADOS, constantes_sed, construir_integrado, contraejemplo, ecuacion_calor, ecuacion_calor_estable,
    ejemplo_juguete, laplaciano, muestrear_capacitancias, red_sintetica, red_termica, sistema_oscilacion,
)
from src.topologia import construir_ciclo, desde_lista_aristas


class TestEcuacionCalor(unittest.TestCase):
    def test_autovalores_circulantes(self):
        n, eta = 8, 0.2
        problema = ecuacion_calor(n, eta)
        esperados = np.sort([1 - 2 * eta * (1 - math.cos(2 * math.pi * k / n)) for k in range(n)])
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(problema.A.datos)), esperados, atol=1e-10)

    def test_eta_fuera_de_rango(self):
        problema = ecuacion_calor(5, 0.3)
        self.assertIn("eta-fuera-de-rango", problema.advertencias)
        self.assertEqual(ecuacion_calor(5, 0.2).advertencias, ())

    def test_constantes(self):
        constantes = ecuacion_calor(6, 0.1).constantes_sed
        self.assertAlmostEqual(constantes["gamma_sys"], math.log(10))
        self.assertEqual(constantes["a"], 1.0)
        self.assertEqual(constantes["s"], 0.0)

    def test_variante_estable(self):
        problema = ecuacion_calor_estable(6, 0.1, 0.2, alpha=2.0)
        self.assertAlmostEqual(max(abs(np.linalg.eigvals(problema.A.datos))), math.exp(-0.2))
        np.testing.assert_array_equal(problema.R.datos, 2.0 * np.eye(6))

    def test_coeficientes_mal_dimensionados(self):
        with self.assertRaises(EntradaInvalida):
            ecuacion_calor(5, 0.1, b=[1.0, 1.0])

    def test_laplaciano(self):
        L = laplaciano(construir_ciclo(5))
        np.testing.assert_allclose(L.sum(axis=1), 0.0)
        self.assertEqual(L[0, 0], 2.0)


class TestContraejemplo(unittest.TestCase):
    def test_estructura(self):
        problema = contraejemplo(4, 1.1)
        B = problema.B.datos
        self.assertEqual(B[0, 1], 1.0)
        self.assertEqual(B[3, 0], 0.0)
        np.testing.assert_array_equal(problema.A.datos, 1.1 * np.eye(4))

    def test_necesita_dos_agentes(self):
        with self.assertRaises(TopologiaInvalida):
            contraejemplo(1, 1.1)

    def test_juguete(self):
        problema = ejemplo_juguete(5, 0.3)
        self.assertAlmostEqual(problema.A.datos[0, 0], math.exp(-0.3))
        self.assertEqual(problema.nombre, "toy-rho")


class TestRedTermica(unittest.TestCase):
    def test_capacitancias_reproducibles(self):
        v1, _ = muestrear_capacitancias(9, 7)
        v2, _ = muestrear_capacitancias(9, 7)
        np.testing.assert_array_equal(v1, v2)
        self.assertTrue(np.all(v1 > 0))

    def test_decaimiento_discretizacion(self):
        problema = red_termica(3, 3, dt=0.25, semilla=0)
        self.assertFalse(problema.informe_discretizacion["omitido"])
        self.assertTrue(problema.informe_discretizacion["cumple"])

    def test_capacitancias_recortadas(self):
        problema = red_termica(1, 2, capacitancias=[200.0, -5.0])
        self.assertIn("capacitancia-recortada", problema.advertencias)

    def test_parametros_invalidos(self):
        with self.assertRaises(EntradaInvalida):
            red_termica(2, 2, dt=0.0)


class TestOscilacion(unittest.TestCase):
    def test_red_sintetica_conexa_y_reproducible(self):
        T1, T2 = red_sintetica(30, 1), red_sintetica(30, 1)
        self.assertTrue(T1.conexa())
        self.assertEqual(T1.aristas, T2.aristas)
        self.assertEqual(len(T1.pesos), len(T1.aristas))

    def test_acoplamiento_por_defecto(self):
        # ω̇_0 = −k(θ_1 − θ_0)
        T = desde_lista_aristas(2, [(0, 1, 1e-6)], [1, 1], [1, 1])
        sistema = sistema_oscilacion(T, v_ref=100.0, inercia=1.0)
        k = 1e-6 * 100.0 ** 2
        self.assertAlmostEqual(sistema.A_c[1, 0], k)
        self.assertAlmostEqual(sistema.A_c[1, 2], -k)
        self.assertAlmostEqual(sistema.A_c[3, 2], k)
        self.assertGreater(max(np.linalg.eigvals(sistema.A_c).real), 0.0)

    def test_acoplamiento_restaurador(self):
        T = desde_lista_aristas(2, [(0, 1, 1e-6)], [1, 1], [1, 1])
        sistema = sistema_oscilacion(T, v_ref=100.0, inercia=1.0, restaurador=True)
        k = 1e-6 * 100.0 ** 2
        self.assertAlmostEqual(sistema.A_c[1, 0], -k)
        self.assertAlmostEqual(sistema.A_c[1, 2], k)
        # el modo nulo es un bloque de Jordan; sus autovalores numéricos se apartan ~√ε de 0
        self.assertLessEqual(max(np.linalg.eigvals(sistema.A_c).real), 1e-6)
        self.assertEqual(sistema.A_c[0, 1], 1.0)
        self.assertEqual(sistema.topologia.dims_estado, (2, 2))

    def test_susceptancia_no_positiva(self):
        with self.assertRaises(EntradaInvalida):
            sistema_oscilacion(construir_ciclo(4))


class TestRegistro(unittest.TestCase):
    def test_nombres(self):
        self.assertEqual(set(SISTEMAS_INTEGRADOS), {
            "heat-cycle", "heat-cycle-stable", "counterexample", "toy-rho", "thermal-grid", "swing-synthetic",
        })

    def test_desconocido(self):
        with self.assertRaises(ErrorUso):
            construir_integrado("no-existe")

    def test_parametros_nulos_toman_defecto(self):
        problema = construir_integrado("toy-rho", n=6, rho=None)
        self.assertAlmostEqual(problema.A.datos[0, 0], math.exp(-0.1))

    def test_heat_cycle_trae_K0(self):
        problema = construir_integrado("heat-cycle", n=5)
        np.testing.assert_array_equal(problema.K0, np.eye(5))

    def test_constantes_ajustadas(self):
        constantes = constantes_sed(contraejemplo(6, 0.9))
        self.assertGreater(constantes["gamma_sys"], 0.0)
        for clave in ("a", "b", "q", "r"):
            self.assertGreaterEqual(constantes[clave], 1.0)


if __name__ == '__main__':
    unittest.main()
