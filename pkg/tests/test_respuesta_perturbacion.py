import unittest

import numpy as np

from src.errores import EntradaInestable, EntradaInvalida
from src.bloques import MatrizBloques, ajustar_sed_a_tasa, verificar_producto_sed
from src.lqr import (
    SumaLyapunov, ajustar_estabilidad, certificado_comun, resolver_dare, resolver_lyapunov_G, verificar_decaimiento_G,
)
from src.problema import crear_problema
from src.respuesta_perturbacion import (
    brecha_primer_bloque, constantes_decaimiento_L, controlador_desde_apilado, costo_perturbacion, ensamblar,
    errores_neumann, horizonte_por_defecto, nucleo_costo_explicito, resolver_directo, resolver_neumann,
    verificar_cotas_autovalores, verificar_decaimiento_L, verificar_sed_mj,
)
from src.sistemas import constantes_sed, ecuacion_calor_estable, red_sintetica
from src.topologia import topologia_ciclica


def problema_escalar(a=0.5):
    return crear_problema([[a]], [[1.0]], [[1.0]], [[1.0]], None, topologia_ciclica(1))


def armar(problema, H):
    A, B, Q, _, _ = problema.matrices()
    solucion = resolver_dare(problema)
    G = resolver_lyapunov_G(A, Q)
    cert = certificado_comun(ajustar_estabilidad(A), ajustar_estabilidad(A - B @ solucion.K.datos))
    ds = ensamblar(problema, G, H, cert)
    return solucion, G, cert, ds


class TestEnsamblado(unittest.TestCase):
    def test_escalar_H2(self):
        _, _, _, ds = armar(problema_escalar(), 2)
        np.testing.assert_allclose(ds.M, [[7 / 3, 2 / 3], [2 / 3, 7 / 3]], rtol=1e-10)
        np.testing.assert_allclose(ds.J, [[2 / 3], [1 / 3]], rtol=1e-10)

    def test_solucion_directa_escalar(self):
        problema = problema_escalar()
        _, _, _, ds = armar(problema, 2)
        L = resolver_directo(ds, problema)
        np.testing.assert_allclose(L.apilado, [[-4 / 15], [-1 / 15]], rtol=1e-9)
        self.assertEqual(L.H, 2)
        self.assertLess(L.residuo, 1e-12)

    def test_nucleo_explicito(self):
        problema = ecuacion_calor_estable(4, 0.1, 0.1)
        _, G, _, ds = armar(problema, 3)
        nucleo = nucleo_costo_explicito(problema, G, 3)["nucleo"]
        n_x = problema.n_x
        np.testing.assert_allclose(nucleo[n_x:, n_x:], ds.M, atol=1e-10)
        np.testing.assert_allclose(nucleo[n_x:, :n_x], ds.J, atol=1e-10)
        np.testing.assert_allclose(nucleo[:n_x, :n_x], G.G, atol=1e-10)

    def test_nucleo_con_termino_cruzado(self):
        S = np.array([[0.2, 0.0], [0.0, 0.1]])
        problema = crear_problema(np.array([[0.5, 0.1], [0.1, 0.4]]), np.eye(2), np.eye(2), np.eye(2), S,
                                  topologia_ciclica(2))
        _, G, _, ds = armar(problema, 4)
        nucleo = nucleo_costo_explicito(problema, G, 4)["nucleo"]
        np.testing.assert_allclose(nucleo[2:, 2:], ds.M, atol=1e-10)
        np.testing.assert_allclose(nucleo[2:, :2], ds.J, atol=1e-10)

    def test_horizonte_invalido(self):
        problema = problema_escalar()
        G = resolver_lyapunov_G(problema.A, problema.Q)
        with self.assertRaises(EntradaInvalida):
            ensamblar(problema, G, 0)
        with self.assertRaises(EntradaInvalida):
            ensamblar(problema, G, 5001)

    def test_entrada_inestable(self):
        G = SumaLyapunov(G=np.eye(1), iteraciones=0, residuo=0.0)
        with self.assertRaises(EntradaInestable):
            ensamblar(problema_escalar(1.2), G, 2)


class TestHorizonte(unittest.TestCase):
    def test_por_defecto(self):
        self.assertEqual(horizonte_por_defecto(0.5, 10, 1), 6)

    def test_recortado(self):
        self.assertEqual(horizonte_por_defecto(1.0, 100, 100), 50)


class TestNeumann(unittest.TestCase):
    def setUp(self):
        self.problema = ecuacion_calor_estable(8, 0.1, 0.1)
        _, self.G, _, self.ds = armar(self.problema, 4)
        self.L = resolver_directo(self.ds, self.problema)

    def test_errores_bajo_la_cota(self):
        for t, error, cota in errores_neumann(self.ds, self.L, 100):
            self.assertLessEqual(error, cota * (1 + 1e-9) + 1e-12, f"t={t}")

    def test_converge_a_la_directa(self):
        aproximado = resolver_neumann(self.ds, self.problema, 2000, exacto=True)
        np.testing.assert_allclose(aproximado.apilado, self.L.apilado, atol=1e-8)

    def test_t_invalido(self):
        with self.assertRaises(EntradaInvalida):
            resolver_neumann(self.ds, self.problema, 0)


class TestCosto(unittest.TestCase):
    def test_controlador_nulo_da_traza_de_G(self):
        problema = problema_escalar()
        _, G, _, ds = armar(problema, 3)
        cero = controlador_desde_apilado(np.zeros_like(ds.J), 3, problema)
        self.assertAlmostEqual(costo_perturbacion(problema, G, ds, cero), 4 / 3, places=10)

    def test_horizonte_largo_alcanza_riccati(self):
        problema = problema_escalar()
        solucion, G, _, ds = armar(problema, 20)
        L = resolver_directo(ds, problema)
        costo = costo_perturbacion(problema, G, ds, L)
        self.assertAlmostEqual(costo, float(np.trace(solucion.P)), places=6)
        self.assertGreaterEqual(costo, float(np.trace(solucion.P)) - 1e-10)

    def test_costo_decrece_con_H(self):
        problema = problema_escalar()
        costos = []
        for H in (1, 2, 4):
            _, G, _, ds = armar(problema, H)
            costos.append(costo_perturbacion(problema, G, ds, resolver_directo(ds, problema)))
        self.assertAlmostEqual(costos[0], 4 / 3 - (4 / 9) / (7 / 3), places=10)
        self.assertGreater(costos[0], costos[1])
        self.assertGreater(costos[1], costos[2])

    def test_forma_incompatible(self):
        problema = problema_escalar()
        _, G, _, ds = armar(problema, 3)
        corto = controlador_desde_apilado(np.zeros((2, 1)), 2, problema)
        with self.assertRaises(EntradaInvalida):
            costo_perturbacion(problema, G, ds, corto)


class TestCotas(unittest.TestCase):
    def setUp(self):
        self.problema = ecuacion_calor_estable(8, 0.1, 0.1)
        self.solucion, self.G, self.cert, self.ds = armar(self.problema, 5)
        self.L = resolver_directo(self.ds, self.problema)

    def test_autovalores(self):
        informe = verificar_cotas_autovalores(self.ds)
        self.assertTrue(informe["cumple"])
        self.assertGreaterEqual(informe["lambda_min"], 1.0 - 1e-10)

    def test_autovalores_escalar(self):
        _, _, _, ds = armar(problema_escalar(), 2)
        informe = verificar_cotas_autovalores(ds)
        self.assertAlmostEqual(informe["lambda_min"], 5 / 3, places=12)
        self.assertAlmostEqual(informe["lambda_max"], 3.0, places=12)
        self.assertTrue(informe["cumple"])

    def test_brecha(self):
        brecha, cota = brecha_primer_bloque(self.solucion.K, self.L, self.problema, self.cert)
        self.assertLessEqual(brecha, cota)

    def test_brecha_escalar(self):
        problema = problema_escalar()
        solucion, _, cert, ds = armar(problema, 2)
        brecha, cota = brecha_primer_bloque(solucion.K, resolver_directo(ds, problema), problema, cert)
        self.assertAlmostEqual(brecha, abs(solucion.K.datos[0, 0] - 4 / 15), places=10)
        self.assertLessEqual(brecha, cota)

    def test_decaimiento_de_M_y_J(self):
        informe = verificar_sed_mj(self.ds, self.problema, constantes_sed(self.problema))
        self.assertTrue(informe["cumple"])
        self.assertIsNone(informe["infractor"])
        self.assertGreater(informe["gamma_M"], 0.0)

    def test_decaimiento_formal_de_L(self):
        formales = constantes_decaimiento_L(self.ds, self.problema, constantes_sed(self.problema))
        self.assertEqual(formales["c_K"], formales["c_L"])
        self.assertTrue(verificar_decaimiento_L(self.L, self.problema, formales))


def sistema_aleatorio(semilla: int):
    """Sistema estable y SED sobre una red geométrica aleatoria con N ≤ 20 agentes."""
    rng = np.random.default_rng(semilla)
    T = red_sintetica(4 + semilla % 17, semilla)
    D = np.asarray(T.distancia, dtype=float)
    base = rng.uniform(-1.0, 1.0, D.shape) * np.exp(-rng.uniform(0.5, 2.0) * D)
    A = rng.uniform(0.3, 0.9) * base / max(abs(np.linalg.eigvals(base)))
    n = T.n_agentes
    B = np.diag(rng.uniform(0.5, 1.5, n))
    return crear_problema(A, B, np.diag(rng.uniform(1.0, 2.0, n)), np.eye(n), None, T)


class TestSistemasAleatorios(unittest.TestCase):
    SEMILLAS = range(50)

    def test_cotas_de_autovalores_y_de_G(self):
        for semilla in self.SEMILLAS:
            problema = sistema_aleatorio(semilla)
            A, _, Q, _, _ = problema.matrices()
            solucion, G, cert, ds = armar(problema, 1 + semilla % 10)
            self.assertTrue(verificar_cotas_autovalores(ds)["cumple"], f"semilla={semilla}")
            cert_A = ajustar_estabilidad(A)
            self.assertTrue(verificar_decaimiento_G(G, A, float(np.linalg.norm(Q, 2)), cert_A, 50),
                            f"semilla={semilla}")

    def test_producto_sed(self):
        for semilla in self.SEMILLAS:
            rng = np.random.default_rng(1000 + semilla)
            T = red_sintetica(4 + semilla % 17, semilla)
            D = np.asarray(T.distancia, dtype=float)
            gamma = rng.uniform(0.2, 2.0)
            X, Y = (MatrizBloques(rng.standard_normal(D.shape) * np.exp(-gamma * D), T.dims_estado, T.dims_estado)
                    for _ in range(2))
            cert_X, cert_Y = ajustar_sed_a_tasa(X, T, gamma), ajustar_sed_a_tasa(Y, T, gamma)
            self.assertTrue(verificar_producto_sed(X, Y, cert_X, cert_Y, T), f"semilla={semilla}")


if __name__ == '__main__':
    unittest.main()
