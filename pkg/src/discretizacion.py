"""
Discretización exacta de un sistema LQR continuo en red:
A = e^{Δt·A_c}, B = (∫₀^{Δt} e^{s·A_c} ds)·B_c, Q = Δt·Q_c, R = Δt·R_c.
"""
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.bloques import MatrizBloques, norma_espectral, normas_bloque
from src.constantes import TOL_SERIE
from src.errores import EntradaInvalida, ErrorDimensiones, ErrorNumerico
from src.problema import ProblemaLqr, crear_problema
from src.topologia import Topologia

_MAX_TERMINOS = 200


@dataclass(frozen=True)
class SistemaContinuo:
    A_c: np.ndarray
    B_c: np.ndarray
    Q_c: np.ndarray
    R_c: np.ndarray
    topologia: Topologia

    def __post_init__(self):
        T = self.topologia
        if self.A_c.shape != (T.n_x, T.n_x) or self.B_c.shape != (T.n_x, T.n_u):
            raise ErrorDimensiones("A_c / B_c no coinciden con las dimensiones de la topología")
        D = np.asarray(T.distancia)
        lejos = (D > 1) | (D == -1)
        for nombre, M, pc in (("A_c", self.A_c, T.dims_estado), ("B_c", self.B_c, T.dims_entrada)):
            normas = normas_bloque(MatrizBloques(M, T.dims_estado, pc))
            if np.any(normas[lejos] > 0):
                raise EntradaInvalida(f"{nombre} acopla agentes a distancia mayor que 1")


def _verificar_finita(A: np.ndarray):
    if not np.all(np.isfinite(A)):
        raise ErrorNumerico("la matriz tiene entradas no finitas")


def _serie(M: np.ndarray, desplazamiento: int) -> np.ndarray:
    """Σ_{k≥0} M^k·p!/(k+p)! con p = desplazamiento, cortada por TOL_SERIE."""
    n = M.shape[0]
    termino = np.eye(n)
    suma = np.eye(n)
    for k in range(1, _MAX_TERMINOS):
        termino = termino @ M / (k + desplazamiento)
        suma = suma + termino
        if np.linalg.norm(termino, 1) < TOL_SERIE * np.linalg.norm(suma, 1):
            break
    return suma


def exponencial_matriz(A, t: float = 1.0) -> np.ndarray:
    """e^{tA} por escalamiento y cuadrado con serie de Taylor truncada."""
    A = np.asarray(A, dtype=float)
    _verificar_finita(A)
    if A.size == 0:
        return A.copy()
    M = t * A
    norma = np.linalg.norm(M, 1)
    s = max(0, math.ceil(math.log2(norma / 0.5))) if norma > 0.5 else 0
    E = _serie(M / 2 ** s, 0)
    for _ in range(s):
        E = E @ E
    return E


def integral_phi(A, dt: float) -> np.ndarray:
    """∫₀^{dt} e^{sA} ds = dt·Σ_{k≥0} (dt·A)^k/(k+1)!."""
    if dt <= 0:
        raise EntradaInvalida(f"dt debe ser positivo (dt={dt})")
    A = np.asarray(A, dtype=float)
    _verificar_finita(A)
    n = A.shape[0]
    if dt * np.linalg.norm(A, 1) <= 1.0:
        return dt * _serie(dt * A, 1)
    # bloque superior derecho de exp(dt·[[A, I], [0, 0]])
    aumentada = np.zeros((2 * n, 2 * n))
    aumentada[:n, :n] = A
    aumentada[:n, n:] = np.eye(n)
    return exponencial_matriz(aumentada, dt)[:n, n:]


def discretizar(sistema: SistemaContinuo, dt: float, **extras) -> ProblemaLqr:
    if dt <= 0:
        raise EntradaInvalida(f"dt debe ser positivo (dt={dt})")
    T = sistema.topologia
    A = exponencial_matriz(sistema.A_c, dt)
    B = integral_phi(sistema.A_c, dt) @ sistema.B_c
    Q = dt * sistema.Q_c
    R = dt * sistema.R_c
    # la exponencial deja ruido de redondeo en la simetría cuando A_c lo es
    Q, R = 0.5 * (Q + Q.T), 0.5 * (R + R.T)
    S = np.zeros((T.n_u, T.n_x))

    provisorio = crear_problema(A, B, Q, R, S, T)
    informe = verificar_decaimiento_discreto(sistema, dt, provisorio)
    return crear_problema(A, B, Q, R, S, T, informe_discretizacion=informe, **extras)


def _cumple(normas: np.ndarray, D: np.ndarray, c: float, gamma: float) -> tuple:
    d = D.astype(float)
    cota = np.where(d == 0, c, c * np.exp(-gamma * d)) if math.isfinite(gamma) else np.where(d == 0, c, 0.0)
    exceso = normas - cota * (1.0 + 1e-12)
    return bool(np.all(exceso <= 0.0)), float(max(0.0, exceso.max()))


def verificar_decaimiento_discreto(sistema: SistemaContinuo, dt: float, problema: ProblemaLqr) -> dict:
    """
    Comprueba bloque a bloque que A sea (e^{Δt‖A_c‖}, −ln(Δt‖A_c‖))-SED y que B
    cumpla la cota de la misma tasa. Si Δt‖A_c‖ ≥ 1 la tasa no es positiva y la
    verificación se omite con bandera.

    Para B se verifica c_B = ‖B_c‖·e^{Δt‖A_c‖}/‖A_c‖, que es la constante que se
    obtiene al sumar la serie de Φ·B_c desde el término k = dist − 1; la constante
    literal (Δt)²‖A_c‖‖B_c‖e^{Δt‖A_c‖} se informa aparte porque falla en dist = 0.
    """
    T = sistema.topologia
    D = np.asarray(T.distancia)
    norma_Ac = norma_espectral(sistema.A_c)
    norma_Bc = norma_espectral(sistema.B_c)
    producto = dt * norma_Ac

    if producto >= 1.0:
        logger.warning(f"Δt·‖A_c‖ = {producto:.3g} ≥ 1: verificación de decaimiento omitida")
        return {"omitido": True, "cumple": None, "dt_norma_Ac": producto}

    normas_A = normas_bloque(problema.A)
    normas_B = normas_bloque(problema.B)

    if norma_Ac == 0.0:
        c_A, c_B, gamma = 1.0, dt * norma_Bc, math.inf
        cumple_A, exceso_A = _cumple(normas_A, D, c_A, gamma)
        # con A_c = 0, B = Δt·B_c conserva el soporte a distancia ≤ 1
        cumple_B = bool(np.all(normas_B[D <= 1] <= c_B * (1 + 1e-12)) and not np.any(normas_B[D > 1]))
        exceso_B = 0.0 if cumple_B else float(normas_B.max())
        c_literal, cumple_literal = 0.0, not np.any(normas_B)
    else:
        gamma = -math.log(producto)
        c_A = math.exp(producto)
        c_B = norma_Bc * math.exp(producto) / norma_Ac
        c_literal = dt ** 2 * norma_Ac * norma_Bc * math.exp(producto)
        cumple_A, exceso_A = _cumple(normas_A, D, c_A, gamma)
        cumple_B, exceso_B = _cumple(normas_B, D, c_B, gamma)
        cumple_literal, _ = _cumple(normas_B, D, c_literal, gamma)

    if not (cumple_A and cumple_B):
        logger.warning(f"cota de decaimiento de la discretización violada (A: {exceso_A:.3g}, B: {exceso_B:.3g})")
    return {
        "omitido": False,
        "cumple": cumple_A and cumple_B,
        "dt_norma_Ac": producto,
        "gamma": gamma,
        "c_A": c_A,
        "c_B": c_B,
        "c_B_literal": c_literal,
        "cumple_A": cumple_A,
        "cumple_B": cumple_B,
        "cumple_B_literal": cumple_literal,
        "exceso_A": exceso_A,
        "exceso_B": exceso_B,
    }
