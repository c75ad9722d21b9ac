"""
Simulación Monte Carlo de los lazos de control para contrastar los costos
cerrados (trace(P), trace(G) y la forma cuadrática por bloques) con promedios
empíricos.

Generador de ruido: Philox (contador) con clave (semilla << 64) + ensayo, y
normales por Box–Muller con u₁ = 1 − U ∈ (0, 1]. Cada ensayo tiene su propio
flujo, así que el resultado no depende del orden de ejecución de los hilos.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.configuracion import hilos_maximos
from src.constantes import BLOQUE_RUIDO, LIMITE_ESTADO
from src.errores import CertificadoNoDisponible, DivergenciaDetectada, EntradaInestable, EntradaInvalida
from src.lqr import ajustar_estabilidad, densa, matriz_Q_lazo_cerrado, radio_espectral, resolver_lyapunov_G
from src.problema import ProblemaLqr
from src.respuesta_perturbacion import ControladorPerturbacion

_LOTES_ERROR = 20


@dataclass(frozen=True)
class ConfigSimulacion:
    horizonte:      int
    ensayos:        int = 1
    semilla:        int = 0
    burn_in:        int = None
    sin_ruido:      bool = False
    estado_inicial: tuple = None

    def __post_init__(self):
        if self.ensayos < 1:
            raise EntradaInvalida("se necesita al menos un ensayo")
        if self.burn_in is not None and not (0 <= self.burn_in < self.horizonte):
            raise EntradaInvalida(f"se requiere 0 ≤ burn_in < T (burn_in={self.burn_in}, T={self.horizonte})")
        if self.semilla < 0:
            raise EntradaInvalida("la semilla debe ser no negativa")


class FuenteRuido:
    """Normales estándar en bloques de BLOQUE_RUIDO pasos para un par (semilla, ensayo)."""

    def __init__(self, semilla: int, ensayo: int, dimension: int):
        self.generador = np.random.Generator(np.random.Philox(key=(semilla << 64) + ensayo))
        self.dimension = dimension

    def bloque(self, pasos: int = BLOQUE_RUIDO) -> np.ndarray:
        total = pasos * self.dimension
        pares = (total + 1) // 2
        u1 = 1.0 - self.generador.random(pares)
        u2 = self.generador.random(pares)
        radio = np.sqrt(-2.0 * np.log(u1))
        normales = np.empty(2 * pares)
        normales[0::2] = radio * np.cos(2 * np.pi * u2)
        normales[1::2] = radio * np.sin(2 * np.pi * u2)
        return normales[:total].reshape(pasos, self.dimension)


def burn_in_defecto(A_cl: np.ndarray, horizonte: int) -> int:
    """⌈10/ρ⌉ con ρ la tasa ajustada del lazo, sin pasar de la mitad del horizonte."""
    try:
        rho = ajustar_estabilidad(A_cl).rho
    except CertificadoNoDisponible:
        return horizonte // 2
    return int(min(math.ceil(10.0 / rho), horizonte // 2))


def _recorrer(A: np.ndarray, excitacion: np.ndarray, x: np.ndarray) -> tuple:
    """x_{t+1} = A x_t + e_t sobre un bloque; devuelve los estados previos a cada paso."""
    estados = np.empty_like(excitacion)
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(excitacion.shape[0]):
            estados[s] = x
            x = A @ x + excitacion[s]
    normas = np.linalg.norm(estados, axis=1)
    if not np.all(np.isfinite(normas)) or normas.max(initial=0.0) > LIMITE_ESTADO \
            or not np.isfinite(x).all() or np.linalg.norm(x) > LIMITE_ESTADO:
        raise DivergenciaDetectada(f"‖x‖ superó {LIMITE_ESTADO:.0e}")
    return estados, x


def _ensayo(problema: ProblemaLqr, cfg: ConfigSimulacion, burn_in: int, ensayo: int,
            A_efectiva: np.ndarray, costo_bloque, control_bloque) -> tuple:
    """
    Recorre un ensayo completo y devuelve (costos por paso tras burn_in, Σ x xᵀ tras burn_in).
    `control_bloque(W, historia)` devuelve la excitación B·u + w y la nueva historia.
    """
    n_x = problema.n_x
    fuente = FuenteRuido(cfg.semilla, ensayo, n_x)
    x = np.zeros(n_x) if cfg.estado_inicial is None else np.asarray(cfg.estado_inicial, dtype=float)
    historia = None
    costos = np.empty(cfg.horizonte)
    segundo_momento = np.zeros((n_x, n_x))

    t = 0
    while t < cfg.horizonte:
        pasos = min(BLOQUE_RUIDO, cfg.horizonte - t)
        W = fuente.bloque(BLOQUE_RUIDO)[:pasos]
        if cfg.sin_ruido:
            W = np.zeros_like(W)
        excitacion, U, historia = control_bloque(W, historia)
        X, x = _recorrer(A_efectiva, excitacion, x)
        costos[t:t + pasos] = costo_bloque(X, U)
        desde = max(0, burn_in - t)
        if desde < pasos:
            segundo_momento += X[desde:].T @ X[desde:]
        t += pasos
    return costos[burn_in:], segundo_momento


def _estadisticos(resultados: list) -> tuple:
    medias = np.array([c.mean() for c, _ in resultados])
    promedio = float(medias.mean())
    if len(medias) > 1:
        return promedio, float(medias.std(ddof=1) / math.sqrt(len(medias)))
    costos = resultados[0][0]
    lotes = np.array_split(costos, min(_LOTES_ERROR, len(costos)))
    medias_lote = np.array([lote.mean() for lote in lotes])
    if len(medias_lote) < 2:
        return promedio, math.inf
    return promedio, float(medias_lote.std(ddof=1) / math.sqrt(len(medias_lote)))


def _ejecutar(problema, cfg, burn_in, A_efectiva, costo_bloque, control_bloque) -> list:
    with ThreadPoolExecutor(max_workers=min(hilos_maximos(), cfg.ensayos)) as ejecutor:
        return list(ejecutor.map(
            lambda ensayo: _ensayo(problema, cfg, burn_in, ensayo, A_efectiva, costo_bloque, control_bloque),
            range(cfg.ensayos),
        ))


def simular_realimentacion_estado(problema: ProblemaLqr, Kp, cfg: ConfigSimulacion) -> tuple:
    """
    Costo promedio empírico de u = −K'x sobre [burn_in, T), promediado entre
    ensayos. Retorna (promedio, error estándar).
    """
    A, B, _, _, _ = problema.matrices()
    Kp = densa(Kp)
    A_cl = A - B @ Kp
    Q_cl = matriz_Q_lazo_cerrado(problema, Kp)
    burn_in = cfg.burn_in if cfg.burn_in is not None else burn_in_defecto(A_cl, cfg.horizonte)

    def control_bloque(W, historia):
        return W, None, None

    def costo_bloque(X, _):
        return np.einsum("ti,ij,tj->t", X, Q_cl, X)

    resultados = _ejecutar(problema, cfg, burn_in, A_cl, costo_bloque, control_bloque)
    promedio, error = _estadisticos(resultados)
    logger.info(f"realimentación de estado: costo empírico {promedio:.6g} ± {error:.2g}")
    return promedio, error


def _leyes_perturbacion(problema: ProblemaLqr, L: ControladorPerturbacion):
    """Funciones de control y costo para u_t = Σ_k L_k w_{t−k} (w_s = 0 para s < 0)."""
    _, B, Q, R, S = problema.matrices()
    n_x, H = problema.n_x, L.H
    bloques = [Lk.datos for Lk in L.bloques]

    def control_bloque(W, historia):
        if historia is None:
            historia = np.zeros((H, n_x))
        extendida = np.vstack([historia, W])
        pasos = W.shape[0]
        U = np.zeros((pasos, problema.n_u))
        for k, Lk in enumerate(bloques, start=1):
            U += extendida[H - k:H - k + pasos] @ Lk.T
        return U @ B.T + W, U, extendida[-H:]

    def costo_bloque(X, U):
        return (np.einsum("ti,ij,tj->t", X, Q, X) + np.einsum("ti,ij,tj->t", U, R, U)
                + 2.0 * np.einsum("ti,ij,tj->t", U, S, X))

    return control_bloque, costo_bloque


def simular_realimentacion_perturbacion(problema: ProblemaLqr, L: ControladorPerturbacion,
                                        cfg: ConfigSimulacion) -> tuple:
    A = problema.A.datos
    radio = radio_espectral(A)
    if radio >= 1.0:
        raise EntradaInestable(f"ρ(A) = {radio:.6f} ≥ 1: la ley de perturbaciones no realimenta el estado")
    burn_in = cfg.burn_in if cfg.burn_in is not None else burn_in_defecto(A, cfg.horizonte) + L.H
    burn_in = min(burn_in, cfg.horizonte - 1)
    control_bloque, costo_bloque = _leyes_perturbacion(problema, L)
    resultados = _ejecutar(problema, cfg, burn_in, A, costo_bloque, control_bloque)
    promedio, error = _estadisticos(resultados)
    logger.info(f"respuesta a perturbaciones (H={L.H}): costo empírico {promedio:.6g} ± {error:.2g}")
    return promedio, error


def covarianza_analitica(problema: ProblemaLqr, L: ControladorPerturbacion) -> np.ndarray:
    """
    lim E[x_t x_tᵀ] = Σ_j T_j T_jᵀ con T_1 = I, T_{k+1} = A·T_k + B·L_k; desde
    T_{H+1} la cola es una suma de Lyapunov en Aᵀ.
    """
    A, B, _, _, _ = problema.matrices()
    T_k = np.eye(problema.n_x)
    suma = np.zeros_like(T_k)
    for Lk in L.bloques:
        suma += T_k @ T_k.T
        T_k = A @ T_k + B @ Lk.datos
    return suma + resolver_lyapunov_G(A.T, T_k @ T_k.T).G


def verificar_segundo_momento(problema: ProblemaLqr, L: ControladorPerturbacion, cfg: ConfigSimulacion) -> float:
    """Máxima desviación absoluta entre la covarianza empírica estacionaria y la analítica."""
    A = problema.A.datos
    if radio_espectral(A) >= 1.0:
        raise EntradaInestable("ρ(A) ≥ 1")
    burn_in = cfg.burn_in if cfg.burn_in is not None else burn_in_defecto(A, cfg.horizonte) + L.H
    burn_in = min(burn_in, cfg.horizonte - 1)
    control_bloque, costo_bloque = _leyes_perturbacion(problema, L)
    resultados = _ejecutar(problema, cfg, burn_in, A, costo_bloque, control_bloque)
    muestras = cfg.ensayos * (cfg.horizonte - burn_in)
    empirica = sum(momento for _, momento in resultados) / muestras
    return float(np.max(np.abs(empirica - covarianza_analitica(problema, L))))
