"""
Núcleo LQR: ecuación algebraica de Riccati discreta, suma de Lyapunov
G = Σ (Aᵗ)ᵀQAᵗ, costo de lazo cerrado y certificados de estabilidad (τ, ρ).

Convención: la realimentación se aplica como u = −K·x en todo el paquete.
"""
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy import linalg

from src.bloques import MatrizBloques
from src.constantes import (
    K_MAX_DEFECTO, LIMITE_DIVERGENCIA, MARGEN_RHO, MAX_ITER_DOBLE, MAX_ITER_RICCATI, RHO_CAP,
    TOL_CAMBIO_RICCATI, TOL_DUPLICACION, TOL_RESIDUO,
)
from src.errores import (
    CertificadoNoDisponible, ControladorInestable, EntradaInestable, ErrorNumerico, FalloRiccati,
)
from src.problema import ProblemaLqr, crear_problema, ganancia_en_bloques

_MAX_DOBLAMIENTOS = 64


@dataclass(frozen=True)
class SolucionRiccati:
    P:           np.ndarray
    K:           MatrizBloques
    residuo:     float
    iteraciones: int
    metodo:      str = "punto_fijo"


@dataclass(frozen=True)
class CertificadoEstabilidad:
    tau:        float
    rho:        float
    horizonte:  int
    verificado: bool = True


@dataclass(frozen=True)
class SumaLyapunov:
    G:           np.ndarray
    iteraciones: int
    residuo:     float


def densa(X) -> np.ndarray:
    return X.datos if isinstance(X, MatrizBloques) else np.asarray(X, dtype=float)


def radio_espectral(A) -> float:
    A = densa(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(linalg.eigvals(A))))


# ── Riccati ─────────────────────────────────────────────────────────

def _ganancia(P, A, B, R, S):
    """K = (R + BᵀPB)⁻¹(BᵀPA + S) por factorización de Cholesky."""
    factor = linalg.cho_factor(R + B.T @ P @ B)
    return linalg.cho_solve(factor, B.T @ P @ A + S)


def _paso_riccati(P, A, B, Q, R, S):
    K = _ganancia(P, A, B, R, S)
    siguiente = A.T @ P @ A - (A.T @ P @ B + S.T) @ K + Q
    return 0.5 * (siguiente + siguiente.T)


def residuo_riccati(P, problema: ProblemaLqr) -> float:
    A, B, Q, R, S = problema.matrices()
    return float(np.linalg.norm(P - _paso_riccati(P, A, B, Q, R, S), 2))


def _punto_fijo(A, B, Q, R, S, max_iter):
    P = Q.copy()
    for iteracion in range(1, max_iter + 1):
        siguiente = _paso_riccati(P, A, B, Q, R, S)
        norma = np.linalg.norm(siguiente, 2)
        if not np.isfinite(norma) or norma > LIMITE_DIVERGENCIA:
            raise FalloRiccati(f"la iteración diverge (‖P‖ = {norma:.3g} en la iteración {iteracion})")
        cambio = np.linalg.norm(siguiente - P, 2) / max(norma, np.finfo(float).tiny)
        P = siguiente
        if cambio < TOL_CAMBIO_RICCATI:
            return P, iteracion
    raise FalloRiccati(f"sin convergencia en {max_iter} iteraciones")


def _duplicacion(A, B, Q, R, S):
    """Algoritmo de doblamiento estructurado: H_k converge a P cuadráticamente."""
    n = A.shape[0]
    factor_R = linalg.cho_factor(R)
    Rinv_S = linalg.cho_solve(factor_R, S)
    Ak = A - B @ Rinv_S
    Gk = B @ linalg.cho_solve(factor_R, B.T)
    Hk = Q - S.T @ Rinv_S
    identidad = np.eye(n)

    for iteracion in range(1, MAX_ITER_DOBLE + 1):
        W = identidad + Gk @ Hk
        W_A = linalg.solve(W, Ak)
        W_G = linalg.solve(W, Gk)
        A_sig = Ak @ W_A
        G_sig = Gk + Ak @ W_G @ Ak.T
        H_sig = Hk + Ak.T @ Hk @ W_A
        H_sig = 0.5 * (H_sig + H_sig.T)
        norma = np.linalg.norm(H_sig, 2)
        if not np.isfinite(norma) or norma > LIMITE_DIVERGENCIA:
            raise FalloRiccati(f"el doblamiento diverge (‖P‖ = {norma:.3g})")
        cambio = np.linalg.norm(H_sig - Hk, 2)
        Ak, Gk, Hk = A_sig, 0.5 * (G_sig + G_sig.T), H_sig
        if cambio < TOL_DUPLICACION * norma:
            return Hk, iteracion
    raise FalloRiccati(f"el doblamiento no convergió en {MAX_ITER_DOBLE} pasos")


def resolver_dare(problema: ProblemaLqr, metodo: str = "punto_fijo",
                  max_iter: int = MAX_ITER_RICCATI) -> SolucionRiccati:
    """
    Resuelve P = AᵀPA − (AᵀPB+Sᵀ)(R+BᵀPB)⁻¹(BᵀPA+S) + Q y K = (R+BᵀPB)⁻¹(BᵀPA+S).

    Parámetros:
    -----------
    metodo : str
        "punto_fijo" (iteración de valor desde P₀ = Q, por defecto) o
        "duplicacion" (para pasos de discretización muy pequeños).
    """
    A, B, Q, R, S = problema.matrices()
    try:
        if metodo == "punto_fijo":
            P, iteraciones = _punto_fijo(A, B, Q, R, S, max_iter)
        elif metodo == "duplicacion":
            P, iteraciones = _duplicacion(A, B, Q, R, S)
        else:
            raise FalloRiccati(f"método desconocido: {metodo}")
        K = _ganancia(P, A, B, R, S)
    except linalg.LinAlgError as error:
        raise FalloRiccati(f"R + BᵀPB dejó de ser definida positiva: {error}") from error

    residuo = residuo_riccati(P, problema)
    norma_P = np.linalg.norm(P, 2)
    if residuo > TOL_RESIDUO * norma_P:
        raise FalloRiccati(f"residuo {residuo:.3g} excede {TOL_RESIDUO}·‖P‖", residuo=residuo)
    radio = radio_espectral(A - B @ K)
    if radio >= 1.0:
        raise FalloRiccati(f"el lazo cerrado no es estable (ρ(A−BK) = {radio:.6f})")

    logger.info(f"Riccati ({metodo}) convergió en {iteraciones} iteraciones, residuo {residuo:.2e}")
    return SolucionRiccati(P=P, K=ganancia_en_bloques(K, problema.topologia),
                           residuo=residuo, iteraciones=iteraciones, metodo=metodo)


def preestabilizar(problema: ProblemaLqr, K0) -> ProblemaLqr:
    """
    Sustitución u = −K₀x + ū: devuelve el problema en ū con
    Ā = A − BK₀, Q̄ = Q + K₀ᵀRK₀ − K₀ᵀS − SᵀK₀, S̄ = S − RK₀, R̄ = R.
    """
    A, B, Q, R, S = problema.matrices()
    K0 = densa(K0)
    Q_barra = Q + K0.T @ R @ K0 - K0.T @ S - S.T @ K0
    return crear_problema(
        A - B @ K0, B, 0.5 * (Q_barra + Q_barra.T), R, S - R @ K0, problema.topologia,
        nombre=f"{problema.nombre}-preestabilizado",
        parametros=problema.parametros,
        constantes_sed=None,
    )


def resolver_dare_preestabilizado(problema: ProblemaLqr, K0=None, metodo: str = "punto_fijo") -> SolucionRiccati:
    """Resuelve el problema pre-estabilizado y devuelve K = K̄ + K₀ para el problema original."""
    K0 = densa(problema.K0 if K0 is None else K0)
    barra = resolver_dare(preestabilizar(problema, K0), metodo)
    K = barra.K.datos + K0
    return SolucionRiccati(P=barra.P, K=ganancia_en_bloques(K, problema.topologia),
                           residuo=residuo_riccati(barra.P, problema),
                           iteraciones=barra.iteraciones, metodo=barra.metodo)


# ── Lyapunov ────────────────────────────────────────────────────────

def resolver_lyapunov_G(A, Q, estabilidad: CertificadoEstabilidad = None) -> SumaLyapunov:
    """G = Σ_{t≥0} (Aᵗ)ᵀ Q Aᵗ por doblamiento: G ← G + MᵀGM, M ← M²."""
    A, Q = densa(A), densa(Q)
    radio = radio_espectral(A)
    if radio >= 1.0:
        raise EntradaInestable(f"ρ(A) = {radio:.6f} ≥ 1")
    if estabilidad is not None:
        logger.debug(f"suma de Lyapunov con (τ, ρ) = ({estabilidad.tau:.3g}, {estabilidad.rho:.3g})")

    G, M = Q.copy(), A.copy()
    for iteracion in range(1, _MAX_DOBLAMIENTOS + 1):
        actualizacion = M.T @ G @ M
        G = G + actualizacion
        M = M @ M
        if np.linalg.norm(actualizacion, 2) <= TOL_DUPLICACION * np.linalg.norm(G, 2):
            break
    else:
        raise ErrorNumerico("la suma de Lyapunov no convergió")
    G = 0.5 * (G + G.T)
    residuo = float(np.linalg.norm(A.T @ G @ A - G + Q, 2))
    return SumaLyapunov(G=G, iteraciones=iteracion, residuo=residuo)


def matriz_Q_lazo_cerrado(problema: ProblemaLqr, Kp) -> np.ndarray:
    _, _, Q, R, S = problema.matrices()
    Kp = densa(Kp)
    Q_cl = Q + Kp.T @ R @ Kp - Kp.T @ S - S.T @ Kp
    return 0.5 * (Q_cl + Q_cl.T)


def costo_lazo_cerrado(problema: ProblemaLqr, Kp) -> float:
    """Costo promedio C(K') = trace(P_cl) con u = −K'x y ruido de covarianza unitaria."""
    A, B, _, _, _ = problema.matrices()
    A_cl = A - B @ densa(Kp)
    radio = radio_espectral(A_cl)
    if radio >= 1.0:
        raise ControladorInestable(f"ρ(A − BK') = {radio:.6f} ≥ 1")
    return float(np.trace(resolver_lyapunov_G(A_cl, matriz_Q_lazo_cerrado(problema, Kp)).G))


# ── Certificados de estabilidad ─────────────────────────────────────

def log_normas_potencias(A: np.ndarray, k_max: int) -> np.ndarray:
    """log‖Aᵏ‖ para k = 0..k_max, con renormalización para no perder potencias pequeñas."""
    logs = np.full(k_max + 1, -np.inf)
    logs[0] = 0.0
    potencia, escala = np.eye(A.shape[0]), 0.0
    for k in range(1, k_max + 1):
        potencia = potencia @ A
        norma = np.linalg.norm(potencia, 2)
        if norma == 0.0:
            break
        escala += math.log(norma)
        potencia = potencia / norma
        logs[k] = escala
    return logs


def ajustar_estabilidad(A, k_max: int = K_MAX_DEFECTO) -> CertificadoEstabilidad:
    """
    Certificado ‖Aᵏ‖ ≤ τ·e^{−ρk}: ρ = −ln(ρ(A))·(1 − 0.05) con tope ρ_cap y
    τ = max_k ‖Aᵏ‖·e^{ρk} (al menos 1), verificado para todo k ≤ k_max.
    """
    A = densa(A)
    radio = radio_espectral(A)
    if radio >= 1.0:
        raise CertificadoNoDisponible(f"ρ(A) = {radio:.6f} ≥ 1")
    rho = RHO_CAP if radio == 0.0 else min(-math.log(radio) * (1.0 - MARGEN_RHO), RHO_CAP)

    logs = log_normas_potencias(A, k_max)
    k = np.arange(k_max + 1)
    finitos = np.isfinite(logs)
    tau = max(1.0, math.exp(float(np.max(logs[finitos] + rho * k[finitos]))))
    verificado = bool(np.all(logs[finitos] <= math.log(tau) - rho * k[finitos] + 1e-12))
    return CertificadoEstabilidad(tau=tau, rho=rho, horizonte=k_max, verificado=verificado)


def certificado_comun(*certificados: CertificadoEstabilidad) -> CertificadoEstabilidad:
    """Mayor τ y menor ρ: cubre simultáneamente A y A − BK."""
    return CertificadoEstabilidad(
        tau=max(c.tau for c in certificados),
        rho=min(c.rho for c in certificados),
        horizonte=min(c.horizonte for c in certificados),
        verificado=all(c.verificado for c in certificados),
    )


def verificar_decaimiento_G(G: SumaLyapunov, A, norma_Q: float, cert: CertificadoEstabilidad,
                            m_max: int) -> bool:
    """‖G·A^m‖ ≤ τ²‖Q‖e^{−ρm}/(1 − e^{−2ρ}) para m = 0..m_max."""
    A = densa(A)
    escala = cert.tau ** 2 * norma_Q / (1.0 - math.exp(-2.0 * cert.rho))
    producto = G.G.copy()
    for m in range(m_max + 1):
        if np.linalg.norm(producto, 2) > escala * math.exp(-cert.rho * m) * (1.0 + 1e-10):
            return False
        producto = producto @ A
    return True
