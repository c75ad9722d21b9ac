"""
Controladores κ-truncados: poda de la ganancia óptima, barridos de la brecha de
costo y las cotas de desempeño del controlador local.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from loguru import logger

from src.bloques import CertificadoSed, MatrizBloques, ajustar_sed, norma_espectral
from src.configuracion import hilos_maximos
from src.constantes import DISTANCIA_INALCANZABLE, K_MAX_DEFECTO
from src.errores import CertificadoNoDisponible, EntradaInvalida, UmbralIndefinido
from src.lqr import (
    CertificadoEstabilidad, SolucionRiccati, ajustar_estabilidad, costo_lazo_cerrado, log_normas_potencias,
    densa, radio_espectral, resolver_lyapunov_G,
)
from src.problema import ProblemaLqr


@dataclass(frozen=True)
class ReporteTruncamiento:
    kappa:           int
    costo_truncado:  float
    costo_optimo:    float
    brecha:          float
    cota_desempeno:   float
    umbral_kappa:    float
    estable:         bool

    def como_fila(self) -> dict:
        return {"kappa": self.kappa, "stable": int(self.estable), "cost_trunc": self.costo_truncado,
                "cost_opt": self.costo_optimo, "gap": self.brecha, "bound": self.cota_desempeno,
                "threshold": self.umbral_kappa}


def truncar(K: MatrizBloques, T, kappa: int) -> MatrizBloques:
    """Anula los bloques [K]_{ij} con dist(i,j) ≥ κ; el resto se copia sin cambios."""
    if kappa < 1:
        raise EntradaInvalida(f"κ debe ser al menos 1 (κ={kappa})")
    D = np.asarray(T.distancia)
    dentro = (D < kappa) & (D != DISTANCIA_INALCANZABLE)
    mascara = np.repeat(np.repeat(dentro, K.particion_filas, axis=0), K.particion_columnas, axis=1)
    return MatrizBloques(np.where(mascara, K.datos, 0.0), K.particion_filas, K.particion_columnas)


def _rango_bloque(T) -> int:
    return max(min(max(T.dims_entrada), max(T.dims_estado)), 1)


def cotas_error_truncamiento(K: MatrizBloques, T, kappa: int, cert_K: CertificadoSed) -> dict:
    """
    Error de truncamiento en norma espectral y de Frobenius contra dos cotas:
    las de enunciado (√N·c_K·e^{−γ_Kκ} y √(N·r)·c_K·e^{−γ_Kκ}) y las que resultan
    de sumar todos los pares de bloques (N·c_K·e^{−γ_Kκ} y N·√r·c_K·e^{−γ_Kκ}),
    con r el rango máximo de un bloque. Sólo las segundas se exigen.
    """
    delta = K.datos - truncar(K, T, kappa).datos
    N, r = T.n_agentes, _rango_bloque(T)
    base = 0.0 if cert_K.c == 0 else cert_K.c * math.exp(-cert_K.gamma * kappa)
    espectral = norma_espectral(delta)
    frobenius = float(np.linalg.norm(delta, "fro"))
    holgura = 1 + 1e-10
    return {
        "espectral": espectral,
        "frobenius": frobenius,
        "cota_espectral": N * base,
        "cota_frobenius": N * math.sqrt(r) * base,
        "cota_espectral_enunciado": math.sqrt(N) * base,
        "cota_frobenius_enunciado": math.sqrt(N * r) * base,
        "cumple": espectral <= N * base * holgura and frobenius <= N * math.sqrt(r) * base * holgura,
        "cumple_enunciado": espectral <= math.sqrt(N) * base * holgura and frobenius <= math.sqrt(N * r) * base * holgura,
    }


def umbral_kappa(cert: CertificadoEstabilidad, c_K: float, gamma_K: float, norma_B: float, N: int) -> float:
    """κ ≥ ln(2τ·c_K·√N·‖B‖/(1 − e^{−ρ}))/γ_K."""
    if not gamma_K > 0:
        raise UmbralIndefinido("γ_K = 0: el umbral de truncamiento no está definido")
    if c_K == 0 or norma_B == 0:
        return 1.0
    if math.isinf(gamma_K):
        return 1.0
    argumento = 2 * cert.tau * c_K * math.sqrt(N) * norma_B / (1 - math.exp(-cert.rho))
    return math.log(argumento) / gamma_K


def cota_desempeno(cert: CertificadoEstabilidad, W_norma: float, T, c_K: float, gamma_K: float,
                  kappa: int) -> float:
    """(2τ/(1 − e^{−ρ}))·‖R + BᵀPB‖·√(N·min{n_x, n_u})·c_K·e^{−γ_Kκ}."""
    if c_K == 0 or math.isinf(gamma_K):
        return 0.0
    return (2 * cert.tau / (1 - math.exp(-cert.rho)) * W_norma
            * math.sqrt(T.n_agentes * _rango_bloque(T)) * c_K * math.exp(-gamma_K * kappa))


def _norma_W(problema: ProblemaLqr, P: np.ndarray) -> float:
    _, B, _, R, _ = problema.matrices()
    return norma_espectral(R + B.T @ P @ B)


def informe_umbral(problema: ProblemaLqr, solucion: SolucionRiccati, cert: CertificadoEstabilidad,
                   cert_K: CertificadoSed, k_max: int = K_MAX_DEFECTO) -> dict:
    """
    Evalúa el umbral y, en κ = ⌈umbral⌉ (a lo sumo diámetro + 1), comprueba que el
    lazo truncado sea estable y que ‖(A − BK_trunc)^k‖ ≤ τ((1 + e^{−ρ})/2)^k.
    """
    A, B, _, _, _ = problema.matrices()
    T = problema.topologia
    umbral = umbral_kappa(cert, cert_K.c, cert_K.gamma, norma_espectral(B), T.n_agentes)
    kappa = int(min(max(math.ceil(umbral), 1), T.diametro() + 1))
    A_cl = A - B @ truncar(solucion.K, T, kappa).datos
    radio = radio_espectral(A_cl)

    tasa = (1 + math.exp(-cert.rho)) / 2
    logs = log_normas_potencias(A_cl, k_max)
    k = np.arange(k_max + 1)
    finitos = np.isfinite(logs)
    cumple_tasa = bool(np.all(logs[finitos] <= math.log(cert.tau) + k[finitos] * math.log(tasa) + 1e-10))

    try:
        cert_trunc = ajustar_estabilidad(A_cl, k_max)
    except CertificadoNoDisponible:
        cert_trunc = None
    return {
        "umbral": umbral,
        "kappa": kappa,
        "estable": radio < 1.0,
        "radio_espectral": radio,
        "cumple_tasa": cumple_tasa,
        "certificado_truncado": None if cert_trunc is None else asdict(cert_trunc),
    }


def barrido_brecha(problema: ProblemaLqr, solucion: SolucionRiccati, kappas, hilos: int = None) -> list:
    """
    Para cada κ: trunca K, prueba estabilidad, calcula C(K_trunc), la brecha y la
    cota de desempeño con el certificado (τ, ρ) del lazo óptimo y el certificado
    envolvente (c_K, γ_K). Las filas inestables llevan costo +∞.
    """
    A, B, _, _, _ = problema.matrices()
    T = problema.topologia
    K = solucion.K
    costo_optimo = costo_lazo_cerrado(problema, K)
    cert = ajustar_estabilidad(A - B @ K.datos)
    cert_K = ajustar_sed(K, T, "envolvente")
    W_norma = _norma_W(problema, solucion.P)
    try:
        umbral = umbral_kappa(cert, cert_K.c, cert_K.gamma, norma_espectral(B), T.n_agentes)
    except UmbralIndefinido:
        logger.warning("γ_K = 0: umbral indefinido en el barrido")
        umbral = math.inf

    def fila(kappa: int) -> ReporteTruncamiento:
        Kt = truncar(K, T, kappa)
        estable = radio_espectral(A - B @ Kt.datos) < 1.0
        if np.array_equal(Kt.datos, K.datos):
            costo = costo_optimo
        else:
            costo = costo_lazo_cerrado(problema, Kt) if estable else math.inf
        if not estable:
            logger.info(f"κ = {kappa}: lazo truncado inestable")
        return ReporteTruncamiento(
            kappa=int(kappa),
            costo_truncado=costo,
            costo_optimo=costo_optimo,
            brecha=costo - costo_optimo,
            cota_desempeno=cota_desempeno(cert, W_norma, T, cert_K.c, cert_K.gamma, kappa),
            umbral_kappa=umbral,
            estable=estable,
        )

    with ThreadPoolExecutor(max_workers=hilos or hilos_maximos()) as ejecutor:
        return list(ejecutor.map(fila, list(kappas)))


def diferencia_costo(problema: ProblemaLqr, solucion: SolucionRiccati, Kp) -> dict:
    """
    Identidad C(K') − C(K) = trace(Σ_{K'}·ΔKᵀ(R + BᵀPB)ΔK), con Σ_{K'} la covarianza
    estacionaria del lazo con K', y la cota τ'²/(1 − e^{−2ρ'})·‖R + BᵀPB‖·‖ΔK‖²_F.
    """
    A, B, _, R, _ = problema.matrices()
    Kp = densa(Kp)
    delta = Kp - solucion.K.datos
    A_cl = A - B @ Kp
    covarianza = resolver_lyapunov_G(A_cl.T, np.eye(problema.n_x)).G
    W = R + B.T @ solucion.P @ B

    directa = costo_lazo_cerrado(problema, Kp) - costo_lazo_cerrado(problema, solucion.K)
    identidad = float(np.trace(covarianza @ delta.T @ W @ delta))
    cert = ajustar_estabilidad(A_cl)
    cota = cert.tau ** 2 / (1 - math.exp(-2 * cert.rho)) * norma_espectral(W) * float(np.linalg.norm(delta, "fro")) ** 2
    return {"directa": directa, "identidad": identidad, "cota": cota,
            "cumple": directa <= cota * (1 + 1e-9) + 1e-12}
