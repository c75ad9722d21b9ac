"""
Controlador de respuesta a perturbaciones u_t = L₁w_{t−1} + ⋯ + L_H w_{t−H}.

Ensambla el sistema lineal M⁽ᴴ⁾L⁽ᴴ⁾ + J⁽ᴴ⁾ = 0, lo resuelve en forma directa o
por la serie de Neumann truncada, evalúa el costo con la forma cuadrática por
bloques y verifica las cotas de autovalores y de decaimiento de M y J.
"""
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy import linalg

from src.bloques import MatrizBloques, norma_espectral, normas_bloque
from src.constantes import LIMITE_H_NU, TOL_COTA, TOL_RESIDUO, TOL_SIMETRIA
from src.errores import EntradaInestable, EntradaInvalida, ErrorNumerico, MatrizMSingular
from src.lqr import CertificadoEstabilidad, SumaLyapunov, ajustar_estabilidad, densa, radio_espectral
from src.problema import ProblemaLqr, complemento_schur, ganancia_en_bloques


@dataclass(frozen=True)
class ControladorPerturbacion:
    H:       int
    bloques: tuple
    residuo: float = 0.0

    @property
    def apilado(self) -> np.ndarray:
        """[L₁; …; L_H], de tamaño H·n_u × n_x."""
        return np.vstack([L.datos for L in self.bloques])

    @property
    def horizontal(self) -> np.ndarray:
        """[L₁, …, L_H], de tamaño n_u × H·n_x (actúa sobre la historia de ruido)."""
        return np.hstack([L.datos for L in self.bloques])


@dataclass(frozen=True)
class SistemaPerturbacion:
    M: np.ndarray
    J: np.ndarray
    G_usado: SumaLyapunov
    cota_lambda_min: float
    cota_lambda_max: float
    H: int
    estabilidad: CertificadoEstabilidad


def controlador_desde_apilado(L: np.ndarray, H: int, problema: ProblemaLqr, residuo: float = 0.0):
    n_u = problema.n_u
    bloques = tuple(ganancia_en_bloques(L[k * n_u:(k + 1) * n_u], problema.topologia) for k in range(H))
    return ControladorPerturbacion(H=H, bloques=bloques, residuo=residuo)


def horizonte_por_defecto(gamma_sys: float, n_agentes: int, n_u: int) -> int:
    """H = ⌊γ_sys·N⌋ + 1, recortado para que H·n_u no supere el límite de memoria."""
    H = int(math.floor(gamma_sys * n_agentes)) + 1
    limite = max(1, LIMITE_H_NU // max(n_u, 1))
    if H > limite:
        logger.warning(f"H = {H} excede el límite H·n_u ≤ {LIMITE_H_NU}; se usa H = {limite}")
        H = limite
    return H


def _potencias(A: np.ndarray, hasta: int) -> list:
    potencias = [np.eye(A.shape[0])]
    for _ in range(hasta):
        potencias.append(potencias[-1] @ A)
    return potencias


def ensamblar(problema: ProblemaLqr, G: SumaLyapunov, H: int,
              estabilidad: CertificadoEstabilidad = None) -> SistemaPerturbacion:
    """
    M_kk = BᵀGB + R, M_km = BᵀGA^{k−m}B + SA^{k−m−1}B (k > m), M_mk = M_kmᵀ,
    J_k = BᵀGA^k + SA^{k−1}. Las potencias de A se calculan una sola vez.
    """
    A, B, Q, R, S = problema.matrices()
    if H < 1:
        raise EntradaInvalida(f"H debe ser al menos 1 (H={H})")
    radio = radio_espectral(A)
    if radio >= 1.0:
        raise EntradaInestable(f"ρ(A) = {radio:.6f} ≥ 1; pre-estabilice primero")
    n_u, n_x = problema.n_u, problema.n_x
    if H * n_u > LIMITE_H_NU:
        raise EntradaInvalida(f"H·n_u = {H * n_u} excede {LIMITE_H_NU}")
    logger.debug(f"ensamblando M⁽ᴴ⁾ de {H * n_u}×{H * n_u} (≈ {8 * (H * n_u) ** 2 / 2**20:.1f} MiB)")

    potencias = _potencias(A, H)
    GA = [G.G @ Ak for Ak in potencias]

    # bloques de M que sólo dependen de k − m
    diferencia = [B.T @ G.G @ B + R]
    for d in range(1, H):
        diferencia.append(B.T @ GA[d] @ B + S @ potencias[d - 1] @ B)

    M = np.zeros((H * n_u, H * n_u))
    for k in range(H):
        for m in range(k + 1):
            bloque_km = diferencia[k - m]
            M[k * n_u:(k + 1) * n_u, m * n_u:(m + 1) * n_u] = bloque_km
            if k != m:
                M[m * n_u:(m + 1) * n_u, k * n_u:(k + 1) * n_u] = bloque_km.T
    M = 0.5 * (M + M.T)

    J = np.vstack([B.T @ GA[k] + S @ potencias[k - 1] for k in range(1, H + 1)])

    if estabilidad is None:
        estabilidad = ajustar_estabilidad(A)
    return SistemaPerturbacion(
        M=M, J=J, G_usado=G,
        cota_lambda_min=cota_lambda_min(Q, R, S),
        cota_lambda_max=cota_lambda_max(problema, estabilidad),
        H=H, estabilidad=estabilidad,
    )


def cota_lambda_min(Q, R, S) -> float:
    """λ_min(R − SQ⁻¹Sᵀ), cota inferior de λ_min(M⁽ᴴ⁾)."""
    return float(linalg.eigvalsh(complemento_schur(Q, R, S))[0])


def cota_lambda_max(problema: ProblemaLqr, cert: CertificadoEstabilidad) -> float:
    """λ_max(R) + 4τ²(‖B‖²‖Q‖ + ‖B‖‖S‖)/(1 − e^{−2ρ})²."""
    _, B, Q, R, S = problema.matrices()
    nB, nQ, nS = norma_espectral(B), norma_espectral(Q), norma_espectral(S)
    return float(linalg.eigvalsh(R)[-1]) + 4 * cert.tau ** 2 * (nB ** 2 * nQ + nB * nS) / (
        1 - math.exp(-2 * cert.rho)) ** 2


def nucleo_costo_explicito(problema: ProblemaLqr, G: SumaLyapunov, H: int) -> dict:
    """
    Núcleo (n_x + H·n_u)² de la forma cuadrática del costo armado desde sus
    piezas: Ξ (filas 𝐀_1 … 𝐀_{H+1}, con 𝐀_j = [A^{j−1}, …, I, 0, …]),
    Λ = Ξᵀ·diag(Q, …, Q, G)·Ξ, 𝐁 = diag(I, B, …, B), 𝐑 = diag(0, R, …, R) y
    𝐒 con filas S·𝐀_k. El núcleo es 𝐁ᵀΛ𝐁 + 𝐑 + 𝐒𝐁 + (𝐒𝐁)ᵀ; su bloque inferior
    derecho es M⁽ᴴ⁾ y el inferior izquierdo J⁽ᴴ⁾.
    """
    A, B, Q, R, S = problema.matrices()
    n_x, n_u = problema.n_x, problema.n_u
    potencias = _potencias(A, H)

    Xi = np.zeros(((H + 1) * n_x, (H + 1) * n_x))
    for j in range(1, H + 2):
        for k in range(j):
            Xi[(j - 1) * n_x:j * n_x, k * n_x:(k + 1) * n_x] = potencias[j - 1 - k]

    pesos = linalg.block_diag(*([Q] * H + [G.G]))
    Lambda = Xi.T @ pesos @ Xi

    B_neg = linalg.block_diag(np.eye(n_x), *([B] * H))
    R_neg = linalg.block_diag(np.zeros((n_x, n_x)), *([R] * H))
    S_neg = np.zeros((n_x + H * n_u, (H + 1) * n_x))
    for k in range(1, H + 1):
        S_neg[n_x + (k - 1) * n_u:n_x + k * n_u] = S @ Xi[(k - 1) * n_x:k * n_x]

    cruzado = S_neg @ B_neg
    nucleo = B_neg.T @ Lambda @ B_neg + R_neg + cruzado + cruzado.T
    return {"Xi": Xi, "Lambda": Lambda, "B": B_neg, "R": R_neg, "S": S_neg, "nucleo": nucleo}


# ── Soluciones ──────────────────────────────────────────────────────

def resolver_directo(ds: SistemaPerturbacion, problema: ProblemaLqr) -> ControladorPerturbacion:
    """L = −M⁻¹J por factorización de Cholesky."""
    try:
        factor = linalg.cho_factor(ds.M)
    except linalg.LinAlgError as error:
        raise MatrizMSingular("M⁽ᴴ⁾ no es definida positiva") from error
    L = -linalg.cho_solve(factor, ds.J)

    residuo = float(np.linalg.norm(ds.M @ L + ds.J, 2))
    norma_J = float(np.linalg.norm(ds.J, 2))
    tolerancia = TOL_RESIDUO * norma_J if norma_J > 0 else 1e-12
    if residuo > tolerancia:
        raise ErrorNumerico(f"residuo ‖ML + J‖ = {residuo:.3g} excede {tolerancia:.3g}")
    return controlador_desde_apilado(L, ds.H, problema, residuo)


def _lambda_neumann(ds: SistemaPerturbacion, exacto: bool) -> tuple:
    if exacto:
        autovalores = linalg.eigvalsh(ds.M)
        return float(autovalores[0]), float(autovalores[-1])
    return ds.cota_lambda_min, ds.cota_lambda_max


def resolver_neumann(ds: SistemaPerturbacion, problema: ProblemaLqr, t: int,
                     exacto: bool = False) -> ControladorPerturbacion:
    """
    L^{(H),t} = −(1/λ)·Σ_{s<t} (I − M/λ)^s J, con λ la cota superior de λ_max(M)
    (o el autovalor exacto si `exacto`). Se arma con L ← L − (ML + J)/λ desde L = 0.
    """
    if t < 1:
        raise EntradaInvalida(f"t debe ser positivo (t={t})")
    _, lam = _lambda_neumann(ds, exacto)
    L = np.zeros_like(ds.J)
    for _ in range(t):
        L = L - (ds.M @ L + ds.J) / lam
    return controlador_desde_apilado(L, ds.H, problema)


def cota_error_neumann(ds: SistemaPerturbacion, t: int, exacto: bool = False) -> float:
    """(‖J‖/λ_min)·e^{−(λ_min/λ_max)·t}."""
    lam_min, lam_max = _lambda_neumann(ds, exacto)
    return float(np.linalg.norm(ds.J, 2)) / lam_min * math.exp(-(lam_min / lam_max) * t)


def costo_perturbacion(problema: ProblemaLqr, G: SumaLyapunov, ds: SistemaPerturbacion,
                       L: ControladorPerturbacion) -> float:
    """trace([I, Lᵀ]·[[G, Jᵀ], [J, M]]·[I; L]) = tr(G) + 2·tr(LᵀJ) + tr(LᵀML)."""
    Lm = L.apilado
    if Lm.shape != ds.J.shape:
        raise EntradaInvalida("el controlador no coincide con el sistema ensamblado")
    return float(np.trace(G.G) + 2.0 * np.sum(Lm * ds.J) + np.sum(Lm * (ds.M @ Lm)))


# ── Verificaciones ──────────────────────────────────────────────────

def brecha_primer_bloque(K, L: ControladorPerturbacion, problema: ProblemaLqr, cert: CertificadoEstabilidad) -> tuple:
    """
    Brecha ‖K + L₁⁽ᴴ⁾‖ y su cota
    2τ³(‖B‖²‖K‖‖Q‖ + ‖B‖‖K‖‖S‖)/(λ_min(R − SQ⁻¹Sᵀ)(1 − e^{−2ρ})^{5/2})·e^{−Hρ},
    con (τ, ρ) un certificado común de A y A − BK.
    """
    _, B, Q, R, S = problema.matrices()
    K = densa(K)
    brecha = norma_espectral(K + L.bloques[0].datos)
    nB, nK, nQ, nS = (norma_espectral(X) for X in (B, K, Q, S))
    tau, rho = cert.tau, cert.rho
    cota = (2 * tau ** 3 * (nB ** 2 * nK * nQ + nB * nK * nS)
            / (cota_lambda_min(Q, R, S) * (1 - math.exp(-2 * rho)) ** 2.5)
            * math.exp(-L.H * rho))
    return brecha, float(cota)


def verificar_cotas_autovalores(ds: SistemaPerturbacion) -> dict:
    autovalores = linalg.eigvalsh(ds.M)
    lam_min, lam_max = float(autovalores[0]), float(autovalores[-1])
    simetrica = float(np.max(np.abs(ds.M - ds.M.T))) <= TOL_SIMETRIA
    cumple_min = lam_min >= ds.cota_lambda_min - TOL_COTA
    cumple_max = lam_max <= ds.cota_lambda_max + TOL_COTA
    return {
        "cumple": bool(simetrica and cumple_min and cumple_max),
        "lambda_min": lam_min, "lambda_max": lam_max,
        "cota_min": ds.cota_lambda_min, "cota_max": ds.cota_lambda_max,
    }


def constantes_decaimiento_mj(problema: ProblemaLqr, cert: CertificadoEstabilidad, constantes: dict) -> dict:
    """Constantes (c_M, c_J, γ_M) del decaimiento espacial de M⁽ᴴ⁾ y J⁽ᴴ⁾."""
    _, _, Q, _, S = problema.matrices()
    N = problema.topologia.n_agentes
    a, b, q, r, s = (constantes[k] for k in ("a", "b", "q", "r", "s"))
    tau, rho = cert.tau, cert.rho
    serie = tau ** 2 * norma_espectral(Q) / (1 - math.exp(-2 * rho)) + 2 * q
    c_M = b ** 2 * N ** 2 * serie + b * N * (s + tau * norma_espectral(S)) + r
    c_J = b * N * serie + s + tau * norma_espectral(S)
    gamma_M = constantes["gamma_sys"] * rho / (rho + math.log(a * N))
    return {"c_M": c_M, "c_J": c_J, "gamma_M": gamma_M}


def verificar_sed_mj(ds: SistemaPerturbacion, problema: ProblemaLqr, constantes: dict) -> dict:
    """
    Revisa bloque a bloque que cada M_km cumpla la cota (c_M, γ_M) y cada J_k la
    cota (c_J, γ_M). Informa la menor holgura relativa y el primer bloque infractor
    como (k, m, i, j) (m = −1 para bloques de J).
    """
    T = problema.topologia
    D = np.asarray(T.distancia).astype(float)
    cotas_mj = constantes_decaimiento_mj(problema, ds.estabilidad, constantes)
    n_u, n_x, H = problema.n_u, problema.n_x, ds.H
    caida = np.exp(-cotas_mj["gamma_M"] * D)

    holgura, infractor = math.inf, None

    def revisar(normas, c, indice):
        nonlocal holgura, infractor
        cota = c * caida
        with np.errstate(divide="ignore", invalid="ignore"):
            relativa = np.where(cota > 0, (cota - normas) / cota, np.where(normas > 0, -np.inf, 1.0))
        peor = np.unravel_index(np.argmin(relativa), relativa.shape)
        holgura = min(holgura, float(relativa[peor]))
        if relativa[peor] < -1e-12 and infractor is None:
            infractor = (*indice, int(peor[0]), int(peor[1]))

    for k in range(H):
        for m in range(H):
            bloque_km = ds.M[k * n_u:(k + 1) * n_u, m * n_u:(m + 1) * n_u]
            revisar(normas_bloque(MatrizBloques(bloque_km, T.dims_entrada, T.dims_entrada)), cotas_mj["c_M"], (k, m))
        bloque_k = ds.J[k * n_u:(k + 1) * n_u, :n_x]
        revisar(normas_bloque(MatrizBloques(bloque_k, T.dims_entrada, T.dims_estado)), cotas_mj["c_J"], (k, -1))

    if infractor is not None:
        logger.warning(f"cota de decaimiento de M/J violada en el bloque (k, m, i, j) = {infractor}")
    return {"cumple": infractor is None, "holgura": holgura, "infractor": infractor, **cotas_mj}


def constantes_decaimiento_L(ds: SistemaPerturbacion, problema: ProblemaLqr, constantes: dict) -> dict:
    """
    Constantes formales de decaimiento de L⁽ᴴ⁾ (y de K, que hereda las de L₁):
    c_L = ‖J‖/λ_min + 2c_J, γ_L = λ_min·γ_M/(λ_max·ln(c_M·N·H + 1) + λ_min).
    """
    cotas_mj = constantes_decaimiento_mj(problema, ds.estabilidad, constantes)
    N = problema.topologia.n_agentes
    lam_min, lam_max = ds.cota_lambda_min, ds.cota_lambda_max
    c_L = float(np.linalg.norm(ds.J, 2)) / lam_min + 2 * cotas_mj["c_J"]
    gamma_L = lam_min * cotas_mj["gamma_M"] / (lam_max * math.log(cotas_mj["c_M"] * N * ds.H + 1) + lam_min)
    return {"c_L": c_L, "gamma_L": gamma_L, "c_K": c_L, "gamma_K": gamma_L}


def verificar_decaimiento_L(L: ControladorPerturbacion, problema: ProblemaLqr, formales: dict) -> bool:
    D = np.asarray(problema.topologia.distancia).astype(float)
    cota = formales["c_L"] * np.exp(-formales["gamma_L"] * D) * (1 + 1e-12)
    return all(bool(np.all(normas_bloque(Lk) <= cota)) for Lk in L.bloques)


def errores_neumann(ds: SistemaPerturbacion, L_directo: ControladorPerturbacion, t_max: int,
                    exacto: bool = False) -> list:
    """(t, ‖L⁽ᴴ⁾ − L^{(H),t}‖, cota) para t = 1..t_max con una sola pasada de la iteración."""
    _, lam = _lambda_neumann(ds, exacto)
    objetivo = L_directo.apilado
    L = np.zeros_like(ds.J)
    filas = []
    for t in range(1, t_max + 1):
        L = L - (ds.M @ L + ds.J) / lam
        filas.append((t, norma_espectral(objetivo - L), cota_error_neumann(ds, t, exacto)))
    return filas
