"""
Generadores de los sistemas LQR de referencia (ecuación del calor, contraejemplo,
ejemplo de juguete, red térmica y oscilación de red eléctrica) y el registro de
sistemas integrados usado por la CLI y la interfaz.
"""
import math
from dataclasses import replace

import numpy as np
from loguru import logger
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, laplacian
from scipy.spatial.distance import pdist, squareform

from src.bloques import MatrizBloques, ajustar_sed, ajustar_sed_a_tasa
from src.constantes import (
    ALPHA1, ALPHA2, ALPHA_TERMICO, B_GANANCIA, CAPACITANCIA_DESV, CAPACITANCIA_MEDIA, CAPACITANCIA_MIN,
    DT_SWING, DT_TERMICO, ETA_MAXIMO, GAMMA_CAP, INERCIA, N_BUSES_SINTETICO, SUSCEPTANCIA_BASE, V_REF,
    ZETA_DEFECTO,
)
from src.discretizacion import SistemaContinuo, discretizar
from src.errores import EntradaInvalida, ErrorUso, TopologiaInvalida
from src.problema import ProblemaLqr, crear_problema
from src.topologia import Topologia, construir_ciclo, construir_grilla, desde_lista_aristas, topologia_ciclica


def laplaciano(T: Topologia) -> np.ndarray:
    """Laplaciano del grafo de agentes (sin pesos)."""
    filas, columnas = zip(*sorted(T.aristas)) if T.aristas else ((), ())
    adyacencia = csr_matrix((np.ones(len(filas)), (filas, columnas)), shape=(T.n_agentes, T.n_agentes))
    return laplacian(adyacencia + adyacencia.T).toarray()


# ── Ecuación del calor ──────────────────────────────────────────────

def ecuacion_calor(n: int, eta: float, b=None, q=None, r=None, nombre: str = "heat-cycle") -> ProblemaLqr:
    """
    Ecuación del calor discretizada sobre el ciclo Z_N:
    x_{t+1}^i = x_t^i + η(−2x_t^i + x_t^{i+1} + x_t^{i−1} + b_i u_t^i).

    Parámetros:
    -----------
    n : int
        Número de agentes (N ≥ 3).
    eta : float
        Paso de difusión; con η > 1/4 A deja de ser semidefinida y se registra
        una advertencia, pero el sistema se construye igual.
    b, q, r : list[float] | None
        Coeficientes por agente (por defecto 1).
    """
    T = construir_ciclo(n, 1, 1)
    b = np.ones(n) if b is None else np.asarray(b, dtype=float)
    q = np.ones(n) if q is None else np.asarray(q, dtype=float)
    r = np.ones(n) if r is None else np.asarray(r, dtype=float)
    for nombre_coef, coef in (("b", b), ("q", q), ("r", r)):
        if coef.shape != (n,):
            raise EntradaInvalida(f"se esperaban {n} coeficientes {nombre_coef}")

    advertencias = ()
    if eta > ETA_MAXIMO:
        logger.warning(f"η = {eta} > 1/4: A no es semidefinida positiva")
        advertencias = ("eta-fuera-de-rango",)

    A = np.eye(n) - eta * laplaciano(T)
    gamma_sys = -math.log(eta) if eta > 0 else GAMMA_CAP
    constantes = {
        "a": 1.0,
        "b": max(eta * float(np.abs(b).max()), 1.0),
        "q": max(float(q.max()), 1.0),
        "r": max(float(r.max()), 1.0),
        "s": 0.0,
        "gamma_sys": min(gamma_sys, GAMMA_CAP),
    }
    return crear_problema(
        A, eta * np.diag(b), np.diag(q), np.diag(r), None, T,
        nombre=nombre,
        parametros={"generador": "heat", "n": n, "eta": eta},
        constantes_sed=constantes,
        advertencias=advertencias,
    )


def ecuacion_calor_estable(n: int, eta: float, rho: float, alpha: float = 1.0) -> ProblemaLqr:
    """Variante estable A = e^{−ρ}(I − ηL), B = ηI, Q = I, R = αI."""
    base = ecuacion_calor(n, eta, r=np.full(n, alpha), nombre="heat-cycle-stable")
    A = math.exp(-rho) * base.A.datos
    return replace(
        base,
        A=MatrizBloques(A, base.A.particion_filas, base.A.particion_columnas),
        parametros={**base.parametros, "rho": rho, "alpha": alpha},
    )


# ── Contraejemplo y ejemplo de juguete ─────────────────────────────

def contraejemplo(n: int, a: float, nombre: str = "counterexample") -> ProblemaLqr:
    """A = a·I, B bidiagonal superior de unos (sin cierre), Q = R = I, S = 0 sobre Z_N."""
    if n < 2:
        raise TopologiaInvalida(f"el contraejemplo necesita N ≥ 2 (N={n})")
    T = topologia_ciclica(n, 1, 1)
    B = np.eye(n) + np.eye(n, k=1)
    problema = crear_problema(
        a * np.eye(n), B, np.eye(n), np.eye(n), None, T,
        nombre=nombre,
        parametros={"generador": "counterexample", "n": n, "a": a},
    )
    return replace(problema, constantes_sed=constantes_sed(problema))


def ejemplo_juguete(n: int, rho: float) -> ProblemaLqr:
    return contraejemplo(n, math.exp(-rho), nombre="toy-rho")


# ── Red térmica ─────────────────────────────────────────────────────

def muestrear_capacitancias(n: int, semilla: int) -> tuple:
    """v_i = 200 + 20·N(0,1); las no positivas se recortan a 100 y se informan."""
    rng = np.random.default_rng(semilla)
    v = CAPACITANCIA_MEDIA + CAPACITANCIA_DESV * rng.standard_normal(n)
    recortadas = v <= 0
    if np.any(recortadas):
        logger.warning(f"{int(recortadas.sum())} capacitancias no positivas recortadas a {CAPACITANCIA_MIN}")
        v = np.where(recortadas, CAPACITANCIA_MIN, v)
    return v, bool(np.any(recortadas))


def red_termica(filas: int, columnas: int, capacitancias=None, zeta: float = ZETA_DEFECTO,
                alpha: float = ALPHA_TERMICO, dt: float = DT_TERMICO, semilla: int = 0) -> ProblemaLqr:
    """
    Zonas térmicas en grilla: ẋ_i = Σ_{j∈N_i} (x_j − x_i)/(v_i ζ) + u_i/v_i,
    Q_c = αI, R_c = I, discretizada con paso dt (horas).
    """
    if zeta <= 0 or alpha <= 0 or dt <= 0:
        raise EntradaInvalida("ζ, α y dt deben ser positivos")
    T = construir_grilla(filas, columnas, 1, 1)
    n = T.n_agentes

    recorte = False
    if capacitancias is None:
        v, recorte = muestrear_capacitancias(n, semilla)
    else:
        v = np.asarray(capacitancias, dtype=float)
        if v.shape != (n,):
            raise EntradaInvalida(f"se esperaban {n} capacitancias")
        if np.any(v <= 0):
            logger.warning("capacitancias no positivas recortadas")
            v, recorte = np.where(v <= 0, CAPACITANCIA_MIN, v), True

    sistema = SistemaContinuo(
        A_c=-np.diag(1.0 / (v * zeta)) @ laplaciano(T),
        B_c=np.diag(1.0 / v),
        Q_c=alpha * np.eye(n),
        R_c=np.eye(n),
        topologia=T,
    )
    problema = discretizar(
        sistema, dt,
        nombre="thermal-grid",
        parametros={"generador": "thermal", "rows": filas, "cols": columnas, "zeta": zeta,
                    "alpha": alpha, "dt": dt, "seed": semilla},
        advertencias=("capacitancia-recortada",) if recorte else (),
    )
    return replace(problema, constantes_sed=constantes_sed(problema))


# ── Oscilación de red eléctrica ─────────────────────────────────────

def sistema_oscilacion(T: Topologia, v_ref: float = V_REF, inercia: float = INERCIA,
                       b_ganancia: float = B_GANANCIA, alpha1: float = ALPHA1,
                       alpha2: float = ALPHA2, restaurador: bool = False) -> SistemaContinuo:
    """
    Ecuación de oscilación linealizada por barra, estado (θ_i, ω_i):
    θ̇_i = ω_i,  ω̇_i = −Σ_j k_ij(θ_j − θ_i) + b_i u_i,  k_ij = ℓ_ij·V_ref²/M.

    Con `restaurador=True` el acoplamiento cambia de signo,
    ω̇_i = −Σ_j k_ij(θ_i − θ_j) + b_i u_i, y el sistema continuo queda marginalmente estable.
    """
    if not T.conexa():
        raise TopologiaInvalida("la red eléctrica debe ser conexa")
    n = T.n_agentes
    T2 = desde_lista_aristas(n, [(i, j, T.peso(i, j, 0.0)) for i, j in sorted(T.aristas)], [2] * n, [1] * n)

    A_c = np.zeros((2 * n, 2 * n))
    for i in range(n):
        A_c[2 * i, 2 * i + 1] = 1.0
    for i, j in sorted(T2.aristas):
        susceptancia = T2.peso(i, j, 0.0)
        if susceptancia <= 0:
            raise EntradaInvalida(f"susceptancia no positiva en la línea ({i}, {j})", arista=(i, j))
        k = susceptancia * v_ref ** 2 / inercia
        if restaurador:
            k = -k
        for a, b in ((i, j), (j, i)):
            A_c[2 * a + 1, 2 * a] += k
            A_c[2 * a + 1, 2 * b] -= k

    B_c = np.zeros((2 * n, n))
    B_c[2 * np.arange(n) + 1, np.arange(n)] = b_ganancia
    Q_c = np.diag(np.tile([alpha1, alpha2], n))
    return SistemaContinuo(A_c=A_c, B_c=B_c, Q_c=Q_c, R_c=np.eye(n), topologia=T2)


def oscilacion_red(T: Topologia, v_ref: float = V_REF, inercia: float = INERCIA,
                   b_ganancia: float = B_GANANCIA, alpha1: float = ALPHA1, alpha2: float = ALPHA2,
                   dt: float = DT_SWING, nombre: str = "swing", parametros=None,
                   restaurador: bool = False) -> ProblemaLqr:
    sistema = sistema_oscilacion(T, v_ref, inercia, b_ganancia, alpha1, alpha2, restaurador)
    problema = discretizar(
        sistema, dt,
        nombre=nombre,
        parametros={"generador": "swing", "dt": dt, "metodo_dare": "duplicacion", "restaurador": restaurador,
                    **(parametros or {})},
    )
    return replace(problema, constantes_sed=constantes_sed(problema))


def red_sintetica(n: int = N_BUSES_SINTETICO, semilla: int = 0) -> Topologia:
    """
    Grafo geométrico aleatorio con semilla como sustituto de la red de 145 barras:
    puntos uniformes en el cuadrado unitario, radio de conexión para grado medio ≈ 3,
    componentes unidas por el par de puntos más cercano, ℓ = 1e-6·U(0.5, 1.5).
    """
    rng = np.random.default_rng(semilla)
    puntos = rng.uniform(size=(n, 2))
    distancias = squareform(pdist(puntos))
    radio = math.sqrt(3.0 / (math.pi * n))

    cercanos = (distancias <= radio) & ~np.eye(n, dtype=bool)
    aristas = {(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(cercanos)))}

    while True:
        adyacencia = np.zeros((n, n))
        for i, j in aristas:
            adyacencia[i, j] = adyacencia[j, i] = 1.0
        n_comp, etiquetas = connected_components(csr_matrix(adyacencia), directed=False)
        if n_comp == 1:
            break
        dentro = etiquetas == etiquetas[0]
        sub = np.where(dentro[:, None] & ~dentro[None, :], distancias, np.inf)
        i, j = np.unravel_index(np.argmin(sub), sub.shape)
        aristas.add((int(min(i, j)), int(max(i, j))))

    ordenadas = sorted(aristas)
    susceptancias = SUSCEPTANCIA_BASE * rng.uniform(0.5, 1.5, size=len(ordenadas))
    return desde_lista_aristas(n, [(i, j, w) for (i, j), w in zip(ordenadas, susceptancias)], [1] * n, [1] * n)


# ── Constantes SED del sistema ──────────────────────────────────────

def constantes_sed(problema: ProblemaLqr) -> dict:
    """
    Constantes (a, b, q, r, s, γ_sys) de decaimiento del sistema. Si el generador
    las fijó se devuelven tal cual; si no, γ_sys es la menor tasa envolvente
    positiva entre A, B, Q y R, y cada c se reajusta a esa tasa (con a, b, q, r ≥ 1).
    """
    if problema.constantes_sed is not None:
        return problema.constantes_sed

    T = problema.topologia
    matrices = {"a": problema.A, "b": problema.B, "q": problema.Q, "r": problema.R}
    tasas = []
    for M in matrices.values():
        if np.any(M.datos):
            cert = ajustar_sed(M, T, "envolvente")
            if cert.gamma > 0:
                tasas.append(cert.gamma)
    gamma_sys = min(tasas) if tasas else 1.0

    constantes = {clave: max(ajustar_sed_a_tasa(M, T, gamma_sys).c, 1.0) for clave, M in matrices.items()}
    constantes["s"] = ajustar_sed_a_tasa(problema.S, T, gamma_sys).c if np.any(problema.S.datos) else 0.0
    constantes["gamma_sys"] = gamma_sys
    return constantes


# ── Registro de sistemas integrados ─────────────────────────────────

def _heat_cycle(n=10, eta=0.1, alpha=1.0, **_):
    problema = ecuacion_calor(n, eta, r=np.full(n, alpha))
    return replace(problema, K0=np.eye(n), parametros={**problema.parametros, "alpha": alpha})


def _heat_cycle_stable(n=10, eta=0.1, rho=0.1, alpha=1.0, **_):
    return ecuacion_calor_estable(n, eta, rho, alpha)


def _counterexample(n=100, a=1.1, **_):
    return contraejemplo(n, a)


def _toy_rho(n=100, rho=0.1, **_):
    return ejemplo_juguete(n, rho)


def _thermal_grid(rows=3, cols=3, alpha=ALPHA_TERMICO, dt=DT_TERMICO, seed=0, **_):
    return red_termica(rows, cols, alpha=alpha, dt=dt, semilla=seed)


def _swing_synthetic(n=N_BUSES_SINTETICO, dt=DT_SWING, seed=0, **_):
    T = red_sintetica(n, seed)
    return oscilacion_red(T, dt=dt, nombre="swing-synthetic", parametros={"n": n, "seed": seed})


SISTEMAS_INTEGRADOS = {
    "heat-cycle":        _heat_cycle,
    "heat-cycle-stable": _heat_cycle_stable,
    "counterexample":    _counterexample,
    "toy-rho":           _toy_rho,
    "thermal-grid":      _thermal_grid,
    "swing-synthetic":   _swing_synthetic,
}


def construir_integrado(nombre: str, **parametros) -> ProblemaLqr:
    """Construye un sistema del registro; los parámetros en None toman el valor por defecto."""
    if nombre not in SISTEMAS_INTEGRADOS:
        raise ErrorUso(f"sistema desconocido: {nombre}")
    dados = {k: v for k, v in parametros.items() if v is not None}
    logger.debug(f"construyendo {nombre} con {dados}")
    return SISTEMAS_INTEGRADOS[nombre](**dados)
