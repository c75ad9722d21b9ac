"""
Matrices particionadas por agente, perfiles de norma por distancia y
certificados de decaimiento espacial exponencial (SED).
"""
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.constantes import DISTANCIA_INALCANZABLE, EPS_PISO, GAMMA_CAP, TOL_BISECCION
from src.errores import EntradaInvalida, ErrorDimensiones, ErrorNumerico, IndiceInvalido, TopologiaInvalida

# holgura relativa al comparar una norma contra c·e^{-γd}
_HOLGURA = 1e-12


@dataclass(frozen=True)
class MatrizBloques:
    datos:              np.ndarray
    particion_filas:    tuple
    particion_columnas: tuple

    def __post_init__(self):
        datos = np.asarray(self.datos, dtype=float)
        if datos.ndim != 2:
            raise ErrorDimensiones("se esperaba una matriz")
        object.__setattr__(self, "datos", datos)
        object.__setattr__(self, "particion_filas", tuple(int(p) for p in self.particion_filas))
        object.__setattr__(self, "particion_columnas", tuple(int(p) for p in self.particion_columnas))
        if sum(self.particion_filas) != datos.shape[0] or sum(self.particion_columnas) != datos.shape[1]:
            raise ErrorDimensiones(
                f"particiones {sum(self.particion_filas)}×{sum(self.particion_columnas)} "
                f"no cubren una matriz {datos.shape[0]}×{datos.shape[1]}"
            )

    @property
    def inicios_filas(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.particion_filas)]).astype(int)

    @property
    def inicios_columnas(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.particion_columnas)]).astype(int)

    @property
    def cuadrada(self) -> bool:
        return self.particion_filas == self.particion_columnas


def bloque(X: MatrizBloques, i: int, j: int) -> np.ndarray:
    """Submatriz [X]_{ij} de tamaño particion_filas[i] × particion_columnas[j]."""
    if not (0 <= i < len(X.particion_filas)) or not (0 <= j < len(X.particion_columnas)):
        raise IndiceInvalido(f"bloque ({i}, {j}) fuera de rango", i=i, j=j)
    f, c = X.inicios_filas, X.inicios_columnas
    return X.datos[f[i]:f[i + 1], c[j]:c[j + 1]]


def reensamblar(bloques: list, particion_filas, particion_columnas) -> MatrizBloques:
    """Inversa de `bloque`: arma la matriz a partir de la lista de filas de bloques."""
    datos = np.block([[np.asarray(b, dtype=float).reshape(p, q)
                       for b, q in zip(fila, particion_columnas)]
                      for fila, p in zip(bloques, particion_filas)])
    return MatrizBloques(datos, particion_filas, particion_columnas)


def norma_espectral(M) -> float:
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ErrorNumerico("la matriz tiene entradas no finitas")
    if M.size == 0:
        return 0.0
    if M.ndim < 2:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def normas_bloque(X: MatrizBloques) -> np.ndarray:
    """Matriz de normas espectrales ‖[X]_{ij}‖ (una entrada por par de agentes)."""
    if not np.all(np.isfinite(X.datos)):
        raise ErrorNumerico("la matriz tiene entradas no finitas")
    pf, pc = X.particion_filas, X.particion_columnas
    n_f, n_c = len(pf), len(pc)

    if len(set(pf)) == 1 and len(set(pc)) == 1:
        r, c = pf[0], pc[0]
        if r == 0 or c == 0:
            return np.zeros((n_f, n_c))
        if r == 1 and c == 1:
            return np.abs(X.datos).copy()
        return np.linalg.norm(X.datos.reshape(n_f, r, n_c, c), ord=2, axis=(1, 3))

    normas = np.zeros((n_f, n_c))
    for i in range(n_f):
        for j in range(n_c):
            normas[i, j] = norma_espectral(bloque(X, i, j))
    return normas


def _validar_particion(X: MatrizBloques, T):
    dims = (T.dims_estado, T.dims_entrada)
    if X.particion_filas not in dims or X.particion_columnas not in dims:
        raise ErrorDimensiones("las particiones no corresponden a la topología")


def _exigir_conexa(T):
    if not T.conexa():
        raise TopologiaInvalida("la topología no es conexa; no hay decaimiento que medir")


def perfil_normas(X: MatrizBloques, T) -> list:
    """
    Perfil de decaimiento: para cada distancia realizada d, el máximo de ‖[X]_{ij}‖
    sobre los pares con dist(i,j) = d.

    Retorna:
    --------
    list[tuple[int, float]]
        Pares (d, norma máxima) ordenados por d; las distancias sin pares se omiten.
    """
    _validar_particion(X, T)
    normas = normas_bloque(X)
    D = np.asarray(T.distancia)
    perfil = []
    for d in np.unique(D):
        if d == DISTANCIA_INALCANZABLE:
            continue
        perfil.append((int(d), float(normas[D == d].max())))
    return perfil


def perfil_fila(X: MatrizBloques, T, fila: int) -> list:
    """Normas ‖[X]_{fila,j}‖ de una fila de bloques junto a dist(fila, j)."""
    _validar_particion(X, T)
    if not (0 <= fila < T.n_agentes):
        raise IndiceInvalido(f"fila {fila} fuera de [0, {T.n_agentes})")
    normas = normas_bloque(X)
    return [(j, int(T.distancia[fila, j]), float(normas[fila, j])) for j in range(T.n_agentes)]


@dataclass(frozen=True)
class CertificadoSed:
    c:                    float
    gamma:                float
    max_violacion:        float
    modo:                 str = "envolvente"
    degenerado:           bool = False
    limitado_por_soporte: bool = False

    def cota(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        if self.c == 0:
            return np.zeros_like(d)
        with np.errstate(invalid="ignore"):
            return np.where(d == 0, self.c, self.c * np.exp(-self.gamma * d))

    def como_fila(self, nombre: str) -> dict:
        return {"name": nombre, "c": self.c, "gamma": self.gamma,
                "max_violation": self.max_violacion, "mode": self.modo}


def _exceso(normas: np.ndarray, D: np.ndarray, c: float, gamma: float) -> float:
    """Mayor exceso relativo de un bloque sobre c·e^{-γ·dist}; 0 si el certificado vale."""
    alcanzable = D != DISTANCIA_INALCANZABLE
    n = normas[alcanzable]
    d = D[alcanzable].astype(float)
    with np.errstate(over="ignore", invalid="ignore"):
        cota = np.where(d == 0, c, c * np.exp(-gamma * d))
    cota = cota * (1.0 + _HOLGURA)
    sobre = n > cota
    if not np.any(sobre):
        return 0.0
    with np.errstate(divide="ignore"):
        relativo = np.where(cota[sobre] > 0, (n[sobre] - cota[sobre]) / cota[sobre], np.inf)
    return float(relativo.max())


def verificar_certificado(X: MatrizBloques, T, cert: CertificadoSed) -> float:
    """Recalcula la violación máxima del certificado contra todos los bloques."""
    _validar_particion(X, T)
    return _exceso(normas_bloque(X), np.asarray(T.distancia), cert.c, cert.gamma)


def _certificado_degenerado(modo: str) -> CertificadoSed:
    logger.warning("matriz nula: certificado degenerado (c=0, γ=∞)")
    return CertificadoSed(c=0.0, gamma=math.inf, max_violacion=0.0, modo=modo, degenerado=True)


def ajustar_sed(X: MatrizBloques, T, modo: str = "envolvente") -> CertificadoSed:
    """
    Ajusta un certificado (c, γ) tal que ‖[X]_{ij}‖ ≤ c·e^{-γ·dist(i,j)}.

    Parámetros:
    -----------
    X : MatrizBloques
        Matriz particionada según la topología.
    T : Topologia
        Debe ser conexa.
    modo : str
        "envolvente": c = máxima norma a distancia 0 y la mayor γ sin violaciones
        (bisección en [0, γ_cap]). "regresion": mínimos cuadrados de log(perfil)
        contra d, con posible violación.
    """
    if modo not in ("envolvente", "regresion"):
        raise EntradaInvalida(f"modo de ajuste desconocido: {modo}")
    _exigir_conexa(T)
    _validar_particion(X, T)

    normas = normas_bloque(X)
    D = np.asarray(T.distancia)
    if not np.any(normas > 0):
        return _certificado_degenerado(modo)

    perfil = perfil_normas(X, T)
    distancias = np.array([d for d, _ in perfil], dtype=float)
    valores = np.array([p for _, p in perfil])

    if modo == "regresion":
        return _ajuste_regresion(normas, D, distancias, valores)
    return _ajuste_envolvente(normas, D, valores)


def _ajuste_envolvente(normas, D, valores, modo: str = "envolvente") -> CertificadoSed:
    c = float(valores[0])
    if np.any(valores > c):
        c = float(valores.max())

    if _exceso(normas, D, c, GAMMA_CAP) == 0.0:
        logger.debug("bloques lejanos nulos: γ limitado por soporte")
        return CertificadoSed(c, GAMMA_CAP, 0.0, modo, limitado_por_soporte=True)

    bajo, alto = 0.0, GAMMA_CAP
    while alto - bajo > TOL_BISECCION:
        medio = 0.5 * (bajo + alto)
        if _exceso(normas, D, c, medio) == 0.0:
            bajo = medio
        else:
            alto = medio
    return CertificadoSed(c, bajo, _exceso(normas, D, c, bajo), modo)


def _ajuste_regresion(normas, D, distancias, valores) -> CertificadoSed:
    positivos = valores > EPS_PISO
    d, p = distancias[positivos], valores[positivos]
    if len(d) == 0:
        # todo el perfil bajo el piso del logaritmo
        return _ajuste_envolvente(normas, D, valores, "regresion")
    if len(d) < 2:
        c = float(p[0])
        return CertificadoSed(c, GAMMA_CAP, _exceso(normas, D, c, GAMMA_CAP), "regresion",
                              limitado_por_soporte=True)
    pendiente, intercepto = np.polyfit(d, np.log(p), 1)
    gamma = max(0.0, float(-pendiente))
    c = float(np.exp(intercepto))
    return CertificadoSed(c, gamma, _exceso(normas, D, c, gamma), "regresion")


def ajustar_sed_a_tasa(X: MatrizBloques, T, gamma: float) -> CertificadoSed:
    """Menor c tal que X es (c, γ)-SED para una tasa γ fija."""
    _exigir_conexa(T)
    _validar_particion(X, T)
    normas = normas_bloque(X)
    D = np.asarray(T.distancia).astype(float)
    c = float(np.max(normas * np.exp(gamma * D))) if normas.size else 0.0
    return CertificadoSed(c, gamma, _exceso(normas, D.astype(int), c, gamma), "envolvente",
                          degenerado=c == 0.0)


def verificar_producto_sed(X: MatrizBloques, Y: MatrizBloques,
                           cert_x: CertificadoSed, cert_y: CertificadoSed, T) -> bool:
    """Comprueba ‖[XY]_{ij}‖ ≤ N·x·y·e^{-γ·dist(i,j)} bloque a bloque."""
    if not math.isclose(cert_x.gamma, cert_y.gamma, rel_tol=1e-12, abs_tol=1e-12):
        raise EntradaInvalida("los certificados deben compartir γ; debilite primero al menor",
                              gamma_x=cert_x.gamma, gamma_y=cert_y.gamma)
    if X.particion_columnas != Y.particion_filas:
        raise ErrorDimensiones("particiones internas incompatibles")

    XY = MatrizBloques(X.datos @ Y.datos, X.particion_filas, Y.particion_columnas)
    cota = CertificadoSed(T.n_agentes * cert_x.c * cert_y.c, cert_x.gamma, 0.0)
    return _exceso(normas_bloque(XY), np.asarray(T.distancia), cota.c, cota.gamma) == 0.0


def cota_lambda_max_bloques(X: MatrizBloques) -> float:
    """max_k Σ_m ‖X_{km}‖, cota superior de λ_max para X simétrica."""
    if not X.cuadrada:
        raise ErrorDimensiones("la cota de λ_max requiere una partición cuadrada")
    return float(normas_bloque(X).sum(axis=1).max())
