"""
Problema LQR en red: x_{t+1} = A x_t + B u_t + w_t con costo
x'Qx + u'Ru + 2u'Sx, todas las matrices particionadas según la topología.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from src.bloques import MatrizBloques
from src.constantes import TOL_AUTOVALOR, TOL_SIMETRIA
from src.errores import ErrorDimensiones, ProblemaInvalido
from src.topologia import Topologia


@dataclass(frozen=True)
class ProblemaLqr:
    A: MatrizBloques
    B: MatrizBloques
    Q: MatrizBloques
    R: MatrizBloques
    S: MatrizBloques
    topologia:     Topologia
    nombre:        str = "personalizado"
    parametros:    dict = field(default_factory=dict, compare=False)
    constantes_sed: dict = field(default=None, compare=False)   # a, b, q, r, s, gamma_sys
    K0:            np.ndarray = field(default=None, compare=False)
    advertencias:  tuple = ()
    informe_discretizacion: dict = field(default=None, compare=False)

    @property
    def n_x(self) -> int:
        return self.topologia.n_x

    @property
    def n_u(self) -> int:
        return self.topologia.n_u

    def matrices(self):
        """(A, B, Q, R, S) como arreglos densos."""
        return self.A.datos, self.B.datos, self.Q.datos, self.R.datos, self.S.datos


def _simetrica(X: np.ndarray) -> bool:
    return X.size == 0 or float(np.max(np.abs(X - X.T))) <= TOL_SIMETRIA * max(1.0, float(np.max(np.abs(X))))


def _definida_positiva(X: np.ndarray) -> bool:
    if X.size == 0:
        return True
    if not _simetrica(X):
        return False
    try:
        linalg.cholesky(0.5 * (X + X.T), lower=True)
    except linalg.LinAlgError:
        return False
    return float(linalg.eigvalsh(0.5 * (X + X.T))[0]) > TOL_AUTOVALOR


def complemento_schur(Q: np.ndarray, R: np.ndarray, S: np.ndarray) -> np.ndarray:
    """R − S·Q⁻¹·Sᵀ."""
    if S.size == 0 or not np.any(S):
        return R
    return R - S @ linalg.solve(Q, S.T, assume_a="pos")


def verificar_pesos(Q: np.ndarray, R: np.ndarray, S: np.ndarray):
    if not _definida_positiva(Q):
        raise ProblemaInvalido("Q debe ser simétrica definida positiva")
    if not _definida_positiva(complemento_schur(Q, R, S)):
        raise ProblemaInvalido("R − S·Q⁻¹·Sᵀ debe ser simétrica definida positiva")


def crear_problema(A, B, Q, R, S, topologia: Topologia, **extras) -> ProblemaLqr:
    """Envuelve las cinco matrices con las particiones de la topología y valida Q ≻ 0, R − SQ⁻¹Sᵀ ≻ 0."""
    nx, nu = topologia.dims_estado, topologia.dims_entrada
    n_x, n_u = topologia.n_x, topologia.n_u
    A, B, Q, R = (np.asarray(M, dtype=float) for M in (A, B, Q, R))
    S = np.zeros((n_u, n_x)) if S is None else np.asarray(S, dtype=float)

    esperadas = {"A": (A, (n_x, n_x)), "B": (B, (n_x, n_u)), "Q": (Q, (n_x, n_x)),
                 "R": (R, (n_u, n_u)), "S": (S, (n_u, n_x))}
    for nombre, (M, forma) in esperadas.items():
        if M.shape != forma:
            raise ErrorDimensiones(f"{nombre} tiene forma {M.shape}, se esperaba {forma}")
        if not np.all(np.isfinite(M)):
            raise ProblemaInvalido(f"{nombre} tiene entradas no finitas")

    verificar_pesos(Q, R, S)
    return ProblemaLqr(
        A=MatrizBloques(A, nx, nx),
        B=MatrizBloques(B, nx, nu),
        Q=MatrizBloques(Q, nx, nx),
        R=MatrizBloques(R, nu, nu),
        S=MatrizBloques(S, nu, nx),
        topologia=topologia,
        **extras,
    )


def ganancia_en_bloques(K: np.ndarray, topologia: Topologia) -> MatrizBloques:
    return MatrizBloques(K, topologia.dims_entrada, topologia.dims_estado)


def estado_en_bloques(X: np.ndarray, topologia: Topologia) -> MatrizBloques:
    return MatrizBloques(X, topologia.dims_estado, topologia.dims_estado)
