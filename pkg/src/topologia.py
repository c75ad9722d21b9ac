"""
Red de agentes: aristas, distancias de grafo y dimensiones de bloque por agente.

Todas las afirmaciones de decaimiento espacial del paquete se miden con la
distancia de esta topología (número de saltos del camino más corto).
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from src.constantes import DISTANCIA_INALCANZABLE
from src.errores import AristaInvalida, TopologiaInvalida


@dataclass(frozen=True)
class Topologia:
    n_agentes:    int
    aristas:      frozenset
    dims_estado:  tuple
    dims_entrada: tuple
    distancia:    np.ndarray
    pesos:        dict = field(default_factory=dict, compare=False)

    @property
    def n_x(self) -> int:
        return int(sum(self.dims_estado))

    @property
    def n_u(self) -> int:
        return int(sum(self.dims_entrada))

    def conexa(self) -> bool:
        return not bool(np.any(self.distancia == DISTANCIA_INALCANZABLE))

    def diametro(self) -> int:
        return int(self.distancia.max())

    def vecinos(self, i: int) -> list:
        return sorted({b if a == i else a for a, b in self.aristas if i in (a, b)})

    def peso(self, i: int, j: int, defecto: float = 1.0) -> float:
        return self.pesos.get((min(i, j), max(i, j)), defecto)

    def verificar_metrica(self) -> bool:
        """Simetría, diagonal nula y desigualdad triangular sobre ternas alcanzables."""
        D = self.distancia
        if not np.array_equal(D, D.T) or np.any(np.diag(D) != 0):
            return False
        alcanzable = D != DISTANCIA_INALCANZABLE
        for k in range(self.n_agentes):
            via_k = D[:, k][:, None] + D[k, :][None, :]
            terna = alcanzable & alcanzable[:, k][:, None] & alcanzable[k, :][None, :]
            if np.any(D[terna] > via_k[terna]):
                return False
        return True


def _distancias_bfs(n: int, aristas) -> np.ndarray:
    if n == 1 or not aristas:
        D = np.full((n, n), DISTANCIA_INALCANZABLE, dtype=int)
        np.fill_diagonal(D, 0)
        return D
    filas, columnas = zip(*aristas)
    adyacencia = csr_matrix((np.ones(len(filas)), (filas, columnas)), shape=(n, n))
    saltos = shortest_path(adyacencia, method="D", directed=False, unweighted=True)
    D = np.where(np.isinf(saltos), DISTANCIA_INALCANZABLE, saltos).astype(int)
    return D


def _crear(n, aristas, dims_estado, dims_entrada, pesos=None) -> Topologia:
    D = _distancias_bfs(n, sorted(aristas))
    D.setflags(write=False)
    return Topologia(
        n_agentes=n,
        aristas=frozenset(aristas),
        dims_estado=tuple(int(d) for d in dims_estado),
        dims_entrada=tuple(int(d) for d in dims_entrada),
        distancia=D,
        pesos=dict(pesos or {}),
    )


def _validar_dims(n, dims_estado, dims_entrada):
    if len(dims_estado) != n or len(dims_entrada) != n:
        raise TopologiaInvalida(f"se esperaban {n} dimensiones por agente")
    if any(d < 1 for d in dims_estado):
        raise TopologiaInvalida("cada agente necesita al menos un estado")
    if any(d < 0 for d in dims_entrada):
        raise TopologiaInvalida("dimensión de entrada negativa")


def topologia_ciclica(n: int, dim_estado: int = 1, dim_entrada: int = 1) -> Topologia:
    """Ciclo Z_N sin la restricción N ≥ 3 (para N = 2 se reduce a una arista)."""
    if n < 1:
        raise TopologiaInvalida("N debe ser positivo")
    _validar_dims(n, [dim_estado] * n, [dim_entrada] * n)
    aristas = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n) if n > 1}
    return _crear(n, aristas, [dim_estado] * n, [dim_entrada] * n)


def construir_ciclo(n: int, dim_estado: int = 1, dim_entrada: int = 1) -> Topologia:
    if n < 3:
        raise TopologiaInvalida(f"un ciclo necesita N ≥ 3 (N={n})")
    return topologia_ciclica(n, dim_estado, dim_entrada)


def construir_grilla(filas: int, columnas: int, dim_estado: int = 1, dim_entrada: int = 1) -> Topologia:
    """Grilla de 4 vecinos; el agente (r, c) tiene índice r·columnas + c."""
    if filas < 1 or columnas < 1:
        raise TopologiaInvalida(f"grilla {filas}×{columnas} sin agentes")
    n = filas * columnas
    _validar_dims(n, [dim_estado] * n, [dim_entrada] * n)

    aristas = set()
    for r in range(filas):
        for c in range(columnas):
            i = r * columnas + c
            if c + 1 < columnas:
                aristas.add((i, i + 1))
            if r + 1 < filas:
                aristas.add((i, i + columnas))
    return _crear(n, aristas, [dim_estado] * n, [dim_entrada] * n)


def desde_lista_aristas(n: int, aristas, dims_estado, dims_entrada) -> Topologia:
    """
    Topología a partir de aristas (i, j) o (i, j, peso).

    Las aristas repetidas se descartan sin aviso; el peso (susceptancia en la red
    eléctrica) se guarda aparte y no interviene en la distancia.
    """
    if n < 1:
        raise TopologiaInvalida("N debe ser positivo")
    _validar_dims(n, list(dims_estado), list(dims_entrada))

    limpias, pesos = set(), {}
    for arista in aristas:
        i, j = int(arista[0]), int(arista[1])
        if not (0 <= i < n and 0 <= j < n):
            raise AristaInvalida(f"arista ({i}, {j}) fuera de [0, {n})", arista=(i, j))
        if i == j:
            raise AristaInvalida(f"lazo en el agente {i}", arista=(i, j))
        par = (min(i, j), max(i, j))
        limpias.add(par)
        if len(arista) > 2:
            pesos[par] = float(arista[2])
    return _crear(n, limpias, dims_estado, dims_entrada, pesos)
