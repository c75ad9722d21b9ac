"""
Lectura y escritura de archivos de sistema, soluciones de Riccati y
controladores de respuesta a perturbaciones.

Un archivo es un directorio (o un .zip con el mismo contenido) con:
    topologia.txt     "N=<n>" y luego una arista "i j [peso]" por línea
    A.csv … S.csv     matrices densas por filas, sin encabezado
    K0.csv            ganancia estabilizante (opcional)
    manifiesto.json   nombre, particiones, parámetros y constantes SED
"""
import io
import json
import os
import zipfile

import numpy as np
import pandas as pd
from loguru import logger

from src.errores import EntradaInvalida, ErrorUso
from src.problema import ProblemaLqr, crear_problema
from src.topologia import Topologia, desde_lista_aristas

FORMATO_FLOTANTE = "%.17g"
MATRICES = ("A", "B", "Q", "R", "S")


# ── Funciones auxiliares ────────────────────────────────────────────

def _matriz_a_texto(M: np.ndarray) -> str:
    return pd.DataFrame(np.atleast_2d(M)).to_csv(header=False, index=False, float_format=FORMATO_FLOTANTE)


def _texto_a_matriz(texto: str) -> np.ndarray:
    if not texto.strip():
        return np.zeros((0, 0))
    return pd.read_csv(io.StringIO(texto), header=None, float_precision="round_trip").to_numpy(dtype=float)


def _escribir(destino: str, contenido: dict):
    """Escribe {nombre: texto} en un directorio o, si `destino` termina en .zip, en un zip."""
    if destino.endswith(".zip"):
        carpeta = os.path.dirname(destino)
        if carpeta:
            os.makedirs(carpeta, exist_ok=True)
        with zipfile.ZipFile(destino, "w", compression=zipfile.ZIP_DEFLATED) as archivo:
            for nombre in sorted(contenido):
                # fecha fija: dos corridas iguales producen el mismo zip
                info = zipfile.ZipInfo(nombre, date_time=(1980, 1, 1, 0, 0, 0))
                archivo.writestr(info, contenido[nombre])
    else:
        os.makedirs(destino, exist_ok=True)
        for nombre, texto in contenido.items():
            with open(os.path.join(destino, nombre), "w", encoding="utf-8", newline="\n") as f:
                f.write(texto)
    logger.debug(f"escrito {destino} ({len(contenido)} archivos)")


def _leer(origen: str) -> dict:
    if os.path.isdir(origen):
        contenido = {}
        for nombre in os.listdir(origen):
            ruta = os.path.join(origen, nombre)
            if os.path.isfile(ruta):
                with open(ruta, encoding="utf-8") as f:
                    contenido[nombre] = f.read()
        return contenido
    if zipfile.is_zipfile(origen):
        with zipfile.ZipFile(origen) as archivo:
            return {os.path.basename(n): archivo.read(n).decode("utf-8")
                    for n in archivo.namelist() if not n.endswith("/")}
    raise ErrorUso(f"no existe el archivo de sistema: {origen}")


# ── Lista de aristas ────────────────────────────────────────────────

def texto_lista_aristas(T: Topologia) -> str:
    lineas = [f"N={T.n_agentes}"]
    for i, j in sorted(T.aristas):
        peso = T.pesos.get((i, j))
        lineas.append(f"{i} {j}" if peso is None else f"{i} {j} {peso:.17g}")
    return "\n".join(lineas) + "\n"


def leer_lista_aristas(texto: str, dims_estado=None, dims_entrada=None) -> Topologia:
    """
    Interpreta una lista de aristas. La primera línea útil debe ser "N=<n>";
    se ignoran líneas vacías y comentarios con '#'.

    Parámetros:
    -----------
    dims_estado, dims_entrada : list[int] | None
        Dimensiones de bloque por agente (1 por defecto).
    """
    lineas = [l.split("#", 1)[0].strip() for l in texto.splitlines()]
    lineas = [l for l in lineas if l]
    if not lineas or not lineas[0].upper().startswith("N="):
        raise EntradaInvalida("la lista de aristas debe empezar con 'N=<número de agentes>'")
    try:
        n = int(lineas[0].split("=", 1)[1])
    except ValueError as error:
        raise EntradaInvalida(f"cabecera inválida: {lineas[0]!r}") from error

    aristas = []
    for linea in lineas[1:]:
        campos = linea.replace(",", " ").split()
        if len(campos) not in (2, 3):
            raise EntradaInvalida(f"línea de arista inválida: {linea!r}")
        try:
            arista = (int(campos[0]), int(campos[1])) + tuple(float(w) for w in campos[2:])
        except ValueError as error:
            raise EntradaInvalida(f"línea de arista inválida: {linea!r}") from error
        aristas.append(arista)

    dims_estado = [1] * n if dims_estado is None else list(dims_estado)
    dims_entrada = [1] * n if dims_entrada is None else list(dims_entrada)
    return desde_lista_aristas(n, aristas, dims_estado, dims_entrada)


def leer_archivo_aristas(ruta: str, dims_estado=None, dims_entrada=None) -> Topologia:
    with open(ruta, encoding="utf-8") as f:
        return leer_lista_aristas(f.read(), dims_estado, dims_entrada)


def escribir_lista_aristas(T: Topologia, ruta: str):
    with open(ruta, "w", encoding="utf-8", newline="\n") as f:
        f.write(texto_lista_aristas(T))


# ── Sistemas ────────────────────────────────────────────────────────

def _a_json(valor):
    if isinstance(valor, dict):
        return {str(k): _a_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_a_json(v) for v in valor]
    if isinstance(valor, np.generic):
        return valor.item()
    return valor


def escribir_sistema(problema: ProblemaLqr, destino: str):
    T = problema.topologia
    contenido = {"topologia.txt": texto_lista_aristas(T)}
    for nombre, M in zip(MATRICES, problema.matrices()):
        contenido[f"{nombre}.csv"] = _matriz_a_texto(M)
    if problema.K0 is not None:
        contenido["K0.csv"] = _matriz_a_texto(problema.K0)
    manifiesto = {
        "nombre": problema.nombre,
        "particion_estado": list(T.dims_estado),
        "particion_entrada": list(T.dims_entrada),
        "parametros": problema.parametros,
        "constantes_sed": problema.constantes_sed,
    }
    contenido["manifiesto.json"] = json.dumps(_a_json(manifiesto), indent=2, sort_keys=True) + "\n"
    _escribir(destino, contenido)


def leer_sistema(origen: str) -> ProblemaLqr:
    """Reconstruye un ProblemaLqr desde un directorio o .zip escrito por `escribir_sistema`."""
    contenido = _leer(origen)
    faltantes = [n for n in ("topologia.txt", "manifiesto.json", *(f"{m}.csv" for m in MATRICES))
                 if n not in contenido]
    if faltantes:
        raise EntradaInvalida(f"faltan archivos en {origen}: {', '.join(faltantes)}")

    manifiesto = json.loads(contenido["manifiesto.json"])
    T = leer_lista_aristas(contenido["topologia.txt"],
                           manifiesto.get("particion_estado"), manifiesto.get("particion_entrada"))
    A, B, Q, R, S = (_texto_a_matriz(contenido[f"{m}.csv"]) for m in MATRICES)
    K0 = _texto_a_matriz(contenido["K0.csv"]) if "K0.csv" in contenido else None
    logger.info(f"sistema '{manifiesto.get('nombre')}' leído desde {origen}")
    return crear_problema(
        A, B, Q, R, S, T,
        nombre=manifiesto.get("nombre", "personalizado"),
        parametros=manifiesto.get("parametros") or {},
        constantes_sed=manifiesto.get("constantes_sed"),
        K0=K0,
    )


# ── Resultados ──────────────────────────────────────────────────────

def escribir_solucion_riccati(solucion, destino: str):
    manifiesto = {"residuo": solucion.residuo, "iteraciones": solucion.iteraciones, "metodo": solucion.metodo}
    _escribir(destino, {
        "K.csv": _matriz_a_texto(solucion.K.datos),
        "P.csv": _matriz_a_texto(solucion.P),
        "manifiesto.json": json.dumps(_a_json(manifiesto), indent=2, sort_keys=True) + "\n",
    })


def escribir_controlador(L, destino: str):
    contenido = {f"L_{k}.csv": _matriz_a_texto(Lk.datos) for k, Lk in enumerate(L.bloques, start=1)}
    contenido["manifiesto.json"] = json.dumps({"H": L.H, "residuo": L.residuo}, indent=2, sort_keys=True) + "\n"
    _escribir(destino, contenido)


def leer_controlador(origen: str) -> list:
    """Bloques L_1 … L_H como arreglos densos."""
    contenido = _leer(origen)
    H = json.loads(contenido["manifiesto.json"])["H"]
    return [_texto_a_matriz(contenido[f"L_{k}.csv"]) for k in range(1, H + 1)]
