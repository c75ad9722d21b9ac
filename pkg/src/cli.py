"""
Interfaz de línea de comandos por lotes: construye o lee un sistema, corre uno
de los análisis y deja en el directorio de salida los CSV con los datos de cada
figura.

    sedlqr <pipeline> --system <nombre|ruta> [opciones] --out <dir>

Código de salida: 0 si todas las verificaciones pasaron, 1 si alguna falló o si
un módulo lanzó un error, 2 ante errores de uso.
"""
import math
import os
from dataclasses import dataclass, field

import click
import numpy as np
import pandas as pd
from loguru import logger

from src.archivos import escribir_controlador, escribir_sistema, escribir_solucion_riccati, leer_archivo_aristas, leer_sistema
from src.bloques import (
    MatrizBloques, ajustar_sed, ajustar_sed_a_tasa, cota_lambda_max_bloques, norma_espectral, normas_bloque,
    perfil_fila, perfil_normas, verificar_certificado, verificar_producto_sed,
)
from src.configuracion import configurar_registro
from src.constantes import DT_SWING, GAMMA_CAP, TOL_RADIO, TOL_RESIDUO
from src.errores import ControladorInestable, EntradaInestable, ErrorSedlqr, ErrorUso, UmbralIndefinido
from src.lqr import (
    ajustar_estabilidad, certificado_comun, costo_lazo_cerrado, preestabilizar, radio_espectral,
    resolver_dare, resolver_dare_preestabilizado, resolver_lyapunov_G, verificar_decaimiento_G,
)
from src.problema import estado_en_bloques
from src.respuesta_perturbacion import (
    constantes_decaimiento_L, costo_perturbacion, ensamblar, errores_neumann, horizonte_por_defecto,
    brecha_primer_bloque, nucleo_costo_explicito, resolver_directo, verificar_cotas_autovalores, verificar_decaimiento_L,
    verificar_sed_mj,
)
from src.simulacion import ConfigSimulacion, simular_realimentacion_estado, simular_realimentacion_perturbacion
from src.sistemas import SISTEMAS_INTEGRADOS, constantes_sed, construir_integrado, oscilacion_red
from src.truncamiento import barrido_brecha, cotas_error_truncamiento, diferencia_costo, informe_umbral, truncar

METODOS_DARE = {"fixed-point": "punto_fijo", "doubling": "duplicacion"}

FORMATO_CSV    = "%.12g"
H_BARRIDO      = 30     # horizonte por defecto del barrido de la brecha en H
T_NEUMANN      = 200    # iteraciones revisadas de la serie de Neumann
M_DECAIMIENTO  = 50     # potencias revisadas en la cota de ‖G·A^m‖
N_PERTURBACION = 20     # perturbaciones aleatorias de la prueba de optimalidad
LIMITE_NUCLEO  = 1500   # tamaño máximo del núcleo explícito armado

LEEME = """Archivos generados por sedlqr (una fila de encabezado por CSV)

perfil_normas.csv          distance, max_norm
    eje x: distancia de grafo d; eje y (log): max ‖[K]_ij‖ con dist(i,j) = d.
perfil_fila.csv            column, distance, norm
    eje x: columna j; eje y (log): ‖[K]_{row,j}‖ de la fila elegida.
certificados.csv           name, c, gamma, max_violation, mode
    rectas c·e^{-γd} superpuestas al perfil (modo envolvente y regresión).
brecha_horizonte.csv       H, gap, bound, cost, cost_riccati
    eje x: H; eje y (log): ‖K + L₁⁽ᴴ⁾‖ y su cota.
barrido_truncamiento.csv   kappa, stable, cost_trunc, cost_opt, gap, bound, threshold, ratio
    eje x: κ; eje y (log): (C(K_trunc) − C(K))/C(K) y la cota del controlador local.
verificaciones.csv         check, passed, value, bound, detail
    tabla de aprobación de cada cota revisada.
constantes_formales.csv    name, value
    constantes teóricas informadas (no se exigen).
simulacion.csv             case, closed_form, empirical, stderr, within_3se
    costos cerrados contra promedios Monte Carlo.
"""


@dataclass(frozen=True)
class Experimento:
    sistema:    str
    pipeline:   str
    parametros: dict = field(default_factory=dict)
    salida:     str = "salida"


# ── Funciones auxiliares ────────────────────────────────────────────

def _escribir_csv(ruta: str, filas: list, columnas: list):
    tabla = pd.DataFrame(filas, columns=columnas)
    for columna in tabla.columns:
        if tabla[columna].dtype == bool:
            tabla[columna] = tabla[columna].astype(int)
    tabla.to_csv(ruta, index=False, float_format=FORMATO_CSV, lineterminator="\n")
    logger.debug(f"escrito {ruta} ({len(tabla)} filas)")


def _verificacion(nombre: str, aprobada: bool, valor=math.nan, cota=math.nan, detalle: str = "") -> dict:
    if not aprobada:
        logger.warning(f"verificación fallida: {nombre} ({detalle or f'{valor} > {cota}'})")
    return {"check": nombre, "passed": bool(aprobada), "value": float(valor), "bound": float(cota),
            "detail": detalle}


def cargar_sistema(exp: Experimento):
    """Un nombre del registro, un archivo de sistema (directorio o .zip) o una lista de aristas .txt."""
    p = exp.parametros
    if os.path.isfile(exp.sistema) and exp.sistema.endswith(".txt"):
        T = leer_archivo_aristas(exp.sistema)
        nombre = os.path.splitext(os.path.basename(exp.sistema))[0]
        return oscilacion_red(T, dt=p.get("dt") or DT_SWING, nombre=nombre)
    if os.path.exists(exp.sistema):
        return leer_sistema(exp.sistema)
    if exp.sistema not in SISTEMAS_INTEGRADOS:
        raise ErrorUso(f"sistema desconocido: {exp.sistema} (integrados: {', '.join(SISTEMAS_INTEGRADOS)})")
    claves = ("n", "eta", "alpha", "rho", "a", "rows", "cols", "dt", "seed")
    return construir_integrado(exp.sistema, **{k: p.get(k) for k in claves})


def _metodo_dare(exp: Experimento, problema) -> str:
    metodo = exp.parametros.get("dare_method")
    if metodo:
        return METODOS_DARE[metodo]
    return problema.parametros.get("metodo_dare", "punto_fijo")


def resolver(exp: Experimento, problema):
    """Riccati del problema original; con K₀ y A inestable pasa por la pre-estabilización."""
    metodo = _metodo_dare(exp, problema)
    if problema.K0 is not None and radio_espectral(problema.A.datos) >= 1.0 - TOL_RADIO:
        logger.info("A no es estable: se resuelve el problema pre-estabilizado con K₀")
        return resolver_dare_preestabilizado(problema, metodo=metodo)
    return resolver_dare(problema, metodo)


def problema_estable(problema):
    """El problema mismo si ρ(A) < 1, el pre-estabilizado si trae K₀; si no, EntradaInestable."""
    radio = radio_espectral(problema.A.datos)
    if radio < 1.0 - TOL_RADIO:
        return problema
    if problema.K0 is None:
        raise EntradaInestable(f"ρ(A) = {radio:.6f} ≥ 1 y el sistema no trae K₀ para pre-estabilizar")
    logger.info(f"ρ(A) = {radio:.6f}: análisis sobre el lazo pre-estabilizado con K₀")
    return preestabilizar(problema, problema.K0)


def _horizonte(exp: Experimento, problema) -> int:
    H = exp.parametros.get("H")
    if H:
        return int(H)
    gamma_sys = constantes_sed(problema)["gamma_sys"]
    return min(horizonte_por_defecto(gamma_sys, problema.topologia.n_agentes, problema.n_u), H_BARRIDO)


def _rango_kappa(exp: Experimento, T) -> range:
    inicio = exp.parametros.get("kappa_min") or 1
    fin = exp.parametros.get("kappa_max") or T.diametro() + 1
    if inicio > fin:
        raise ErrorUso(f"--kappa-min ({inicio}) mayor que --kappa-max ({fin})")
    return range(int(inicio), int(fin) + 1)


def _analisis_perturbacion(exp: Experimento, problema):
    """Lo que comparten disturbance, lemma-suite y simulate: Riccati, G, certificado común y L⁽ᴴ⁾."""
    estable = problema_estable(problema)
    A, B, Q, _, _ = estable.matrices()
    solucion = resolver_dare(estable, _metodo_dare(exp, problema))
    G = resolver_lyapunov_G(A, Q)
    cert_A = ajustar_estabilidad(A)
    cert_cl = ajustar_estabilidad(A - B @ solucion.K.datos)
    cert = certificado_comun(cert_A, cert_cl)
    H = _horizonte(exp, estable)
    ds = ensamblar(estable, G, H, cert)
    L = resolver_directo(ds, estable)
    return estable, solucion, G, cert_A, cert_cl, cert, ds, L


# ── Pipelines ───────────────────────────────────────────────────────

def _pipeline_riccati(exp: Experimento, problema) -> list:
    solucion = resolver(exp, problema)
    escribir_solucion_riccati(solucion, os.path.join(exp.salida, "riccati"))
    escribir_sistema(problema, os.path.join(exp.salida, "sistema"))
    costo = costo_lazo_cerrado(problema, solucion.K)
    _escribir_csv(os.path.join(exp.salida, "riccati.csv"), [{
        "name": problema.nombre, "n_x": problema.n_x, "n_u": problema.n_u,
        "iterations": solucion.iteraciones, "residual": solucion.residuo,
        "method": solucion.metodo, "cost": costo,
    }], ["name", "n_x", "n_u", "iterations", "residual", "method", "cost"])
    norma_P = float(np.linalg.norm(solucion.P, 2))
    return [_verificacion("riccati-residual", solucion.residuo <= TOL_RESIDUO * norma_P,
                          solucion.residuo, TOL_RESIDUO * norma_P)]


def _pipeline_decay(exp: Experimento, problema) -> list:
    solucion = resolver(exp, problema)
    T = problema.topologia
    K = solucion.K
    _escribir_csv(os.path.join(exp.salida, "perfil_normas.csv"), perfil_normas(K, T), ["distance", "max_norm"])

    fila = exp.parametros.get("row")
    fila = max(T.n_agentes // 2 - 1, 0) if fila is None else int(fila)
    _escribir_csv(os.path.join(exp.salida, "perfil_fila.csv"), perfil_fila(K, T, fila),
                  ["column", "distance", "norm"])

    P = estado_en_bloques(solucion.P, T)
    certificados, verificaciones = [], []
    for nombre, X in (("K", K), ("P", P)):
        for modo in ("envolvente", "regresion"):
            cert = ajustar_sed(X, T, modo)
            certificados.append(cert.como_fila(nombre))
            if modo == "envolvente":
                exceso = verificar_certificado(X, T, cert)
                verificaciones.append(_verificacion(f"{nombre}-envelope-certificate", exceso == 0.0, exceso, 0.0))
    _escribir_csv(os.path.join(exp.salida, "certificados.csv"), certificados,
                  ["name", "c", "gamma", "max_violation", "mode"])
    return verificaciones


def brecha_por_horizonte(exp: Experimento, problema) -> tuple:
    """Filas (H, gap, bound, cost, cost_riccati) para H = 1, …, H y el L⁽ᴴ⁾ del horizonte pedido."""
    estable, solucion, G, _, _, cert, ds, L = _analisis_perturbacion(exp, problema)
    traza_P = float(np.trace(solucion.P))
    filas = []
    for h in range(1, ds.H + 1):
        ds_h = ds if h == ds.H else ensamblar(estable, G, h, cert)
        L_h = L if h == ds.H else resolver_directo(ds_h, estable)
        brecha, cota = brecha_primer_bloque(solucion.K, L_h, estable, cert)
        filas.append({"H": h, "gap": brecha, "bound": cota,
                      "cost": costo_perturbacion(estable, G, ds_h, L_h), "cost_riccati": traza_P})
    return filas, L


def _pipeline_disturbance(exp: Experimento, problema) -> list:
    filas, L = brecha_por_horizonte(exp, problema)
    escribir_controlador(L, os.path.join(exp.salida, "controlador"))
    _escribir_csv(os.path.join(exp.salida, "brecha_horizonte.csv"), filas, ["H", "gap", "bound", "cost", "cost_riccati"])

    peor = max(filas, key=lambda f: f["gap"] / f["bound"] if f["bound"] > 0 else math.inf)
    return [_verificacion(
        "gap-bound-all-H", all(f["gap"] <= f["bound"] * (1 + 1e-9) for f in filas),
        peor["gap"], peor["bound"], f"H={peor['H']}",
    )]


def _fila_barrido(reporte) -> dict:
    fila = reporte.como_fila()
    fila["ratio"] = reporte.brecha / reporte.costo_optimo if reporte.costo_optimo > 0 else math.nan
    return fila


def _verificar_barrido(reportes: list, umbral: float, diametro: int) -> list:
    verificaciones = []
    sobre_umbral = [r for r in reportes if r.kappa >= umbral]
    if sobre_umbral:
        aprobado = all(r.estable and r.brecha <= r.cota_desempeno * (1 + 1e-9) + 1e-12 for r in sobre_umbral)
        peor = max(sobre_umbral, key=lambda r: r.brecha - r.cota_desempeno)
        verificaciones.append(_verificacion("truncation-gap-bound", aprobado, peor.brecha, peor.cota_desempeno,
                                            f"kappa={peor.kappa}"))
    completos = [r for r in reportes if r.kappa > diametro]
    if completos:
        verificaciones.append(_verificacion("full-support-gap-zero", all(r.brecha == 0.0 for r in completos),
                                            completos[0].brecha, 0.0, f"kappa={completos[0].kappa}"))
    return verificaciones


def _pipeline_truncation(exp: Experimento, problema) -> list:
    solucion = resolver(exp, problema)
    T = problema.topologia
    reportes = barrido_brecha(problema, solucion, _rango_kappa(exp, T))
    columnas = ["kappa", "stable", "cost_trunc", "cost_opt", "gap", "bound", "threshold", "ratio"]
    _escribir_csv(os.path.join(exp.salida, "barrido_truncamiento.csv"), [_fila_barrido(r) for r in reportes], columnas)
    umbral = reportes[0].umbral_kappa if reportes else math.inf
    return _verificar_barrido(reportes, umbral, T.diametro())


def _verificaciones_sed(problema, T) -> list:
    """Cota del producto de matrices SED con una tasa común para A y B."""
    A, B = problema.A, problema.B
    tasas = [c.gamma for c in (ajustar_sed(A, T), ajustar_sed(B, T)) if 0 < c.gamma < math.inf]
    gamma = min(tasas) if tasas else 1.0
    cert_A, cert_B = ajustar_sed_a_tasa(A, T, gamma), ajustar_sed_a_tasa(B, T, gamma)
    return [
        _verificacion("sed-product-AA", verificar_producto_sed(A, A, cert_A, cert_A, T), detalle=f"gamma={gamma:.6g}"),
        _verificacion("sed-product-AB", verificar_producto_sed(A, B, cert_A, cert_B, T), detalle=f"gamma={gamma:.6g}"),
    ]


def _prueba_optimalidad(estable, solucion, semilla: int) -> dict:
    """C(K + εΔ) ≥ C(K) para perturbaciones aleatorias pequeñas."""
    rng = np.random.default_rng(semilla)
    K = solucion.K.datos
    costo = costo_lazo_cerrado(estable, K)
    escala = 1e-3 * max(norma_espectral(K), 1.0)
    peor = math.inf
    for _ in range(N_PERTURBACION):
        delta = rng.standard_normal(K.shape)
        delta *= escala / max(np.linalg.norm(delta, 2), 1e-300)
        try:
            peor = min(peor, costo_lazo_cerrado(estable, K + delta) - costo)
        except ControladorInestable:
            continue
    return _verificacion("riccati-optimality", peor >= -1e-9 * abs(costo), peor, 0.0,
                         f"{N_PERTURBACION} perturbaciones")


def _verificaciones_sin_estabilidad(problema) -> list:
    """Cotas que no suponen ρ(A) < 1: producto SED de A y B y decaimiento de la discretización."""
    v = _verificaciones_sed(problema, problema.topologia)
    informe = problema.informe_discretizacion
    if informe is not None and not informe["omitido"]:
        v.append(_verificacion("discretization-decay", informe["cumple"],
                               max(informe["exceso_A"], informe["exceso_B"]), 0.0,
                               f"dt*|Ac|={informe['dt_norma_Ac']:.6g}"))
    return v


def _pipeline_lemma_suite(exp: Experimento, problema) -> list:
    v = _verificaciones_sin_estabilidad(problema)
    try:
        estable, solucion, G, cert_A, cert_cl, cert, ds, L = _analisis_perturbacion(exp, problema)
    except EntradaInestable as error:
        logger.warning(f"{error}: sólo se revisan las cotas que no suponen A estable")
        _escribir_csv(os.path.join(exp.salida, "verificaciones.csv"), v,
                      ["check", "passed", "value", "bound", "detail"])
        return v
    A, B, Q, _, _ = estable.matrices()
    T = estable.topologia
    K = solucion.K

    norma_P = float(np.linalg.norm(solucion.P, 2))
    v.append(_verificacion("riccati-residual", solucion.residuo <= TOL_RESIDUO * norma_P,
                           solucion.residuo, TOL_RESIDUO * norma_P))
    norma_G = float(np.linalg.norm(G.G, 2))
    v.append(_verificacion("lyapunov-residual", G.residuo <= TOL_RESIDUO * norma_G, G.residuo, TOL_RESIDUO * norma_G))
    v.append(_verificacion("stability-certificates", cert_A.verificado and cert_cl.verificado,
                           detalle=f"tau={cert.tau:.6g} rho={cert.rho:.6g}"))
    v.append(_verificacion("G-decay", verificar_decaimiento_G(G, A, norma_espectral(Q), cert_A, M_DECAIMIENTO),
                           detalle=f"m<={M_DECAIMIENTO}"))

    autovalores = verificar_cotas_autovalores(ds)
    v.append(_verificacion("M-eigenvalue-lower", autovalores["lambda_min"] >= autovalores["cota_min"] - 1e-8,
                           autovalores["lambda_min"], autovalores["cota_min"]))
    v.append(_verificacion("M-eigenvalue-upper", autovalores["cumple"],
                           autovalores["lambda_max"], autovalores["cota_max"]))
    particion = (estable.n_u,) * ds.H
    cota_bloques = cota_lambda_max_bloques(MatrizBloques(ds.M, particion, particion))
    v.append(_verificacion("M-block-row-sum", autovalores["lambda_max"] <= cota_bloques * (1 + 1e-10),
                           autovalores["lambda_max"], cota_bloques))

    constantes = constantes_sed(estable)
    mj = verificar_sed_mj(ds, estable, constantes)
    v.append(_verificacion("MJ-spatial-decay", mj["cumple"], mj["holgura"], 0.0,
                           "" if mj["infractor"] is None else f"bloque={mj['infractor']}"))

    neumann = errores_neumann(ds, L, T_NEUMANN)
    peor_t = max(neumann, key=lambda f: f[1] - f[2])
    v.append(_verificacion("neumann-error", all(e <= c * (1 + 1e-9) + 1e-12 for _, e, c in neumann),
                           peor_t[1], peor_t[2], f"t={peor_t[0]}"))

    brecha, cota = brecha_primer_bloque(K, L, estable, cert)
    v.append(_verificacion("gap-bound", brecha <= cota * (1 + 1e-9), brecha, cota, f"H={ds.H}"))

    if estable.n_x + ds.H * estable.n_u <= LIMITE_NUCLEO:
        nucleo = nucleo_costo_explicito(estable, G, ds.H)["nucleo"]
        n_x = estable.n_x
        diferencia = max(float(np.max(np.abs(nucleo[n_x:, n_x:] - ds.M))),
                         float(np.max(np.abs(nucleo[n_x:, :n_x] - ds.J))))
        tolerancia = 1e-9 * max(1.0, float(np.max(np.abs(ds.M))))
        v.append(_verificacion("explicit-cost-kernel", diferencia <= tolerancia, diferencia, tolerancia))

    cert_K = ajustar_sed(K, T, "envolvente")
    diametro = T.diametro()
    try:
        umbral = informe_umbral(estable, solucion, cert_cl, cert_K)
        v.append(_verificacion("truncated-loop-stable", umbral["estable"], umbral["radio_espectral"], 1.0,
                               f"kappa={umbral['kappa']}"))
        inicio = min(max(math.ceil(umbral["umbral"]), 1), diametro + 1)
    except UmbralIndefinido as error:
        logger.warning(str(error))
        umbral, inicio = None, diametro + 1
    reportes = barrido_brecha(estable, solucion, range(inicio, diametro + 2))
    v.extend(_verificar_barrido(reportes, inicio, diametro))

    errores = [cotas_error_truncamiento(K, T, kappa, cert_K) for kappa in range(1, diametro + 2)]
    peor_e = max(errores, key=lambda e: e["espectral"] - e["cota_espectral"])
    v.append(_verificacion("truncation-error", all(e["cumple"] for e in errores),
                           peor_e["espectral"], peor_e["cota_espectral"]))

    estables = [r for r in reportes if r.estable]
    if estables:
        Kp = truncar(K, T, estables[0].kappa)
        dif = diferencia_costo(estable, solucion, Kp)
        v.append(_verificacion("cost-difference-identity",
                               abs(dif["directa"] - dif["identidad"]) <= 1e-8 * max(1.0, abs(dif["directa"])),
                               dif["identidad"], dif["directa"], f"kappa={estables[0].kappa}"))
        v.append(_verificacion("cost-difference-bound", dif["cumple"], dif["directa"], dif["cota"]))
    v.append(_prueba_optimalidad(estable, solucion, exp.parametros.get("seed") or 0))

    formales = constantes_decaimiento_L(ds, estable, constantes)
    v.append(_verificacion("L-formal-decay", verificar_decaimiento_L(L, estable, formales),
                           detalle=f"c_L={formales['c_L']:.6g} gamma_L={formales['gamma_L']:.6g}"))

    _escribir_csv(os.path.join(exp.salida, "verificaciones.csv"), v, ["check", "passed", "value", "bound", "detail"])
    _escribir_constantes(exp, cert, constantes, mj, formales, ds, K, T, umbral)
    return v


def _escribir_constantes(exp, cert, constantes, mj, formales, ds, K, T, umbral):
    """Constantes teóricas como informe; ninguna entra en el código de salida."""
    D = np.asarray(T.distancia).astype(float)
    cota_K = formales["c_K"] * np.exp(-formales["gamma_K"] * D)
    valores = {
        "tau": cert.tau, "rho": cert.rho, "H": ds.H,
        **{k: constantes[k] for k in ("a", "b", "q", "r", "s", "gamma_sys")},
        "c_M": mj["c_M"], "c_J": mj["c_J"], "gamma_M": mj["gamma_M"],
        "c_L": formales["c_L"], "gamma_L": formales["gamma_L"],
        "c_K": formales["c_K"], "gamma_K": formales["gamma_K"],
        "K_within_formal_bound": float(np.all(normas_bloque(K) <= cota_K * (1 + 1e-12))),
        "lambda_min_bound": ds.cota_lambda_min, "lambda_max_bound": ds.cota_lambda_max,
        "kappa_threshold": math.nan if umbral is None else umbral["umbral"],
        "gamma_cap": GAMMA_CAP,
    }
    _escribir_csv(os.path.join(exp.salida, "constantes_formales.csv"),
                  [{"name": k, "value": float(x)} for k, x in valores.items()], ["name", "value"])


def _pipeline_simulate(exp: Experimento, problema) -> list:
    estable, solucion, G, _, _, _, ds, L = _analisis_perturbacion(exp, problema)
    p = exp.parametros
    cfg = ConfigSimulacion(horizonte=int(p.get("horizon") or 200_000), ensayos=int(p.get("trials") or 8),
                           semilla=int(p.get("seed") or 0))
    casos = [
        ("state-feedback", costo_lazo_cerrado(estable, solucion.K),
         simular_realimentacion_estado(estable, solucion.K, cfg)),
        ("open-loop", float(np.trace(G.G)),
         simular_realimentacion_estado(estable, np.zeros_like(solucion.K.datos), cfg)),
        (f"disturbance-H{ds.H}", costo_perturbacion(estable, G, ds, L),
         simular_realimentacion_perturbacion(estable, L, cfg)),
    ]
    filas = [{"case": nombre, "closed_form": cerrado, "empirical": promedio, "stderr": error,
              "within_3se": abs(promedio - cerrado) <= 3 * error}
             for nombre, cerrado, (promedio, error) in casos]
    _escribir_csv(os.path.join(exp.salida, "simulacion.csv"), filas,
                  ["case", "closed_form", "empirical", "stderr", "within_3se"])
    return [_verificacion(f"monte-carlo-{f['case']}", f["within_3se"], f["empirical"], f["closed_form"],
                          f"stderr={f['stderr']:.6g}")
            for f in filas]


PIPELINE_FUNCIONES = {
    "riccati":          _pipeline_riccati,
    "decay":            _pipeline_decay,
    "disturbance":      _pipeline_disturbance,
    "truncation-sweep": _pipeline_truncation,
    "lemma-suite":      _pipeline_lemma_suite,
    "simulate":         _pipeline_simulate,
}


def ejecutar(exp: Experimento) -> int:
    """Corre un experimento y devuelve el código de salida (0 si todas las verificaciones pasaron)."""
    if exp.pipeline not in PIPELINE_FUNCIONES:
        raise ErrorUso(f"pipeline desconocido: {exp.pipeline}")
    try:
        os.makedirs(exp.salida, exist_ok=True)
    except OSError as error:
        raise ErrorUso(f"no se puede escribir en {exp.salida}: {error}") from error

    problema = cargar_sistema(exp)
    logger.info(f"{exp.pipeline} sobre '{problema.nombre}' (N={problema.topologia.n_agentes}, "
                f"n_x={problema.n_x}, n_u={problema.n_u})")
    verificaciones = PIPELINE_FUNCIONES[exp.pipeline](exp, problema)
    with open(os.path.join(exp.salida, "README.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write(LEEME)

    fallidas = [v["check"] for v in verificaciones if not v["passed"]]
    if fallidas:
        logger.error(f"{len(fallidas)} verificaciones fallidas: {', '.join(fallidas)}")
        return 1
    logger.info(f"{len(verificaciones)} verificaciones aprobadas")
    return 0


# ── Comandos click ──────────────────────────────────────────────────

_OPCIONES = [
    click.option("--system", "sistema", required=True, help="Nombre integrado o ruta a un archivo de sistema."),
    click.option("--out", "salida", required=True, type=click.Path(file_okay=False), help="Directorio de salida."),
    click.option("--H", "H", type=click.IntRange(min=1), default=None, help="Horizonte de la respuesta a perturbaciones."),
    click.option("--kappa-min", type=click.IntRange(min=1), default=None),
    click.option("--kappa-max", type=click.IntRange(min=1), default=None),
    click.option("--rho", type=float, default=None),
    click.option("--eta", type=float, default=None),
    click.option("--alpha", type=float, default=None),
    click.option("--a", "a", type=float, default=None, help="Coeficiente de A del contraejemplo."),
    click.option("--dt", type=float, default=None),
    click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True),
    click.option("--trials", type=click.IntRange(min=1), default=8, show_default=True),
    click.option("--horizon", type=click.IntRange(min=2), default=200_000, show_default=True),
    click.option("--n", "n", type=click.IntRange(min=1), default=None, help="Número de agentes."),
    click.option("--rows", type=click.IntRange(min=1), default=None),
    click.option("--cols", type=click.IntRange(min=1), default=None),
    click.option("--row", type=click.IntRange(min=0), default=None, help="Fila del perfil (por defecto N/2 − 1)."),
    click.option("--dare-method", type=click.Choice(sorted(METODOS_DARE)), default=None),
]


def _con_opciones(funcion):
    for opcion in reversed(_OPCIONES):
        funcion = opcion(funcion)
    return funcion


def _correr(ctx: click.Context, pipeline: str, sistema: str, salida: str, **parametros):
    exp = Experimento(sistema=sistema, pipeline=pipeline, parametros=parametros, salida=salida)
    try:
        codigo = ejecutar(exp)
    except ErrorUso as error:
        raise click.UsageError(str(error), ctx=ctx) from error
    except ErrorSedlqr as error:
        click.echo(f"error: {error.nombre}: {error}", err=True)
        ctx.exit(1)
    ctx.exit(codigo)


@click.group(name="sedlqr")
@click.option("-v", "--verbose", is_flag=True, help="Registro en nivel DEBUG.")
def sedlqr(verbose: bool):
    """Análisis de LQR en red con decaimiento espacial exponencial."""
    configurar_registro("DEBUG" if verbose else "INFO")


def _registrar(pipeline: str, ayuda: str):
    @sedlqr.command(name=pipeline, help=ayuda)
    @_con_opciones
    @click.pass_context
    def comando(ctx, **opciones):
        _correr(ctx, pipeline, **opciones)
    return comando


for _nombre, _ayuda in (
    ("riccati", "Resuelve la ecuación de Riccati y guarda K y P."),
    ("decay", "Perfil de normas de K por distancia y certificados de decaimiento."),
    ("disturbance", "Controlador de respuesta a perturbaciones y brecha ‖K + L₁‖ en H."),
    ("truncation-sweep", "Costo del controlador κ-truncado para cada κ."),
    ("lemma-suite", "Tabla de aprobación de todas las cotas."),
    ("simulate", "Costos cerrados contra promedios Monte Carlo."),
):
    _registrar(_nombre, _ayuda)
