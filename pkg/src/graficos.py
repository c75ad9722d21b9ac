"""Gráficos altair de los perfiles de decaimiento y del barrido de truncamiento."""
import math

import altair as alt
import numpy as np
import pandas as pd

from src.bloques import normas_bloque

# colores por serie, en el orden en que aparecen en la leyenda
COLORES = {
    "Perfil":      "dodgerblue",
    "Envolvente":  "crimson",
    "Regresión":   "gold",
    "Brecha":      "dodgerblue",
    "Cota":        "crimson",
}


def _escala(serie: list) -> alt.Scale:
    return alt.Scale(domain=serie, range=[COLORES[s] for s in serie])


def _positivos(df: pd.DataFrame, columna: str) -> pd.DataFrame:
    """El eje logarítmico no admite ceros ni infinitos."""
    valores = df[columna].astype(float)
    return df[np.isfinite(valores) & (valores > 0)]


def tabla_perfil(perfil: list, certificados: dict = None) -> pd.DataFrame:
    """
    Arma la tabla larga (distancia, norma, serie) del perfil y de las rectas
    c·e^{-γd} de cada certificado.

    Parámetros:
    -----------
    perfil : list[tuple[int, float]]
        Salida de `perfil_normas`.
    certificados : dict[str, CertificadoSed] | None
        Series adicionales, por ejemplo {"Envolvente": cert, "Regresión": cert}.
    """
    distancias = np.array([d for d, _ in perfil], dtype=float)
    filas = [{"distancia": d, "norma": p, "serie": "Perfil"} for d, p in perfil]
    for nombre, cert in (certificados or {}).items():
        if cert.degenerado:
            continue
        for d, cota in zip(distancias, cert.cota(distancias)):
            filas.append({"distancia": d, "norma": float(cota), "serie": nombre})
    return pd.DataFrame(filas, columns=["distancia", "norma", "serie"])


def grafico_perfil(perfil: list, certificados: dict = None, titulo: str = "Decaimiento de ‖[K]ᵢⱼ‖") -> alt.Chart:
    df = _positivos(tabla_perfil(perfil, certificados), "norma")
    series = [s for s in COLORES if s in set(df["serie"])]
    puntos = alt.Chart(df[df["serie"] == "Perfil"]).mark_line(point=True, size=2.5).encode(
        x=alt.X("distancia:Q", title="Distancia de grafo d"),
        y=alt.Y("norma:Q", title="max ‖[K]ᵢⱼ‖", scale=alt.Scale(type="log")),
        color=alt.Color("serie:N", scale=_escala(series), legend=alt.Legend(title="Referencias")),
        tooltip=[alt.Tooltip("distancia:Q", title="d"), alt.Tooltip("norma:Q", title="Norma", format=".3e")],
    )
    rectas = alt.Chart(df[df["serie"] != "Perfil"]).mark_line(strokeDash=[6, 4], size=2).encode(
        x="distancia:Q",
        y=alt.Y("norma:Q", scale=alt.Scale(type="log")),
        color=alt.Color("serie:N", scale=_escala(series)),
    )
    return alt.layer(puntos, rectas).properties(title=titulo, height=400)


def grafico_fila(perfil: list, fila: int) -> alt.Chart:
    """Normas ‖[K]_{fila,j}‖ contra la columna j (salida de `perfil_fila`)."""
    df = _positivos(pd.DataFrame(perfil, columns=["columna", "distancia", "norma"]), "norma")
    return alt.Chart(df).mark_bar(color="dodgerblue").encode(
        x=alt.X("columna:O", title="Columna j"),
        y=alt.Y("norma:Q", title=f"‖[K]_{{{fila},j}}‖", scale=alt.Scale(type="log")),
        tooltip=["columna", "distancia", alt.Tooltip("norma:Q", format=".3e")],
    ).properties(height=300)


def mapa_calor(K, titulo: str = "|K| por bloques") -> alt.Chart:
    normas = normas_bloque(K)
    i, j = np.indices(normas.shape)
    df = pd.DataFrame({"i": i.ravel(), "j": j.ravel(), "norma": normas.ravel()})
    piso = max(float(df["norma"].max()) * 1e-16, np.finfo(float).tiny)
    df["log10"] = np.log10(np.maximum(df["norma"], piso))
    return alt.Chart(df).mark_rect().encode(
        x=alt.X("j:O", title="Agente j", axis=alt.Axis(labels=normas.shape[1] <= 40)),
        y=alt.Y("i:O", title="Agente i", axis=alt.Axis(labels=normas.shape[0] <= 40)),
        color=alt.Color("log10:Q", title="log₁₀ ‖[K]ᵢⱼ‖", scale=alt.Scale(scheme="viridis")),
        tooltip=["i", "j", alt.Tooltip("norma:Q", format=".3e")],
    ).properties(title=titulo, height=400)


def tabla_barrido(reportes: list) -> pd.DataFrame:
    filas = []
    for r in reportes:
        razon = r.brecha / r.costo_optimo if r.costo_optimo > 0 else math.nan
        filas.append({"kappa": r.kappa, "valor": razon, "serie": "Brecha", "estable": r.estable})
        filas.append({"kappa": r.kappa, "valor": r.cota_desempeno / r.costo_optimo if r.costo_optimo > 0 else math.nan,
                      "serie": "Cota", "estable": r.estable})
    return pd.DataFrame(filas, columns=["kappa", "valor", "serie", "estable"])


def grafico_brecha(reportes: list) -> alt.Chart:
    """Razón (C(K_trunc) − C(K))/C(K) y su cota contra κ; las filas inestables no se dibujan."""
    df = _positivos(tabla_barrido(reportes), "valor")
    return alt.Chart(df).mark_line(point=True, size=2).encode(
        x=alt.X("kappa:Q", title="Radio de comunicación κ"),
        y=alt.Y("valor:Q", title="Brecha relativa de costo", scale=alt.Scale(type="log")),
        color=alt.Color("serie:N", scale=_escala(["Brecha", "Cota"]), legend=alt.Legend(title=None)),
        tooltip=["kappa", alt.Tooltip("valor:Q", format=".3e"), "estable"],
    ).properties(height=400)


def grafico_brecha_horizonte(filas: list) -> alt.Chart:
    """Brecha ‖K + L₁⁽ᴴ⁾‖ y su cota contra H (filas con claves H, gap, bound)."""
    df = pd.DataFrame(
        [{"H": f["H"], "valor": f["gap"], "serie": "Brecha"} for f in filas]
        + [{"H": f["H"], "valor": f["bound"], "serie": "Cota"} for f in filas],
        columns=["H", "valor", "serie"],
    )
    return alt.Chart(_positivos(df, "valor")).mark_line(point=True).encode(
        x=alt.X("H:Q", title="Horizonte H"),
        y=alt.Y("valor:Q", title="‖K + L₁⁽ᴴ⁾‖", scale=alt.Scale(type="log")),
        color=alt.Color("serie:N", scale=_escala(["Brecha", "Cota"]), legend=alt.Legend(title=None)),
    ).properties(height=350)
