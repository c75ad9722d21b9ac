import math

import streamlit as st
import pandas as pd

from app.components import construir_o_avisar, selector_sistema
from app.config_streamlit import configurar_app
from src.cli import Experimento, resolver
from src.errores import ErrorSedlqr
from src.graficos import grafico_brecha
from src.truncamiento import barrido_brecha

configurar_app("Truncamiento local")

# ── Inicializar session_state ─────────────────────────────────────────────────
for key, val in [
    ("resultado_truncamiento", None),
    ("params_truncamiento",    None),
]:
    if key not in st.session_state:
        st.session_state[key] = val


# ── UI ────────────────────────────────────────────────────────────────────────
st.title("✂️ Truncamiento local")
st.write("""
Un controlador **κ-truncado** conserva sólo los bloques [K]ᵢⱼ con dist(i, j) < κ, de modo que cada agente
necesita información de sus vecinos a menos de κ saltos. Para cada κ se prueba la estabilidad del lazo
truncado y se compara la **brecha de costo** con la cota teórica del controlador local.
""")

nombre, parametros = selector_sistema("truncamiento")
params_actuales = {"sistema": nombre, **parametros}

if st.session_state.params_truncamiento not in (None, params_actuales):
    st.info("🔄 Los parámetros han cambiado. Presiona **Barrer κ** para actualizar los resultados.")

# ── Botón de cálculo ──────────────────────────────────────────────────────────
if st.button("🚀 Barrer κ"):
    problema = construir_o_avisar(nombre, parametros)
    if problema is not None:
        try:
            with st.spinner("Resolviendo Riccati y barriendo κ..."):
                solucion = resolver(Experimento(sistema=nombre, pipeline="truncation-sweep"), problema)
                kappas = range(1, problema.topologia.diametro() + 2)
                reportes = barrido_brecha(problema, solucion, kappas)
            st.session_state.resultado_truncamiento = {"problema": problema, "reportes": reportes}
            st.session_state.params_truncamiento = params_actuales
            st.success(f"✅ Barrido completado para κ = 1 … {kappas[-1]}.")
        except ErrorSedlqr as error:
            st.session_state.resultado_truncamiento = None
            st.error(f"🚫 {error.nombre}: {error}")


# ── Visualización de Resultados ───────────────────────────────────────────────
if st.session_state.resultado_truncamiento:
    res = st.session_state.resultado_truncamiento
    reportes = res["reportes"]
    umbral = reportes[0].umbral_kappa

    col_tabla, col_graf = st.columns([1, 2])

    with col_tabla:
        st.subheader("📋 Barrido")
        df_r = pd.DataFrame([r.como_fila() for r in reportes])
        df_r.columns = ["κ", "Estable", "C(K_trunc)", "C(K)", "Brecha", "Cota", "Umbral"]
        st.dataframe(df_r.drop(columns=["Umbral"]), use_container_width=True)
        if math.isfinite(umbral):
            st.metric("Umbral de κ", f"{umbral:.2f}")
        inestables = [r.kappa for r in reportes if not r.estable]
        if inestables:
            st.warning(f"⚠️ Lazo truncado inestable para κ ∈ {inestables}.")

    with col_graf:
        st.subheader(f"📈 Brecha relativa de costo: {res['problema'].nombre}")
        st.altair_chart(grafico_brecha(reportes), use_container_width=True)
