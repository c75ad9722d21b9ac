import streamlit as st
import pandas as pd

from app.components import construir_o_avisar, selector_sistema
from app.config_streamlit import configurar_app
from src.bloques import ajustar_sed, perfil_fila, perfil_normas
from src.cli import Experimento, brecha_por_horizonte, resolver
from src.errores import ErrorSedlqr
from src.graficos import grafico_brecha_horizonte, grafico_fila, grafico_perfil, mapa_calor

configurar_app("Decaimiento espacial")

# ── Inicializar session_state ─────────────────────────────────────────────────
for key, val in [
    ("resultado_decaimiento",  None),
    ("params_decaimiento",     None),
    ("brecha_decaimiento",     None),
]:
    if key not in st.session_state:
        st.session_state[key] = val


# ── UI ────────────────────────────────────────────────────────────────────────
st.title("📉 Decaimiento espacial de K")
st.write("""
Resuelve la **ecuación de Riccati** del sistema elegido y muestra cómo decae la norma de los bloques
de la ganancia óptima con la **distancia de grafo** entre agentes. Las rectas punteadas son los
certificados c·e^{-γd} ajustados en modo **envolvente** (cota válida para todos los bloques) y
**regresión** (tendencia del perfil).
""")

nombre, parametros = selector_sistema("decaimiento")
params_actuales = {"sistema": nombre, **parametros}

if st.session_state.params_decaimiento not in (None, params_actuales):
    st.info("🔄 Los parámetros han cambiado. Presiona **Resolver Riccati** para actualizar los resultados.")

# ── Botón de cálculo ──────────────────────────────────────────────────────────
if st.button("🚀 Resolver Riccati"):
    problema = construir_o_avisar(nombre, parametros)
    if problema is not None:
        try:
            with st.spinner("Resolviendo la ecuación de Riccati..."):
                solucion = resolver(Experimento(sistema=nombre, pipeline="decay", parametros=parametros), problema)
            st.session_state.resultado_decaimiento = {"problema": problema, "solucion": solucion}
            st.session_state.params_decaimiento = params_actuales
            st.session_state.brecha_decaimiento = None
            st.success(f"✅ Riccati resuelto en {solucion.iteraciones} iteraciones (residuo {solucion.residuo:.2e}).")
        except ErrorSedlqr as error:
            st.session_state.resultado_decaimiento = None
            st.error(f"🚫 {error.nombre}: {error}")


# ── Visualización de Resultados ───────────────────────────────────────────────
if st.session_state.resultado_decaimiento:
    res = st.session_state.resultado_decaimiento
    problema, K = res["problema"], res["solucion"].K
    T = problema.topologia

    certificados = {"Envolvente": ajustar_sed(K, T, "envolvente"), "Regresión": ajustar_sed(K, T, "regresion")}
    col_tabla, col_graf = st.columns([1, 2])

    with col_tabla:
        st.subheader("📋 Certificados")
        df_c = pd.DataFrame([c.como_fila(n) for n, c in certificados.items()])
        df_c.columns = ["Modo", "c", "γ", "Violación máx.", "Ajuste"]
        st.dataframe(df_c, use_container_width=True)
        for aviso in problema.advertencias:
            st.warning(f"⚠️ {aviso}")

    with col_graf:
        st.subheader(f"📈 Perfil por distancia: {problema.nombre}")
        st.altair_chart(grafico_perfil(perfil_normas(K, T), certificados), use_container_width=True)

    st.header("Fila de K")
    fila = st.slider("Agente (fila):", 0, T.n_agentes - 1, max(T.n_agentes // 2 - 1, 0))
    st.altair_chart(grafico_fila(perfil_fila(K, T, fila), fila), use_container_width=True)

    st.header("Mapa de calor")
    st.altair_chart(mapa_calor(K), use_container_width=True)

    st.header("Respuesta a perturbaciones")
    st.write("""
    Brecha entre la ganancia óptima y el primer bloque del controlador de **respuesta a perturbaciones**
    de horizonte H, junto con su cota. Requiere A estable o un K₀ que la pre-estabilice.
    """)
    H = st.slider("Horizonte máximo H:", 1, 30, 10)
    if st.button("🚀 Calcular brecha"):
        exp = Experimento(sistema=nombre, pipeline="disturbance", parametros={**parametros, "H": H})
        try:
            with st.spinner("Ensamblando M y J para cada horizonte..."):
                filas, _ = brecha_por_horizonte(exp, problema)
            st.session_state.brecha_decaimiento = filas
        except ErrorSedlqr as error:
            st.session_state.brecha_decaimiento = None
            st.error(f"🚫 {error.nombre}: {error}")

    if st.session_state.brecha_decaimiento:
        st.altair_chart(grafico_brecha_horizonte(st.session_state.brecha_decaimiento), use_container_width=True)
