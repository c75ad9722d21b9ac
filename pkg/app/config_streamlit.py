import streamlit as st

from src.configuracion import configurar_registro

# menú y pie de streamlit ocultos; las tablas de resultados usan fuente monoespaciada
ESTILO = """
    <style>
    #MainMenu {visibility: hidden;}
    footer {visibility: hidden;}
    [data-testid="stDataFrame"] {font-family: monospace;}
    </style>
"""


def configurar_app(titulo: str = None):
    """Configura la página; `titulo` se agrega al nombre de la pestaña del navegador."""
    st.set_page_config(
        page_title="sedlqr" if titulo is None else f"sedlqr · {titulo}",
        page_icon="🕸️",
        layout="wide",
        initial_sidebar_state="expanded",
    )
    # sólo advertencias y errores de la librería
    configurar_registro("WARNING")
    st.markdown(ESTILO, unsafe_allow_html=True)
