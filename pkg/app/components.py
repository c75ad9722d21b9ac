import streamlit as st

from src.errores import ErrorSedlqr
from src.sistemas import SISTEMAS_INTEGRADOS, construir_integrado

# parámetros que muestra cada sistema integrado: (clave, etiqueta, mínimo, valor por defecto, paso)
PARAMETROS_SISTEMA = {
    "heat-cycle":        [("n", "N agentes", 3, 10, 1), ("eta", "η", 0.01, 0.1, 0.01), ("alpha", "α", 0.1, 1.0, 0.1)],
    "heat-cycle-stable": [("n", "N agentes", 3, 10, 1), ("eta", "η", 0.01, 0.1, 0.01), ("rho", "ρ", 0.01, 0.1, 0.01)],
    "counterexample":    [("n", "N agentes", 2, 100, 1), ("a", "a", 0.1, 1.1, 0.1)],
    "toy-rho":           [("n", "N agentes", 2, 100, 1), ("rho", "ρ", 0.01, 0.1, 0.05)],
    "thermal-grid":      [("rows", "Filas", 1, 3, 1), ("cols", "Columnas", 1, 3, 1), ("seed", "Semilla", 0, 0, 1)],
    "swing-synthetic":   [("n", "N barras", 2, 30, 1), ("seed", "Semilla", 0, 0, 1)],
}


def selector_sistema(clave: str) -> tuple:
    """Selectbox del sistema y sus parámetros en la barra lateral; devuelve (nombre, parámetros)."""
    st.sidebar.header("Sistema")
    nombre = st.sidebar.selectbox("Sistema integrado:", list(SISTEMAS_INTEGRADOS), key=f"{clave}_sistema")
    parametros = {}
    for param, etiqueta, minimo, defecto, paso in PARAMETROS_SISTEMA[nombre]:
        if isinstance(defecto, int) and isinstance(paso, int):
            parametros[param] = int(st.sidebar.number_input(etiqueta, min_value=minimo, value=defecto, step=paso,
                                                            key=f"{clave}_{nombre}_{param}"))
        else:
            parametros[param] = float(st.sidebar.number_input(etiqueta, min_value=float(minimo), value=float(defecto),
                                                              step=float(paso), format="%.3f",
                                                              key=f"{clave}_{nombre}_{param}"))
    return nombre, parametros


def construir_o_avisar(nombre: str, parametros: dict):
    """Construye el sistema o muestra el error del paquete; None si falló."""
    try:
        return construir_integrado(nombre, **parametros)
    except ErrorSedlqr as error:
        st.error(f"🚫 {error.nombre}: {error}")
        return None
