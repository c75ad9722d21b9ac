import streamlit as st
from app.config_streamlit import configurar_app

# Configurar Streamlit
configurar_app()

# Título principal
st.title("🕸️ LQR en red y decaimiento espacial")

# Texto explicativo de la aplicación
st.write("""
Bienvenido a **sedlqr**, una herramienta para estudiar el **controlador LQR óptimo** de sistemas
lineales distribuidos sobre una red de agentes.

Cuando la dinámica y los costos de cada agente sólo dependen de sus vecinos cercanos, los bloques
de la ganancia óptima **K** decaen exponencialmente con la distancia en el grafo. Esta aplicación
permite observar ese decaimiento y medir cuánto se pierde al usar un **controlador local** que sólo
comunica agentes a distancia menor que κ.

Con esta herramienta podrás:

- Construir los sistemas integrados: ecuación del calor en un ciclo, contraejemplo, ejemplo de juguete,
  red térmica en grilla y red eléctrica sintética.
- Visualizar el **perfil de normas** ‖[K]ᵢⱼ‖ por distancia con sus certificados (c, γ).
- Ver el **mapa de calor** de |K| por bloques.
- Barrer el radio κ y comparar la **brecha de costo** con su cota teórica.

📌 Para comenzar, selecciona la página correspondiente en la barra lateral:

- **Decaimiento espacial**: perfil por distancia, fila de K y mapa de calor.
- **Truncamiento local**: costo del controlador κ-truncado para cada κ.

Los mismos análisis, con todas las verificaciones, se corren por lotes con `python sedlqr.py <pipeline> --help`.
""")
