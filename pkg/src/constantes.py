# tolerancias
TOL_SIMETRIA       = 1e-10   # |Xᵀ - X| máximo aceptado
TOL_AUTOVALOR      = 1e-10   # margen para λ_min en las pruebas de definida positiva
TOL_RESIDUO        = 1e-9    # residuo relativo de Riccati / Lyapunov / sistema lineal
TOL_CAMBIO_RICCATI = 1e-12   # cambio relativo para detener la iteración de punto fijo
TOL_DUPLICACION    = 1e-14   # actualización relativa para detener el doblamiento
TOL_BISECCION      = 1e-6    # precisión absoluta de γ en el ajuste envolvente
TOL_SERIE          = 1e-16   # corte relativo de las series de potencias
TOL_COTA           = 1e-8    # holgura absoluta al comparar autovalores contra cotas
TOL_RADIO          = 1e-12   # ρ(A) ≥ 1 − TOL_RADIO cuenta como no estable (modos nulos del laplaciano)

# Riccati
MAX_ITER_RICCATI   = 100_000
MAX_ITER_DOBLE     = 100
LIMITE_DIVERGENCIA = 1e12

# certificados
GAMMA_CAP      = 50.0   # tasa SED máxima informada (por unidad de distancia)
RHO_CAP        = 50.0   # tasa de estabilidad máxima informada
EPS_PISO       = 1e-14  # piso del perfil en el ajuste por regresión
MARGEN_RHO     = 0.05   # margen sobre -ln(radio espectral)
K_MAX_DEFECTO  = 200    # potencias revisadas en el certificado de estabilidad

# topología
DISTANCIA_INALCANZABLE = -1

# respuesta a perturbaciones
LIMITE_H_NU = 5000   # tamaño máximo de M⁽ᴴ⁾ (H·n_u)

# simulación
LIMITE_ESTADO = 1e9
BLOQUE_RUIDO  = 4096   # pasos de ruido generados por lote

# ecuación del calor
ETA_MAXIMO = 0.25

# caso de estudio térmico (ζ en °C/kW, v en kJ/°C, Δt en horas)
ZETA_DEFECTO       = 1.0
CAPACITANCIA_MEDIA = 200.0
CAPACITANCIA_DESV  = 20.0
CAPACITANCIA_MIN   = 100.0
ALPHA_TERMICO      = 3.0
DT_TERMICO         = 0.25

# caso de estudio de frecuencia (V en volts, M en kg·m², Δt en segundos)
V_REF       = 132e3
INERCIA     = 1e5
B_GANANCIA  = 0.1
ALPHA1      = 0.5
ALPHA2      = 0.5
DT_SWING    = 5e-6
N_BUSES_SINTETICO = 145
SUSCEPTANCIA_BASE = 1e-6

# variable de entorno que limita los hilos
VARIABLE_HILOS = "SEDLQR_THREADS"
