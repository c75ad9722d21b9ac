class ErrorSedlqr(Exception):
    """Error base del paquete. `nombre` identifica el tipo de falla en la CLI."""

    nombre = "error"

    def __init__(self, mensaje: str = "", **detalle):
        super().__init__(mensaje)
        self.detalle = detalle


class TopologiaInvalida(ErrorSedlqr):
    nombre = "invalid-topology"


class AristaInvalida(ErrorSedlqr):
    nombre = "invalid-edge"


class IndiceInvalido(ErrorSedlqr):
    nombre = "invalid-index"


class ErrorNumerico(ErrorSedlqr):
    nombre = "numeric-error"


class ErrorDimensiones(ErrorSedlqr):
    nombre = "shape-error"


class EntradaInvalida(ErrorSedlqr):
    nombre = "invalid-input"


class ProblemaInvalido(ErrorSedlqr):
    nombre = "invalid-problem"


class FalloRiccati(ErrorSedlqr):
    nombre = "riccati-failure"


class EntradaInestable(ErrorSedlqr):
    nombre = "unstable-input"


class ControladorInestable(ErrorSedlqr):
    nombre = "unstable-controller"


class CertificadoNoDisponible(ErrorSedlqr):
    nombre = "certificate-unavailable"


class MatrizMSingular(ErrorSedlqr):
    nombre = "singular-M"


class UmbralIndefinido(ErrorSedlqr):
    nombre = "threshold-undefined"


class DivergenciaDetectada(ErrorSedlqr):
    nombre = "divergence-detected"


class ErrorUso(ErrorSedlqr):
    nombre = "usage-error"
