class ShapeError(ValueError):
    """Base class of every domain error raised by the shapes library."""


class DiagramFormatError(ShapeError):
    pass


class MeshFormatError(ShapeError):
    pass


class DegenerateFrameError(ShapeError):
    """The center/axis frame of a mesh is undefined."""


class FilterError(ShapeError):
    pass


class PaddingError(ShapeError):
    pass


class CoefficientOverflowError(ShapeError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"Coefficient c_{index} is not finite (double precision overflow)")


class OracleLimitError(ShapeError):
    pass


class IndexFormatError(ShapeError):
    pass


class MissingEmbeddingError(ShapeError):
    pass


class UnknownModelError(ShapeError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ''


class LabelError(ShapeError):
    pass


class InputEncodingError(ShapeError):
    pass
