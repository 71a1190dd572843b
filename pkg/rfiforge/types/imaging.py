from typing_extensions import TypedDict


class MapScalingDict(TypedDict):
    """
    How the values of an exported PGM map relate to the map values

    `value = minimum + pixel / max_pixel * (maximum - minimum)`. Pixel 0 also marks masked points.
    """

    minimum: float
    maximum: float
    max_pixel: int
    width: int
    height: int
    l_axis: list[float]
    m_axis: list[float]
    description: str
