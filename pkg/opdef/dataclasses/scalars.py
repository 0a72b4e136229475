from enum import Enum
from typing import List, Sequence, Tuple, Union

import numpy as np

# JSON form of a scalar: a plain number (real) or an [re, im] pair (complex)
ScalarLike = Union[float, Tuple[float, float]]


class ScalarField(str, Enum):
    """
    Scalar field of vectors, matrices and operator specs.

    Real-field data is stored as ``float64`` and complex-field data as
    ``complex128``; arithmetic never leaves the declared field.
    """

    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self):
        return np.float64 if self is ScalarField.REAL else np.complex128

    @classmethod
    def of(cls, array: np.ndarray) -> "ScalarField":
        """
        Field of a numpy array, judged by its dtype.

        :param array:
            Input array.
        :type array: numpy.ndarray
        :rtype: ScalarField
        """

        return cls.COMPLEX if np.iscomplexobj(array) else cls.REAL


def is_real_compatible(value: ScalarLike) -> bool:
    if isinstance(value, (tuple, list)):
        return float(value[1]) == 0.0
    return True


def decode_scalar(value: ScalarLike, field: ScalarField) -> Union[float, complex]:
    """
    Turn the JSON form of a scalar into a Python number of the given field.

    :param value:
        Plain number or ``(re, im)`` pair.
    :type value: float or tuple[float, float]
    :param field:
        Target field.
    :type field: ScalarField
    :return:
        ``float`` for the real field, ``complex`` otherwise.
    :raises ValueError:
        If a pair with nonzero imaginary part is decoded into the real field.
    """

    if isinstance(value, (tuple, list)):
        re, im = float(value[0]), float(value[1])
    else:
        re, im = float(value), 0.0

    if field is ScalarField.REAL:
        if im != 0.0:
            raise ValueError(f"Scalar {value} has a nonzero imaginary part but the field is real.")
        return re
    return complex(re, im)


def encode_scalar(value, field: ScalarField) -> ScalarLike:
    """
    Inverse of :func:`decode_scalar`: plain float for the real field, pair otherwise.
    """

    value = complex(value)
    if field is ScalarField.REAL:
        return float(value.real)
    return float(value.real), float(value.imag)


def conjugate_scalar(value: ScalarLike) -> ScalarLike:
    # keeps the storage form, so real specs stay plain numbers
    if isinstance(value, (tuple, list)):
        return float(value[0]), -float(value[1])
    return value


def decode_vector(values: Sequence[ScalarLike], field: ScalarField) -> np.ndarray:
    """
    Decode a JSON coefficient list into a numpy vector of the given field.

    :param values:
        Coefficients, plain numbers or ``[re, im]`` pairs.
    :type values: list
    :param field:
        Target field.
    :type field: ScalarField
    :rtype: numpy.ndarray
    """

    out = np.zeros(len(values), dtype=field.dtype)
    for i, value in enumerate(values):
        out[i] = decode_scalar(value, field)
    return out


def encode_vector(vector: np.ndarray, field: ScalarField) -> List[ScalarLike]:
    return [encode_scalar(v, field) for v in np.asarray(vector).ravel()]


def scalar_to_pair(value) -> List[float]:
    # report form of a scalar: always [re, im]
    value = complex(value)
    return [float(value.real), float(value.imag)]
