from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from opdef.dataclasses.scalars import ScalarField


class WindowedVector(BaseModel):
    """
    A batch of finitely supported sequences sharing one contiguous window.

    Column ``j`` of :attr:`values` holds the coefficients at basis indices
    ``offset, offset + 1, ..., offset + len(values) - 1``; every coefficient
    outside that window is zero. Offsets may be far beyond anything that fits
    in memory densely (e.g. probes at index ``10**12``).

    :param offset: First basis index covered by the window.
    :type offset: int
    :param values: Coefficients, shape ``(length, columns)``.
    :type values: numpy.ndarray
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    offset: int = 0
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def as_matrix(cls, values) -> np.ndarray:
        values = np.asarray(values)
        if values.ndim == 1:
            values = values[:, None]
        return values

    @classmethod
    def from_dense(cls, x, offset: int = 0) -> "WindowedVector":
        return cls(offset=offset, values=np.array(x, copy=True))

    @classmethod
    def basis(cls, index: int, field: ScalarField) -> "WindowedVector":
        return cls(offset=index, values=np.ones((1, 1), dtype=field.dtype))

    @classmethod
    def identity_block(cls, size: int, field: ScalarField) -> "WindowedVector":
        # columns e_0 ... e_{size-1}
        return cls(offset=0, values=np.eye(size, dtype=field.dtype))

    @classmethod
    def empty(cls, columns: int, field: ScalarField) -> "WindowedVector":
        return cls(offset=0, values=np.zeros((0, columns), dtype=field.dtype))

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def columns(self) -> int:
        return self.values.shape[1]

    @property
    def stop(self) -> int:
        return self.offset + self.length

    def scaled(self, c) -> "WindowedVector":
        return WindowedVector(offset=self.offset, values=c * self.values)

    def added(self, other: "WindowedVector") -> "WindowedVector":
        """
        Sum of two windowed batches over the union of their windows.
        """

        if other.length == 0:
            return WindowedVector(offset=self.offset, values=self.values.copy())
        if self.length == 0:
            return WindowedVector(offset=other.offset, values=other.values.copy())

        start = min(self.offset, other.offset)
        stop = max(self.stop, other.stop)
        dtype = np.result_type(self.values, other.values)
        out = np.zeros((stop - start, self.columns), dtype=dtype)
        out[self.offset - start:self.stop - start] += self.values
        out[other.offset - start:other.stop - start] += other.values
        return WindowedVector(offset=start, values=out)

    def restrict(self, length: int) -> np.ndarray:
        """
        Dense coefficients at indices ``0 .. length - 1``.

        :param length:
            Number of leading coordinates kept.
        :type length: int
        :return:
            Array of shape ``(length, columns)``.
        :rtype: numpy.ndarray
        """

        out = np.zeros((length, self.columns), dtype=self.values.dtype)
        lo, hi = max(self.offset, 0), min(self.stop, length)
        if hi > lo:
            out[lo:hi] = self.values[lo - self.offset:hi - self.offset]
        return out

    def dense(self) -> np.ndarray:
        """
        Dense coefficients from index 0 up to the end of the window.
        """

        return self.restrict(self.stop)

    def entry(self, index: int) -> np.ndarray:
        # row of coefficients at one basis index (zeros outside the window)
        if self.offset <= index < self.stop:
            return self.values[index - self.offset]
        return np.zeros(self.columns, dtype=self.values.dtype)

    def norms(self, start: Optional[int] = None) -> np.ndarray:
        """
        Column norms, optionally counting only indices ``>= start``.
        """

        values = self.values
        if start is not None and start > self.offset:
            values = values[min(start - self.offset, self.length):]
        return np.sqrt(np.sum(np.abs(values) ** 2, axis=0))
