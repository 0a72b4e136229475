import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PrivateAttr, model_validator

from opdef.dataclasses.windowed_vector import WindowedVector
from opdef.linalg.kernel import orthonormalize, pad_to

logger = logging.getLogger(__name__)


class ParameterSet(BaseModel):
    """
    Finite set of parameter vectors ``A`` and the orthogonal projection ``P``
    onto their closed span.

    Besides explicit vectors, a parameter set may contain the whole coordinate
    block ``{e_0, ..., e_{K-1}}`` (``coordinate_span = K``). The block is never
    materialized, which keeps very deep blocks (decaying diagonals) cheap.

    :param vectors: Explicit parameter vectors.
    :type vectors: list[numpy.ndarray]
    :param coordinate_span: Number ``K`` of leading basis vectors contained in ``A``.
    :type coordinate_span: int
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vectors: List[np.ndarray] = Field(default_factory=list)
    coordinate_span: NonNegativeInt = 0

    _basis: List[np.ndarray] = PrivateAttr(default_factory=list)

    @model_validator(mode="after")
    def build_basis(self):
        # the coordinate block is handled analytically, so only the part of
        # each vector beyond it needs orthonormalizing
        reduced = []
        for vector in self.vectors:
            vector = np.array(vector, copy=True)
            vector[:self.coordinate_span] = 0
            reduced.append(vector)
        self._basis = orthonormalize(reduced)
        logger.debug("Parameter set with %d vectors, coordinate span %d and %d basis vectors.",
                     len(self.vectors), self.coordinate_span, len(self._basis))
        return self

    @property
    def orthonormalized_basis(self) -> List[np.ndarray]:
        """
        Orthonormal basis of ``sp(A)``: the explicit part only; the coordinate
        block ``e_0, ..., e_{K-1}`` is implied.
        """

        return self._basis

    @property
    def dimension(self) -> int:
        return self.coordinate_span + len(self._basis)

    @property
    def support(self) -> int:
        """
        Index beyond which every vector of ``sp(A)`` vanishes.
        """

        lengths = [len(v) for v in self.vectors]
        return max([self.coordinate_span] + lengths)

    @property
    def is_empty(self) -> bool:
        return self.dimension == 0

    def _basis_matrix(self, length: int, dtype) -> np.ndarray:
        if not self._basis:
            return np.zeros((length, 0), dtype=dtype)
        return np.column_stack([pad_to(b, length) for b in self._basis]).astype(dtype, copy=False)

    def project(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """
        Orthogonal projection of a dense vector onto ``sp(A)``.

        :param x:
            Dense vector.
        :type x: numpy.ndarray
        :return:
            ``(Px, x - Px)``, both padded to a common length.
        :rtype: tuple[numpy.ndarray, numpy.ndarray]
        """

        x = np.asarray(x)
        # the coordinate block needs no padding: x vanishes beyond len(x)
        length = max([len(x)] + [len(v) for v in self.vectors])
        dtype = np.result_type(x, *self._basis, np.float64)
        x = pad_to(x.astype(dtype), length)

        px = np.zeros(length, dtype=dtype)
        px[:self.coordinate_span] = x[:self.coordinate_span]
        q = self._basis_matrix(length, dtype)
        px += q @ (q.conj().T @ x)
        return px, x - px

    def complement_norms(self, w: WindowedVector) -> np.ndarray:
        """
        Column norms of ``(I - P) w`` for a windowed batch.

        Only the part of the window that overlaps the support of ``sp(A)`` is
        projected; coordinates beyond the support are orthogonal to ``A``.

        :param w:
            Windowed batch of vectors.
        :type w: WindowedVector
        :rtype: numpy.ndarray
        """

        support, span = self.support, self.coordinate_span
        tail = w.norms(start=support)
        lo, hi = max(span, w.offset), min(support, w.stop)
        if hi <= lo:
            return tail

        head = w.values[lo - w.offset:hi - w.offset]
        q = self._basis_matrix(support, np.result_type(head, *self._basis, np.float64))[span:]
        residual = -(q @ (q[lo - span:hi - span].conj().T @ head))
        residual[lo - span:hi - span] += head
        head_norms = np.sqrt(np.sum(np.abs(residual) ** 2, axis=0))
        return np.sqrt(head_norms ** 2 + tail ** 2)
