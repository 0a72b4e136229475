import cmath
import logging
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from opdef.dataclasses.operator_spec import OperatorSpec
from opdef.dataclasses.results import WeylFamily, WeylWitness
from opdef.dataclasses.scalars import ScalarField
from opdef.linalg.kernel import norm, svd
from opdef.operators.application import apply_full, complexify, section, subtract_scalar, truncate
from opdef.utils.error_handling import raise_with_logging_error

logger = logging.getLogger(__name__)

Scalar = Union[float, complex]

SUBSEQUENCE_POINTS = (0.55, -0.55)
CIRCLE_POINTS = (1.0, 1j, -1.0, -1j)
PROJECTION_POINTS = (0.0, 1.0)
DIAGONAL_POINTS = 4


def _field_for(spec: OperatorSpec, points: Sequence[Scalar]) -> OperatorSpec:
    # complex points need the complexified operator
    if spec.field is ScalarField.REAL and any(complex(p).imag != 0.0 for p in points):
        return complexify(spec)
    return spec


def _check_separation(candidates: Sequence[Scalar], tol: float) -> None:
    for i, a in enumerate(candidates):
        for b in candidates[i + 1:]:
            if abs(a - b) <= 10 * tol:
                raise_with_logging_error(f"Candidates {a} and {b} are not separated by more than 10 x {tol}.",
                                         logger=logger,
                                         exception_type=ValueError)


def weyl_family(spec: OperatorSpec, mu: Scalar, tol: float, size: int, rank_budget: int = 5) -> Optional[WeylFamily]:
    """
    ``rank_budget + 1`` orthonormal vectors with ``||(T - mu) u|| < tol``, or ``None``.

    The vectors are the right singular vectors of the smallest singular
    values of the section of ``T - mu I``; every one is re-validated by
    direct application.

    :param spec:
        Operator spec (complex if ``mu`` is complex).
    :type spec: OperatorSpec
    :param mu:
        Candidate point.
    :param tol:
        Residual tolerance.
    :type tol: float
    :param size:
        Section size ``N``.
    :type size: int
    :param rank_budget:
        The family needs one vector more than this.
    :type rank_budget: int
    :rtype: WeylFamily or None
    """

    shifted = subtract_scalar(spec, mu)
    values, vectors = svd(section(shifted, size)).smallest_right_vectors(rank_budget + 1)
    if values[-1] >= tol:
        logger.debug("No Weyl family at mu = %s: singular value %.3e >= %.3e.", mu, values[-1], tol)
        return None

    residuals = []
    for j in range(vectors.shape[1]):
        image = apply_full(shifted, vectors[:, j])
        residuals.append(norm(image))
    if max(residuals) >= tol:
        logger.debug("Weyl family at mu = %s failed re-validation (%.3e).", mu, max(residuals))
        return None
    return WeylFamily(mu=mu, vectors=vectors, residuals=residuals)


def find_weyl_witness(spec: OperatorSpec,
                      candidates: Sequence[Scalar],
                      tol: float,
                      size: int,
                      rank_budget: int = 5,
                      on_adjoint: bool = False) -> Optional[WeylWitness]:
    """
    Search two candidate points that carry Weyl families.

    :param spec:
        Operator spec; real specs are complexified for complex candidates.
    :type spec: OperatorSpec
    :param candidates:
        Candidate points, pairwise separated by more than ``10 * tol``.
    :param tol:
        Residual tolerance.
    :type tol: float
    :param size:
        Section size ``N``.
    :type size: int
    :param rank_budget:
        Families need ``rank_budget + 1`` vectors.
    :type rank_budget: int
    :param on_adjoint:
        Marks the witness as one of the adjoint operator.
    :type on_adjoint: bool
    :return:
        The witness, or ``None``; no witness is not evidence of definability.
    :rtype: WeylWitness or None
    :raises ValueError:
        If candidates are not separated.
    """

    _check_separation(candidates, tol)
    spec = _field_for(spec, candidates)

    families = []
    for mu in candidates:
        family = weyl_family(spec, mu, tol, size, rank_budget)
        if family is None:
            continue
        families.append(family)
        logger.debug("Weyl family at mu = %s, residuals up to %.3e.", mu, max(family.residuals))
        if len(families) == 2:
            return WeylWitness(families=families,
                               tolerance=tol,
                               truncation_size=size,
                               rank_budget=rank_budget,
                               on_adjoint=on_adjoint)
    return None


def _diagonal_points(spec: OperatorSpec, tol: float, size: int) -> List[Scalar]:
    # clusters of the back half of the truncation diagonal, largest first
    diagonal = np.diag(truncate(spec, size))[size // 2:]
    width = 10 * tol
    keys = np.round(diagonal.real / width) + 1j * np.round(np.imag(diagonal) / width)
    unique, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    order = np.argsort(-counts, kind="stable")[:DIAGONAL_POINTS]
    points = []
    for index in order:
        center = np.mean(diagonal[inverse.ravel() == index])
        points.append(complex(center) if np.iscomplexobj(diagonal) else float(center))
    return points


def weyl_candidates(spec: OperatorSpec, tol: float, size: int) -> List[Scalar]:
    """
    Candidate points of the essential spectrum, in priority order:
    interior points for coordinate subsequences, unit-circle samples for
    shifts, ``{0, 1}`` for projections, then clustered diagonal samples of
    the truncation. Points closer than ``10 * tol`` to an earlier one are
    dropped.

    :rtype: list
    """

    points: List[Scalar] = []
    if spec.contains_kind("coordinate_subsequence"):
        points += SUBSEQUENCE_POINTS
    if spec.contains_kind("shift_left", "shift_right"):
        points += CIRCLE_POINTS
    if spec.contains_kind("projection"):
        points += PROJECTION_POINTS
    points += _diagonal_points(spec, tol, size)

    kept: List[Scalar] = []
    for point in points:
        if all(abs(point - other) > 10 * tol for other in kept):
            kept.append(point)
    logger.debug("Weyl candidates: %s.", kept)
    return kept


def parse_grid(grid: str) -> List[complex]:
    """
    Parse a scan grid. Parts are joined with ``;``:

    * ``circle:<count>``: equally spaced unit-circle points starting at 1;
    * ``box:<re0>,<re1>,<im0>,<im1>,<steps>``: a ``steps x steps`` lattice;
    * otherwise a comma list of complex literals, e.g. ``0,2,0.5+1j``.

    :param grid:
        Grid description.
    :type grid: str
    :rtype: list[complex]
    :raises ValueError:
        If a part cannot be parsed or the grid is empty.
    """

    points: List[complex] = []
    for part in (p.strip() for p in grid.split(";")):
        if not part:
            continue
        if part.startswith("circle:"):
            count = int(part.split(":", 1)[1])
            points += [cmath.exp(2j * cmath.pi * k / count) for k in range(count)]
        elif part.startswith("box:"):
            re0, re1, im0, im1, steps = part.split(":", 1)[1].split(",")
            for im in np.linspace(float(im0), float(im1), int(steps)):
                for re in np.linspace(float(re0), float(re1), int(steps)):
                    points.append(complex(re, im))
        else:
            points += [complex(token.strip().replace(" ", "")) for token in part.split(",") if token.strip()]
    if not points:
        raise ValueError(f"Grid '{grid}' contains no points.")
    return points


def essential_spectrum_scan(spec: OperatorSpec,
                            grid: Sequence[Scalar],
                            k_fraction: float = 1.0 / 64,
                            size: int = 256) -> pd.DataFrame:
    """
    Essential-invertibility defect of ``T - mu I`` over a grid of points.

    The defect at ``mu`` is the ``floor(k_fraction * N)``-th smallest
    (0-based) singular value of ``truncate(T - mu I, N)``; small defects mark
    approximate members of the essential spectrum, while finitely many small
    singular values (isolated eigenvalues, boundary effects) are skipped.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param grid:
        Non-empty list of points.
    :param k_fraction:
        Position of the defect among the ascending singular values.
    :type k_fraction: float
    :param size:
        Truncation size ``N``.
    :type size: int
    :return:
        Rows ``mu_re, mu_im, defect`` in grid order.
    :rtype: pandas.DataFrame
    """

    if len(grid) == 0:
        raise_with_logging_error("Spectrum scan needs a non-empty grid.",
                                 logger=logger,
                                 exception_type=ValueError)

    spec = _field_for(spec, grid)
    index = min(int(np.floor(k_fraction * size)), size - 1)
    rows = []
    for mu in grid:
        mu = complex(mu)
        point = mu if spec.field is ScalarField.COMPLEX else mu.real
        ascending = np.sort(svd(truncate(subtract_scalar(spec, point), size)).singular_values)
        rows.append((mu.real, mu.imag, float(ascending[index])))
    logger.debug("Scanned %d grid points at N = %d.", len(rows), size)
    return pd.DataFrame(rows, columns=["mu_re", "mu_im", "defect"])
