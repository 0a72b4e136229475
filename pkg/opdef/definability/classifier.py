import logging
from typing import Any, Dict, Optional

import numpy as np

from opdef.dataclasses.operator_spec import OperatorSpec, ProjectionNode
from opdef.dataclasses.parameters.run_parameters import ClassifyOptions
from opdef.dataclasses.results import Definable, DefinabilityVerdict, Inconclusive, NotDefinable
from opdef.dataclasses.scalars import ScalarField, scalar_to_pair
from opdef.definability.compactness import certify_compact
from opdef.definability.fredholm import fredholm_index, kernel_witness
from opdef.definability.lambda_extraction import lambda_extract
from opdef.definability.spectral import find_weyl_witness, weyl_candidates
from opdef.operators.application import adjoint_spec, complexify, subtract_scalar
from opdef.operators.parameters import extract_parameters
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import (IndexInstabilityError, LadderExhaustedError, NoSpectralGapError,
                                    NotDefinableInputError, ProbeDisagreementError, SpectralConvergenceError)

logger = logging.getLogger(__name__)


def _log_verdict(verdict: DefinabilityVerdict) -> DefinabilityVerdict:
    if isinstance(verdict, Definable):
        logger.info("Verdict: definable, lambda = %s (%s certificate at N = %d).",
                    verdict.lambda_value, verdict.certificate.route, verdict.certificate.final_size)
    elif isinstance(verdict, NotDefinable):
        logger.info("Verdict: not definable (%s witness).", verdict.witness.kind)
    else:
        logger.info("Verdict: inconclusive (%s).", verdict.reason)
    return verdict


def _refute(spec: OperatorSpec, options: ClassifyOptions,
            diagnostics: Dict[str, Any]) -> Optional[NotDefinable]:
    # the essential spectrum lives in the complex field
    complex_spec = spec if spec.field is ScalarField.COMPLEX else complexify(spec)
    candidates = weyl_candidates(complex_spec, options.weyl_tol, options.witness_size)
    diagnostics["candidates"] = [scalar_to_pair(c) for c in candidates]

    witness = find_weyl_witness(complex_spec, candidates, options.weyl_tol, options.witness_size, options.rank_budget)
    if witness is not None:
        return NotDefinable(witness=witness)

    adjoint = adjoint_spec(complex_spec)
    witness = find_weyl_witness(adjoint, [np.conj(c).item() for c in candidates], options.weyl_tol,
                                options.witness_size, options.rank_budget, on_adjoint=True)
    if witness is not None:
        return NotDefinable(witness=witness)

    try:
        index = fredholm_index(complex_spec, options.rank_threshold, options.index_size)
        diagnostics["index"] = index.index
        if index.index != 0:
            return NotDefinable(witness=index)
    except (NoSpectralGapError, IndexInstabilityError) as exp:
        diagnostics["index"] = str(exp)

    witness = kernel_witness(complex_spec, options.rank_threshold, options.index_size, options.rank_budget)
    if witness is not None:
        return NotDefinable(witness=witness)
    return None


def classify(spec: OperatorSpec, options: Optional[ClassifyOptions] = None) -> DefinabilityVerdict:
    """
    Decide whether an operator is a scalar plus a compact operator.

    The pipeline:

    1. extract the parameter set of the tree and read off ``lambda`` from
       probes orthogonal to it;
    2. certify that ``T - lambda I`` is compact: :class:`Definable`;
    3. otherwise search a refutation on the complexified operator: Weyl
       families at two separated points of ``T`` or of its adjoint, a nonzero
       Fredholm index, or an infinite kernel next to a singular-value plateau:
       :class:`NotDefinable`;
    4. otherwise :class:`Inconclusive`, carrying the probe table, the ladders
       and the refutation attempts.

    Numerical failures never escape; they end in :class:`Inconclusive`.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param options:
        Tolerances and sizes; defaults to :class:`ClassifyOptions`.
    :type options: ClassifyOptions, optional
    :rtype: Definable or NotDefinable or Inconclusive
    """

    options = options or ClassifyOptions()
    diagnostics: Dict[str, Any] = {}

    parameters = extract_parameters(spec, options.parameter_cutoff, options.decay_tolerance)
    lambda_value = None
    try:
        lambda_value = lambda_extract(spec, parameters, options.probe_count, options.probe_gap, options.probe_tol)
        diagnostics["lambda"] = scalar_to_pair(lambda_value)
    except ProbeDisagreementError as exp:
        diagnostics["probes"] = exp.payload

    if lambda_value is not None:
        try:
            certificate = certify_compact(subtract_scalar(spec, lambda_value),
                                          options.cert_tol, options.n_max, lambda_value)
            return _log_verdict(Definable(lambda_value=lambda_value, certificate=certificate))
        except LadderExhaustedError as exp:
            diagnostics["ladders"] = exp.payload

    try:
        verdict = _refute(spec, options, diagnostics)
    except SpectralConvergenceError as exp:
        diagnostics["refutation"] = str(exp)
        verdict = None
    if verdict is not None:
        return _log_verdict(verdict)

    if lambda_value is None:
        reason = "lambda probes disagree and no refutation was found"
    else:
        reason = "compactness ladder did not fall below the tolerance and no refutation was found"
    return _log_verdict(Inconclusive(reason=reason, diagnostics=diagnostics))


def classify_projection(spec: OperatorSpec, options: Optional[ClassifyOptions] = None) -> DefinabilityVerdict:
    """
    Classify an orthogonal coordinate projection.

    A projection is a scalar plus a compact operator exactly when its target
    is finite (``lambda = 0``) or cofinite (``lambda = 1``); otherwise both 0
    and 1 carry Weyl families.

    :param spec:
        Spec whose root is a projection.
    :type spec: OperatorSpec
    :param options:
        Tolerances and sizes.
    :type options: ClassifyOptions, optional
    :rtype: Definable or NotDefinable or Inconclusive
    :raises NotDefinableInputError:
        If the root is not a projection.
    """

    if not isinstance(spec.root, ProjectionNode):
        raise_with_logging_error(f"classify_projection expects a projection, got '{spec.kind}'.",
                                 logger=logger,
                                 exception_type=NotDefinableInputError)

    options = options or ClassifyOptions()
    target = spec.root.target
    try:
        if target.is_finite:
            certificate = certify_compact(spec, options.cert_tol, options.n_max, 0.0)
            return _log_verdict(Definable(lambda_value=0.0, certificate=certificate))
        if target.is_cofinite:
            certificate = certify_compact(subtract_scalar(spec, 1.0), options.cert_tol, options.n_max, 1.0)
            return _log_verdict(Definable(lambda_value=1.0, certificate=certificate))
    except LadderExhaustedError as exp:
        return _log_verdict(Inconclusive(reason="projection ladder did not fall below the tolerance",
                                         diagnostics={"ladders": exp.payload}))

    witness = find_weyl_witness(spec, [0.0, 1.0], options.weyl_tol, options.witness_size, options.rank_budget)
    if witness is not None:
        return _log_verdict(NotDefinable(witness=witness))
    return _log_verdict(Inconclusive(reason="no Weyl families at 0 and 1",
                                     diagnostics={"target": target.model_dump(mode="json")}))
