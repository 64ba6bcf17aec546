"""
JSON and CSV artifacts

Every JSON document is checked against its v1 schema before it leaves the
process. Rationals are written as [numerator, denominator] string pairs keyed
by the power of u; big-floats as fixed-digit decimal strings, so one
configuration always yields the same bytes.
"""
import csv
import io
import json
import os
from fractions import Fraction
from typing import Any, Dict, List

import jsonschema
import structlog
from mpmath import mp

from errors import ArtifactError
from models.dynamics import SplittingReport
from models.polynomial import Polynomial
from models.results import ConstantEstimates, ExtrapolatedValue, FormalSolution

logger = structlog.get_logger(__name__)

SERIES_SCHEMA_ID = "splitting-lab/series.v1"
REPORT_SCHEMA_ID = "splitting-lab/report.v1"
CONSTANTS_SCHEMA_ID = "splitting-lab/constants.v1"
CSV_COLUMNS = ("t", "delta", "delta_over_cosh", "fit_residual")
DEFAULT_DIGITS = 30

_RATIONAL = {
    "type": "array",
    "items": {"type": "string", "pattern": "^-?[0-9]+$"},
    "minItems": 2,
    "maxItems": 2,
}
_POLYNOMIAL = {
    "type": "object",
    "patternProperties": {"^[0-9]+$": _RATIONAL},
    "additionalProperties": False,
}
_DECIMAL = {"type": ["string", "null"]}

SERIES_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "order", "variable", "coefficients"],
    "properties": {
        "schema": {"const": SERIES_SCHEMA_ID},
        "order": {"type": "integer", "minimum": 4},
        "variable": {"const": "u"},
        "coefficients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "power", "polynomial"],
                "properties": {
                    "index": {"type": "integer", "minimum": 1},
                    "power": {"type": "integer", "minimum": 2},
                    "polynomial": _POLYNOMIAL,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "epsilon", "d", "precision_bits", "digits", "samples", "fit", "implied_alpha", "warnings"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA_ID},
        "epsilon": {"type": "string"},
        "d": {"type": "string"},
        "precision_bits": {"type": "integer", "minimum": 128},
        "digits": {"type": "integer", "minimum": 1},
        "samples": {
            "type": "object",
            "required": ["t", "delta"],
            "properties": {
                "t": {"type": "array", "items": {"type": "string"}},
                "delta": {"type": "array", "items": {"type": "string"}},
            },
            "additionalProperties": False,
        },
        "fit": {
            "type": "object",
            "required": ["amplitude", "phase", "residual_rms"],
            "properties": {"amplitude": _DECIMAL, "phase": _DECIMAL, "residual_rms": _DECIMAL},
            "additionalProperties": False,
        },
        "implied_alpha": {
            "type": "object",
            "required": ["eps", "d"],
            "properties": {"eps": _DECIMAL, "d": _DECIMAL},
            "additionalProperties": False,
        },
        "zero_spacing": _DECIMAL,
        "crossing_q": _DECIMAL,
        "predicted_amplitude": _DECIMAL,
        "law_ratio": _DECIMAL,
        "scale_ratio": _DECIMAL,
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

_ESTIMATE = {
    "type": "object",
    "required": ["value", "error"],
    "properties": {"value": _DECIMAL, "error": _DECIMAL},
    "additionalProperties": False,
}
_SEQUENCE = {"type": "object", "patternProperties": {"^[0-9]+$": {"type": "string"}}, "additionalProperties": False}

CONSTANTS_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "order", "precision_bits", "digits", "alpha", "beta", "gamma", "alpha_direct", "alpha_seq"],
    "properties": {
        "schema": {"const": CONSTANTS_SCHEMA_ID},
        "order": {"type": "integer"},
        "precision_bits": {"type": "integer"},
        "digits": {"type": "integer"},
        "alpha": _ESTIMATE,
        "beta": _ESTIMATE,
        "gamma": _ESTIMATE,
        "alpha_direct": _ESTIMATE,
        "alpha_seq": _SEQUENCE,
    },
    "additionalProperties": False,
}

SCHEMAS = {
    SERIES_SCHEMA_ID: SERIES_SCHEMA,
    REPORT_SCHEMA_ID: REPORT_SCHEMA,
    CONSTANTS_SCHEMA_ID: CONSTANTS_SCHEMA,
}


def decimal(x, digits: int = DEFAULT_DIGITS):
    """Fixed-digit decimal string of a big-float, None passes through"""
    if x is None:
        return None
    return mp.nstr(mp.mpf(x), digits)


def rational_pair(c: Fraction) -> List[str]:
    return [str(c.numerator), str(c.denominator)]


def polynomial_to_json(p: Polynomial) -> Dict[str, List[str]]:
    return {str(k): rational_pair(c) for k, c in enumerate(p.coeffs) if c != 0}


def polynomial_from_json(doc: Dict[str, List[str]]) -> Polynomial:
    if not doc:
        return Polynomial()
    width = max(int(k) for k in doc) + 1
    coeffs = [Fraction(0)] * width
    for k, (num, den) in doc.items():
        coeffs[int(k)] = Fraction(int(num), int(den))
    return Polynomial(tuple(coeffs))


def validate_document(doc: Dict[str, Any]) -> None:
    """
    Raises:
        ArtifactError: unknown schema id or a document that does not conform
    """
    schema = SCHEMAS.get(doc.get("schema"))
    if schema is None:
        raise ArtifactError(f"unknown artifact schema '{doc.get('schema')}'")
    try:
        jsonschema.validate(instance=doc, schema=schema)
    except jsonschema.ValidationError as e:
        raise ArtifactError(f"{doc['schema']} document invalid: {e.message}") from e
    if doc["schema"] == SERIES_SCHEMA_ID:
        _check_series_coefficients(doc)


def _check_series_coefficients(doc: Dict[str, Any]) -> None:
    """A_k is odd in u, of degree at most k, and multiplies d^(k+1)"""
    for entry in doc["coefficients"]:
        k = entry["index"]
        p = polynomial_from_json(entry["polynomial"])
        if k % 2 == 0 or entry["power"] != k + 1:
            raise ArtifactError(f"coefficient A_{k} cannot sit at d^{entry['power']}")
        if not p.is_odd() or p.degree > k:
            raise ArtifactError(f"A_{k} = {p} is not odd of degree <= {k}")


def series_document(sol: FormalSolution) -> Dict[str, Any]:
    return {
        "schema": SERIES_SCHEMA_ID,
        "order": sol.order,
        "variable": "u",
        "coefficients": [
            {"index": 2 * k + 1, "power": 2 * k + 2, "polynomial": polynomial_to_json(p)}
            for k, p in enumerate(sol.odd_polys)
        ],
    }


def report_document(report: SplittingReport, digits: int = DEFAULT_DIGITS) -> Dict[str, Any]:
    """report.v1 document; timings are left out so the bytes depend on the inputs only"""
    with mp.workprec(report.bits):
        return {
            "schema": REPORT_SCHEMA_ID,
            "epsilon": decimal(report.epsilon, digits),
            "d": decimal(report.d, digits),
            "precision_bits": report.bits,
            "digits": digits,
            "samples": {
                "t": [decimal(t, digits) for t, _ in report.samples],
                "delta": [decimal(delta, digits) for _, delta in report.samples],
            },
            "fit": {
                "amplitude": decimal(report.fitted_amplitude, digits),
                "phase": decimal(report.fitted_phase, digits),
                "residual_rms": decimal(report.fit_residual, digits),
            },
            "implied_alpha": {
                "eps": decimal(report.implied_alpha_eps, digits),
                "d": decimal(report.implied_alpha_d, digits),
            },
            "zero_spacing": decimal(report.zero_spacing, digits),
            "crossing_q": decimal(report.crossing_q, digits),
            "predicted_amplitude": decimal(report.predicted_amplitude, digits),
            "law_ratio": decimal(report.law_ratio, digits),
            "scale_ratio": decimal(report.scale_ratio, digits),
            "warnings": list(report.warnings),
        }


def _estimate(value: ExtrapolatedValue, digits: int) -> Dict[str, Any]:
    if value is None:
        return {"value": None, "error": None}
    return {"value": decimal(value.value, digits), "error": decimal(value.error, digits)}


def constants_document(order: int, estimates: ConstantEstimates, digits: int = DEFAULT_DIGITS) -> Dict[str, Any]:
    with mp.workprec(estimates.precision):
        return {
            "schema": CONSTANTS_SCHEMA_ID,
            "order": order,
            "precision_bits": estimates.precision,
            "digits": digits,
            "alpha": _estimate(estimates.alpha, digits),
            "beta": _estimate(estimates.beta, digits),
            "gamma": _estimate(estimates.gamma, digits),
            "alpha_direct": _estimate(estimates.alpha_direct, digits),
            "alpha_seq": {str(n): decimal(a, digits) for n, a in estimates.alpha_seq.items()},
        }


def dumps(doc: Dict[str, Any], compact: bool = False) -> str:
    """Validated, key-sorted JSON text ending in a newline"""
    validate_document(doc)
    if compact:
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def report_csv(report: SplittingReport, digits: int = DEFAULT_DIGITS) -> str:
    """Columns t, delta, delta_over_cosh, fit_residual; the header is always written"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    with mp.workprec(report.bits):
        residuals = report.fit_residuals or [None] * len(report.samples)
        for (t, delta), residual in zip(report.samples, residuals):
            writer.writerow([
                decimal(t, digits),
                decimal(delta, digits),
                decimal(delta / mp.cosh(t), digits),
                decimal(residual, digits) if residual is not None else "",
            ])
    return buffer.getvalue()


def artifact_name(epsilon: str, extension: str) -> str:
    return f"splitting_eps-{epsilon}.{extension}"


def write_artifact(path: str, text: str) -> str:
    """Write text to path, creating parent directories"""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.debug("artifact_written", path=path, size=len(text))
    return path
