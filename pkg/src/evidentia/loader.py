"""Scenario file ingestion (JSON, strict schema).

Validation collects every problem it can find instead of stopping at the
first one. Structural problems come from the JSON schema; model invariants
(weights summing to one, profiling items kept off the specific level, context
labels resolving) are checked afterwards on whatever parsed cleanly.
"""

from __future__ import annotations

import json
import math
import types
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import jsonschema

from . import nesting
from .errors import EvidentiaError
from .nesting import UNKNOWN, ContextCell, HypothesisLevel, PartitionModel, partition_violations
from .oracle import SimulationConfig
from .probability import IntervalLR, Odds, PointLR, Undefined, likelihood_ratio, odds_from_probability
from .scenario import KINDS, EvidenceItem, Scenario, scenario_violations

SUPPORTED_VERSIONS = ("1.0",)

_number = {"type": "number"}
_prob = {"type": "number", "minimum": 0, "maximum": 1}
_nonneg_or_inf = {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]}
_pair = {"type": "array", "items": _prob, "minItems": 2, "maxItems": 2}

_odds = {
    "type": "object",
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        "odds": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"},
                           {"type": "string", "pattern": r"^\s*[0-9.eE+]+\s*:\s*[0-9.eE+]+\s*$"}]},
        "probability": _prob,
    },
}

_lr = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "point": _nonneg_or_inf,
        "interval": {"type": "array", "items": _nonneg_or_inf, "minItems": 2, "maxItems": 2},
        "ratio": _pair,
        "undefined": {"type": "string", "minLength": 1},
        "partition": {"type": "string", "pattern": "^(generic|specific(:.+)?)$"},
        "rounded_from": _pair,
    },
    "oneOf": [{"required": [k]} for k in ("point", "interval", "ratio", "undefined", "partition")],
    "dependentRequired": {"rounded_from": ["point"]},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "scenario"],
    "properties": {
        "schema_version": {"type": "string"},
        "description": {"type": "string"},
        "scenario": {
            "type": "object",
            "additionalProperties": False,
            "required": ["crime_type", "prior_generic", "prior_specific", "evidence", "independence_assumed"],
            "properties": {
                "crime_type": {"type": "string", "minLength": 1},
                "prior_generic": _odds,
                "prior_specific": _odds,
                "independence_assumed": {"type": "boolean"},
                "allow_profiling_on_specific": {"type": "boolean"},
                "crime_context": {"type": "string", "minLength": 1},
                "partition": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["profile_base_rate", "cells"],
                    "properties": {
                        "profile_base_rate": _prob,
                        "cells": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "additionalProperties": False,
                                "required": ["label", "weight", "prevalence"],
                                "properties": {
                                    "label": {"type": "string", "minLength": 1},
                                    "weight": _prob,
                                    "prevalence": _prob,
                                },
                            },
                        },
                    },
                },
                "evidence": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["label", "kind", "target", "lr"],
                        "properties": {
                            "label": {"type": "string", "minLength": 1},
                            "kind": {"enum": list(KINDS)},
                            "target": {"type": "string", "pattern": "^(generic|specific(:.+)?)$"},
                            "lr": _lr,
                            "note": {"type": "string"},
                        },
                    },
                },
                "denominator_check": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["profile_rate", "profile_given_guilt", "guilt_rate"],
                    "properties": {"profile_rate": _prob, "profile_given_guilt": _prob, "guilt_rate": _prob},
                },
                "annotations": {"type": "object", "additionalProperties": {"type": "string"}},
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["population_size", "crime_rate", "replications"],
            "properties": {
                "population_size": {"type": "integer", "minimum": 1},
                "crime_rate": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "replications": {"type": "integer", "minimum": 1},
                "designated_context": {"type": "string", "minLength": 1},
                "non_offender_rate": _prob,
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: [{self.code}] {self.message}"


class ValidationFailed(EvidentiaError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("validation", "\n".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class ScenarioFile:
    schema_version: str
    scenario: Scenario
    simulation: Optional[dict] = None
    annotations: dict = field(default_factory=dict)
    # item label -> (numerator, denominator) the declared point LR was rounded from
    rounded_from: dict = field(default_factory=dict)
    denominator_check: Optional[dict] = None
    source: Optional[str] = None

    def simulation_config(self, seed=None, population_size=None, replications=None) -> SimulationConfig:
        """Build the oracle config, letting explicit arguments override the file."""
        if self.simulation is None:
            raise ValidationFailed([Diagnostic("simulation-required", "simulation",
                                               "the file has no simulation block")])
        if self.scenario.partition is None:
            raise ValidationFailed([Diagnostic("partition-required", "scenario.partition",
                                               "simulation needs a partition model")])
        sim = self.simulation
        seed = seed if seed is not None else sim.get("seed")
        if seed is None:
            raise ValidationFailed([Diagnostic("seed-required", "simulation.seed",
                                               "no seed in file, flag, or EVIDENTIA_SEED")])
        return SimulationConfig(
            population_size=int(population_size or sim["population_size"]),
            crime_rate=sim["crime_rate"],
            partition=self.scenario.partition,
            seed=int(seed),
            replications=int(replications or sim["replications"]),
            designated_context=sim.get("designated_context", self.scenario.crime_context),
            non_offender_rate=sim.get("non_offender_rate"),
        )


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _num(x) -> float:
    return math.inf if x == "inf" else float(x)


def _odds(spec: dict) -> Odds:
    if "probability" in spec:
        return odds_from_probability(spec["probability"])
    o = spec["odds"]
    if isinstance(o, str) and ":" in o:
        a, b = (float(t) for t in o.split(":"))
        return Odds.from_ratio(a, b)
    return Odds(_num(o))


def _lr(spec: dict, partition):
    if "point" in spec:
        return PointLR(_num(spec["point"]))
    if "interval" in spec:
        lo, hi = spec["interval"]
        return IntervalLR(_num(lo), _num(hi))
    if "ratio" in spec:
        return likelihood_ratio(*spec["ratio"])
    if "undefined" in spec:
        return Undefined(spec["undefined"])
    level = HypothesisLevel.parse(spec["partition"])
    if partition is None:
        raise EvidentiaError("partition-required", "partition-derived LR without a usable partition")
    if level.is_generic:
        return nesting.generic_lr(partition)
    return nesting.specific_lr(partition, level)


def parse(doc: dict, source: Optional[str] = None) -> ScenarioFile:
    """Validate a decoded scenario document; raise :class:`ValidationFailed` listing every problem."""
    diags = [Diagnostic("schema", _path(e.absolute_path), e.message)
             for e in sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))]
    if diags:
        raise ValidationFailed(diags)
    if doc["schema_version"] not in SUPPORTED_VERSIONS:
        diags.append(Diagnostic("schema-version", "schema_version",
                                f"unsupported version {doc['schema_version']!r}; supported: {SUPPORTED_VERSIONS}"))
    sc = doc["scenario"]

    def attempt(where, fn, *args):
        try:
            return fn(*args)
        except EvidentiaError as exc:
            diags.append(Diagnostic(exc.code, where, exc.message))
            return None

    partition = label_view = None
    if "partition" in sc:
        cells = [attempt(f"scenario.partition.cells[{i}]", ContextCell, c["label"], c["weight"], c["prevalence"])
                 for i, c in enumerate(sc["partition"]["cells"])]
        cells = [c for c in cells if c is not None]
        problems = partition_violations(cells)
        diags.extend(Diagnostic(code, "scenario.partition.cells", msg) for code, msg in problems)
        if not problems:
            partition = attempt("scenario.partition", PartitionModel, sc["crime_type"], tuple(cells),
                                sc["partition"]["profile_base_rate"])
        label_view = types.SimpleNamespace(labels=[c["label"] for c in sc["partition"]["cells"]])

    prior_g = attempt("scenario.prior_generic", _odds, sc["prior_generic"])
    prior_s = attempt("scenario.prior_specific", _odds, sc["prior_specific"])

    evidence, rounded = [], {}
    for i, e in enumerate(sc["evidence"]):
        where = f"scenario.evidence[{i}]"
        target = attempt(where + ".target", HypothesisLevel.parse, e["target"])
        if "partition" in e["lr"] and "partition" in sc and partition is None:
            continue  # the partition's own diagnostics already explain this
        lr = attempt(where + ".lr", _lr, e["lr"], partition)
        if target is None or lr is None:
            continue
        item = attempt(where, EvidenceItem, e["label"], target, lr, e["kind"])
        if item is not None:
            evidence.append(item)
            if "rounded_from" in e["lr"]:
                rounded[e["label"]] = tuple(e["lr"]["rounded_from"])

    allow = sc.get("allow_profiling_on_specific", False)
    crime_context = sc.get("crime_context", UNKNOWN)
    for code, where, msg in scenario_violations(evidence, label_view, allow, sc["independence_assumed"],
                                                crime_context):
        if where.startswith("evidence"):
            where = "scenario." + where
        elif where in ("crime_context", "independence_assumed"):
            where = "scenario." + where
        diags.append(Diagnostic(code, where, msg))

    sim = doc.get("simulation")
    if sim is not None:
        ctx = sim.get("designated_context", crime_context)
        if ctx != UNKNOWN and label_view is not None and ctx not in label_view.labels:
            diags.append(Diagnostic("no-such-context", "simulation.designated_context",
                                    f"no context {ctx!r} in the partition"))
        if "partition" not in sc:
            diags.append(Diagnostic("partition-required", "simulation",
                                    "a simulation block needs scenario.partition"))

    if diags:
        raise ValidationFailed(diags)
    scenario = Scenario(
        crime_type=sc["crime_type"], prior_generic=prior_g, prior_specific=prior_s,
        evidence=tuple(evidence), partition=partition, allow_profiling_on_specific=allow,
        independence_assumed=sc["independence_assumed"], crime_context=crime_context,
    )
    return ScenarioFile(doc["schema_version"], scenario, sim, dict(sc.get("annotations", {})),
                        rounded, sc.get("denominator_check"), source)


def loads(text: str, source: Optional[str] = None) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailed([Diagnostic("json", f"line {exc.lineno} column {exc.colno}", exc.msg)]) from exc
    return parse(doc, source)


def load(path: Union[str, Path]) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationFailed([Diagnostic("unreadable", str(path), str(exc))]) from exc
    return loads(text, str(path))
