"""Rendering of analysis and simulation results.

Two formats:

``machine``
    JSON with a fixed key order. Floats are written with ``repr`` precision so
    parsing the report gives back the exact doubles; infinities are written as
    the string ``"inf"``.
``table``
    Human-readable text: 4 significant figures plus a rounded annotation.
    Annotations quoted in the scenario file (``scenario.annotations``) take
    precedence over the default whole-number/percent rounding, so published
    rounded figures can be shown next to the exact values.

Nothing computed here feeds back into any calculation.
"""

from __future__ import annotations

import json
import math
from typing import Any, Optional

from . import nesting, probability as prob
from .nesting import HypothesisLevel
from .oracle import Comparison, SampleStats, SimulationConfig
from .probability import IntervalLR, OddsInterval, PointLR, Undefined
from .scenario import EvaluationReport, stereotype_gap, truth_tracking_status


def _f(x: float):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def lr_json(lr) -> Optional[dict]:
    if lr is None:
        return None
    if isinstance(lr, PointLR):
        return {"kind": "point", "value": _f(lr.value)}
    if isinstance(lr, IntervalLR):
        return {"kind": "interval", "lo": _f(lr.lo), "hi": _f(lr.hi)}
    return {"kind": "undefined", "reason": lr.reason}


def posterior_json(post) -> dict:
    if isinstance(post, Undefined):
        return {"kind": "undefined", "reason": post.reason}
    p = prob.to_probability(post)
    if isinstance(post, OddsInterval):
        return {"kind": "interval", "odds": [_f(post.lo), _f(post.hi)], "probability": [_f(p[0]), _f(p[1])]}
    return {"kind": "point", "odds": _f(post), "probability": _f(p)}


def _prob_view(v):
    if isinstance(v, Undefined):
        return {"kind": "undefined", "reason": v.reason}
    if isinstance(v, tuple):
        return {"kind": "interval", "probability": [_f(v[0]), _f(v[1])]}
    return {"kind": "point", "probability": _f(v)}


def partition_json(m: nesting.PartitionModel, crime_context: str) -> dict:
    contexts = []
    for c in m.cells:
        rep = nesting.representativeness_check(m, c.label)
        contexts.append({
            "label": c.label,
            "weight": _f(c.weight),
            "prevalence": _f(c.prevalence),
            "specific_lr": lr_json(nesting.specific_lr(m, HypothesisLevel.specific(c.label))),
            "invariance_gap": _f(rep.measure),
            "representative": rep.holds,
        })
    uni = nesting.uniformity_check(m)
    out = {
        "profile_base_rate": _f(m.profile_base_rate),
        "generic_prevalence": _f(nesting.generic_prevalence(m)),
        "generic_lr": lr_json(nesting.generic_lr(m)),
        "unknown_context_lr": lr_json(nesting.specific_lr(m, HypothesisLevel.specific())),
        "tolerance": _f(nesting.DEFAULT_TOLERANCE),
        "uniformity": {"holds": uni.holds, "spread": _f(uni.measure)},
        "contexts": contexts,
        "crime_context": crime_context,
    }
    return out


def analysis_dict(sf, rep: EvaluationReport) -> dict:
    """Everything ``analyze`` reports, as plain JSON-ready data."""
    s = sf.scenario
    contributions = []
    for c in rep.contributions:
        contributions.append({
            "label": c.label,
            "kind": c.kind,
            "target": str(c.target),
            "generic_lr": lr_json(c.generic_lr),
            "specific_lr": lr_json(c.specific_lr),
            "tracks_generic": truth_tracking_status(c.generic_lr).value if c.generic_lr else None,
            "tracks_specific": truth_tracking_status(c.specific_lr).value if c.specific_lr else None,
        })
    ratios = []
    for label, (num, den) in sorted(sf.rounded_from.items()):
        ratios.append({"label": label, "numerator": _f(num), "denominator": _f(den),
                       "lr": lr_json(prob.likelihood_ratio(num, den))})
    out: dict[str, Any] = {
        "report": "analyze",
        "schema_version": sf.schema_version,
        "crime_type": s.crime_type,
        "prior_generic": posterior_json(s.prior_generic),
        "prior_specific": posterior_json(s.prior_specific),
        "posterior_generic": posterior_json(rep.posterior_generic),
        "posterior_specific": posterior_json(rep.posterior_specific),
        "combined_generic_lr": lr_json(rep.combined_generic_lr),
        "combined_specific_lr": lr_json(rep.combined_specific_lr),
        "contributions": contributions,
        "ratios": ratios,
    }
    if s.partition is not None:
        out["partition"] = partition_json(s.partition, s.crime_context)
    if s.has_profiling:
        g, sp = stereotype_gap(s)
        out["stereotype_gap"] = {"generic": _prob_view(g), "specific": _prob_view(sp)}
    if sf.denominator_check is not None:
        d = sf.denominator_check
        args = (d["profile_rate"], d["profile_given_guilt"], d["guilt_rate"])
        out["denominator_check"] = {
            "exact": _f(prob.innocent_profile_rate(*args, mode="exact")),
            "approximate": _f(prob.innocent_profile_rate(*args, mode="approximate")),
            "bound": _f(prob.approximation_bound(*args)),
        }
    out["warnings"] = [{"code": w.code, "item": w.item, "detail": w.detail} for w in rep.warnings]
    out["annotations"] = dict(sorted(sf.annotations.items()))
    return out


def comparison_dict(cfg: SimulationConfig, stats: SampleStats, rows: list[Comparison]) -> dict:
    perp_x, perp_n = stats.perpetrator_profile_count()
    return {
        "report": "simulate",
        "config": {
            "population_size": cfg.population_size,
            "crime_rate": _f(cfg.crime_rate),
            "seed": cfg.seed,
            "replications": cfg.replications,
            "designated_context": cfg.designated_context,
            "non_offender_rate": _f(cfg.resolved_non_offender_rate()),
            "rng": "numpy PCG64 via SeedSequence.spawn",
        },
        "counts": [{"offender": o, "context": c, "profile": p, "count": n}
                   for (o, c, p), n in stats.counts.items()],
        "perpetrators": {"with_profile": perp_x, "designated": perp_n},
        "comparisons": [{"name": r.name, "analytic": _f(r.analytic), "empirical": _f(r.empirical),
                         "se": _f(r.se), "z": _f(r.z), "passed": r.passed} for r in rows],
        "all_passed": all(r.passed for r in rows),
    }


def to_machine(d: dict) -> str:
    return json.dumps(d, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def from_machine(text: str) -> dict:
    """Inverse of :func:`to_machine`; ``"inf"`` strings come back as floats."""
    def fix(x):
        if isinstance(x, dict):
            return {k: fix(v) for k, v in x.items()}
        if isinstance(x, list):
            return [fix(v) for v in x]
        if x == "inf":
            return math.inf
        return x
    return fix(json.loads(text))


# ---------------------------------------------------------------- table format

def sig4(x: float) -> str:
    if isinstance(x, str) or math.isinf(x):
        return "inf"
    return f"{x:.4g}"


def default_annotation(x: float, percent: bool = False) -> str:
    if math.isinf(x):
        return "certain" if percent else "≈ inf"
    if percent:
        return f"≈ {round(100 * x)}%"
    return f"≈ {round(x)}"


def _annot(ann: dict, key: str, x: float, percent=False) -> str:
    return ann.get(key) or default_annotation(x, percent)


def _odds_text(o) -> str:
    return f"{sig4(o)}:1"


def _lr_text(lr: Optional[dict]) -> str:
    if lr is None:
        return "-"
    if lr["kind"] == "point":
        return sig4(lr["value"])
    if lr["kind"] == "interval":
        return f"[{sig4(lr['lo'])}, {sig4(lr['hi'])}]"
    return f"undefined ({lr['reason']})"


def _post_text(p: dict, ann: dict, key: str) -> str:
    if p["kind"] == "undefined":
        return f"undefined ({p['reason']})"
    if p["kind"] == "interval":
        (olo, ohi), (plo, phi) = p["odds"], p["probability"]
        return f"odds [{_odds_text(olo)}, {_odds_text(ohi)}]  P in [{sig4(plo)}, {sig4(phi)}]"
    pr = p["probability"]
    pr_f = math.inf if pr == "inf" else pr
    return f"odds {_odds_text(p['odds'])}  P = {sig4(pr)}  ({_annot(ann, key, pr_f, percent=True)})"


def render_analysis(d: dict) -> str:
    ann = d["annotations"]
    lines = [f"crime type: {d['crime_type']}", ""]
    lines.append(f"prior      generic {_odds_text(d['prior_generic']['odds'])}"
                 f"   specific {_odds_text(d['prior_specific']['odds'])}")
    lines.append("")
    if d["contributions"]:
        lines.append(f"{'evidence':<20}{'kind':<15}{'target':<20}{'generic LR':>14}{'specific LR':>22}")
        for c in d["contributions"]:
            lines.append(f"{c['label']:<20}{c['kind']:<15}{c['target']:<20}"
                         f"{_lr_text(c['generic_lr']):>14}{_lr_text(c['specific_lr']):>22}")
        lines.append("")
    for r in d["ratios"]:
        v = r["lr"]
        exact = _lr_text(v)
        note = _annot(ann, f"lr:{r['label']}", v["value"]) if v["kind"] == "point" else ""
        lines.append(f"ratio {r['label']}: {sig4(r['numerator'])} / {sig4(r['denominator'])} = {exact}  ({note})")
    if d["ratios"]:
        lines.append("")
    if "partition" in d:
        p = d["partition"]
        glr = p["generic_lr"]
        g_note = f"  ({_annot(ann, 'generic_lr', glr['value'])})" if glr["kind"] == "point" else ""
        lines.append(f"partition  base rate {sig4(p['profile_base_rate'])}"
                     f"   generic prevalence {sig4(p['generic_prevalence'])}"
                     f"   generic LR {_lr_text(glr)}{g_note}")
        lines.append(f"{'context':<12}{'weight':>8}{'prevalence':>12}{'specific LR':>14}{'gap':>10}  representative")
        for c in p["contexts"]:
            lines.append(f"{c['label']:<12}{sig4(c['weight']):>8}{sig4(c['prevalence']):>12}"
                         f"{_lr_text(c['specific_lr']):>14}{sig4(c['invariance_gap']):>10}  "
                         f"{'yes' if c['representative'] else 'no'}")
        lines.append(f"unknown-context specific LR: {_lr_text(p['unknown_context_lr'])} (not averaged)")
        u = p["uniformity"]
        lines.append(f"uniformity (tol {sig4(p['tolerance'])}): "
                     f"{'holds' if u['holds'] else 'fails'}, spread {sig4(u['spread'])}")
        lines.append("")
    lines.append(f"posterior generic   {_post_text(d['posterior_generic'], ann, 'posterior_generic')}")
    lines.append(f"posterior specific  {_post_text(d['posterior_specific'], ann, 'posterior_specific')}")
    if "stereotype_gap" in d:
        g, s = d["stereotype_gap"]["generic"], d["stereotype_gap"]["specific"]
        lines.append(f"stereotype gap      P(generic) {_pv(g)}  vs  P(specific) {_pv(s)}")
    if "denominator_check" in d:
        dc = d["denominator_check"]
        lines.append(f"P(profile | innocent): exact {sig4(dc['exact'])}, approximate {sig4(dc['approximate'])}"
                     f", bound {sig4(dc['bound'])}")
    if d["warnings"]:
        lines.append("")
        lines.append("warnings:")
        for w in d["warnings"]:
            who = f" ({w['item']})" if w["item"] else ""
            detail = f": {w['detail']}" if w["detail"] else ""
            lines.append(f"  {w['code']}{who}{detail}")
    return "\n".join(lines) + "\n"


def _pv(v: dict) -> str:
    if v["kind"] == "point":
        return sig4(v["probability"])
    if v["kind"] == "interval":
        lo, hi = v["probability"]
        return f"[{sig4(lo)}, {sig4(hi)}]"
    return f"undefined ({v['reason']})"


def render_comparison(d: dict) -> str:
    cfg = d["config"]
    lines = [f"seed {cfg['seed']}  N {cfg['population_size']}  replications {cfg['replications']}"
             f"  crime rate {sig4(cfg['crime_rate'])}  designated context {cfg['designated_context']}", ""]
    lines.append(f"{'quantity':<34}{'analytic':>12}{'empirical':>12}{'SE':>12}{'z':>8}  check")
    for r in d["comparisons"]:
        lines.append(f"{r['name']:<34}{sig4(r['analytic']):>12}{sig4(r['empirical']):>12}"
                     f"{sig4(r['se']):>12}{sig4(r['z']):>8}  {'pass' if r['passed'] else 'FAIL'}")
    pe = d["perpetrators"]
    lines.append("")
    lines.append(f"designated perpetrators with profile: {pe['with_profile']}/{pe['designated']}")
    lines.append("all checks passed" if d["all_passed"] else "some checks FAILED")
    return "\n".join(lines) + "\n"
