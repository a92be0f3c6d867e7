"""Verification reports and their JSON / CSV / text renderings."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

CSV_HEADER = ("check", "n", "k_re", "k_im", "lambda", "metric", "value", "tol", "pass")


def encode(obj):
    """JSON-ready copy of ``obj``: complex -> [re, im], arrays -> lists, tuples -> lists."""
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(key): encode(v) for key, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    return obj


def metric_ok(value, tol) -> bool:
    return value is not None and math.isfinite(value) and value <= tol


@dataclass
class Report:
    check: str
    params: dict
    values: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    passed: bool = False
    skip_reason: str | None = None
    elapsed_ms: int = 0
    version: str = ""
    seed: int = 0

    @classmethod
    def build(cls, check, params, values, metrics, skip_reason, elapsed_ms, version, seed):
        """Assemble a report; ``metrics`` maps name -> (value, tol).

        A report passes only when it is not skipped, has at least one metric,
        and every metric is finite and within its tolerance.
        """
        m = {name: {"value": float(v), "tol": float(t)} for name, (v, t) in metrics.items()}
        ok = skip_reason is None and bool(m) and all(metric_ok(x["value"], x["tol"]) for x in m.values())
        return cls(check, encode(params), encode(values), m, ok, skip_reason, int(elapsed_ms), version, int(seed))

    @property
    def status(self) -> str:
        if self.skip_reason is not None:
            return "skip"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "values": self.values, "metrics": self.metrics,
                "pass": self.passed, "skip_reason": self.skip_reason, "elapsed_ms": self.elapsed_ms,
                "version": self.version, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["check"], d["params"], d["values"], d["metrics"], d["pass"], d["skip_reason"],
                   d["elapsed_ms"], d["version"], d["seed"])

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def csv_rows(self) -> list[list]:
        p = self.params
        k = p.get("k", [math.nan, math.nan])
        lam = ",".join(repr(float(x)) for x in p.get("lambda", []))
        base = [self.check, p.get("n", ""), k[0], k[1], lam]
        if self.skip_reason is not None:
            return [base + ["skipped", self.skip_reason, "", False]]
        if not self.metrics:
            return [base + ["error", self.values.get("error", ""), "", False]]
        return [base + [name, m["value"], m["tol"], metric_ok(m["value"], m["tol"])]
                for name, m in self.metrics.items()]

    def text(self) -> str:
        p = self.params
        head = f"[{self.status.upper()}] {self.check} n={p.get('n')}"
        if "k" in p:
            k = p["k"]
            head += " k=" + f"{k[0]:g}" + (f"{k[1]:+g}i" if k[1] else "")
        head += f" ({self.elapsed_ms} ms)"
        lines = [head]
        if self.skip_reason is not None:
            lines.append(f"    skipped: {self.skip_reason}")
        if "error" in self.values:
            lines.append(f"    error: {self.values['error']}")
        for name, m in self.metrics.items():
            mark = "ok" if metric_ok(m["value"], m["tol"]) else "FAILED"
            lines.append(f"    {name} = {m['value']:.3e} (tol {m['tol']:.1e}) {mark}")
        return "\n".join(lines)


def summarize(reports: list[Report]) -> dict:
    counts = {"passed": 0, "failed": 0, "skipped": 0}
    for r in reports:
        counts[{"pass": "passed", "fail": "failed", "skip": "skipped"}[r.status]] += 1
    counts["total"] = len(reports)
    return counts


def render(reports: list[Report], fmt: str) -> str:
    if fmt == "json":
        if len(reports) == 1:
            return reports[0].to_json(indent=2)
        return json.dumps({"reports": [r.to_dict() for r in reports], "summary": summarize(reports)}, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerows(r.csv_rows())
        return buf.getvalue().rstrip("\n")
    if fmt == "text":
        out = [r.text() for r in reports]
        if len(reports) > 1:
            s = summarize(reports)
            out.append(f"summary: {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped")
        return "\n".join(out)
    raise ValueError(f"unknown format {fmt!r}")
