"""Batch driver: ``smw <command> --config job.json --out dir``.

Every command turns a validated job description into a list of checks and a
dictionary of values.  ``report.json`` holds only deterministic content so that
repeated runs are byte-identical; wall-clock timings go to ``runtime.json`` and
the ``seconds`` column of ``checks.csv``.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import detkit, duality, grassmann, oracle, partition, toda
from .model import (
    AccuracyError, ChPolySpec, Potential, SmwError, SourceSpec, WeightScheme,
)
from .quad import AuxKernels, QuadratureRule

COMMANDS = (
    "partition", "chpoly", "verify-duality", "verify-toda", "verify-web",
    "oracle-compare", "grassmann-check",
)
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ACCURACY = 0, 1, 2, 3

DEFAULT_TOLERANCES = {
    "cauchy": 1e-8,
    "oracle": 1e-6,
    "oracle_psi": 1e-5,
    "hciz_sigma": 3.0,
    "transpose": 1e-10,
    "self_duality": 1e-5,
    "fourier_web": 1e-5,
    "toda": 1e-6,
    "bilinear": 1e-6,
    "monomial": 1e-10,
    "limits": 1e-4,
    "sdet": 1e-10,
    "grassmann": 0.0,
}

# -- schema -----------------------------------------------------------------------------

_num = {"type": "number"}
_cnum = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}
_cvec = {"type": "array", "items": _cnum}
_size = {"type": "integer", "minimum": 0}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_potential = _obj({"coefficients": {"type": "array", "items": _num, "minItems": 2},
                   "hbar": {"type": "number", "exclusiveMinimum": 0}}, ["coefficients", "hbar"])
_args = {"a": _cvec, "b": _cvec, "lam": _cvec, "mu": _cvec}
_tuple4 = {"type": "array", "items": _size, "minItems": 4, "maxItems": 4}
_tuple2 = {"type": "array", "items": _size, "minItems": 2, "maxItems": 2}

PARAM_SCHEMAS = {
    "partition": _obj({
        "sources": {"type": "array", "items": _obj({"a": _cvec, "b": _cvec}, ["a", "b"])},
        "cauchy_samples": _size, "seed": _size,
        "limits": {"type": "array", "items": _tuple2},
        "limit_point": _obj({"a": _cnum, "b": _cnum}, ["a", "b"]),
    }),
    "chpoly": _obj({
        "cases": {"type": "array", "items": _obj(_args, ["a", "b", "lam", "mu"])},
        "limits": {"type": "array", "items": _tuple4},
        "limit_point": _obj({k: _cnum for k in _args}, list(_args)),
    }),
    "verify-duality": _obj({
        "transpose_samples": _size, "seed": _size,
        "self_duality": {"type": "array", "items": _obj({"sizes": _tuple4, **_args}, ["sizes"])},
    }),
    "verify-toda": _obj({
        "sites": {"type": "array", "items": _tuple2},
        "a": _num, "b": _num,
        "methods": {"type": "array", "items": {"enum": [toda.EXACT, toda.FD]}},
        "bilinear": {"type": "array", "items": _tuple4},
        "lam": _cnum, "mu": _cnum,
        "monomial": _obj({"N": _size, "M_max": _size, "x": _num}),
    }),
    "verify-web": _obj({"samples": _size, "seed": _size, "composed": {"type": "boolean"}}),
    "oracle-compare": _obj({
        "cases": {"type": "array", "items": _obj(
            {**_args, "potential": _potential, "order": _size, "tolerance": _num}, ["a", "b"])},
        "hciz": {"type": "array", "items": _obj({"x": {"type": "array", "items": _num},
                                                 "a": {"type": "array", "items": _num}}, ["x", "a"])},
        "samples": _size, "seed": _size,
    }),
    "grassmann-check": _obj({
        "triples": _size, "generators": {"type": "integer", "minimum": 1, "maximum": grassmann.MAX_GENERATORS},
        "sdet_samples": _size, "seed": _size,
        "z11": {"type": "array", "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}},
    }),
}

CONFIG_SCHEMA = _obj({
    "schema": {"const": 1},
    "potential": _potential,
    "scheme": _obj({"mode": {"enum": ["flip-sign", "custom-fermionic", "fresnel"]},
                    "epsilon": {"type": "number", "exclusiveMinimum": 0},
                    "fermionic_potential": _potential}),
    "quadrature": _obj({"kind": {"enum": ["gauss-hermite-mapped", "tanh-sinh"]},
                        "order": {"type": "integer", "minimum": 8}}),
    "params": _obj(PARAM_SCHEMAS),
    "tolerances": _obj({k: {"type": "number", "minimum": 0} for k in DEFAULT_TOLERANCES}),
}, ["schema", "potential"])


class ConfigError(Exception):
    pass


def validate(cfg) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {e.message}") from None


# -- job ---------------------------------------------------------------------------------

def _c(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def _cv(vs) -> tuple:
    out = []
    for v in vs:
        z = _c(v)
        out.append(z.real if z.imag == 0 else z)
    return tuple(out)


def _potential_from(d) -> Potential:
    return Potential(tuple(d["coefficients"]), d["hbar"])


@dataclass
class Job:
    cfg: dict
    kern: AuxKernels
    tolerances: dict

    @classmethod
    def from_config(cls, cfg) -> "Job":
        validate(cfg)
        try:
            pot = _potential_from(cfg["potential"])
            sc = cfg.get("scheme", {})
            fpot = _potential_from(sc["fermionic_potential"]) if "fermionic_potential" in sc else None
            scheme = WeightScheme(sc.get("mode", "flip-sign"), fpot, sc.get("epsilon", 1e-3))
            q = cfg.get("quadrature", {})
            rule = QuadratureRule(q.get("kind", "gauss-hermite-mapped"), q.get("order", 80))
        except SmwError as e:
            raise ConfigError(str(e)) from None
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(cfg.get("tolerances", {}))
        return cls(cfg, AuxKernels(pot, scheme, rule), tol)

    def params(self, command) -> dict:
        return self.cfg.get("params", {}).get(command, {})


@dataclass
class Check:
    check_id: str
    sizes: tuple = (None, None, None, None)
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    status: str = "pass"  # pass | fail | skipped | recorded | inconclusive
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def asserted(self) -> bool:
        return self.status in ("pass", "fail")


def _judge(check_id, sizes, residual, tol, inconclusive=False, **detail) -> Check:
    residual = float(residual)
    if inconclusive:
        status = "inconclusive"
    else:
        status = "pass" if residual <= tol else "fail"
    return Check(check_id, _pad(sizes), residual, tol, status, detail=detail)


def _pad(sizes):
    s = tuple(sizes)[:4]
    return s + (None,) * (4 - len(s))


def _rel(x, y) -> float:
    x, y = complex(x), complex(y)
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    dt = time.perf_counter() - t0
    checks = out if isinstance(out, list) else [out]
    for c in checks:
        c.seconds = dt / max(len(checks), 1)
    return checks


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SMW_THREADS", "1")))
    except ValueError:
        return 1


def _run_tasks(tasks) -> list:
    """Run thunks concurrently (capped by SMW_THREADS) and keep submission order."""
    n = _threads()
    if n == 1:
        results = [_timed(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_timed, tasks))
    return [c for r in results for c in r]


# -- commands -----------------------------------------------------------------------------

def _random_args(rng, N, M, p, q):
    a = tuple(np.round(-0.6 + 1.2 * (np.arange(N) + rng.uniform(0.1, 0.9, N)) / max(N, 1), 6))
    b = tuple(np.round(-0.5 + 1.0 * (np.arange(M) + rng.uniform(0.1, 0.9, M)) / max(M, 1), 6))
    lam = tuple(complex(round(rng.uniform(-0.5, 0.5), 6), round(rng.choice([-1, 1]) * rng.uniform(0.3, 0.9), 6))
                for _ in range(p))
    mu = tuple(complex(round(rng.uniform(-0.5, 0.5), 6), round(rng.choice([-1, 1]) * rng.uniform(0.3, 0.9), 6))
               for _ in range(q))
    return a, b, lam, mu


def cmd_partition(job: Job):
    P = job.params("partition")
    kern, tol = job.kern, job.tolerances
    values = {}
    sources = P.get("sources", [{"a": [0.3, -0.2], "b": [0.1]}])
    tasks = []

    def cauchy():
        rng = np.random.default_rng(P.get("seed", 0))
        worst = 0.0
        for _ in range(P.get("cauchy_samples", 1000)):
            N = int(rng.integers(1, 6))
            M = int(rng.integers(0, N + 1))
            x = rng.uniform(-2, 2, N) + 1j * rng.uniform(-2, 2, N)
            y = rng.uniform(-2, 2, M) + 1j * rng.uniform(-2, 2, M)
            d = detkit.cauchy_delta(x, y)
            worst = max(worst, _rel(d, detkit.cauchy_delta_det(x, y)))
        return _judge("cauchy", (), worst, tol["cauchy"])

    tasks.append(cauchy)
    for i, s in enumerate(sources):
        src = SourceSpec(_cv(s["a"]), _cv(s["b"]))
        r = partition.z_source(kern, src)
        values[f"z_source[{i}]"] = {"N": src.N, "M": src.M, "value": r.value, "conditioning": r.conditioning}

    point = P.get("limit_point", {"a": 0.3, "b": -0.2})
    a0, b0 = _c(point["a"]).real, _c(point["b"]).real
    for N, M in P.get("limits", [[2, 1], [2, 2]]):
        def lim(N=N, M=M):
            zt = partition.z_tilde(kern, N, M, a0, b0)
            approx = partition.c_nm(N, M, a0, b0) * zt
            ref = partition.z_source_limit(kern, N, M, a0, b0)
            values[f"z_tilde[{N},{M}]"] = zt
            return _judge(f"limit:z:{N},{M}", (N, M), _rel(approx, ref), tol["limits"],
                          formula=approx, extrapolated=ref)
        tasks.append(lim)
    return _run_tasks(tasks), values


def cmd_chpoly(job: Job):
    P = job.params("chpoly")
    kern, tol = job.kern, job.tolerances
    values = {}
    cases = P.get("cases", [{"a": [0.3], "b": [-0.2], "lam": [[0.45, 0.3]], "mu": [[0.1, 0.6]]}])
    for i, c in enumerate(cases):
        src, ch = SourceSpec(_cv(c["a"]), _cv(c["b"])), ChPolySpec(_cv(c["lam"]), _cv(c["mu"]))
        r = partition.psi(kern, src, ch)
        ph = partition.phi(kern, src, ch)
        values[f"psi[{i}]"] = {"sizes": [src.N, src.M, ch.p, ch.q], "value": r.value, "phi": ph.value,
                               "conditioning": r.conditioning}
    point = P.get("limit_point", {"a": 0.3, "b": -0.2, "lam": [0.45, 0.3], "mu": [0.1, 0.6]})
    pt = {k: _c(v) for k, v in point.items()}
    a0, b0 = pt["a"].real, pt["b"].real
    tasks = []
    for N, M, p, q in P.get("limits", [[1, 0, 1, 1]]):
        def lim(N=N, M=M, p=p, q=q):
            pt_ = partition.psi_tilde(kern, N, M, p, q, a0, b0, pt["lam"], pt["mu"])
            approx = partition.c_nmpq(N, M, p, q, a0, b0, pt["lam"], pt["mu"]) * pt_
            ref = partition.psi_limit(kern, N, M, p, q, a0, b0, pt["lam"], pt["mu"])
            values[f"psi_tilde[{N},{M},{p},{q}]"] = pt_
            return _judge(f"limit:psi:{N},{M},{p},{q}", (N, M, p, q), _rel(approx, ref), tol["limits"],
                          formula=approx, extrapolated=ref)
        tasks.append(lim)
    return _run_tasks(tasks), values


SELF_DUALITY_CASES = (
    {"sizes": [1, 0, 1, 0], "a": [0.35], "b": [], "lam": [-0.3], "mu": []},
    {"sizes": [1, 1, 1, 1], "a": [0.35], "b": [[-0.25, -0.5]], "lam": [-0.3], "mu": [[0.2, 0.8]]},
    {"sizes": [2, 1, 1, 1], "a": [0.35, -0.1], "b": [[-0.25, -0.5]], "lam": [-0.3], "mu": [[0.2, 0.8]]},
)


def cmd_verify_duality(job: Job):
    P = job.params("verify-duality")
    kern, tol = job.kern, job.tolerances
    values = {}
    tasks = []

    def transpose():
        rng = np.random.default_rng(P.get("seed", 0))
        out = []
        for i in range(P.get("transpose_samples", 50)):
            while True:
                N, M, p, q = (int(v) for v in rng.integers(0, 3, 4))
                if N + p >= M + q and N + M + p + q > 0:
                    break
            a, b, lam, mu = _random_args(rng, N, M, p, q)
            r = duality.check_transpose_duality(kern, SourceSpec(a, b), ChPolySpec(lam, mu))
            out.append(_judge(f"transpose:{i}", (N, M, p, q), r.residual, tol["transpose"], sign=r.sign))
        return out

    tasks.append(transpose)
    if job.kern.potential.is_gaussian and job.kern.scheme.mode.value == "flip-sign":
        for c in P.get("self_duality", SELF_DUALITY_CASES):
            def sd(c=c):
                N, M, p, q = c["sizes"]
                r = duality.check_gaussian_self_duality(
                    N, M, p, q, _cv(c.get("a", [])), _cv(c.get("b", [])), _cv(c.get("lam", [])),
                    _cv(c.get("mu", [])), kern.potential, kern.scheme)
                values[f"self_duality[{N},{M},{p},{q}]"] = {"lhs": r.lhs, "rhs": r.rhs,
                                                            "constant": r.extra["constant"]}
                return _judge(f"self-duality:{N},{M},{p},{q}", (N, M, p, q), r.residual, tol["self_duality"])
            tasks.append(sd)
    return _run_tasks(tasks), values


def cmd_verify_toda(job: Job):
    P = job.params("verify-toda")
    kern, tol = job.kern, job.tolerances
    a, b = P.get("a", 0.3), P.get("b", -0.2)
    lam, mu = _c(P.get("lam", [0.45, 0.3])), _c(P.get("mu", [0.1, 0.6]))
    tasks = []

    def wrap(r, t):
        if not r.applicable:
            return Check(f"{r.equation}:{r.method}", _pad(r.sizes), status="skipped", tolerance=t,
                         detail={"reason": r.skipped})
        return _judge(f"{r.equation}:{r.method}", r.sizes, r.residual, t, r.inconclusive, **r.extra)

    for N, M in P.get("sites", [[2, 2]]):
        for method in P.get("methods", [toda.EXACT, toda.FD]):
            tasks.append(lambda N=N, M=M, m=method: [
                wrap(toda.toda_1d_residual(kern, N, M, a, b, m), tol["toda"]),
                wrap(toda.toda_2d_residual(kern, N, M, a, b, m), tol["toda"]),
            ])
    for s in P.get("bilinear", []):
        tasks.append(lambda s=s: [wrap(r, tol["bilinear"])
                                  for r in toda.psi_bilinear_residuals(kern, *s, a, b, lam, mu)])
    mono = P.get("monomial")
    if mono is not None:
        def monomial():
            return [_judge(f"monomial:{M}", (mono.get("N", 2), M),
                           toda.monomial_det_identity(mono.get("N", 2), M, mono.get("x", 0.7)).residual,
                           tol["monomial"])
                    for M in range(1, mono.get("M_max", 4) + 1)]
        tasks.append(monomial)
    return _run_tasks(tasks), {}


def cmd_verify_web(job: Job):
    P = job.params("verify-web")
    tol = job.tolerances["fourier_web"]

    def web():
        reports = duality.check_fourier_web(job.kern, P.get("samples", 10), P.get("seed", 0),
                                            P.get("composed", True))
        counts = {}
        out = []
        for r in reports:
            arrow = r.extra["arrow"]
            i = counts[arrow] = counts.get(arrow, -1) + 1
            out.append(_judge(f"web:{arrow}:{i}", (), r.residual, tol))
        return out

    return _run_tasks([web]), {}


ORACLE_CASES = (
    {"a": [0.3], "b": []},
    {"a": [0.3, -0.2], "b": []},
    {"a": [0.3], "b": [-0.2]},
    {"a": [0.3, -0.25], "b": [0.1]},
    {"a": [0.3, -0.25], "b": [0.1, -0.4]},
    {"a": [0.35, -0.05, -0.4], "b": [0.15]},
    {"a": [0.3], "b": [], "lam": [[0.45, 0.3]], "mu": []},
    {"a": [0.3], "b": [], "lam": [], "mu": [[0.1, 0.6]]},
    {"a": [0.3], "b": [-0.2], "lam": [[0.45, 0.3]], "mu": [[0.1, 0.6]]},
    {"a": [0.3, -0.25], "b": [0.1], "lam": [[0.45, 0.3]], "mu": []},
)
HCIZ_CASES = ({"x": [0.4, -0.3], "a": [0.7, -0.2]}, {"x": [0.5, 0.1, -0.4], "a": [0.6, -0.1, -0.5]},
              {"x": [0.0, 0.0], "a": [0.7, -0.2]})


def cmd_oracle_compare(job: Job):
    P = job.params("oracle-compare")
    tol = job.tolerances
    values = {}
    tasks = []
    for i, c in enumerate(P.get("cases", ORACLE_CASES)):
        def case(i=i, c=c):
            kern = job.kern
            if "potential" in c:
                kern = AuxKernels(_potential_from(c["potential"]), kern.scheme, kern.rule)
            if "order" in c:
                kern = kern.with_rule(QuadratureRule(kern.rule.kind, c["order"]))
            src = SourceSpec(_cv(c["a"]), _cv(c["b"]))
            ch = ChPolySpec(_cv(c.get("lam", [])), _cv(c.get("mu", [])))
            if ch.p or ch.q:
                val = partition.psi(kern, src, ch).value
                t = c.get("tolerance", tol["oracle_psi"])
            else:
                val = partition.z_source(kern, src).value
                t = c.get("tolerance", tol["oracle"])
            ref = oracle.eigenvalue_integral(kern, src, ch)
            values[f"oracle[{i}]"] = {"formula": val, "brute_force": ref}
            return _judge(f"oracle:{i}", (src.N, src.M, ch.p, ch.q), _rel(val, ref), t)
        tasks.append(case)
    for i, c in enumerate(P.get("hciz", HCIZ_CASES)):
        def hciz(i=i, c=c):
            est = oracle.haar_hciz_mc(c["x"], c["a"], P.get("samples", 100_000), P.get("seed", 0))
            if np.all(np.asarray(c["x"]) == 0):
                exact = 1.0
                chk = _judge(f"hciz:{i}", (len(c["x"]),), abs(est.mean - 1.0), 0.0)
            else:
                exact = oracle.hciz_closed_form(c["x"], c["a"])
                chk = _judge(f"hciz:{i}", (len(c["x"]),), est.zscore(exact), tol["hciz_sigma"])
            values[f"hciz[{i}]"] = {"mc": est.mean, "stderr": est.stderr, "closed_form": exact}
            return chk
        tasks.append(hciz)
    return _run_tasks(tasks), values


def _random_element(rng, n, parity=None, terms=6):
    masks = rng.integers(0, 2 ** n, terms)
    if parity is not None:
        masks = [m for m in masks if bin(int(m)).count("1") % 2 == parity]
    return grassmann.GrassmannElement(n, {int(m): int(rng.integers(-5, 6)) for m in masks})


def cmd_grassmann_check(job: Job):
    P = job.params("grassmann-check")
    tol = job.tolerances
    values = {}
    seed = P.get("seed", 0)
    n = P.get("generators", 6)
    G = grassmann.GrassmannElement

    def algebra():
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(P.get("triples", 1000)):
            x, y, z = (_random_element(rng, n) for _ in range(3))
            bad += not ((x * y) * z == x * (y * z))
        anti = sum(not (G.generator(n, i) * G.generator(n, j) + G.generator(n, j) * G.generator(n, i) == 0)
                   for i in range(n) for j in range(n))
        lin = 0
        for _ in range(50):
            x, y = _random_element(rng, n), _random_element(rng, n)
            c = int(rng.integers(-4, 5))
            gens = [i for i in range(n) if rng.random() < 0.5]
            I = lambda g: grassmann.berezin_integrate(g, gens)
            lin += not (I(x * c + y) == I(x) * c + I(y))
            # int dθ (θ g) = g for θ-free g
            i = int(rng.integers(0, n))
            g = G(n, {m: v for m, v in x.terms.items() if not m >> i & 1})
            lin += not (grassmann.berezin_integrate(G.generator(n, i) * g, [i]) == g)
        return [_judge("grassmann:associativity", (n,), bad, tol["grassmann"]),
                _judge("grassmann:anticommutation", (n,), anti, tol["grassmann"]),
                _judge("grassmann:berezin-linearity", (n,), lin, tol["grassmann"])]

    def sdet_mult():
        rng = np.random.default_rng(seed + 1)
        worst = 0.0
        for _ in range(P.get("sdet_samples", 50)):
            N, M = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            mk = lambda: grassmann.SuperMatrix.numeric(
                0, rng.normal(size=(N, N)) + 2 * np.eye(N), rng.normal(size=(M, M)) + 2 * np.eye(M))
            m1, m2 = mk(), mk()
            lhs = grassmann.sdet(m1 @ m2).body
            rhs = grassmann.sdet(m1).body * grassmann.sdet(m2).body
            worst = max(worst, _rel(lhs, rhs))
        return _judge("grassmann:sdet-multiplicativity", (), worst, tol["sdet"])

    def z11():
        out = []
        for i, (a, b) in enumerate(P.get("z11", [[0.3, 0.1]])):
            direct = grassmann.z11_direct(job.kern, a, b)
            ref = partition.z_source(job.kern, SourceSpec((a,), (b,))).value
            values[f"z11[{i}]"] = {"a": a, "b": b, "direct": direct, "z_source": ref, "ratio": direct / ref}
            out.append(Check(f"z11:{i}", (1, 1, 0, 0), status="recorded", detail={"ratio": direct / ref}))
        return out

    tasks = [algebra, sdet_mult]
    if job.kern.potential.is_gaussian and job.kern.scheme.mode.value == "flip-sign":
        tasks.append(z11)
    return _run_tasks(tasks), values


RUNNERS = {
    "partition": cmd_partition,
    "chpoly": cmd_chpoly,
    "verify-duality": cmd_verify_duality,
    "verify-toda": cmd_verify_toda,
    "verify-web": cmd_verify_web,
    "oracle-compare": cmd_oracle_compare,
    "grassmann-check": cmd_grassmann_check,
}


# -- output -------------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def run(command: str, cfg: dict) -> tuple[dict, list, dict]:
    """Execute a command; returns (report, checks, runtime)."""
    job = Job.from_config(cfg)
    commands = COMMANDS if command == "report-all" else (command,)
    checks, values, runtime = [], {}, {}
    for cmd in commands:
        t0 = time.perf_counter()
        cs, vals = RUNNERS[cmd](job)
        runtime[cmd] = time.perf_counter() - t0
        checks.extend(cs)
        values[cmd] = vals
    report = {
        "command": command,
        "config": cfg,
        "values": values,
        "checks": [{"check_id": c.check_id, "sizes": list(c.sizes), "residual": c.residual,
                    "tolerance": c.tolerance, "status": c.status, "detail": c.detail} for c in checks],
        "summary": _summary(checks),
    }
    return _jsonable(report), checks, runtime


def _summary(checks) -> dict:
    out = {}
    for c in checks:
        out[c.status] = out.get(c.status, 0) + 1
    return dict(sorted(out.items()))


def exit_status(checks) -> int:
    if any(c.status == "fail" for c in checks):
        return EXIT_FAIL
    if any(c.status == "inconclusive" for c in checks):
        return EXIT_ACCURACY
    return EXIT_OK


CSV_COLUMNS = ("check_id", "N", "M", "p", "q", "residual", "tolerance", "status", "seconds")


def write_outputs(out: Path, report, checks, runtime) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    with open(out / "checks.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for c in checks:
            fmt = lambda v: "" if v is None or (isinstance(v, float) and not math.isfinite(v)) else repr(v)
            w.writerow([c.check_id, *("" if s is None else s for s in c.sizes), fmt(c.residual),
                        fmt(c.tolerance), c.status, f"{c.seconds:.3f}"])
    rt = {"threads": _threads(), "seconds": {k: round(v, 3) for k, v in runtime.items()}}
    (out / "runtime.json").write_text(json.dumps(rt, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="smw", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS + ("report-all",))
    ap.add_argument("--config", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    args = ap.parse_args(argv)
    try:
        cfg = json.loads(args.config.read_text())
        report, checks, runtime = run(args.command, cfg)
    except (OSError, json.JSONDecodeError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as e:
        print(f"accuracy error: {e}", file=sys.stderr)
        return EXIT_ACCURACY
    except SmwError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    write_outputs(args.out, report, checks, runtime)
    status = exit_status(checks)
    for c in checks:
        if c.status in ("fail", "inconclusive"):
            print(f"{c.status.upper():12s} {c.check_id} residual={c.residual:.3e} tol={c.tolerance:.1e}")
    s = report["summary"]
    print(" ".join(f"{k}={v}" for k, v in s.items()))
    return status


if __name__ == "__main__":
    sys.exit(main())
