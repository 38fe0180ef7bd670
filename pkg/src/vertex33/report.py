"""Model documents, verification suites and report serialization.

Documents are UTF-8 JSON. A model is either

* ``{"entries": {"m11": [re, im], ...}}`` with absent keys zero, or
* a catalog spec ``{"family": id, "params": {...}, "m24": [re, im],
  "m42": [re, im], "free": {...}, "branch": {"x": 0|1, "tau": 1|-1}}``.

Reports are plain dicts with ``report_version`` 1. Complex numbers are
``[re, im]`` pairs and floats use Python's shortest round-trip repr, so the
same config and seed always give byte-identical output.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import bethe, scattering
from .algebras import HECKE, classify, compute_mu, is_zero
from .catalog import (
    FAMILIES,
    CatalogEntry,
    family,
    instantiate,
    random_complex,
    random_hoppings,
    random_instance,
)
from .errors import InputError, NotProportional, NumericalDegeneracy, SingularLambda
from .hamiltonian import (
    FREE_KEYS,
    PATTERN,
    LocalHamiltonian33,
    TMatrix,
    build_from_T,
    check_cba_constraints,
    extract_T,
    validate_pattern,
)
from .kernels import BACKEND
from .linalg import DEFAULT_EIG_CAP, DEFAULT_EMBED_CAP, residual
from .reshetikhin import check_reshetikhin, orbit_scan

log = logging.getLogger(__name__)

REPORT_VERSION = 1
KEY_RE = re.compile(r"^m([1-9])([1-9])$")


# ---------------------------------------------------------------- serialization


def to_jsonable(obj):
    """Recursively convert numpy and complex values into JSON-ready types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    return obj


def _float(x):
    x = float(x)
    if np.isfinite(x):
        return x + 0.0  # drop the sign of -0.0
    return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# ---------------------------------------------------------------- documents


def load_document(source: str) -> tuple[dict, str]:
    """Parse ``source`` as inline JSON (starts with ``{``) or as a file path."""
    text = source
    origin = "<inline>"
    if not source.lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"{source}: {exc.strerror or exc}") from None
        origin = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{origin}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{origin}: top level must be an object")
    return doc, origin


def parse_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise InputError(f"{where}: expected [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise InputError(f"{where}: expected [re, im], got {value!r}")


def entries_matrix(entries: dict, origin: str = "<inline>") -> np.ndarray:
    if not isinstance(entries, dict):
        raise InputError(f"{origin}: 'entries' must be an object")
    h = np.zeros((9, 9), dtype=np.complex128)
    for key, value in entries.items():
        m = KEY_RE.match(key)
        if not m:
            raise InputError(f"{origin}: entries.{key}: keys must look like m11..m99")
        i, j = int(m.group(1)), int(m.group(2))
        if not PATTERN[i - 1, j - 1]:
            raise InputError(f"{origin}: entries.{key}: ({i},{j}) is outside the 33-vertex pattern")
        h[i - 1, j - 1] = parse_complex(value, f"{origin}: entries.{key}")
    return h


@dataclass
class Model:
    h: LocalHamiltonian33
    source: str
    kind: str
    entry: CatalogEntry | None = None
    T: TMatrix | None = None

    def describe(self) -> dict:
        out = {"source": self.source, "kind": self.kind}
        if self.entry is not None:
            out["family"] = self.entry.family_id
            out["params"] = dict(self.entry.params)
            out["branch"] = {"x": self.entry.x_branch, "tau": self.entry.tau_sign}
        return out


def _catalog_params(fam, raw, origin):
    if not isinstance(raw, dict):
        raise InputError(f"{origin}: 'params' must be an object")
    unknown = set(raw) - set(fam.params)
    if unknown:
        raise InputError(f"{origin}: params: unknown names {sorted(unknown)} for {fam.family_id}")
    params = {}
    for name, value in raw.items():
        if name in fam.discrete:
            if value not in (1, -1) or isinstance(value, bool):
                raise InputError(f"{origin}: params.{name}: must be 1 or -1")
            params[name] = int(value)
        else:
            params[name] = parse_complex(value, f"{origin}: params.{name}")
    return params


def model_from_catalog(doc: dict, origin: str = "<inline>") -> Model:
    unknown = set(doc) - {"family", "params", "m24", "m42", "free", "branch"}
    if unknown:
        raise InputError(f"{origin}: unknown keys {sorted(unknown)}")
    fid = doc["family"]
    if fid not in FAMILIES:
        raise InputError(f"{origin}: family: unknown family {fid!r}")
    fam = family(fid)
    params = _catalog_params(fam, doc.get("params", {}), origin)
    m24 = parse_complex(doc.get("m24", 0), f"{origin}: m24")
    m42 = parse_complex(doc.get("m42", 0), f"{origin}: m42")
    branch = doc.get("branch", {}) or {}
    if not isinstance(branch, dict) or set(branch) - {"x", "tau"}:
        raise InputError(f"{origin}: branch must be an object with keys x and tau")
    entry = CatalogEntry(fid, params, int(branch.get("x", 0)), int(branch.get("tau", 1)))
    free_raw = doc.get("free", {}) or {}
    if not isinstance(free_raw, dict):
        raise InputError(f"{origin}: 'free' must be an object")
    free = {}
    for key, value in free_raw.items():
        if key not in FREE_KEYS or key in ("m24", "m42"):
            raise InputError(f"{origin}: free.{key}: allowed keys are m11 m22 m33 m44 m23 m32")
        free[key] = parse_complex(value, f"{origin}: free.{key}")
    T = instantiate(entry, m24, m42)
    return Model(build_from_T(T, free), origin, "catalog", entry, T)


def load_model(source: str) -> Model:
    doc, origin = load_document(source)
    if "entries" in doc:
        extra = set(doc) - {"entries"}
        if extra:
            raise InputError(f"{origin}: unknown keys {sorted(extra)}")
        h = validate_pattern(entries_matrix(doc["entries"], origin))
        return Model(h, origin, "entries")
    if "family" in doc:
        return model_from_catalog(doc, origin)
    raise InputError(f"{origin}: expected an 'entries' or a 'family' key")


def random_model(family_id: str, seed: int) -> Model:
    """Generic instance of a catalog family with random free entries."""
    if family_id not in FAMILIES:
        raise InputError(f"unknown family {family_id!r}")
    rng = np.random.default_rng(seed)
    entry, T = random_instance(family_id, rng)
    free = {k: complex(random_complex(rng)) for k in ("m11", "m22", "m33", "m44", "m23", "m32")}
    return Model(build_from_T(T, free), f"random:{family_id}:{seed}", "random", entry, T)


# ---------------------------------------------------------------- config


@dataclass
class SuiteConfig:
    seed: int = 0
    tol_identity: float = 1e-10
    tol_eigen: float = 1e-8
    tol_ybe: float = 1e-9
    tol_bethe: float = 1e-8
    tol_containment: float = 1e-6
    draws: int = 20
    L: int = 6
    M: int = 2
    branch: int | None = None
    expect_reshetikhin: str = "fails"
    embed_cap: int = DEFAULT_EMBED_CAP
    eig_cap: int = DEFAULT_EIG_CAP
    model: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


class Checks:
    """Ordered list of mandatory check outcomes."""

    def __init__(self):
        self.items: list = []

    def add(self, name: str, passed: bool, value=None, tol=None, **extra):
        item = {"name": name, "passed": bool(passed)}
        if value is not None:
            item["value"] = value
        if tol is not None:
            item["tol"] = tol
        item.update(extra)
        self.items.append(item)
        return item

    def add_residual(self, name: str, rep, **extra):
        return self.add(name, rep.passed, rep.rel, rep.tol, **extra)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.items)


def make_report(command: str, config: SuiteConfig, results: dict, checks: Checks | None = None) -> dict:
    out = {
        "report_version": REPORT_VERSION,
        "command": command,
        "backend": BACKEND,
        "config": config.as_dict(),
        "results": results,
    }
    if checks is not None:
        out["checks"] = checks.items
        out["passed"] = checks.passed
    return out


# ---------------------------------------------------------------- validate / classify


def markov_generator_check(h: LocalHamiltonian33, tol: float = 1e-12) -> dict:
    """Informational test of ``W = -h`` as a stochastic rate matrix.

    Columns of a generator sum to zero and its off-diagonal rates are
    nonnegative. Only the real part of the rates is inspected.
    """
    w = -h.matrix
    col = np.abs(w.sum(axis=0))
    off = w.real[~np.eye(9, dtype=bool)]
    return {
        "max_column_sum": float(col.max()),
        "min_offdiagonal_rate": float(off.min()),
        "imaginary_part_max": float(np.abs(w.imag).max()),
        "is_generator": bool(col.max() <= tol and off.min() >= -tol),
    }


def validate(model: Model, config: SuiteConfig) -> dict:
    report = check_cba_constraints(model.h)
    checks = Checks()
    for name, value in report.residuals.items():
        checks.add(f"constraint {name}", abs(value) <= report.tol, abs(value), report.tol)
    results = {
        "model": model.describe(),
        "constraints": report.as_dict(),
        "markov_generator": markov_generator_check(model.h),
    }
    return make_report("validate", config, results, checks)


def _rank(a, tol=1e-9) -> int:
    s = np.linalg.svd(a, compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum()) if s.size else 0


def jordan_fingerprint(t, tol: float = 1e-6) -> tuple:
    """Similarity- and scale-invariant data: for each eigenvalue cluster its
    multiplicity, the ranks of ``(T - v)^k`` for k = 1..3, and whether it is zero."""
    t = np.asarray(t, dtype=np.complex128)
    n = float(np.max(np.abs(t))) or 1.0
    clusters: list = []
    for v in np.linalg.eigvals(t):
        for c in clusters:
            if abs(c[0] - v) < tol * n:
                c[1] += 1
                break
        else:
            clusters.append([v, 1])
    out = []
    for v, mult in clusters:
        a = t - v * np.eye(4)
        ranks = tuple(_rank(np.linalg.matrix_power(a, k)) for k in (1, 2, 3))
        out.append((mult, ranks, bool(abs(v) < 1e-9 * n)))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _family_fingerprints(case: str) -> dict:
    """Fingerprints of each family of ``case`` over both branches and a few draws."""
    rng = np.random.default_rng(12345)
    out = {}
    for fid, fam in FAMILIES.items():
        if fam.case != case:
            continue
        keys = set()
        for _ in range(4):
            entry, _ = random_instance(fid, rng)
            for xb in ((0, 1) if case == HECKE else (0,)):
                e = CatalogEntry(fid, entry.params, xb, entry.tau_sign)
                m24, m42 = random_hoppings(case, rng)
                try:
                    T = instantiate(e, m24, m42)
                except NumericalDegeneracy:
                    continue
                key = jordan_fingerprint(T.t)
                if case == HECKE:
                    key = (key, abs(fam.table_mu_tilde(e.params)) < 1e-12)
                keys.add(key)
        out[fid] = frozenset(keys)
    return out


def family_candidates(T: TMatrix, case: str, mu_tilde=None) -> list:
    """Catalog families whose gauge-invariant Jordan data agree with ``T``.

    Conjugation by ``g x g``, transposition, the flip ``P T P`` and rescaling
    all preserve this data, so the true family is always among the
    candidates; families with the same data cannot be told apart this way.
    """
    key = jordan_fingerprint(T.t)
    if case == HECKE:
        key = (key, mu_tilde is not None and abs(mu_tilde) < 1e-7)
    return [fid for fid, fps in _family_fingerprints(case).items() if key in fps]


def classify_model(model: Model, config: SuiteConfig) -> dict:
    T = extract_T(model.h)
    cls = classify(T)
    checks = Checks()
    for name, rep in cls.residuals.items():
        checks.add_residual(name, rep)
    results = {"model": model.describe(), "classification": cls.as_dict(), "m24": T.m24, "m42": T.m42}
    try:
        results["mu"] = compute_mu(T.t)
    except NotProportional:
        results["mu"] = None
    mt = cls.normalization.mu_tilde if cls.normalization is not None else None
    results["family_candidates"] = family_candidates(T, cls.case, mt) if cls.case != "Unclassified" else []
    results["T"] = T.t
    return make_report("classify", config, results, checks)


# ---------------------------------------------------------------- suites


def _draw_rng(seed: int, index: int):
    return np.random.default_rng([seed, index])


def _rapidities(ctx, seed, index, n):
    rng = _draw_rng(seed, index)
    return scattering.random_rapidities(ctx, rng, n)


def ybe_suite(T: TMatrix, config: SuiteConfig, checks: Checks) -> dict:
    ctx = scattering.ScatteringContext.from_T(T)
    dual = scattering.dualize(ctx)
    for i in range(config.draws):
        tag = {"seed": config.seed, "draw": i}
        z1, z2, z3 = _rapidities(ctx, config.seed, i, 3)
        checks.add_residual("regularity", scattering.check_regularity(ctx, z1), **tag)
        checks.add_residual("unitarity", scattering.check_unitarity(ctx, z1, z2, config.tol_identity), **tag)
        checks.add_residual("ybe", scattering.check_ybe(ctx, z1, z2, z3, config.tol_ybe), **tag)
        w1, w2, w3 = _rapidities(dual, config.seed, 10_000 + i, 3)
        checks.add_residual("ybe dual", scattering.check_ybe(dual, w1, w2, w3, config.tol_ybe), **tag)
    for M in (2, 3, 4):
        for i in range(config.draws):
            x, y, *zs = _rapidities(ctx, config.seed, 100 * M + i, 2 + M)
            rep = scattering.check_transfer_commutes(ctx, x, y, zs, config.tol_ybe)
            checks.add_residual(f"transfer commutes M={M}", rep, seed=config.seed, draw=i)
    for i in range(config.draws):
        zs = _rapidities(ctx, config.seed, 1000 + i, 2)
        for j, z in enumerate(zs):
            lhs = -scattering.transfer_matrix(ctx, z, zs)
            rhs = scattering.bethe_product(ctx, zs, j)
            checks.add_residual(f"bethe form j={j}", residual(lhs, rhs, 1e-10), seed=config.seed, draw=i)
    return {"draws": config.draws}


def spectrum_suite(model: Model, config: SuiteConfig, checks: Checks) -> dict:
    h, L = model.h, config.L
    out = {"L": L}
    ex0 = bethe.sector_spectrum(h, L, 0).eigenvalues
    e0 = L * h["m11"]
    checks.add("empty state", abs(ex0[0] - e0) <= 1e-12 * max(1.0, abs(e0)), abs(ex0[0] - e0), 1e-12)
    out["empty_energy"] = ex0[0]
    if is_zero(h["m24"]) and is_zero(h["m42"]):
        out["one_magnon"] = "skipped: m24 = m42 = 0"
        return out
    pred = bethe.one_magnon_prediction(h, L)
    match = bethe.compare_spectra(pred, bethe.sector_spectrum(h, L, 1), config.tol_eigen)
    checks.add("one magnon", match.passed, match.max_distance, config.tol_eigen)
    out["one_magnon"] = match.as_dict()
    if config.M >= 2:
        out["two_magnon"] = _two_magnon(model, config, checks)
    return out


def _two_magnon(model, config, checks) -> dict:
    h, L = model.h, config.L
    T = extract_T(h)
    ctx = scattering.ScatteringContext.from_T(T)
    branches = (config.branch,) if config.branch is not None else (0, 1, 2, 3)
    seeds = bethe.SeedGrid(branches=branches, seed=config.seed)
    solved = bethe.solve_bethe_two(ctx, h, L, seeds, config.tol_bethe)
    exact = bethe.sector_spectrum(h, L, 2)
    match = bethe.compare_spectra(solved.energies(h), exact, config.tol_containment, containment=True)
    ok = match.passed and len(solved.roots) > 0
    checks.add("two magnon containment", ok, match.max_distance, config.tol_containment, roots=len(solved.roots))
    return {
        "roots": [r.as_dict(h) for r in solved.roots],
        "failures": dict(sorted(solved.failures.items())),
        "containment": match.as_dict(),
    }


def reshetikhin_check(model: Model, config: SuiteConfig, checks: Checks) -> dict:
    res = check_reshetikhin(model.h)
    expect = config.expect_reshetikhin
    ok = expect == "any" or res.verdict == expect
    checks.add("reshetikhin", ok, res.residual, verdict=res.verdict, expected=expect)
    return res.as_dict()


SUITES = ("ybe", "spectrum", "reshetikhin")


def verify(model: Model, suite: str, config: SuiteConfig) -> dict:
    checks = Checks()
    results: dict = {"model": model.describe(), "suites": {}}
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name == "ybe":
            results["suites"]["ybe"] = ybe_suite(extract_T(model.h), config, checks)
        elif name == "spectrum":
            results["suites"]["spectrum"] = spectrum_suite(model, config, checks)
        elif name == "reshetikhin":
            results["suites"]["reshetikhin"] = reshetikhin_check(model, config, checks)
        else:
            raise InputError(f"unknown suite {name!r}")
    return make_report(f"verify {suite}", config, results, checks)


# ---------------------------------------------------------------- single-purpose commands


def spectrum_report(model: Model, config: SuiteConfig) -> dict:
    spec = bethe.sector_spectrum(model.h, config.L, config.M)
    results = {"model": model.describe(), "L": config.L, "M": config.M, "eigenvalues": spec.eigenvalues}
    checks = Checks()
    if config.M == 1 and not (is_zero(model.h["m24"]) and is_zero(model.h["m42"])):
        pred = bethe.one_magnon_prediction(model.h, config.L)
        match = bethe.compare_spectra(pred, spec, config.tol_eigen)
        results["prediction"] = pred
        checks.add("one magnon", match.passed, match.max_distance, config.tol_eigen)
    return make_report("spectrum", config, results, checks)


def bethe_report(model: Model, config: SuiteConfig) -> dict:
    checks = Checks()
    results = {"model": model.describe(), "L": config.L, "two_magnon": _two_magnon(model, config, checks)}
    return make_report("bethe", config, results, checks)


def reshetikhin_report(model: Model, config: SuiteConfig) -> dict:
    checks = Checks()
    results = {"model": model.describe(), "reshetikhin": reshetikhin_check(model, config, checks)}
    if model.T is not None:
        # same verdict expected on the flip/transpose orbit of T
        orbit = orbit_scan(model.T, model.h.free_params())
        results["orbit"] = {name: res.as_dict() for name, res in orbit.items()}
        expect = config.expect_reshetikhin
        for name, res in orbit.items():
            checks.add(f"reshetikhin {name}", expect == "any" or res.verdict == expect, res.residual, verdict=res.verdict)
    return make_report("reshetikhin", config, results, checks)


def catalog_instantiate(model: Model, config: SuiteConfig) -> dict:
    results = {"model": model.describe(), "T": model.T.t, "h": model.h.matrix}
    if model.entry is not None and model.entry.case == HECKE:
        results["table_mu_tilde"] = model.entry.family.table_mu_tilde(model.entry.params)
    return make_report("catalog instantiate", config, results)


def catalog_sweep(model: Model, param: str, values, config: SuiteConfig) -> dict:
    """YBE and unitarity residuals while one family parameter runs over ``values``."""
    entry = model.entry
    if entry is None or param not in entry.family.params or param in entry.family.discrete:
        raise InputError(f"cannot sweep {param!r} for this model")
    checks = Checks()
    rows = []
    for k, v in enumerate(values):
        params = dict(entry.params)
        params[param] = complex(v)
        e = CatalogEntry(entry.family_id, params, entry.x_branch, entry.tau_sign)
        row = {"index": k, param: complex(v)}
        try:
            T = instantiate(e, model.T.m24, model.T.m42)
            ctx = scattering.ScatteringContext.from_T(T)
            z1, z2, z3 = _rapidities(ctx, config.seed, k, 3)
            ybe = scattering.check_ybe(ctx, z1, z2, z3, config.tol_ybe)
            uni = scattering.check_unitarity(ctx, z1, z2, config.tol_identity)
            row.update(ybe=ybe.rel, unitarity=uni.rel)
            checks.add_residual("ybe", ybe, seed=config.seed, draw=k)
        except (NumericalDegeneracy, SingularLambda) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
            log.info("sweep point %d skipped: %s", k, exc)
        rows.append(row)
    results = {"model": model.describe(), "param": param, "rows": rows}
    return make_report("catalog sweep", config, results, checks)


# ---------------------------------------------------------------- text rendering


def _is_complex(v) -> bool:
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    if _is_complex(v):
        return f"{v[0]:.6g}{v[1]:+.6g}j"
    if isinstance(v, list) and all(_is_complex(x) or isinstance(x, (int, float)) for x in v):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict) and all(not isinstance(x, (dict, list)) or _is_complex(x) for x in v.values()):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    return json.dumps(v, ensure_ascii=False)


def _render(key: str, value, indent: int, lines: list) -> None:
    pad = "  " * indent
    if isinstance(value, dict) and value and _fmt(value).startswith("{\""):
        lines.append(f"{pad}{key}:")
        for k, v in value.items():
            _render(k, v, indent + 1, lines)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)) and not _is_complex(value):
        lines.append(f"{pad}{key}:")
        for item in value:
            lines.append(f"{pad}  - {_fmt(item)}")
    else:
        lines.append(f"{pad}{key}: {_fmt(value)}")


def render_text(report: dict) -> str:
    rep = to_jsonable(report)
    lines = [f"vertex33 {rep['command']} (report_version {rep['report_version']}, backend {rep['backend']})"]
    for key, value in rep["results"].items():
        _render(key, value, 0, lines)
    for c in rep.get("checks", []):
        status = "PASS" if c["passed"] else "FAIL"
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in c.items() if k not in ("name", "passed", "value", "tol"))
        val = f" value={_fmt(c['value'])}" if "value" in c else ""
        tol = f" tol={_fmt(c['tol'])}" if "tol" in c else ""
        lines.append(f"{status} {c['name']}{val}{tol} {extra}".rstrip())
    if "passed" in rep:
        lines.append("RESULT " + ("PASS" if rep["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"
