"""
Command-line front end: `python -m ncwaring.cli_app <command> [flags]`.

Exit codes: 0 success, 1 verified negative result (identity, locally
dependent, invalid certificate), 2 search budget exhausted, 3 usage, parse or
precondition error.
"""
import argparse
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from dotenv import load_dotenv

# .env overrides must be in place before the package modules read their config
load_dotenv()

from .decompose import commutator_realization, traceless_four_square_zero  # noqa: E402
from .errors import (  # noqa: E402
    EnumerationCapError,
    FieldMismatchError,
    IdentityPolynomialError,
    MalformedCertificateError,
    PolySyntaxError,
    PreconditionError,
    SearchFailure,
)
from .exactmat import rational_spectrum  # noqa: E402
from .fields import Field  # noqa: E402
from .freealg import Poly  # noqa: E402
from .images import (  # noqa: E402
    ImageKind,
    ImageWitness,
    capelli_dependence_test,
    classify_on_mn,
    find_invertible_witness,
    find_split_spectrum_witness,
    power_dependence_index,
)
from .models.schemas import RunConfig, RunResult  # noqa: E402
from .parser import parse_poly, render_poly  # noqa: E402
from .timing_utils import LOG_TIMINGS, log_event, rss_mb, timer  # noqa: E402
from .waring import (  # noqa: E402
    WaringCertificate,
    bound_formula,
    commutator_via_image,
    conjugation_flow_demo,
    linear_combination_nine,
    random_flow_inputs,
    target_square_zero_certificate,
    traceless_waring_certificate,
    verify_certificate,
)
from .wire import (  # noqa: E402
    commutator_form_to_model,
    conjugator_to_model,
    dump_certificate,
    load_certificate,
    load_matrix,
    matrix_to_model,
    square_zero_sum_to_model,
)

DEFAULT_SEED = int(os.getenv("NCW_DEFAULT_SEED", "7"))
DEFAULT_BUDGET = int(os.getenv("NCW_DEFAULT_BUDGET", "64"))
FLOW_LAMBDAS = [10.0 ** -k for k in range(2, 7)]


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


@dataclass
class Outcome:
    status: str
    exit_code: int
    result: Dict[str, Any]
    artifact: Optional[str] = None


# ---- input helpers ----

def _read(arg: str) -> str:
    path = arg[1:] if arg.startswith("@") else arg
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _poly_text(arg: str) -> str:
    return _read(arg).strip() if arg.startswith("@") else arg


def _polys(cfg: RunConfig) -> List[Poly]:
    if not cfg.polys:
        raise UsageError("--poly is required")
    field = Field.parse(cfg.field)
    return [parse_poly(_poly_text(p), field) for p in cfg.polys]


def _matrix(arg: Optional[str], flag: str):
    if not arg:
        raise UsageError(f"{flag} is required")
    return load_matrix(_read(arg))


def _witness(w: ImageWitness) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "point": [matrix_to_model(a).model_dump() for a in w.point.args],
        "value": matrix_to_model(w.value).model_dump(),
    }
    if w.conjugator is not None:
        out["conjugator"] = conjugator_to_model(w.conjugator).model_dump()
    return out


def _certified(cert: WaringCertificate) -> Outcome:
    # nothing invalid leaves the process
    verdict = verify_certificate(cert)
    result = {"terms": len(cert.terms), "pairs": cert.pair_count, "meta": dict(cert.meta), "verdict": verdict.reason}
    if not verdict.valid:
        return Outcome("invalid", 1, result)
    return Outcome("valid", 0, result, dump_certificate(cert))


# ---- commands ----

def cmd_parse(cfg: RunConfig) -> Outcome:
    f = _polys(cfg)[0]
    return Outcome("ok", 0, {"polynomial": render_poly(f), "nvars": f.nvars, "degree": f.degree, "terms": len(f)})


def cmd_classify(cfg: RunConfig) -> Outcome:
    f = _polys(cfg)[0]
    c = classify_on_mn(f, cfg.n, cfg.budget, cfg.seed, exhaustive=cfg.exhaustive)
    result = {"kind": c.kind.value, "confidence": c.confidence, "trials": c.trials,
              "witness": _witness(c.witness) if c.witness is not None else None}
    return Outcome(c.kind.value, 1 if c.kind == ImageKind.IDENTITY else 0, result)


def cmd_capelli_dep(cfg: RunConfig) -> Outcome:
    fs = _polys(cfg)
    d = capelli_dependence_test(fs, cfg.n, cfg.budget, cfg.seed, exhaustive=cfg.exhaustive)
    result: Dict[str, Any] = {"dependent": d.dependent, "confidence": d.confidence, "trials": d.trials}
    if not d.dependent:
        result.update(
            rank=d.rank,
            point=[matrix_to_model(a).model_dump() for a in d.point.args],
            ys=[matrix_to_model(a).model_dump() for a in d.ys],
            capelli_value=matrix_to_model(d.capelli_value).model_dump(),
        )
    return Outcome("dependent" if d.dependent else "independent", 1 if d.dependent else 0, result)


def cmd_power_index(cfg: RunConfig) -> Outcome:
    f = _polys(cfg)[0]
    pi = power_dependence_index(f, cfg.n, cfg.budget, cfg.seed)
    return Outcome("ok", 0, {"k": pi.k, "tail_independent": pi.tail_independent})


def cmd_find_invertible(cfg: RunConfig) -> Outcome:
    f = _polys(cfg)[0]
    w = find_invertible_witness(f, cfg.n, cfg.budget, cfg.seed)
    return Outcome("found", 0, {**_witness(w), "det": str(w.value.det())})


def cmd_find_spectrum(cfg: RunConfig) -> Outcome:
    f = _polys(cfg)[0]
    w = find_split_spectrum_witness(f, cfg.n, cfg.budget, cfg.seed)
    spectrum = rational_spectrum(w.value)
    roots = [[str(r), k] for r, k in spectrum.roots]
    return Outcome("found", 0, {**_witness(w), "spectrum": roots})


def cmd_decompose_sq0(cfg: RunConfig) -> Outcome:
    split = traceless_four_square_zero(_matrix(cfg.target, "--target"))
    model = square_zero_sum_to_model(split)
    return Outcome("ok", 0, {"parts": len(split.parts), "verified": split.verify()}, model.model_dump_json(indent=2))


def cmd_commutator_realize(cfg: RunConfig) -> Outcome:
    form = commutator_realization(_matrix(cfg.target, "--target"))
    model = commutator_form_to_model(form)
    return Outcome("ok", 0, {"verified": form.verify()}, model.model_dump_json(indent=2))


def cmd_sq0_cert(cfg: RunConfig) -> Outcome:
    s = _matrix(cfg.target, "--target")
    f = _polys(cfg)[0].over(s.field)
    return _certified(target_square_zero_certificate(f, s, cfg.budget, cfg.seed))


def cmd_waring(cfg: RunConfig) -> Outcome:
    x = _matrix(cfg.target, "--target")
    f = _polys(cfg)[0].over(x.field)
    if cfg.z:
        z = _matrix(cfg.z, "--z")
        return _certified(commutator_via_image(f, x, z, cfg.budget, cfg.seed))
    return _certified(traceless_waring_certificate(f, x, cfg.budget, cfg.seed))


def cmd_nine(cfg: RunConfig) -> Outcome:
    x = _matrix(cfg.target, "--target")
    f = _polys(cfg)[0].over(x.field)
    return _certified(linear_combination_nine(f, x, cfg.budget, cfg.seed))


def cmd_bound(cfg: RunConfig) -> Outcome:
    r = bound_formula(cfg.k, cfg.regime)
    return Outcome("ok", 0, {"k": r.k, "formula": r.formula, "regime": r.regime,
                             "constant": r.constant, "hypothesis": r.hypothesis})


def cmd_verify(cfg: RunConfig) -> Outcome:
    if not cfg.cert:
        raise UsageError("--cert is required")
    try:
        cert = load_certificate(_read(cfg.cert))
    except MalformedCertificateError as e:
        return Outcome("invalid", 1, {"reason": "malformed certificate", "detail": str(e)})
    verdict = verify_certificate(cert)
    return Outcome("valid" if verdict.valid else "invalid", 0 if verdict.valid else 1, {"reason": verdict.reason})


def cmd_flow_demo(cfg: RunConfig) -> Outcome:
    if cfg.n < 1:
        raise UsageError(f"--n must be at least 1, got {cfg.n}")
    d, x = random_flow_inputs(cfg.n, cfg.seed)
    report = conjugation_flow_demo(d, x, FLOW_LAMBDAS)
    return Outcome("ok", 0, {"lambdas": list(report.lambdas), "residuals": list(report.residuals),
                             "slope": report.slope})


COMMANDS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "parse": cmd_parse,
    "classify": cmd_classify,
    "capelli-dep": cmd_capelli_dep,
    "power-index": cmd_power_index,
    "find-invertible": cmd_find_invertible,
    "find-spectrum": cmd_find_spectrum,
    "decompose-sq0": cmd_decompose_sq0,
    "commutator-realize": cmd_commutator_realize,
    "sq0-cert": cmd_sq0_cert,
    "waring": cmd_waring,
    "nine": cmd_nine,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "flow-demo": cmd_flow_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="ncwaring", description="Exact Waring certificates for polynomial images in M_n.")
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("--poly", dest="polys", action="append", default=[], help="polynomial text or @file")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--field", default="Q", help="Q or Fp:<p>")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--target", help="@file with a matrix")
    p.add_argument("--z", help="@file with a second matrix; waring then certifies [target, z]")
    p.add_argument("--cert", help="@file with a certificate")
    p.add_argument("--out", help="@file for the structured result")
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--regime", default="general")
    p.add_argument("--exhaustive", action="store_true", help="enumerate all points (small prime fields)")
    return p


def _emit(cfg: RunConfig, outcome: Outcome) -> None:
    run = RunResult(command=cfg.command, seed=cfg.seed, budget=cfg.budget,
                    status=outcome.status, exit_code=outcome.exit_code, result=outcome.result)
    if cfg.out and (outcome.exit_code == 0 or outcome.artifact is None):
        body = outcome.artifact if outcome.artifact is not None else run.model_dump_json(indent=2)
        path = cfg.out[1:] if cfg.out.startswith("@") else cfg.out
        with open(path, "w", encoding="utf-8") as f:
            f.write(body + "\n")
    if cfg.format == "structured":
        print(run.model_dump_json(indent=2))
        return
    print(outcome.status)
    print(f"seed={cfg.seed} budget={cfg.budget}")
    for key, value in outcome.result.items():
        if isinstance(value, (str, int, float, bool)) or value is None:
            print(f"{key}: {value}")


def run(cfg: RunConfig) -> int:
    try:
        outcome = COMMANDS[cfg.command](cfg)
    except IdentityPolynomialError as e:
        outcome = Outcome("identity", 1, {"error": str(e)})
    except SearchFailure as e:
        outcome = Outcome("search-failure", 2, {"error": str(e)})
    except (UsageError, PolySyntaxError, PreconditionError, FieldMismatchError, EnumerationCapError, OSError) as e:
        outcome = Outcome("error", 3, {"error": str(e)})
    if "error" in outcome.result and cfg.format == "text":
        print(f"error: {outcome.result['error']}", file=sys.stderr)
    _emit(cfg, outcome)
    return outcome.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(**vars(args))
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 3
    timings: Dict[str, Any] = {}
    with timer(timings, cfg.command):
        code = run(cfg)
    if LOG_TIMINGS:
        log_event(cfg.command, {**timings, "seed": cfg.seed, "budget": cfg.budget, "exit_code": code,
                                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "rss_mb": rss_mb()})
    return code


if __name__ == "__main__":
    sys.exit(main())
