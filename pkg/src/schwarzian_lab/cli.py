"""Command-line front end.

Every command reads a problem spec (``--spec``) and writes JSON to ``--out``
or to standard output.  With ``--out`` a sidecar ``<out>.log`` records the
command, a timestamp and the exit code; the report itself carries no
timestamp, so equal inputs give equal bytes.

Exit codes: 0 success (or a consistent / not-applicable verdict), 1 an
inconsistent verdict or hyperbolic/loxodromic monodromy, 2 invalid input or
I/O failure, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .errors import InputError, NumericalFailure, StructureError
from .monodromy import HYPERBOLIC, LOXODROMIC, PARABOLIC, log_decompose, puncture_monodromy, \
    residue_check
from .norms import norm_report
from .ode import thread_count
from .pipeline import (ProblemSpec, atomic_write, dumps, export_samples, run_pipeline,
                       theorem_a_status)
from .probes import (AnnulusSector, SlitDisc, accumulation_probe, koebe_witness,
                     probe_injectivity)
from .schwarzian import orbifold_lift, orbifold_pushdown, ramified_lift

EXIT_OK, EXIT_FLAG, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("schwarzian_lab")
log.addHandler(logging.NullHandler())


def _spec(args, data=None) -> ProblemSpec:
    if data is None:
        if not args.spec:
            raise InputError("--spec is required")
        try:
            with open(args.spec) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read spec {args.spec}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"spec {args.spec} is not valid JSON: {exc}") from exc
    data = dict(data)
    if getattr(args, "radius", None) is not None:
        data["loop_radius"] = args.radius
    if getattr(args, "surface", None) is not None:
        data["surface"] = args.surface
    if getattr(args, "relative", False):
        data["relative"] = True
    return ProblemSpec.from_json(data)


def _emit(args, payload) -> None:
    text = dumps(payload)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------

def cmd_classify(args) -> int:
    spec = _spec(args)
    rep = puncture_monodromy(spec.field, spec.loop_radius, spec.tolerances)
    _emit(args, {"spec": spec.to_json(), "monodromy": rep.to_json()})
    return EXIT_FLAG if rep.cls in (HYPERBOLIC, LOXODROMIC) else EXIT_OK


def cmd_residue_check(args) -> int:
    spec = _spec(args)
    mono = puncture_monodromy(spec.field, spec.loop_radius, spec.tolerances)
    decomp = res = None
    if mono.cls == PARABOLIC:
        decomp = log_decompose(mono.developing_map, -mono.translation_c, 1.0,
                               spec.loop_radius, tolerances=spec.tolerances)
        res = residue_check(decomp, spec.field, tolerances=spec.tolerances)
    status, reasons, _ = theorem_a_status(mono, decomp, res, spec.xi, spec.tolerances)
    _emit(args, {
        "spec": spec.to_json(),
        "monodromy": mono.to_json(),
        "decomposition": None if decomp is None else decomp.to_json(),
        "residue": None if res is None else res.to_json(),
        "theorem_a_status": status,
        "reasons": reasons,
    })
    if res is not None and res.applicable and not res.agree:
        return EXIT_FLAG
    return EXIT_FLAG if mono.cls in (HYPERBOLIC, LOXODROMIC) else EXIT_OK


def cmd_norms(args) -> int:
    spec = _spec(args)
    target = spec.func if spec.func is not None else spec.xi
    rep = norm_report(target, spec.surface, spec.relative)
    _emit(args, {"spec": spec.to_json(), "norms": rep.to_json()})
    if args.csv:
        export_samples(spec, "norm_density", args.grid or 64, args.csv)
    return EXIT_OK


def cmd_probe(args) -> int:
    spec = _spec(args)
    mode = args.mode or "accumulation"
    mono = puncture_monodromy(spec.field, spec.loop_radius, spec.tolerances)
    dev = mono.developing_map
    if mode == "accumulation":
        v = accumulation_probe(dev, AnnulusSector(), grid_n=args.grid or 9,
                               tolerances=spec.tolerances, max_depth=args.max_depth)
    elif mode == "injectivity":
        v = probe_injectivity(dev, SlitDisc(), grid_n=args.grid or 32)
    elif mode == "koebe":
        if mono.cls != PARABOLIC:
            raise InputError("the Koebe witness needs parabolic monodromy")
        d = log_decompose(dev, -mono.translation_c, 1.0, spec.loop_radius,
                          tolerances=spec.tolerances)
        v = koebe_witness(d.g, d.c, z0=d.z0)
    else:
        raise InputError(f"unknown probe mode {mode!r}")
    _emit(args, {"spec": spec.to_json(), "mode": mode, "monodromy": mono.label,
                 "verdict": v.to_json()})
    return EXIT_OK


def cmd_lift(args) -> int:
    spec = _spec(args)
    mode = args.mode or "ramified"
    k = args.k
    if k is None:
        mono = puncture_monodromy(spec.field, spec.loop_radius, spec.tolerances)
        if mono.order is None:
            raise InputError(f"--k not given and the monodromy ({mono.label}) has no finite order")
        k = mono.order
    if mode == "ramified":
        out = ramified_lift(spec.xi, k)
    elif mode == "lift":
        out = orbifold_lift(spec.xi, k)
    elif mode == "pushdown":
        out = orbifold_pushdown(spec.xi, k)
    else:
        raise InputError(f"unknown lift mode {mode!r}")
    _emit(args, {"spec": spec.to_json(), "mode": mode, "k": int(k), "result": out.to_json(),
                 "valuation": int(out.valuation)})
    return EXIT_OK


def cmd_export(args) -> int:
    spec = _spec(args)
    if not args.out:
        raise InputError("export needs --out")
    n = export_samples(spec, args.mode or "developing", args.grid or 64, args.out)
    log.info("wrote %d rows", n)
    return EXIT_OK


def _analyze_one(data, args):
    spec = _spec(args, data)
    rep = run_pipeline(spec, probes=not args.no_probes)
    return rep.exit_code, rep.to_json()


def _safe(data, args):
    try:
        return _analyze_one(data, args)
    except InputError as exc:
        return EXIT_INPUT, {"error": str(exc), "exit_code": EXIT_INPUT}
    except (NumericalFailure, ArithmeticError) as exc:
        return EXIT_NUMERIC, {"error": str(exc), "exit_code": EXIT_NUMERIC}


def cmd_analyze(args) -> int:
    if args.batch:
        try:
            with open(args.batch) as fh:
                items = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read batch {args.batch}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"batch {args.batch} is not valid JSON: {exc}") from exc
        if isinstance(items, dict):
            items = items.get("specs")
        if not isinstance(items, list) or not items:
            raise InputError("a batch file is a non-empty JSON list of specs")
        if not args.out:
            raise InputError("batch mode needs --out <directory>")
        os.makedirs(args.out, exist_ok=True)
        names = [str(it.get("name") or f"spec_{i:03d}") if isinstance(it, dict)
                 else f"spec_{i:03d}" for i, it in enumerate(items)]
        if len(set(names)) != len(names):
            raise InputError("spec names in a batch must be unique")

        def work(pair):
            name, item = pair
            if not isinstance(item, dict):
                code, payload = EXIT_INPUT, {"error": "spec must be an object",
                                             "exit_code": EXIT_INPUT}
            else:
                code, payload = _safe(item, args)
            atomic_write(os.path.join(args.out, f"{name}.json"), dumps(payload))
            return name, code

        with ThreadPoolExecutor(max_workers=max(1, min(thread_count(), len(items)))) as ex:
            results = list(ex.map(work, zip(names, items)))
        summary = {name: code for name, code in results}
        atomic_write(os.path.join(args.out, "summary.json"), dumps(summary))
        for name, code in results:
            log.info("%s exit %d", name, code)
        return max(code for _, code in results)
    code, payload = _analyze_one(None, args)
    _emit(args, payload)
    return code


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schwarzian-lab",
                                description="Local analysis of singular projective structures "
                                            "at a puncture.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, surface=False):
        sp.add_argument("--spec", help="problem spec JSON file")
        sp.add_argument("--radius", type=float, help="loop radius around the puncture")
        sp.add_argument("--out", help="output file (directory for --batch)")
        if surface:
            sp.add_argument("--surface", choices=["disc", "punctured-disc", "punctured_disc"])
            sp.add_argument("--relative", action="store_true",
                            help="norm xi against the base structure of the surface")
        return sp

    common(sub.add_parser("classify", help="local monodromy and its conjugacy class"))
    common(sub.add_parser("residue-check", help="logarithmic decomposition and residue law"))
    sp = common(sub.add_parser("norms", help="hyperbolic sup norm and area norm"), surface=True)
    sp.add_argument("--csv", help="also write the norm density on a grid to this CSV")
    sp.add_argument("--grid", type=int, help="CSV grid size (default 64)")
    sp = common(sub.add_parser("probe", help="accumulation, injectivity or Koebe probes"))
    sp.add_argument("--mode", choices=["accumulation", "injectivity", "koebe"])
    sp.add_argument("--grid", type=int, help="sampling grid size")
    sp.add_argument("--max-depth", type=int, default=160, dest="max_depth")
    sp = common(sub.add_parser("lift", help="orbifold lift, pushdown or ramified lift"))
    sp.add_argument("--mode", choices=["ramified", "lift", "pushdown"])
    sp.add_argument("--k", type=int, help="orbifold order (default: the monodromy order)")
    sp = common(sub.add_parser("export", help="CSV samples of the developing map or density"),
                surface=True)
    sp.add_argument("--mode", choices=["developing", "norm_density", "norm-density"])
    sp.add_argument("--grid", type=int, help="grid size n (n*n rows, default 64)")
    sp = common(sub.add_parser("analyze", help="full pipeline, one spec or a batch"),
                surface=True)
    sp.add_argument("--batch", help="JSON list of specs, processed concurrently")
    sp.add_argument("--no-probes", action="store_true", dest="no_probes")
    return p


COMMANDS = {
    "classify": cmd_classify,
    "residue-check": cmd_residue_check,
    "norms": cmd_norms,
    "probe": cmd_probe,
    "lift": cmd_lift,
    "export": cmd_export,
    "analyze": cmd_analyze,
}


def _sidecar(args):
    if not getattr(args, "out", None):
        return None
    target = args.out.rstrip(os.sep)
    if os.path.isdir(target):
        target = os.path.join(target, "run")
    try:
        h = logging.FileHandler(target + ".log", mode="w")
    except OSError:
        return None
    h.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.addHandler(h)
    log.setLevel(logging.INFO)
    return h


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _sidecar(args)
    log.info("command %s argv %s", args.command, list(sys.argv[1:] if argv is None else argv))
    try:
        code = COMMANDS[args.command](args)
    except (InputError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        log.error("input error: %s", exc)
        code = EXIT_INPUT
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        log.error("numerical failure: %s", exc)
        code = EXIT_NUMERIC
    log.info("exit %d", code)
    if handler is not None:
        log.removeHandler(handler)
        handler.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
