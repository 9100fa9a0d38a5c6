"""Command-line front end.

Exit codes: 0 success, 1 semantic findings, 2 input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis
from .construction import build, verify_model
from .documents import (
    MODEL_FORMAT,
    DocumentError,
    dumps,
    loads,
    model_from_doc,
    model_to_doc,
    params_from_doc,
    record_to_doc,
    system_from_doc,
)
from .errors import FoldcohError
from .surgery import (
    RoundFoldDescriptor,
    apply_atss,
    apply_pontryagin,
    apply_point_atss,
    base_special_generic,
    pipeline_equivalence,
    round_fold_descriptor,
    validate_normal_system,
    validate_round_fold,
)

OK, FINDINGS, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _read(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except DocumentError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path, doc: dict) -> None:
    text = dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_model(path, theorem: int = 5):
    """A model report, or a params file built with ``theorem``."""
    doc = _read(path)
    try:
        if doc.get("format") == MODEL_FORMAT:
            return model_from_doc(doc)
        return build(theorem, params_from_doc(doc))
    except (DocumentError, FoldcohError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_build(theorem: int, params_path, out_path) -> int:
    doc = _read(params_path)
    try:
        model = build(theorem, params_from_doc(doc))
    except (DocumentError, FoldcohError) as exc:
        raise InputError(f"{params_path}: invalid params: {exc}") from None
    _write(out_path, model_to_doc(model))
    return OK


def cmd_verify(model_path) -> int:
    doc = _read(model_path)
    try:
        model = model_from_doc(doc)
    except (DocumentError, FoldcohError) as exc:
        raise InputError(f"{model_path}: {exc}") from None
    findings = verify_model(model)
    for f in findings:
        print(f)
    if findings:
        return FINDINGS
    print("ok: model verified")
    return OK


def cmd_surgery(pipeline_path, out_path, reference_path=None) -> int:
    doc = _read(pipeline_path)
    try:
        params = params_from_doc({k: v for k, v in doc.items() if k != "pipeline"}) if doc.keys() - {"pipeline"} else None
        pipe = doc.get("pipeline") or {}
        if not isinstance(pipe, dict):
            raise DocumentError("key 'pipeline': expected an object")
        base_doc = pipe.get("base", {})
        m, n = int(base_doc.get("m", 7)), int(base_doc.get("n", 4))
        default_l = [2] * (params.a if params else 0)
        l_list = [int(x) for x in base_doc.get("l_list", default_l)]
        system = system_from_doc(pipe, params)
        point_count = int(pipe.get("point_count", params.bprime if params else 0))
    except (DocumentError, FoldcohError, TypeError, ValueError) as exc:
        raise InputError(f"{pipeline_path}: {exc}") from None
    try:
        record = base_special_generic(l_list, m, n)
    except FoldcohError as exc:
        raise InputError(f"{pipeline_path}: {exc}") from None
    findings = validate_normal_system(system, record)
    if findings:
        for f in findings:
            print(f"validator: {f}")
        return FINDINGS
    try:
        record = apply_atss(record, system)
        record = apply_point_atss(record, point_count)
        p = pipe.get("p", list(params.p) if params else None)
        if p is not None and len(p) == len(record.char.p1):
            record = apply_pontryagin(record, [int(x) for x in p])
    except FoldcohError as exc:
        print(f"surgery: {exc}")
        return FINDINGS
    _write(out_path, record_to_doc(record))
    if reference_path is not None:
        reference = _load_model(reference_path)
        diffs = pipeline_equivalence(record, reference)
        for f in diffs:
            print(f"equivalence: {f}")
        if diffs:
            return FINDINGS
        print("ok: pipeline reproduces the reference model")
    return OK


def _fmt_vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def cmd_analyze(mode: str, paths, bound: int = analysis.DEFAULT_BOUND, coeffs=None, theorem: int = 5) -> int:
    if not paths:
        raise InputError("analyze needs at least one file")
    if mode == "obstruction":
        model = _load_model(paths[0], theorem)
        prov = model.provenance
        if prov is None:
            raise InputError(f"{paths[0]}: model has no provenance, so no parameters to test")
        verdict = analysis.special_generic_obstruction(prov.params, prov.theorem)
        if verdict.obstructed:
            print("obstructed: " + ", ".join(verdict.reasons))
        else:
            print("not obstructed")
        return OK
    model = _load_model(paths[0], theorem)
    if mode == "square":
        if coeffs is None:
            raise InputError("square mode needs --coeffs")
        try:
            sq = analysis.square_of(model, coeffs)
        except FoldcohError as exc:
            raise InputError(str(exc)) from None
        terms = model.ring.as_terms(sq)
        print("square: " + (" + ".join(f"{c}*{k}" for k, c in terms.items()) or "0"))
        return OK
    if mode == "locus":
        rep = analysis.vanishing_locus(model, bound)
        print(f"bound: {bound}")
        print(f"vanishing tuples: {len(rep.vanishing_tuples)}")
        print(f"union of lines: {'true' if rep.union_of_lines else 'false'}")
        print(f"lines: {len(rep.lines)}")
        for v in rep.lines:
            print(f"  line through {_fmt_vec(v)}")
        return OK
    if mode == "isotropy":
        rep = analysis.isotropic_rank_search(model, bound)
        print(f"max isotropic rank {rep.max_rank_found}")
        if rep.witness_pair is not None:
            u, v = rep.witness_pair
            print(f"witness: {_fmt_vec(u)} {_fmt_vec(v)}")
        return OK
    if mode == "compare":
        if len(paths) != 2:
            raise InputError("compare mode needs exactly two files")
        other = _load_model(paths[1], theorem)
        rep = analysis.compare_models(model, other, bound)
        if not rep.distinctions:
            print("no distinctions")
        for d in rep.distinctions:
            print(f"distinct: {d}")
        return OK
    raise InputError(f"unknown mode {mode!r}")


def cmd_roundmap(l: int | None = None, counts=None) -> int:
    if counts is not None:
        desc = RoundFoldDescriptor(tuple(range(1, len(counts))), tuple(counts))
    else:
        if l is None or l < 1:
            raise InputError("roundmap needs --l N with N >= 1")
        desc = round_fold_descriptor(l)
    findings = validate_round_fold(desc)
    print(json.dumps({"l": len(desc.radii), "radii": list(desc.radii),
                      "fiber_counts": list(desc.fiber_counts), "valid": not findings,
                      "findings": findings}, sort_keys=True))
    return FINDINGS if findings else OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foldcoh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a model report from a params file")
    p.add_argument("--theorem", type=int, choices=(1, 5, 6), required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="re-check a model report")
    p.add_argument("model")

    p = sub.add_parser("surgery", help="replay a surgery pipeline")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--reference")
    p.add_argument("--out", default="-")

    p = sub.add_parser("analyze", help="obstructions and isotropy")
    p.add_argument("--mode", required=True, choices=("obstruction", "square", "locus", "isotropy", "compare"))
    p.add_argument("--bound", type=int, default=analysis.DEFAULT_BOUND)
    p.add_argument("--coeffs", type=_int_list)
    p.add_argument("--theorem", type=int, choices=(1, 5, 6), default=5,
                   help="builder used when a params file is given instead of a model report")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("roundmap", help="round fold map descriptor")
    p.add_argument("--l", type=int)
    p.add_argument("--counts", type=_int_list, help="validate an explicit fiber-count sequence")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        if args.command == "build":
            return cmd_build(args.theorem, args.params, args.out)
        if args.command == "verify":
            return cmd_verify(args.model)
        if args.command == "surgery":
            return cmd_surgery(args.pipeline, args.out, args.reference)
        if args.command == "analyze":
            if args.bound < 1:
                raise InputError("--bound must be at least 1")
            return cmd_analyze(args.mode, args.files, args.bound, args.coeffs, args.theorem)
        if args.command == "roundmap":
            return cmd_roundmap(args.l, args.counts)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
