"""Command-line interface: JSON task files in, JSON reports out."""
from __future__ import annotations

import argparse
import json
import sys

from . import schema
from .errors import NilcspError, ValidationError, VerificationFailed
from .pcgroup import PcPresentation, collect, consistency_check, lcs_layers, normal_closure, subgroup

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4


class CounterexampleFound(VerificationFailed):
    code = "counterexample"

    def __init__(self, word):
        self.word = word
        super().__init__(f"certificate refuted by word {word}")


# ---------------------------------------------------------------------------
# input handling


def _read_json(path: str | None):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError("--input", str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("", f"invalid JSON: {exc}") from None


def load_presentation(ref, path: str = "presentation") -> PcPresentation:
    from .fixtures import named

    if isinstance(ref, str):
        try:
            return named(ref)
        except (KeyError, ValueError) as exc:
            raise ValidationError(path, f"unknown fixture {ref!r}") from exc
    pres = PcPresentation.from_json(ref)
    problems = pres.structural_problems()
    if problems:
        raise ValidationError(path, problems[0])
    return pres


def load_task(data) -> dict:
    """Validate a task file; a bare presentation is accepted as shorthand."""
    if isinstance(data, dict) and "generators" in data and "presentation" not in data:
        schema.validate(data, schema.PRESENTATION)
        data = {"presentation": data}
    else:
        schema.validate(data, schema.TASK)
    return data


def parse_word(pres: PcPresentation, word, path: str) -> list:
    for i, (name, _) in enumerate(word):
        if name not in pres.index:
            raise ValidationError(f"{path}[{i}]", f"unknown generator {name!r}")
    return [tuple(letter) for letter in word]


def parse_elements(pres, words, path):
    return [collect(pres, parse_word(pres, w, f"{path}[{i}]")) for i, w in enumerate(words)]


def _require_consistent(pres):
    problems = consistency_check(pres)
    if problems:
        raise ValidationError("presentation", f"inconsistent presentation: {problems[0]}")


def _modulus(args, params):
    m = args.modulus if args.modulus is not None else params.get("modulus")
    if m is None:
        raise ValidationError("params.modulus", "a modulus is required (--modulus or params.modulus)")
    if m < 1:
        raise ValidationError("--modulus", "modulus must be positive")
    return m


def _task_pres(args):
    task = load_task(_read_json(args.input))
    pres = load_presentation(task["presentation"])
    return task, pres, task.get("params", {})


# ---------------------------------------------------------------------------
# commands; each returns a JSON-ready object


def cmd_normalize(args):
    task, pres, params = _task_pres(args)
    forms = [x.word() for x in parse_elements(pres, params.get("words", []), "params.words")]
    return {"presentation": pres.to_json(), "normal_forms": [[list(l) for l in w] for w in forms]}


def cmd_consistency(args):
    task, pres, params = _task_pres(args)
    problems = consistency_check(pres)
    out = {"consistent": not problems, "problems": problems}
    if problems:
        return out, EXIT_VERIFY
    return out


def cmd_lcs(args):
    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    return {"layers": [lay.group.describe() for lay in lcs_layers(pres)]}


def cmd_johnson_table(args):
    from .johnson import johnson_table

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    return {"class": pres.nilpotency_class, "levels": johnson_table(pres)}


def _sub_json(sub):
    return [[list(l) for l in w] for w in sub.to_json()]


def cmd_seeing_bottom(args):
    from .certify import seeing_bottom

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    m = _modulus(args, params)
    sb = seeing_bottom(pres, m)
    return {"modulus": m, "L": _sub_json(sb.L), "index": sb.L.index(),
            "steps": [[name, k] for name, k in sb.steps], "bottom_meet": _sub_json(sb.bottom_meet())}


def cmd_carve_centre(args):
    from .certify import carve_centre

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    if "L" not in params:
        raise ValidationError("params.L", "carve-centre needs generators of a finite-index subgroup")
    L = subgroup(pres, parse_elements(pres, params["L"], "params.L"))
    if L.index() is None:
        raise ValidationError("params.L", "subgroup does not have finite index")
    transcript = []
    kw = {"size_budget": args.budget} if args.budget else {}
    r = carve_centre(pres, L, args.factorial_exact, transcript=transcript, **kw)
    return {"quotient": r.to_json(), "transcript": transcript}


def _quotient_from(pres, words, path):
    from .morphism import FiniteQuotient

    N = normal_closure(pres, parse_elements(pres, words, path))
    if N.index() is None:
        raise ValidationError(path, "normal closure does not have finite index")
    return FiniteQuotient(pres, N)


def cmd_fibre_product(args):
    from .certify import fibre_product

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    for key in ("q", "r"):
        if key not in params:
            raise ValidationError(f"params.{key}", "kernel generators are required")
    q = _quotient_from(pres, params["q"], "params.q")
    r = _quotient_from(pres, params["r"], "params.r")
    s = fibre_product(q, r)
    return {"q_order": q.order(), "r_order": r.order(), "quotient": s.to_json()}


def cmd_lastterm_cert(args):
    from .certify import lastterm_certificate

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    m = _modulus(args, params)
    transcript = []
    kw = {"size_budget": args.budget} if args.budget else {}
    r = lastterm_certificate(pres, m, args.factorial_exact, transcript=transcript, **kw)
    return {"modulus": m, "quotient": r.to_json(), "transcript": transcript}


def cmd_certify(args):
    from .certify import OuterSubgroupSpec, certify
    from .morphism import FiniteQuotient

    task = load_task(_read_json(args.input))
    pres = load_presentation(task["presentation"])
    _require_consistent(pres)
    if "labeling" not in task:
        raise ValidationError("labeling", "certify needs a labeling")
    data = dict(task, presentation=pres.to_json())
    data.pop("params", None)
    for j, aut in enumerate(data.get("generators", [])):
        for key in ("images", "inverse_images"):
            for name, w in aut.get(key, {}).items():
                if name not in pres.index:
                    raise ValidationError(f"generators[{j}].{key}.{name}", f"unknown generator {name!r}")
                parse_word(pres, w, f"generators[{j}].{key}.{name}")
    spec = OuterSubgroupSpec.from_json(data)
    params = task.get("params", {})
    provided = None
    if "provided" in params:
        provided = FiniteQuotient(pres, normal_closure(pres, parse_elements(pres, params["provided"],
                                                                            "params.provided")))
    kw = {"size_budget": args.budget} if args.budget else {}
    m = args.modulus if args.modulus is not None else params.get("modulus")
    cert = certify(spec, params.get("strategy", "auto"), provided, m, args.factorial_exact, **kw)
    return cert.to_json()


def cmd_check_cert(args):
    from .check import check_certificate_data

    data = _read_json(args.input)
    schema.validate(data, schema.CERTIFICATE)
    load_presentation(data["claim"]["presentation"], "claim.presentation")
    load_presentation(data["quotient"]["presentation"], "quotient.presentation")
    kw = {"budget": args.budget} if args.budget else {}
    outcome = check_certificate_data(data, **kw)
    if not outcome.verified:
        return outcome.to_json(), EXIT_VERIFY
    return outcome.to_json()


def _surface_task(args):
    from .surface import CurveClass, SurfaceData

    data = _read_json(args.input)
    schema.validate(data, schema.SURFACE)
    s = SurfaceData(data["genus"], data.get("punctures", 0))
    curves = []
    for i, c in enumerate(data.get("curves", [])):
        if c["type"] == "nonseparating" and len(c["vector"]) != s.rank:
            raise ValidationError(f"curves[{i}].vector", f"expected {s.rank} entries")
        curves.append((CurveClass.from_json(c), c.get("multiplicity", 1)))
    return data, s, curves


def cmd_surface_twist_matrix(args):
    from .surface import is_symplectic, transvection

    data, s, curves = _surface_task(args)
    out = []
    for c, k in curves:
        t = transvection(s, c, k)
        out.append({"curve": c.to_json(), "multiplicity": k, "matrix": t.tolist(),
                    "symplectic": is_symplectic(s, t)})
    return {"genus": s.genus, "basis": s.basis_names(), "twists": out}


def cmd_surface_witness(args):
    from .surface import MultitwistGroup, in_basis, multitwist_witness, unitriangular_basis

    data, s, curves = _surface_task(args)
    group = MultitwistGroup(s, curves)
    gamma = data.get("gamma") or [[int(i == j) for j in range(len(curves))] for i in range(len(curves))]
    for i, v in enumerate(gamma):
        if len(v) != len(curves):
            raise ValidationError(f"gamma[{i}]", f"expected {len(curves)} exponents")
    w = multitwist_witness(group, gamma)
    basis = unitriangular_basis(group)
    return {"modulus": w.modulus, "quotient": w.quotient, "image_rank": w.image_rank, "index": w.index,
            "basis": basis.tolist(), "in_basis": [in_basis(basis, t).tolist() for t in group.matrices()]}


def cmd_surface_class2(args):
    from .surface import class2_surface_group, layer_ranks

    data = _read_json(args.input)
    schema.validate(data, schema.SURFACE)
    pres = class2_surface_group(data["genus"])
    return {"genus": data["genus"], "layers": layer_ranks(pres), "presentation": pres.to_json()}


def cmd_surface_theta(args):
    from .surface import expected_cover_rank, theta_hom, theta_kernel

    data, s, curves = _surface_task(args)
    d = args.degree if args.degree is not None else data.get("d")
    if d is None:
        raise ValidationError("d", "a covering degree is required (--degree or d)")
    theta = theta_hom(s, [c for c, _ in curves], d)
    ker = theta_kernel(s, theta)
    return {"genus": s.genus, "degree": d, "values": list(theta.values),
            "schreier_generators": len(ker.schreier), "abelianization": ker.abelianization.describe(),
            "rank": ker.rank, "expected_rank": expected_cover_rank(s.genus, d)}


def cmd_oracle_enumerate(args):
    from .oracle import enumerate_group

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    t = enumerate_group(pres, args.budget) if args.budget else enumerate_group(pres)
    return {"order": t.order}


def cmd_oracle_out(args):
    from .oracle import out_report

    task, pres, params = _task_pres(args)
    _require_consistent(pres)
    return out_report(pres, args.budget) if args.budget else out_report(pres)


COMMANDS = {
    "normalize": cmd_normalize,
    "consistency": cmd_consistency,
    "lcs": cmd_lcs,
    "johnson-table": cmd_johnson_table,
    "seeing-bottom": cmd_seeing_bottom,
    "carve-centre": cmd_carve_centre,
    "fibre-product": cmd_fibre_product,
    "lastterm-cert": cmd_lastterm_cert,
    "certify": cmd_certify,
    "check-cert": cmd_check_cert,
}

GROUPS = {
    "surface": {
        "twist-matrix": cmd_surface_twist_matrix,
        "witness": cmd_surface_witness,
        "class2": cmd_surface_class2,
        "theta": cmd_surface_theta,
    },
    "oracle": {"enumerate": cmd_oracle_enumerate, "out": cmd_oracle_out},
}


# ---------------------------------------------------------------------------
# output


def render_text(command: str, obj) -> str:
    if command == "lcs":
        return "layers: " + ", ".join(obj["layers"])
    if command == "check-cert":
        if obj["result"] == "verified":
            return f"verified ({obj['explored']} states)"
        return f"counterexample: {obj['word']}"
    if command == "consistency":
        return "consistent" if obj["consistent"] else "\n".join(["inconsistent"] + obj["problems"])
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in obj.items())
    return json.dumps(obj)


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _report_error(exc: Exception, code: int):
    payload = {"error": getattr(exc, "code", "error"), "exit": code, "message": str(exc)}
    if isinstance(exc, ValidationError):
        payload["path"] = exc.path
    if isinstance(exc, CounterexampleFound):
        payload["word"] = exc.word
    sys.stderr.write(json.dumps(payload) + "\n")


def _exit_code(exc: Exception) -> int:
    code = getattr(exc, "exit_code", 1)
    if code == 1 and isinstance(exc, ValueError):
        return EXIT_VALIDATION
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", default="-", help="task file, or - for stdin")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--modulus", type=int, default=None)
    common.add_argument("--degree", type=int, default=None)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--factorial-exact", action="store_true")
    common.add_argument("--seed", type=int, default=None, help="accepted for reproducible test runs")

    parser = argparse.ArgumentParser(prog="nilcsp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    for group, cmds in GROUPS.items():
        gp = sub.add_parser(group)
        gsub = gp.add_subparsers(dest="action", required=True)
        for name in cmds:
            gsub.add_parser(name, parents=[common])
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    fn = COMMANDS.get(args.command) or GROUPS[args.command][args.action]
    label = args.command if args.command in COMMANDS else f"{args.command} {args.action}"
    try:
        result = fn(args)
    except NilcspError as exc:
        code = _exit_code(exc)
        _report_error(exc, code)
        return code
    except ValueError as exc:
        _report_error(exc, EXIT_VALIDATION)
        return EXIT_VALIDATION
    code = EXIT_OK
    if isinstance(result, tuple):
        result, code = result
    text = render_text(label, result) if args.format == "text" else json.dumps(result, indent=2)
    _emit(text, args.output)
    if code == EXIT_VERIFY:
        if label == "check-cert":
            exc = CounterexampleFound(result["word"])
        else:
            exc = VerificationFailed(f"{label} failed")
        _report_error(exc, code)
    return code


def main() -> None:
    sys.exit(run())
