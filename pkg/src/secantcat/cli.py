"""Command-line front end and batch runner.

Every command builds a TaskSpec, runs it, and prints one certificate as a
single JSON line.  Suites are files with one TaskSpec JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources

from secantcat.certificate import INCONCLUSIVE, Certificate
from secantcat.errors import BudgetExceeded, InvalidSpec, SecantcatError
from secantcat.exactpoly import GF, QQ

KINDS = ("CheckDiagonal", "MapPoly", "SecantVerify", "Rank3Veronese", "Rank3Ideal", "ProductTriple")

# required and optional integer parameters per kind
_PARAMS = {
    "CheckDiagonal": ({"n", "d"}, {"dmax"}),
    "MapPoly": ({"n", "d", "ell", "emax"}, {"D"}),
    "ProductTriple": ({"n"}, {"dmax"}),
    "SecantVerify": ({"model", "k"}, {"dega", "degb", "n", "d1", "d2"}),
    "Rank3Veronese": ({"n"}, set()),
    "Rank3Ideal": ({"model"}, {"dega", "degb", "n"}),
}

EXIT_INVALID = 64
EXIT_ERROR = 1


@dataclass
class TaskSpec:
    kind: str
    params: dict = field(default_factory=dict)
    budget: dict = field(default_factory=lambda: {"maxPairs": None, "wallClockSeconds": None})
    mode: dict = field(default_factory=lambda: {"screen": None, "confirm": True})
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data) -> "TaskSpec":
        if not isinstance(data, dict):
            raise InvalidSpec("task must be a JSON object")
        unknown = set(data) - {"kind", "params", "budget", "mode", "seed"}
        if unknown:
            raise InvalidSpec(f"unknown task fields {sorted(unknown)}")
        spec = cls(kind=data.get("kind"), params=dict(data.get("params") or {}), seed=data.get("seed", 0))
        spec.budget.update(data.get("budget") or {})
        spec.mode.update(data.get("mode") or {})
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "TaskSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"bad JSON: {exc}") from None
        return cls.from_dict(data)

    def validate(self) -> "TaskSpec":
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        required, optional = _PARAMS[self.kind]
        missing = required - set(self.params)
        if missing:
            raise InvalidSpec(f"{self.kind} needs {sorted(missing)}")
        extra = set(self.params) - required - optional
        if extra:
            raise InvalidSpec(f"{self.kind} does not take {sorted(extra)}")
        for key, value in self.params.items():
            if key == "model":
                if value not in ("p1", "veronese"):
                    raise InvalidSpec(f"unknown model {value!r}")
            elif value is not None and (not _is_int(value) or value < 0):
                raise InvalidSpec(f"parameter {key} must be a nonnegative integer")
        if set(self.budget) - {"maxPairs", "wallClockSeconds"}:
            raise InvalidSpec("budget takes maxPairs and wallClockSeconds")
        mp, wc = self.budget.get("maxPairs"), self.budget.get("wallClockSeconds")
        if mp is not None and (not _is_int(mp) or mp < 1):
            raise InvalidSpec("maxPairs must be a positive integer")
        if wc is not None and (isinstance(wc, bool) or not isinstance(wc, (int, float)) or wc <= 0):
            raise InvalidSpec("wallClockSeconds must be positive")
        if set(self.mode) - {"screen", "confirm"}:
            raise InvalidSpec("mode takes screen and confirm")
        screen = self.mode.get("screen")
        if screen is not None:
            if not _is_int(screen):
                raise InvalidSpec("screen must be a prime")
            try:
                GF(screen)
            except ValueError as exc:
                raise InvalidSpec(str(exc)) from None
        if not isinstance(self.mode.get("confirm"), bool):
            raise InvalidSpec("confirm must be a boolean")
        if not self.mode["confirm"] and screen is None:
            raise InvalidSpec("confirm=false needs a screening prime")
        if not _is_int(self.seed):
            raise InvalidSpec("seed must be an integer")
        self._check_kind()
        return self

    def _check_kind(self):
        p = self.params
        if self.kind in ("CheckDiagonal", "MapPoly", "ProductTriple", "Rank3Veronese") and p["n"] < 1:
            raise InvalidSpec("n must be at least 1")
        if self.kind in ("CheckDiagonal", "MapPoly") and p["d"] < 1:
            raise InvalidSpec("d must be at least 1")
        if self.kind == "MapPoly" and p["ell"] < 1:
            raise InvalidSpec("ell must be at least 1")
        if self.kind == "SecantVerify":
            need = {"dega", "degb"} if p["model"] == "p1" else {"n", "d1", "d2"}
            if not need <= {k for k, v in p.items() if v is not None}:
                raise InvalidSpec(f"model {p['model']} needs {sorted(need)}")
        if self.kind == "Rank3Ideal":
            need = {"dega", "degb"} if p["model"] == "p1" else {"n"}
            if not need <= {k for k, v in p.items() if v is not None}:
                raise InvalidSpec(f"model {p['model']} needs {sorted(need)}")
            if p["model"] == "veronese" and p["n"] < 1:
                raise InvalidSpec("n must be at least 1")


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


# ---------------------------------------------------------------------------
# running tasks


class _WallClock:
    """SIGALRM-based limit; a no-op off the main thread or without SIGALRM."""

    def __init__(self, seconds):
        self.seconds = seconds
        self.armed = False

    def _fire(self, signum, frame):
        raise BudgetExceeded(None, f"wall clock budget of {self.seconds}s exhausted")

    def __enter__(self):
        if (self.seconds and hasattr(signal, "setitimer")
                and threading.current_thread() is threading.main_thread()):
            self._old = signal.signal(signal.SIGALRM, self._fire)
            signal.setitimer(signal.ITIMER_REAL, self.seconds)
            self.armed = True
        return self

    def __exit__(self, *exc):
        if self.armed:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, self._old)
        return False


def _screened(spec: TaskSpec, build):
    """Run ``build(domain)`` over GF(p) when screening, then over QQ when
    confirming; the certified verdicts come from the last run."""
    screen, confirm = spec.mode["screen"], spec.mode["confirm"]
    screened = None
    if screen is not None:
        screened = build(GF(screen))
    if confirm:
        cert = build(QQ)
        if screened is not None:
            cert.details["screen"] = {"mode": f"FP:{screen}", "verdicts": screened.verdicts}
        return cert
    return screened


def _dispatch(spec: TaskSpec, export: str | None = None) -> Certificate:
    from secantcat import multisym, rank3, secants, sections

    p, mp = spec.params, spec.budget.get("maxPairs")
    if spec.kind == "CheckDiagonal":
        return _screened(spec, lambda dom: multisym.verify_Jd_equals_diagonal(
            multisym.ConfigRing(p["n"], p["d"], dom), p.get("dmax"), max_pairs=mp))
    if spec.kind == "ProductTriple":
        return _screened(spec, lambda dom: multisym.verify_product_triple(
            multisym.ConfigRing(p["n"], 3, dom), p.get("dmax"), max_pairs=mp))
    if spec.kind == "MapPoly":
        return _screened(spec, lambda dom: multisym.verify_mappoly(
            multisym.ConfigRing(p["n"], p["d"], dom), p["ell"], p["emax"], p.get("D")))
    if spec.kind == "SecantVerify":
        if p["model"] == "p1":
            model = sections.model_p1(p["dega"], p["degb"])
        else:
            model = sections.model_veronese(p["n"], p["d1"], p["d2"])
        if min(model.dimA, model.dimB) < p["k"] + 2:
            raise InvalidSpec(f"catalecticant too small for k={p['k']}")
        return secants.verify_determinantal(model, p["k"], screen_mod=spec.mode["screen"],
                                            max_pairs=mp, confirm=spec.mode["confirm"])
    if spec.kind in ("Rank3Veronese", "Rank3Ideal"):
        if not spec.mode["confirm"]:
            raise InvalidSpec("quadric ranks are certified over QQ only")
        if spec.kind == "Rank3Veronese" or p["model"] == "veronese":
            cert, fam = rank3.veronese_certificate(p["n"], spec.seed, with_family=True)
        else:
            cert, fam = rank3.p1_certificate(p["dega"], p["degb"], spec.seed, with_family=True)
        if export:
            _export_family(fam, export)
        return cert
    raise InvalidSpec(f"unknown kind {spec.kind!r}")


def _export_family(fam, path: str):
    from secantcat.groebner import Ideal, write_ideal

    if not fam.members:
        return
    ring = fam.members[0].ring
    comments = [f"{i}: {' '.join(map(str, origin))}" for i, origin in enumerate(fam.provenance)]
    with open(path, "w") as fh:
        fh.write(write_ideal(Ideal(ring, fam.polys()), comments))


def run_task(spec: TaskSpec, export: str | None = None) -> Certificate:
    """Validate and run one task.  Budget exhaustion becomes inconclusive
    verdicts; an invalid spec raises InvalidSpec."""
    spec.validate()
    with _WallClock(spec.budget.get("wallClockSeconds")):
        try:
            cert = _dispatch(spec, export)
        except BudgetExceeded as exc:
            cert = Certificate(spec.kind, dict(spec.params))
            cert.set("run", INCONCLUSIVE, reason=str(exc))
    cert.task = asdict(spec)
    cert.seed = spec.seed
    return cert


def _suite_worker(line: str) -> dict:
    try:
        spec = TaskSpec.from_json(line)
        cert = run_task(spec)
        return {"ok": cert.to_dict(), "exit": cert.exit_code()}
    except InvalidSpec as exc:
        return {"error": f"InvalidSpec: {exc}", "exit": EXIT_INVALID}
    except (SecantcatError, ValueError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}", "exit": EXIT_ERROR}


_SEVERITY = {0: 0, 3: 1, 2: 2, EXIT_ERROR: 3, EXIT_INVALID: 4}


def worst_exit(codes) -> int:
    return max(codes, key=_SEVERITY.__getitem__, default=0)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("SECANTCAT_JOBS", "1")))
    except ValueError:
        return 1


def run_suite(text: str, jobs: int | None = None) -> list[dict]:
    """Run every task line in order.  Each result is ``{"ok": certificate}``
    or ``{"error": message}`` with the task's exit code; results keep input
    order whatever the completion order."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1 or len(lines) <= 1:
        results = [_suite_worker(ln) for ln in lines]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_suite_worker, lines))
    for i, r in enumerate(results, 1):
        r["line"] = i
    return results


def builtin_suite(name: str) -> str:
    return resources.files("secantcat").joinpath("suites", f"{name}.suite").read_text()


# ---------------------------------------------------------------------------
# argument parsing


def _mode(text: str) -> int | None:
    t = text.lower()
    if t == "qq":
        return None
    if t.startswith("fp:"):
        try:
            return int(t[3:])
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"mode must be qq or fp:<p>, got {text!r}")


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--mode", type=_mode, default=None, help="qq or fp:<p> (screen over GF(p) first)")
    parser.add_argument("--no-confirm", action="store_true", help="with fp mode, skip the QQ confirmation")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-pairs", type=int, default=None)
    parser.add_argument("--wall-clock", type=float, default=None, help="seconds")
    parser.add_argument("--out", default=None, help="write the certificate here instead of stdout")
    parser.add_argument("--timings", action="store_true", help="include wall-clock timings in the JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secantcat", description=__doc__)
    top = parser.add_subparsers(dest="group", required=True)

    ms = top.add_parser("multisym").add_subparsers(dest="command", required=True)
    p = ms.add_parser("check-diagonal", help="J_d = I(big diagonal)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dmax", type=int)
    _common(p)
    p = ms.add_parser("mappoly", help="image of the multiplication map by degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--emax", type=int, required=True)
    p.add_argument("--D", type=int)
    _common(p)
    p = ms.add_parser("product-triple", help="triple products of pair diagonals in J_3")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dmax", type=int)
    _common(p)

    sc = top.add_parser("secant").add_subparsers(dest="command", required=True)
    p = sc.add_parser("verify", help="secant ideal versus catalecticant minors")
    p.add_argument("--model", choices=("p1", "veronese"), default="p1")
    p.add_argument("--dega", type=int)
    p.add_argument("--degb", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--screen-mod", type=int, help="same as --mode fp:<p>")
    _common(p)

    r3 = top.add_parser("rank3").add_subparsers(dest="command", required=True)
    p = r3.add_parser("veronese", help="rank-3 quadrics spanning I(P^n, O(2))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--export", help="write the family as an ideal file")
    _common(p)
    p = r3.add_parser("ideal", help="rank-3 generation of I(P^1, O(dega+degb))")
    p.add_argument("--model", choices=("p1", "veronese"), default="p1")
    p.add_argument("--dega", type=int)
    p.add_argument("--degb", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--export", help="write the family as an ideal file")
    _common(p)

    st = top.add_parser("suite").add_subparsers(dest="command", required=True)
    p = st.add_parser("run", help="run a file of TaskSpec lines")
    p.add_argument("path", help="suite file, or the name of a shipped suite (paper-desk)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $SECANTCAT_JOBS or 1)")
    p.add_argument("--out", default=None)
    return parser


def spec_from_args(args) -> TaskSpec:
    keys = {
        ("multisym", "check-diagonal"): ("CheckDiagonal", ["n", "d", "dmax"]),
        ("multisym", "mappoly"): ("MapPoly", ["n", "d", "ell", "emax", "D"]),
        ("multisym", "product-triple"): ("ProductTriple", ["n", "dmax"]),
        ("secant", "verify"): ("SecantVerify", ["model", "dega", "degb", "n", "d1", "d2", "k"]),
        ("rank3", "veronese"): ("Rank3Veronese", ["n"]),
        ("rank3", "ideal"): ("Rank3Ideal", ["model", "dega", "degb", "n"]),
    }
    kind, names = keys[(args.group, args.command)]
    params = {k: getattr(args, k) for k in names if getattr(args, k) is not None}
    screen = args.mode
    if getattr(args, "screen_mod", None) is not None:
        screen = args.screen_mod
    spec = TaskSpec(kind, params, seed=args.seed)
    spec.budget.update(maxPairs=args.max_pairs, wallClockSeconds=args.wall_clock)
    spec.mode.update(screen=screen, confirm=not args.no_confirm)
    return spec.validate()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.group == "suite":
        path = args.path
        try:
            if os.path.exists(path):
                with open(path) as fh:
                    text = fh.read()
            else:
                text = builtin_suite(path)
        except (OSError, FileNotFoundError) as exc:
            print(f"error: cannot read suite {path!r}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        results = run_suite(text, args.jobs)
        lines = []
        for r in results:
            if "ok" in r:
                lines.append(json.dumps(r["ok"], sort_keys=True, separators=(",", ":")))
            else:
                lines.append(json.dumps({"line": r["line"], "error": r["error"]}, sort_keys=True))
        _emit("".join(ln + "\n" for ln in lines), args.out)
        codes = [r["exit"] for r in results]
        summary = {"tasks": len(results), "errors": sum("error" in r for r in results),
                   "exit": worst_exit(codes)}
        if results:
            print(json.dumps({"summary": summary}, sort_keys=True), file=sys.stderr)
        return summary["exit"]
    try:
        spec = spec_from_args(args)
        cert = run_task(spec, export=getattr(args, "export", None))
    except InvalidSpec as exc:
        print(f"error: InvalidSpec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SecantcatError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(cert.to_json(include_timings=args.timings) + "\n", args.out)
    return cert.exit_code()


if __name__ == "__main__":
    sys.exit(main())
