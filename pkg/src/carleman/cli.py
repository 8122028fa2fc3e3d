"""Command-line driver: ``carleman {compute, verify, zeros}``.

Exit status: 0 success, 1 a verification failed (or a computation could not
converge), 2 invalid input.  Errors are reported on stderr as one JSON object
``{"error": <type>, "message": <text>}``.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import checks, geometry, ortho, zeros
from .errors import CarlemanError, ConvergenceError, NoConvergence, NotPositiveDefinite, RankDeficiency

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2
RUNTIME_ERRORS = (ConvergenceError, NoConvergence, NotPositiveDefinite, RankDeficiency)


class InvalidInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


# -- configuration -----------------------------------------------------------


def read_config(path):
    """Parse a plain ``key = value`` file (``#`` comments, blank lines ignored)."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def parse_range(text):
    """``a:b`` (inclusive), ``a:b:step`` or a comma list."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            a, b, step = parts
            out = list(range(a, b + 1, step))
        else:
            out = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-range {text!r}") from exc
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError(f"bad n-range {text!r}")
    return out


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}") from exc


def _domain_args(p):
    p.add_argument("--domain", choices=["disk", "lemniscate"], default="lemniscate")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--R", type=float, default=1.4)
    p.add_argument("--config", help="key=value file; flags override it")


def build_parser():
    parser = _Parser(prog="carleman", description="Carleman orthogonal polynomials and their asymptotics")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute P_0..P_N and write them as JSON")
    _domain_args(c)
    c.add_argument("--N", type=int, default=12)
    c.add_argument("--engine", choices=["cholesky", "arnoldi", "closed_form"], default="cholesky")
    c.add_argument("--bits", type=int, default=None)
    c.add_argument("--out", default="orthonormal_set.json")

    v = sub.add_parser("verify", help="measure an asymptotic claim and write RateReport JSON")
    v.add_argument("check", choices=["carleman", "thm3", "thm1", "thm4b", "kappa"])
    _domain_args(v)
    v.add_argument("--ns", type=parse_range, default=None)
    v.add_argument("--r", type=float, default=None, help="level-curve parameter")
    v.add_argument("--m", type=int, default=64, help="points on the level curve")
    v.add_argument("--z", type=parse_complex, default=None, help="evaluation point (thm1, thm4b)")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--bits", type=int, default=None)
    v.add_argument("--engine", choices=["cholesky", "arnoldi", "closed_form"], default="cholesky")
    v.add_argument("--out-dir", default=".")

    z = sub.add_parser("zeros", help="roots of P_n, counting and equilibrium measures")
    _domain_args(z)
    z.add_argument("--n", type=int, default=59)
    z.add_argument("--bits", type=int, default=None)
    z.add_argument("--engine", choices=["auto", "cholesky", "closed_form"], default="auto")
    z.add_argument("--K", type=int, default=6, help="moments compared in the discrepancy")
    z.add_argument("--m", type=int, default=2048, help="equilibrium-measure sample size")
    z.add_argument("--out-dir", default=".")
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = read_config(args.config)
        except OSError as exc:
            raise InvalidInput(f"cannot read config: {exc}") from exc
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def make_domain(args):
    if args.domain == "disk":
        return geometry.disk(args.R)
    return geometry.lemniscate(args.s, args.R)


# -- output helpers ----------------------------------------------------------


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _progress(label):
    def report(i, total):
        if total and (i == total or i % 10 == 0):
            print(f"{label}: {i}/{total}", file=sys.stderr, flush=True)

    return report


def _engine_set(d, N, engine, bits, label):
    if engine == "cholesky":
        print(f"{label}: {d}, N={N}, cholesky", file=sys.stderr, flush=True)
    return ortho.orthonormal_set(d, N, engine, bits, progress=_progress(label))


# -- commands ----------------------------------------------------------------


def cmd_compute(args):
    d = make_domain(args)
    if args.N < 0:
        raise InvalidInput("N must be non-negative")
    oset = _engine_set(d, args.N, args.engine, args.bits, "compute")
    write_json(args.out, oset.to_dict())
    print("n\tkappa_n")
    for n, k in enumerate(oset.kappas):
        print(f"{n}\t{float(k):.17g}")
    return EXIT_OK


VERIFY_DEFAULTS = {
    "carleman": {"ns": "10:30", "r": 1.0, "tol": 0.15},
    "thm3": {"ns": "8:24", "r": 0.85, "tol": 0.2},
    "thm1": {"ns": "13:22:3", "z": 0.3},
    "thm4b": {"ns": "12:25", "z": 0.3, "tol": 0.2},
    "kappa": {"ns": "1:30", "tol": 0.3},
}


def cmd_verify(args):
    d = make_domain(args)
    defaults = VERIFY_DEFAULTS[args.check]
    ns = args.ns if args.ns is not None else parse_range(defaults["ns"])
    r = args.r if args.r is not None else defaults.get("r")
    z = args.z if args.z is not None else defaults.get("z")
    tol = args.tol if args.tol is not None else defaults.get("tol")
    if args.check in ("thm1", "thm4b") and d.kind != "lemniscate":
        raise InvalidInput(f"verify {args.check} needs a lemniscate domain")
    if args.check == "thm4b":
        ns = [n for n in ns if n % d.s != d.s - 1]  # the interior expansion skips the exact lane
        if not ns:
            raise InvalidInput(f"thm4b needs degrees other than {d.s - 1} mod {d.s}")
    oset = _engine_set(d, max(ns), args.engine, args.bits, f"verify {args.check}")
    reports = {}
    if args.check == "carleman":
        reports["carleman"] = checks.carleman_rate(d, oset, ns, r, args.m, tol)
    elif args.check == "thm3":
        reports["thm3"] = checks.thm3_rate(d, oset, ns, r, args.m, tol)
    elif args.check == "kappa":
        reports["kappa"] = checks.kappa_rate(d, oset, ns, tol)
    elif args.check == "thm1":
        if any(n % d.s != d.s - 2 for n in ns):
            reports["thm1_vanishing"] = checks.thm1_vanishing(d, ns, checks.sample_G_rho(d, 20))
        reports["thm1_trend"] = checks.thm1_trend(d, oset, ns, z)
    elif args.check == "thm4b":
        for l in sorted({n % d.s for n in ns}):
            lane = [n for n in ns if n % d.s == l]
            if len(lane) >= 2:
                reports[f"thm4b_l{l}"] = checks.thm4b_stabilization(d, oset, lane, z, tol)
    os.makedirs(args.out_dir, exist_ok=True)
    all_pass = True
    for name, rep in reports.items():
        write_json(os.path.join(args.out_dir, f"{name}.json"), rep.to_dict())
        status = "PASS" if rep.passed else "FAIL"
        slope = "" if rep.fitted_slope is None else f" slope={rep.fitted_slope:.4f}"
        pred = "" if rep.predicted_slope is None else f" predicted={rep.predicted_slope:.4f}"
        print(f"{name}: {status}{slope}{pred}")
        all_pass &= rep.passed
    return EXIT_OK if all_pass else EXIT_FAILED


def zeros_polynomial(d, n, engine, bits):
    exact = d.kind == "disk" or (n % d.s == d.s - 1)
    if engine == "closed_form" or (engine == "auto" and exact):
        if d.kind == "disk":
            return ortho.closed_form_disk(d, n, bits or 256)
        return ortho.closed_form_lemniscate(d, n, bits or 1024)
    oset = _engine_set(d, n, "cholesky", bits, "zeros")
    return oset[n]


def default_root_bits(d, n, bits):
    if bits is not None:
        return bits
    if d.kind == "lemniscate" and n % d.s == d.s - 1 and n >= d.s:
        return 1024  # roots of multiplicity m are resolved to ~eps**(1/m)
    return 256 if d.kind == "lemniscate" else 128


def cmd_zeros(args):
    d = make_domain(args)
    if args.n < 1:
        raise InvalidInput("n must be at least 1")
    root_bits = default_root_bits(d, args.n, args.bits)
    p = zeros_polynomial(d, args.n, args.engine, args.bits)
    print(f"zeros: Aberth iteration, degree {p.degree}, {root_bits} bits", file=sys.stderr, flush=True)
    zs = zeros.find_roots(p, root_bits)
    nu = zeros.counting_measure(zs)
    os.makedirs(args.out_dir, exist_ok=True)
    zs.to_csv(os.path.join(args.out_dir, f"zeros_n{args.n}.csv"))
    nu.to_csv(os.path.join(args.out_dir, f"counting_n{args.n}.csv"))
    summary = {"schema_version": 1, "domain": d.to_dict(), "n": args.n, "degree": zs.degree,
               "precision_bits": root_bits, "max_residual": float(zs.residuals.max())}
    if d.rho > 0:
        mu = geometry.equilibrium_measure(d, args.m)
        mu.to_csv(os.path.join(args.out_dir, "equilibrium.csv"))
        summary["moment_discrepancy"] = zeros.moment_discrepancy(nu, mu, args.K)
        summary["K"] = args.K
        if d.kind == "lemniscate":
            band = np.abs(np.abs(zs.roots**d.s - 1) - 1)
            summary["max_band_distance"] = float(band.max())
    write_json(os.path.join(args.out_dir, f"zeros_n{args.n}_summary.json"), summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "zeros": cmd_zeros}


def _fail(kind, message, code):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except InvalidInput as exc:
        return _fail("InvalidInput", str(exc), EXIT_INVALID)
    except RUNTIME_ERRORS as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILED)
    except (CarlemanError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_INVALID)
    except OSError as exc:
        return _fail("OSError", str(exc), EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
