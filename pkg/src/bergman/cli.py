"""Command-line front end: ``bergman <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical feasibility or
quadrature rejection, 4 verify-suite failure. Errors are reported on stderr as
a single JSON line ``{"error": kind, "message": text}``.
"""
import argparse
import contextlib
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .berezin import (
    DEFAULT_ANGLES,
    FEASIBILITY_CAP,
    OperatorSource,
    default_radii,
    schur_audit,
    schur_bound,
    sweep_rays,
)
from .errors import ConfigError, DiskDomainError, FeasibilityError, QuadratureError
from .examples import (
    alternating_unitary,
    closed_form_berezin,
    lacunary_projection,
    little_bloch_distance,
    preset,
    preset_names,
)
from .operators import adjoint, hankel_gram, toeplitz_expression, write_matrix_csv
from .quadrature import build_rule
from .space import default_degree, max_degree
from .symbols import PolynomialSymbol, SumOfProducts, expression_from_json, symbol_from_json

EXIT_OK, EXIT_CONFIG, EXIT_FEASIBILITY, EXIT_VERIFY = 0, 2, 3, 4
PROFILE_COLUMNS = ["theta", "r", "cond_b", "cond_c", "cond_d_max", "p2", "p4", "p6", "degree"]
AUDIT_COLUMNS = ["r", "theta", "lhs", "rhs_core", "ratio", "lemma4"]


# ------------------------------------------------------------------ parsing


def parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def parse_radii(text):
    """'a:b:step' (inclusive of b up to rounding) or a comma list."""
    if ":" in text:
        try:
            a, b, step = (float(x) for x in text.split(":"))
        except ValueError as exc:
            raise ConfigError(f"bad radius range {text!r}; expected a:b:step") from exc
        if step <= 0 or b < a:
            raise ConfigError(f"bad radius range {text!r}")
        count = int(np.floor((b - a) / step + 1e-9)) + 1
        return [round(a + k * step, 12) for k in range(count)]
    return parse_floats(text)


def check_radii(radii, allow_zero=False):
    lo_ok = (lambda r: r >= 0.0) if allow_zero else (lambda r: r > 0.0)
    if not radii or not all(lo_ok(r) and r < 1.0 for r in radii):
        raise ConfigError("radii must lie in (0, 1)")
    if max(radii) > FEASIBILITY_CAP:
        raise FeasibilityError(f"radius {max(radii):g} beyond the feasibility cap {FEASIBILITY_CAP:g}")
    return radii


def parse_degree(text, default):
    if text is None:
        return default
    if text == "auto":
        return "auto"
    try:
        N = int(text)
    except ValueError as exc:
        raise ConfigError(f"degree must be an integer or 'auto', got {text!r}") from exc
    if N < 1 or N > max_degree():
        raise ConfigError(f"degree must lie in [1, {max_degree()}]")
    return N


def parse_ps(text):
    ps = [int(p) if float(p).is_integer() else p for p in parse_floats(text)]
    if not set(ps) <= {2, 4, 6} or 6 not in ps:
        raise ConfigError("p-list must be a subset of {2, 4, 6} containing 6")
    return sorted(set(ps))


def _read_json(text_or_path):
    try:
        if os.path.exists(text_or_path):
            with open(text_or_path) as fh:
                return json.load(fh)
        return json.loads(text_or_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON from {text_or_path!r}: {exc}") from exc


class Source:
    """What a command operates on: a Toeplitz expression or a library operator."""

    def __init__(self, label, build, expression=None):
        self.label = label
        self.build = build
        self.expression = expression


def load_source(args):
    if bool(args.expr) == bool(args.preset):
        raise ConfigError("give exactly one of --expr or --preset")
    if args.expr:
        expr = expression_from_json(_read_json(args.expr))
        return Source(expr.label, lambda N, rule=None: toeplitz_expression(expr, N, rule), expr)
    entry = preset(args.preset)
    if entry.is_expression:
        expr = entry.source
        return Source(entry.name, lambda N, rule=None: toeplitz_expression(expr, N, rule), expr)
    return Source(entry.name, lambda N, rule=None: entry.source(N))


# ------------------------------------------------------------------- output


def header(command, **fields):
    parts = [f"bergman {__version__}", f"command={command}"] + [f"{k}={v}" for k, v in fields.items()]
    return "# " + " ".join(parts) + "\n"


def _fmt(x):
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_table(path, comment, columns, rows, trailer=None):
    with _open_out(path) as fh:
        fh.write(comment)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
        if trailer:
            fh.write(trailer)


def write_svg(path, title, xs, series, xlabel="r"):
    """Single-panel line chart; ``series`` maps a name to y values aligned with ``xs``."""
    W, H, L, R, T, B = 640, 400, 60, 150, 30, 40
    ys = [y for v in series.values() for y in v if np.isfinite(y)]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys) if ys else 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    if x1 <= x0:
        x1 = x0 + 1.0

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        return H - B - (y - y0) / (y1 - y0) * (H - T - B)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="18" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{H - B}" stroke="black"/>',
        f'<line x1="{L}" y1="{T}" x2="{L}" y2="{H - B}" stroke="black"/>',
    ]
    for k in range(6):
        xv = x0 + k * (x1 - x0) / 5
        yv = y0 + k * (y1 - y0) / 5
        out.append(f'<text x="{px(xv):.1f}" y="{H - B + 16}" text-anchor="middle" font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{L - 6}" y="{py(yv) + 3:.1f}" text-anchor="end" font-size="10">{yv:.3g}</text>')
    out.append(f'<text x="{(L + W - R) / 2:.1f}" y="{H - 6}" text-anchor="middle" font-size="11">{xlabel}</text>')
    for i, (name, ys_) in enumerate(series.items()):
        c = colors[i % len(colors)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys_) if np.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        ly = T + 14 * i + 10
        out.append(f'<line x1="{W - R + 10}" y1="{ly}" x2="{W - R + 30}" y2="{ly}" stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{W - R + 35}" y="{ly + 4}" font-size="11">{_esc(name)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _rule_fields(args):
    return {"radial_order": args.radial_order or "default", "angular_order": args.angular_order or "default"}


def _user_rule(args):
    if args.radial_order is None and args.angular_order is None:
        return None
    if args.radial_order is None or args.angular_order is None:
        raise ConfigError("--radial-order and --angular-order go together")
    if args.radial_order < 1 or args.angular_order < 1:
        raise ConfigError("rule orders must be positive")
    return build_rule(args.radial_order, args.angular_order)


# ----------------------------------------------------------------- commands


def cmd_build_toeplitz(args):
    src = load_source(args)
    N = parse_degree(args.degree, 128)
    if N == "auto":
        radii = check_radii(parse_radii(args.radii)) if args.radii else [0.9]
        N = default_degree(max(radii), cap=max_degree())
    rule = _user_rule(args)
    if rule is not None and src.expression is None:
        raise ConfigError("quadrature rules apply only to Toeplitz expressions")
    S = src.build(N, rule)
    comment = header("build-toeplitz", degree=N, **_rule_fields(args), source=src.label.replace(" ", ""))
    if args.out in (None, "-"):
        sys.stdout.write(comment)
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["n", "m", "re", "im"])
        for n in range(N + 1):
            for m in range(N + 1):
                w.writerow([n, m, repr(float(S.entries[n, m].real)), repr(float(S.entries[n, m].imag))])
    else:
        write_matrix_csv(S, args.out, comment[2:-1])
    return EXIT_OK


def cmd_sweep(args):
    src = load_source(args)
    base = parse_degree(args.degree, "auto")
    base = 64 if base == "auto" else base
    radii = check_radii(parse_radii(args.radii) if args.radii else list(default_radii()))
    angles = parse_floats(args.angles) if args.angles else list(DEFAULT_ANGLES)
    ps = parse_ps(args.p)
    orders = (args.radial_order or 64, args.angular_order or 256)
    op = OperatorSource(lambda N: src.build(N), src.label)
    profs = sweep_rays(op, angles, radii, base_degree=base, rule_orders=orders, ps=ps, method=args.norms)
    rows = []
    for prof in profs:
        for rep in prof.reports:
            rows.append([prof.theta, abs(rep.z), rep.cond_b, rep.cond_c, rep.cond_d_max,
                         *[rep.cond_ef.get(p) for p in (2, 4, 6)], rep.degree])
    degs = sorted({r[-1] for r in rows})
    comment = header("sweep", degree=f"{degs[0]}..{degs[-1]}", radial_order=orders[0], angular_order=orders[1],
                     norms=args.norms, source=src.label.replace(" ", ""))
    write_table(args.out, comment, PROFILE_COLUMNS, rows)
    if args.svg:
        prof = profs[0]
        series = {"cond_b": prof.column("cond_b"), "cond_c": prof.column("cond_c")}
        for p in ps:
            series[f"||S_z 1||_{p}"] = prof.column(f"p{p}")
        write_svg(args.svg, f"{src.label}  theta={prof.theta:.4g}", list(prof.radii), series)
    return EXIT_OK


COUNTEREXAMPLES = {
    "alternating": (alternating_unitary, 256, "0.04:0.8:0.04"),
    "lacunary": (lacunary_projection, 512, "0.045:0.9:0.045"),
}


def cmd_counterexample(args):
    from .berezin import berezin_operator

    build, default_N, default_r = COUNTEREXAMPLES[args.name]
    N = parse_degree(args.degree, default_N)
    radii = check_radii(parse_radii(args.radii or default_r))
    if N == "auto":
        N = default_degree(max(radii), cap=max_degree())
    angles = parse_floats(args.angles) if args.angles else list(DEFAULT_ANGLES)
    S = build(N)
    rows, worst = [], 0.0
    for th in angles:
        for r in radii:
            z = r * np.exp(1j * th)
            val = berezin_operator(S, z)
            ref = closed_form_berezin(args.name, r * r)
            diff = abs(val - ref)
            worst = max(worst, diff)
            rows.append([th, r, r * r, val.real, ref, diff, float(np.linalg.norm(S.entries @ _kz(z, N)))])
    summary = f"summary,max_abs_diff={worst!r},radii<={max(radii)!r},degree={N}"
    comment = header("counterexample", name=args.name, degree=N, radial_order="none", angular_order="none")
    write_table(args.out, comment, ["theta", "r", "t", "computed", "closed_form", "abs_diff", "cond_b"], rows,
                trailer=f"# {summary}\n")
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def _kz(z, N):
    from .disk import kernel_coefficients

    return kernel_coefficients(z, N)


def cmd_hankel(args):
    u = symbol_from_json(_read_json(args.symbol))
    N = parse_degree(args.degree, 64)
    if N == "auto":
        N = 128
    G = hankel_gram(u, N)
    comment = header("hankel", degree=N, radial_order="none", angular_order="none", symbol=u.label)
    if args.out:
        write_matrix_csv(G, args.out, comment[2:-1])
    f = None
    if isinstance(u, PolynomialSymbol):
        mons = u.monomials()
        if all(b == 0 for _, b in mons):
            f = u
        elif all(a == 0 for a, _ in mons):
            f = u.conj()
    if args.bloch_out:
        if f is None:
            raise ConfigError("little-Bloch profile needs an analytic or conjugate-analytic polynomial symbol")
        radii = check_radii(parse_radii(args.radii or "0.5:0.99:0.07"))
        angles = parse_floats(args.angles) if args.angles else [0.0]
        rows = []
        for th in angles:
            for r in radii:
                z = r * np.exp(1j * th)
                rows.append([th, r, little_bloch_distance(f, z, method=args.bloch_method),
                             little_bloch_distance(f, z, method="series")])
        bl = header("hankel-bloch", degree="none", radial_order="auto", angular_order="auto", f=f.label)
        write_table(args.bloch_out, bl, ["theta", "r", "distance", "series_check"], rows)
    if not args.out and not args.bloch_out:
        write_matrix_csv_stdout(G, comment)
    return EXIT_OK


def write_matrix_csv_stdout(S, comment):
    sys.stdout.write(comment)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "m", "re", "im"])
    E = S.entries
    for n in range(E.shape[0]):
        for m in range(E.shape[1]):
            w.writerow([n, m, repr(float(E[n, m].real)), repr(float(E[n, m].imag))])


def cmd_schur(args):
    from .berezin import schur_rule
    from .quadrature import build_singular_rule

    src = load_source(args)
    N = parse_degree(args.degree, 64)
    N = 64 if N == "auto" else N
    rs = parse_floats(args.r)
    if not rs or not all(0.0 < r < 1.0 for r in rs):
        raise ConfigError("--r values must lie in (0, 1)")
    radii = check_radii(parse_radii(args.radii or "0,0.3,0.6,0.9,0.99"), allow_zero=True)
    angles = parse_floats(args.angles) if args.angles else list(DEFAULT_ANGLES)
    S = src.build(N)
    Sa = adjoint(S)
    srule = schur_rule(N) if args.radial_order is None else build_singular_rule(
        5.0, args.radial_order, args.angular_order or 4 * N)
    zs = list(dict.fromkeys(r * np.exp(1j * a) for r in radii for a in angles))
    audits = [schur_audit(S, z, srule) for z in zs]
    adj = [schur_audit(Sa, z, srule) for z in zs]
    chat = max(a.ratio for a in audits + adj)
    rows = [[abs(a.z), float(np.angle(a.z)), a.lhs, a.rhs_core, a.ratio, a.lemma4_value] for a in audits]
    comment = header("schur", degree=N, radial_order=srule.radial_order, angular_order=srule.angular_order,
                     chat=repr(chat), source=src.label.replace(" ", ""))
    write_table(args.out, comment, AUDIT_COLUMNS, rows)
    bounds = []
    for r in rs:
        ring = [r * np.exp(1j * t) for t in np.linspace(0, 2 * np.pi, 8, endpoint=False)]
        b = schur_bound(S, r, chat, [z for z in zs if abs(z) >= r] + ring, zs)
        bounds.append([b["r"], b["norm_tail"], b["c1"], b["c2"], b["bound"], b["holds"]])
    dest = args.bound_out
    if dest:
        write_table(dest, comment, ["r", "norm_tail", "c1", "c2", "bound", "holds"], bounds)
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"chat={chat!r}", file=stream)
    for b in bounds:
        print(f"r={b[0]!r} ||S-S_[r]||={b[1]!r} sqrt(c1*c2)={b[4]!r} holds={_fmt(b[5])}", file=stream)
    return EXIT_OK


def cmd_verify(args):
    from .suite import GROUPS, format_report, run_suite

    groups = None
    if args.groups:
        groups = [g.strip() for g in args.groups.split(",")]
        known = {g for g, _ in GROUPS}
        bad = [g for g in groups if g not in known]
        if bad:
            raise ConfigError(f"unknown verify groups {bad}; choose from {sorted(known)}")
    text, failed = format_report(run_suite(groups), __version__)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_VERIFY if failed else EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--deterministic", action="store_true",
                        help="single-threaded BLAS so repeated runs give identical bytes")
    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--expr", help="expression JSON (file path or inline text)")
    source.add_argument("--preset", help=f"library entry: {', '.join(preset_names())}")
    rules = argparse.ArgumentParser(add_help=False)
    rules.add_argument("--radial-order", type=int)
    rules.add_argument("--angular-order", type=int)

    p = argparse.ArgumentParser(prog="bergman", description="Truncated Bergman-space operator toolkit.")
    p.add_argument("--version", action="version", version=f"bergman {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-toeplitz", parents=[common, source, rules], help="write a truncated operator as CSV")
    b.add_argument("--degree", help="truncation degree N or 'auto'")
    b.add_argument("--radii", help="radii used to size --degree auto")
    b.add_argument("--out")
    b.set_defaults(func=cmd_build_toeplitz)

    s = sub.add_parser("sweep", parents=[common, source, rules], help="condition profiles along rays")
    s.add_argument("--degree", help="base truncation degree (raised per radius) or 'auto'")
    s.add_argument("--angles", help="comma list of ray angles (default 0,pi/4,pi/2)")
    s.add_argument("--radii", help="a:b:step or comma list (default 0.1:0.99:0.01)")
    s.add_argument("--p", default="2,4,6")
    s.add_argument("--norms", choices=["exact", "quadrature"], default="exact")
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("counterexample", parents=[common], help="computed vs closed-form Berezin transform")
    c.add_argument("name", choices=sorted(COUNTEREXAMPLES))
    c.add_argument("--degree")
    c.add_argument("--radii")
    c.add_argument("--angles")
    c.add_argument("--out")
    c.set_defaults(func=cmd_counterexample)

    h = sub.add_parser("hankel", parents=[common], help="Hankel Gram matrix and little-Bloch profile")
    h.add_argument("symbol", help="symbol JSON (file path or inline text)")
    h.add_argument("--degree")
    h.add_argument("--radii")
    h.add_argument("--angles")
    h.add_argument("--bloch-method", choices=["quadrature", "series", "hankel"], default="quadrature")
    h.add_argument("--out")
    h.add_argument("--bloch-out")
    h.set_defaults(func=cmd_hankel)

    k = sub.add_parser("schur", parents=[common, source, rules], help="Schur-test audit and cutoff bound")
    k.add_argument("--r", default="0.9,0.99", help="cutoff radii")
    k.add_argument("--degree")
    k.add_argument("--radii", help="|z| values of the audit grid (0 allowed)")
    k.add_argument("--angles")
    k.add_argument("--out")
    k.add_argument("--bound-out")
    k.set_defaults(func=cmd_schur)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--groups", help="comma list of groups to run (default all)")
    v.add_argument("--out", help="also write the report here")
    v.set_defaults(func=cmd_verify)
    return p


def _error(kind, exc):
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    ctx = contextlib.nullcontext()
    if args.deterministic:
        from threadpoolctl import threadpool_limits

        ctx = threadpool_limits(limits=1)
    try:
        with ctx:
            return args.func(args)
    except ConfigError as exc:
        _error("config", exc)
        return EXIT_CONFIG
    except (FeasibilityError, QuadratureError, DiskDomainError) as exc:
        _error("feasibility", exc)
        return EXIT_FEASIBILITY


if __name__ == "__main__":
    sys.exit(main())
