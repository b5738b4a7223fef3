"""Config-driven experiments with deterministic artifacts.

Subcommands:

    run <config.json>           execute the configured experiment
    validate <config.json>      dry-run: parse, build the cover, print the
                                conjugacy domains; no counting
    ideal-member <config.json>  membership query, experiment kind forced

Exit codes: 0 all verdicts pass, 1 input or validation error, 2 a verdict
fails (including a bounded-no membership answer), 3 a search or
enumeration budget was exceeded.

The config is a single UTF-8 JSON file with "schemaVersion": 1; every
expression string uses the difference-polynomial grammar.  n_range and
schedule are inclusive [lo, hi] pairs.  The env variable
FROB_PRECISION_BITS (default 200) sets the precision of decimal
renderings; exact results never depend on it.

Outputs are byte-stable for a fixed config and seed: JSON is emitted with
sorted keys, CSV rows follow level order then canonical point order, and
all floats render through repr or fixed-precision decimal strings.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .fields import make_field, BudgetError
from .gaussian import GaussianRational
from .diffpoly import parse_poly, parse_endo, EndoSpec, variable, to_string
from .diffvar import (DiffSystem, DimensionError, count_points,
                      count_sequence, count_sequence_csv)
from .cover import (build_cover, structural_images, substitution_histogram,
                    histogram_csv, inertia_check, component_equity)
from .quandle import CentralFunction, indicator
from .density import (BasicConstructible, chebotarev_report, trace_check,
                      zeta_shape_check, near_rationality_probe, zeta_coeffs,
                      to_jsonable, gauss_str)
from .ideals import perfect_membership_bounded, BASIS_CAP

EXIT_PASS, EXIT_INPUT, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2, 3

KINDS = ("count", "subst", "density", "trace", "langweil", "zeta-shape",
         "pade", "ideal-member")


class ConfigError(Exception):
    """Configuration rejected before any experiment work started."""


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError("cli: cannot read config: %s" % e)
    except json.JSONDecodeError as e:
        raise ConfigError("cli: config is not valid JSON: %s" % e)
    if not isinstance(cfg, dict):
        raise ConfigError("cli: config must be a JSON object")
    if cfg.get("schemaVersion") != 1:
        raise ConfigError("cli: schemaVersion must be 1, got %r"
                          % (cfg.get("schemaVersion"),))
    return cfg


def _section(cfg, name, required=True):
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError("cli: config needs a %r section" % name)
        return None
    if not isinstance(sec, dict):
        raise ConfigError("cli: section %r must be an object" % name)
    return sec


def _int_field(sec, where, key, default=None, minimum=None):
    v = sec.get(key, default)
    if v is None:
        raise ConfigError("cli: %s.%s is required" % (where, key))
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError("cli: %s.%s must be an integer" % (where, key))
    if minimum is not None and v < minimum:
        raise ConfigError("cli: %s.%s must be >= %d" % (where, key, minimum))
    return v


def _exact_plog(v, p):
    """e with p^e == v, or None."""
    if v < 1:
        return None
    e = 0
    while v % p == 0:
        v //= p
        e += 1
    return e if v == 1 else None


def build_base(cfg):
    """Field context and base difference system from base + variety."""
    base = _section(cfg, "base")
    p = _int_field(base, "base", "p", minimum=2)
    q = _int_field(base, "base", "q", minimum=2)
    q0 = _int_field(base, "base", "q0", default=1, minimum=1)
    n_exp = _exact_plog(q, p)
    if n_exp is None or n_exp < 1:
        raise ConfigError("cli: base.q must be a power of base.p "
                          "(got q=%d, p=%d)" % (q, p))
    e0 = _exact_plog(q0, p) if q0 > 1 else 0
    if e0 is None or e0 > n_exp:
        raise ConfigError("cli: q0 must divide q (got q0=%d, q=%d)"
                          % (q0, q))
    field = make_field(p, n_exp)

    variety = _section(cfg, "variety")
    vars_ = variety.get("vars")
    if not isinstance(vars_, list) or not vars_ \
            or not all(isinstance(v, str) for v in vars_):
        raise ConfigError("cli: variety.vars must be a nonempty list of "
                          "variable names")
    vars_ = tuple(vars_)
    equations = []
    for text in variety.get("equations", []):
        equations.append(_parse_expr(text, field, vars_,
                                     "variety.equations"))
    units = variety.get("units", [])
    if not isinstance(units, list):
        raise ConfigError("cli: variety.units must be a list")
    try:
        system = DiffSystem(field, e0, vars_, equations, units)
    except ValueError as e:
        raise ConfigError(str(e))
    return field, system


def _parse_expr(text, field, vars_, where):
    if not isinstance(text, str):
        raise ConfigError("cli: %s entries must be expression strings"
                          % where)
    try:
        return parse_poly(text, field, vars_)
    except ValueError as e:
        raise ConfigError("cli: %s: %s" % (where, e))


def _fill_endo(mapping, field, base, all_vars, where, default_twist=0,
               structural=False):
    """EndoSpec from a config mapping, filling omitted base-var images.

    Deck generators fix the base, so a missing base image is the identity.
    For sigmaTilde (structural=True) it comes from the structural equation
    x@1 = g(x) when the base system has one.  Fiber variable images must be
    explicit.
    """
    if not isinstance(mapping, dict):
        raise ConfigError("cli: %s must be an object of images" % where)
    mapping = dict(mapping)
    twist = mapping.pop("constTwist", default_twist)
    if not isinstance(twist, int) or twist < 0:
        raise ConfigError("cli: %s.constTwist must be an integer >= 0"
                          % where)
    images = {}
    for name, text in mapping.items():
        if name not in all_vars:
            raise ConfigError("cli: %s maps unknown variable %r"
                              % (where, name))
        images[name] = _parse_expr(text, field, all_vars, where)
    for jx, x in enumerate(base.vars):
        if x in images:
            continue
        candidates = structural_images(base, all_vars, jx) if structural \
            else []
        images[x] = candidates[0] if candidates \
            else variable(field, all_vars, x)
    try:
        return EndoSpec(field, all_vars, images, twist)
    except ValueError as e:
        raise ConfigError("cli: %s: %s" % (where, e))


def build_cover_from(cfg, field, base):
    cov = _section(cfg, "cover")
    fiber_vars = cov.get("fiberVars")
    if not isinstance(fiber_vars, list) or not fiber_vars:
        raise ConfigError("cli: cover.fiberVars must be a nonempty list")
    all_vars = base.vars + tuple(fiber_vars)
    fiber_eqs = [_parse_expr(t, field, all_vars, "cover.fiberEquations")
                 for t in cov.get("fiberEquations", [])]
    gens_cfg = cov.get("groupGenerators")
    if not isinstance(gens_cfg, list) or not gens_cfg:
        raise ConfigError("cli: cover.groupGenerators must be a nonempty "
                          "list of endomorphism mappings")
    generators = [_fill_endo(m, field, base, all_vars,
                             "cover.groupGenerators[%d]" % i)
                  for i, m in enumerate(gens_cfg)]
    st_cfg = cov.get("sigmaTilde")
    if st_cfg is None:
        raise ConfigError("cli: cover.sigmaTilde is required")
    sigma_tilde = _fill_endo(st_cfg, field, base, all_vars,
                             "cover.sigmaTilde",
                             default_twist=base.q0_exp, structural=True)
    degree = cov.get("constFieldDegree", 1)
    level = cov.get("validationLevel", "full")
    return build_cover(base, tuple(fiber_vars), fiber_eqs, generators,
                       sigma_tilde, const_field_degree=degree,
                       validation_level=level)


def _gauss_value(v, where):
    if isinstance(v, bool):
        raise ConfigError("cli: %s holds a boolean, expected a number or "
                          "fraction string" % where)
    if isinstance(v, int):
        return GaussianRational(v)
    if isinstance(v, str):
        try:
            return GaussianRational(Fraction(v))
        except (ValueError, ZeroDivisionError):
            raise ConfigError("cli: %s: %r is not a fraction" % (where, v))
    if isinstance(v, list) and len(v) == 2:
        re = _gauss_value(v[0], where)
        im = _gauss_value(v[1], where)
        return GaussianRational(re.re, im.re)
    raise ConfigError("cli: %s entries must be integers, fraction strings "
                      "or [re, im] pairs" % where)


def central_function_from(cfg, structure):
    sec = _section(cfg, "centralFunction")
    kind = sec.get("kind")
    if kind == "indicator":
        idx = _int_field(sec, "centralFunction", "data", minimum=0)
        domains = structure.domains()
        if idx >= len(domains):
            raise ConfigError("cli: centralFunction.data is domain %d but "
                              "the structure has %d conjugacy domains"
                              % (idx, len(domains)))
        return indicator(structure, idx)
    if kind == "table":
        data = sec.get("data")
        if not isinstance(data, list):
            raise ConfigError("cli: centralFunction.data must be a list of "
                              "values, one per element")
        values = [_gauss_value(v, "centralFunction.data") for v in data]
        try:
            return CentralFunction(structure, values)
        except ValueError as e:
            raise ConfigError(str(e))
    raise ConfigError("cli: centralFunction.kind must be 'indicator' or "
                      "'table', got %r" % (kind,))


def _n_range(exp):
    pair = exp.get("n_range")
    if not (isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, int) for v in pair)
            and 1 <= pair[0] <= pair[1]):
        raise ConfigError("cli: experiment.n_range must be an inclusive "
                          "[lo, hi] pair with 1 <= lo <= hi")
    return range(pair[0], pair[1] + 1)


def _schedule(exp):
    pair = exp.get("schedule")
    if pair is None:
        return None
    if not (isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, int) for v in pair)
            and 1 <= pair[0] <= pair[1]):
        raise ConfigError("cli: experiment.schedule must be an inclusive "
                          "[lo, hi] pair of positive integers")
    return range(pair[0], pair[1] + 1)


def _fraction_or_none(exp, key):
    v = exp.get(key)
    if v is None:
        return None
    try:
        return Fraction(v)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError("cli: experiment.%s must be a number or a "
                          "fraction string" % key)


def _declared_dim(exp):
    d = _fraction_or_none(exp, "d")
    if d is None:
        return None
    if d.denominator != 1 or d < 0:
        raise ConfigError("cli: experiment.d must be a nonnegative integer "
                          "dimension")
    return int(d)


# ---------------------------------------------------------------------------
# experiment runners: each returns (report, csv_text, verdict)
# ---------------------------------------------------------------------------


def _count_rows(system, ns, budget, threads):
    kwargs = {}
    if budget is not None:
        kwargs["budget"] = budget
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [(n, pool.submit(count_points, system, n, **kwargs))
                       for n in ns]
            rows = []
            for n, fut in futures:
                c, exact, _ = fut.result()
                rows.append((n, system.twist_order(n), c, exact))
        return rows
    return count_sequence(system, ns, **kwargs)


def run_count(cfg, field, system, exp, args):
    rows = _count_rows(system, _n_range(exp), args.budget, args.threads)
    report = {"experiment": "count",
              "rows": [{"n": n, "Q": Q, "count": c, "exact": exact}
                       for n, Q, c, exact in rows],
              "verdict": "pass"}
    return report, count_sequence_csv(rows), True


def run_subst(cfg, field, system, exp, args):
    cover = build_cover_from(cfg, field, system)
    ns = _n_range(exp)
    hist_rows = []
    per_n = []
    for n in ns:
        lv = cover.level(n)
        checked = inertia_check(cover, n)
        component_equity(cover, n)
        hist_rows.extend(substitution_histogram(cover, n))
        per_n.append({
            "n": n,
            "points": len(lv.xpoints),
            "inertia_checked": checked,
            "substitutions": [cover.structure.domain_of(i)
                              for i in lv.subst],
        })
    report = {"experiment": "subst",
              "group_order": cover.degree,
              "domains": [list(d) for d in cover.structure.domains()],
              "per_n": per_n,
              "verdict": "pass"}
    return report, histogram_csv(hist_rows), True


def _basic_from(cfg, field, system):
    cover = build_cover_from(cfg, field, system)
    alpha = central_function_from(cfg, cover.structure)
    return cover, BasicConstructible(cover, alpha)


def run_density(cfg, field, system, exp, args):
    _, basic = _basic_from(cfg, field, system)
    d = _int_field(exp, "experiment", "d", minimum=0)
    report = chebotarev_report(basic, _n_range(exp), d,
                               schedule=_schedule(exp))
    lines = ["j,estimate,richardson"]
    rich = {j: r for j, r in report["richardson"]}
    for j, text in report["floats"]:
        extra = gauss_str(rich[j]) if j in rich else ""
        lines.append("%d,%s,%s" % (j, text, extra))
    csv = "\n".join(lines) + "\n"
    return report, csv, report["verdict"] == "pass"


def run_trace(cfg, field, system, exp, args):
    _, basic = _basic_from(cfg, field, system)
    d = _int_field(exp, "experiment", "d", minimum=0)
    report = trace_check(basic, _n_range(exp), d)
    lines = ["n,count,error_abs"]
    for row in report["per_n"]:
        lines.append("%d,%d,%r" % (row["n"], row["count"],
                                   row["error_abs"]))
    csv = "\n".join(lines) + "\n"
    return report, csv, report["verdict"] == "pass"


def run_langweil(cfg, field, system, exp, args):
    rows = _count_rows(system, _n_range(exp), args.budget, args.threads)
    report = zeta_shape_check(rows, _declared_dim(exp),
                              _fraction_or_none(exp, "mu"),
                              system.q, system.q0)
    report["experiment"] = "langweil"
    return report, count_sequence_csv(rows), report["verdict"] == "pass"


def run_zeta_shape(cfg, field, system, exp, args):
    rows = _count_rows(system, _n_range(exp), args.budget, args.threads)
    shape = zeta_shape_check(rows, _declared_dim(exp),
                             _fraction_or_none(exp, "mu"),
                             system.q, system.q0)
    report = {"experiment": "zeta-shape",
              "log_zeta_coeffs": list(zeta_coeffs(rows).coeffs),
              "shape": shape,
              "verdict": shape["verdict"]}
    return report, count_sequence_csv(rows), shape["verdict"] == "pass"


def run_pade(cfg, field, system, exp, args):
    rows = _count_rows(system, _n_range(exp), args.budget, args.threads)
    max_deg = _int_field(exp, "experiment", "maxDeg", minimum=1)
    report = near_rationality_probe(rows, max_deg)
    report["experiment"] = "pade"
    return report, count_sequence_csv(rows), report["verdict"] == "pass"


def run_ideal_member(cfg, field, system, exp, args):
    bounds = exp.get("bounds")
    if not isinstance(bounds, dict):
        raise ConfigError("cli: experiment.bounds must give k, L and M")
    k = _int_field(bounds, "experiment.bounds", "k", minimum=0)
    L = _int_field(bounds, "experiment.bounds", "L", minimum=1)
    M = _int_field(bounds, "experiment.bounds", "M", minimum=1)
    f_text = exp.get("f")
    gens_text = exp.get("gens")
    if not isinstance(f_text, str) or not isinstance(gens_text, list) \
            or not gens_text:
        raise ConfigError("cli: ideal-member needs experiment.f (string) "
                          "and experiment.gens (nonempty list)")
    f = _parse_expr(f_text, field, system.vars, "experiment.f")
    gens = [_parse_expr(t, field, system.vars, "experiment.gens")
            for t in gens_text]
    cap = args.budget if args.budget is not None else BASIS_CAP
    result = perfect_membership_bounded(f, gens, k, L, M,
                                        q0_exp=system.q0_exp,
                                        basis_cap=cap)
    report = {"experiment": "ideal-member",
              "f": to_string(f),
              "gens": [to_string(g) for g in gens],
              "result": result,
              "verdict": "pass" if result["member"] else "fail"}
    lines = ["shift,multiplicity"]
    for i, n in (result["witness"] or ()):
        lines.append("%d,%d" % (i, n))
    return report, "\n".join(lines) + "\n", result["member"]


RUNNERS = {
    "count": run_count,
    "subst": run_subst,
    "density": run_density,
    "trace": run_trace,
    "langweil": run_langweil,
    "zeta-shape": run_zeta_shape,
    "pade": run_pade,
    "ideal-member": run_ideal_member,
}


# ---------------------------------------------------------------------------
# output emission
# ---------------------------------------------------------------------------


def _write_text(path, text):
    try:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise ConfigError("cli: cannot write %s: %s" % (path, e))


def emit(cfg, report, csv_text, seed):
    out = _section(cfg, "output", required=False) or {}
    envelope = {"schemaVersion": 1, "seed": seed, "report": report}
    text = json.dumps(to_jsonable(envelope), indent=2, sort_keys=True) + "\n"
    written = []
    if out.get("jsonPath"):
        _write_text(out["jsonPath"], text)
        written.append(out["jsonPath"])
    if out.get("csvPath") and csv_text is not None:
        _write_text(out["csvPath"], csv_text)
        written.append(out["csvPath"])
    return written


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_run(args, forced_kind=None):
    cfg = load_config(args.config)
    field, system = build_base(cfg)
    exp = _section(cfg, "experiment")
    kind = forced_kind or exp.get("kind")
    if kind not in KINDS:
        raise ConfigError("cli: experiment.kind must be one of %s, got %r"
                          % (", ".join(KINDS), kind))
    if forced_kind and exp.get("kind") not in (None, forced_kind):
        raise ConfigError("cli: config declares experiment.kind %r but the "
                          "subcommand forces %r" % (exp.get("kind"),
                                                    forced_kind))
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    report, csv_text, ok = RUNNERS[kind](cfg, field, system, exp, args)
    written = emit(cfg, report, csv_text, seed)
    print("experiment: %s" % kind)
    print("system: q=%d q0=%d vars=%s" % (system.q, system.q0,
                                          ",".join(system.vars)))
    verdict = report.get("verdict", "pass")
    print("verdict: %s" % verdict)
    for path in written:
        print("wrote %s" % path)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_validate(args):
    cfg = load_config(args.config)
    field, system = build_base(cfg)
    print("base: q=%d (p=%d), q0=%d, vars: %s, %d equations, units: %s"
          % (system.q, system.p, system.q0, ", ".join(system.vars),
             len(system.equations),
             ", ".join(sorted(system.units)) or "none"))
    if _section(cfg, "cover", required=False) is None:
        print("no cover section; base system parsed and validated")
        return EXIT_PASS
    cover = build_cover_from(cfg, field, system)
    print("deck group order: %d" % cover.degree)
    print("Sigma of size %d" % cover.structure.n)
    domains = cover.structure.domains()
    print("conjugacy domains: %d" % len(domains))
    for d, members in enumerate(domains):
        print("  domain %d (size %d): %s"
              % (d, len(members), list(members)))
    print("operator: %s" % (list(cover.operator),))
    print("validation level: %s" % cover.validation_level)
    return EXIT_PASS


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed (recorded in JSON "
                             "output; all computations are exact)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for per-level counting")
    common.add_argument("--budget", type=int, default=None,
                        help="enumeration / basis-size budget override")
    parser = argparse.ArgumentParser(
        prog="frobtwist",
        description="Twisted point counting, Frobenius substitutions and "
                    "density experiments over finite difference fields.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common],
                   help="run the configured experiment")
    sub.add_parser("validate", parents=[common],
                   help="dry-run: build and check, no counting")
    sub.add_parser("ideal-member", parents=[common],
                   help="bounded perfect-membership query")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: cli: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_run(args, forced_kind="ideal-member")
    except BudgetError as e:
        print("budget: %s" % e, file=sys.stderr)
        return EXIT_BUDGET
    except ConfigError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, DimensionError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
