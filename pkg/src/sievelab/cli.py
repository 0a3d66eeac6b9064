"""Command-line front end.

Every subcommand writes a table (CSV or JSON lines) to ``--output`` or
stdout and a short summary to stderr. Exit codes: 0 success, 2 precondition
or domain error, 3 resource or I/O error, 4 falsified invariant, 64 usage.
Exponents are rationals in units of ``log x`` and are written as ``7/12``.
"""
from __future__ import annotations

import argparse
import math
import os
import random
import sys
from fractions import Fraction

from . import equidist, exp_sums, heath_brown, sieve_support, triple_factor
from .arith import mobius
from .errors import (
    DomainError,
    InvariantViolation,
    NumericError,
    ResourceError,
    SievelabError,
)
from .reports import RunConfig, Table, emit_report

EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_INVARIANT, EXIT_USAGE = 0, 2, 3, 4, 64
META = {"command", "seed", "workers", "format", "output", "config", "save_config", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def rational(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 7/12, got {s!r}") from None


def positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SIEVELAB_WORKERS", "1")))
    except ValueError:
        return 1


def _seq(kind: str, lo: int, hi: int, rng: random.Random) -> dict[int, int]:
    """A sequence on ``(lo, hi]``: ones, mobius or random signs."""
    if kind == "ones":
        return {n: 1 for n in range(lo + 1, hi + 1)}
    if kind == "mobius":
        return {n: mobius(n) for n in range(lo + 1, hi + 1)}
    if kind == "random":
        return {n: rng.choice((-1, 0, 1)) for n in range(lo + 1, hi + 1)}
    if kind == "zero":
        return {}
    raise DomainError(f"unknown sequence kind {kind!r}")


SEQ_KINDS = ("ones", "mobius", "random", "zero")


# --------------------------------------------------------------------------
# commands


def cmd_hb_verify(ns, rng) -> tuple[Table, int]:
    x_rule = "n" if ns.x_rule == "n" else Fraction(ns.x_rule)
    rep = heath_brown.verify_heath_brown(ns.limit, ns.k, x_rule, ns.cutoff, ns.sign, ns.workers)
    t = Table(("n", "rhs", "lambda"), [(n, str(g), str(w)) for n, g, w in rep.mismatches])
    t.summary.append(f"k={ns.k} limit={ns.limit} sign={ns.sign} cutoff={ns.cutoff}: "
                     f"{len(rep.mismatches)} mismatches")
    claimed = ns.sign == "resolved" and ns.cutoff == 2 and ns.x_rule == "n"
    return t, EXIT_INVARIANT if claimed and rep.mismatches else EXIT_OK


def cmd_dplus_enum(ns, rng):
    items = sieve_support.enumerate_Dplus(ns.D, ns.limit)
    rows = [(fi.value, "*".join(map(str, fi.flattened)) or "1", mobius(fi)) for fi in items]
    t = Table(("d", "factors", "lambda_plus"), rows)
    t.summary.append(f"|D+({ns.D}) & [1,{ns.limit}]| = {len(rows)}")
    return t, EXIT_OK


def _levels(ns):
    if ns.t is not None:
        from .exact import Magnitude

        D = Magnitude.of(ns.D)
        return D**ns.t, D ** (1 - ns.t)
    if ns.D1 is None:
        raise DomainError("give --D1 (and optionally --D2) or --t")
    D2 = ns.D2 if ns.D2 is not None else ns.D / ns.D1
    return ns.D1, D2


def cmd_dplus_split(ns, rng):
    D1, D2 = _levels(ns)
    d1, d2 = sieve_support.split_two(ns.d, ns.D, D1, D2)
    t = Table(("d", "d1", "d2"), [(ns.d, d1, d2)])
    t.summary.append(f"{ns.d} = {d1} * {d2}")
    return t, EXIT_OK


def _triple_input(ns):
    params = triple_factor.ExponentParams(ns.delta, ns.epsilon, ns.x)
    if ns.mode == "integer":
        if ns.d is None or ns.x is None:
            raise DomainError("integer mode needs --d and --x")
        return ns.d, params
    nus = tuple(sorted(ns.nu or [], reverse=True))
    theta = Fraction(7, 12) - 50 * ns.delta
    mass = ns.mass if ns.mass is not None else theta - sum(nus, Fraction(0))
    return triple_factor.ExponentTuple(nus, mass), params


def _triple_rows(tr) -> list[tuple]:
    rows = []
    for name, c in zip(("d1", "d2", "d3"), tr.components):
        if isinstance(c, triple_factor.ExponentTuple):
            rows.append(("component", name, str(c.total), " ".join(map(str, c.named)), str(c.small_mass)))
        else:
            rows.append(("component", name, str(c), "", ""))
    for r in tr.record:
        rows.append(("inequality", r.label, str(r.lhs_exponent), str(r.rhs_exponent), "pass" if r.passed else "fail"))
    return rows


def _harness_table(results) -> Table:
    rows = [(r.seed, str(r.delta), str(r.n_exp), str(r.instance), r.case or "", r.passed,
             "" if r.oracle is None else r.oracle) for r in results]
    return Table(("seed", "delta", "n_exp", "instance", "case", "passed", "oracle"), rows)


def cmd_triple_factor(ns, rng):
    if ns.random:
        res = triple_factor.soundness_harness(ns.random, ns.seed, oracle_every=ns.oracle_every, workers=ns.workers)
        t = _harness_table(res)
        fails = sum(not r.passed for r in res)
        dis = sum(r.oracle is False for r in res)
        t.summary.append(f"{len(res)} instances, {fails} failures, {dis} oracle disagreements")
        return t, EXIT_INVARIANT if fails or dis else EXIT_OK
    d, params = _triple_input(ns)
    tr = triple_factor.propose_triple(d, ns.n_exp, params, mode=ns.mode, x=ns.x)
    t = Table(("kind", "name", "value", "detail", "status"), _triple_rows(tr))
    t.summary.append(f"case {tr.case_used}: " + ", ".join(str(c) for c in tr.components))
    return t, EXIT_OK


def cmd_triple_oracle(ns, rng):
    d, params = _triple_input(ns)
    cset = triple_factor.CONSTRAINT_SETS[ns.set]
    tr = triple_factor.oracle_feasible(d, ns.n_exp, params, cset, mode=ns.mode, x=ns.x)
    if tr is None:
        t = Table(("kind", "name", "value", "detail", "status"), [])
        t.summary.append(f"{ns.set}: infeasible")
    else:
        t = Table(("kind", "name", "value", "detail", "status"), _triple_rows(tr))
        t.summary.append(f"{ns.set}: feasible")
    return t, EXIT_OK


def cmd_extremal(ns, rng):
    rep = triple_factor.extremal_witness(ns.delta_prime, ns.n_exp, ns.constraint_delta)
    ctl = triple_factor.in_range_control(ns.delta, ns.n_exp)
    rows = [("extremal", str(rep.theta), str(rep.tuple), rep.in_Dplus, rep.feasible),
            ("in_range", str(ctl.theta), str(ctl.tuple), ctl.in_Dplus, ctl.feasible)]
    t = Table(("config", "D_exponent", "tuple", "in_Dplus", "feasible"), rows)
    t.summary.append(f"extremal: {'feasible' if rep.feasible else 'infeasible'}; "
                     f"in-range control: {'feasible' if ctl.feasible else 'infeasible'}")
    ok = not rep.feasible and ctl.feasible
    return t, EXIT_OK if ok else EXIT_INVARIANT


def cmd_weil_scan(ns, rng):
    rep = exp_sums.weil_check(ns.qmax, ns.qmin, ns.workers)
    rows = [(r.q, r.pairs, len(r.violations), r.max_ratio, r.argmax[0], r.argmax[1],
             "" if r.prime_unit_max is None else r.prime_unit_max) for r in rep.rows]
    t = Table(("q", "pairs", "violations", "max_ratio", "a", "b", "prime_unit_max"), rows)
    m, q, ab = rep.max_ratio
    t.summary.append(f"{rep.pairs} pairs, {len(rep.violations)} violations, max ratio {m:.6f} at q={q}")
    return t, EXIT_INVARIANT if rep.violations else EXIT_OK


def cmd_kloosterman(ns, rng):
    s = exp_sums.kloosterman(ns.a, ns.b, ns.q)
    t = Table(("a", "b", "q", "value", "real_exact"), [(ns.a, ns.b, ns.q, s.value, s.is_real_exact())])
    t.summary.append(f"S({ns.a},{ns.b};{ns.q}) = {s.value:.12g}")
    return t, EXIT_OK


def cmd_poisson_check(ns, rng):
    if ns.random:
        cases = []
        for _ in range(ns.random):
            q = rng.randint(1, ns.q)
            cases.append((rng.randint(1, ns.M), q, rng.randrange(q), None))
    else:
        cases = [(ns.M, ns.q, ns.a, ns.H)]
    rows = []
    for M, q, a, H in cases:
        r = exp_sums.poisson_check(M, q, a, H)
        rows.append((r.M, r.q, r.a, r.H, r.lhs, r.rhs, r.residual))
    t = Table(("M", "q", "a", "H", "lhs", "rhs", "residual"), rows)
    t.summary.append(f"max residual {max(r[-1] for r in rows):.3e}")
    return t, EXIT_OK


def cmd_bv_table(ns, rng):
    rep = equidist.bv_table(ns.x, ns.qmax, ns.B, ns.workers)
    lx = math.log(ns.x)
    rep_sum = rep.abs_sum
    plain = rep.normalized()
    msg = f"Q_max={rep.params['Q_max']} sum={float(rep_sum):.6f} normalized(x/log x)={plain:.6g}"
    if ns.A is not None:
        msg += f" normalized(x/(log x)^{ns.A})={float(rep_sum) / (ns.x / lx ** ns.A):.6g}"
    return _with_summary(rep, msg), EXIT_OK


def _with_summary(rep, msg):
    from .reports import discrepancy_table

    t = discrepancy_table(rep)
    t.summary.append(msg)
    return t


def cmd_weighted_discrepancy(ns, rng):
    if ns.weights == "lambda-plus":
        if ns.D is None:
            raise DomainError("lambda-plus weights need --D")
        w = sieve_support.WeightSequence.lambda_plus(ns.D, a=ns.a)
    elif ns.weights == "delta-one":
        w = sieve_support.WeightSequence.delta_one()
    else:
        w = sieve_support.WeightSequence(1, {})
    rep = equidist.weighted_prime_discrepancy(w, ns.x, ns.a)
    s = rep.signed_sum
    return _with_summary(rep, f"signed sum {s} ({float(s):.6g})"), EXIT_OK


def cmd_delta_q(ns, rng):
    alpha = _seq(ns.alpha, ns.N, 2 * ns.N, rng)
    beta = _seq(ns.beta, ns.M, 2 * ns.M, rng)
    v = Fraction(equidist.delta_q(ns.q, alpha, beta, ns.a, ns.N, ns.M))
    rows = [(ns.q, ns.a, ns.N, ns.M, v.numerator, v.denominator, float(v))]
    code = EXIT_OK
    if ns.check_oracle:
        o = Fraction(equidist.delta_q_bruteforce(ns.q, alpha, beta, ns.a))
        if o != v:
            code = EXIT_INVARIANT
    t = Table(("q", "a", "N", "M", "value_num", "value_den", "value_float"), rows)
    t.summary.append(f"Delta({ns.q}) = {v}")
    return t, code


def cmd_fundamental_check(ns, rng):
    r = equidist.fundamental_lemma_check(ns.q, ns.b, ns.t, ns.z)
    dev = r.deviation
    t = Table(("q", "b", "t", "z", "lhs", "total", "rhs_num", "rhs_den", "deviation_float", "normalized"),
              [(r.q, r.b, r.t, r.z, r.lhs, r.total, r.rhs.numerator, r.rhs.denominator, float(dev), r.normalized)])
    t.summary.append(f"lhs={r.lhs} rhs={r.rhs} deviation={float(dev):.6g}")
    return t, EXIT_OK


def cmd_double_divisor(ns, rng):
    alpha = _seq(ns.alpha, ns.M, 2 * ns.M, rng)
    eps = float(ns.epsilon) if ns.epsilon is not None else None
    r = equidist.double_divisor_experiment(ns.q, ns.a, ns.M, ns.N1, ns.N2, alpha, eps)
    code = EXIT_OK
    if ns.check_oracle and equidist.double_divisor_bruteforce(ns.q, ns.a, ns.M, ns.N1, ns.N2, alpha) != r.value:
        code = EXIT_INVARIANT
    t = Table(("q", "a", "M", "N1", "N2", "value_float", "reference", "ratio"),
              [(r.q, r.a, r.M, r.N1, r.N2, float(r.value), r.reference, r.ratio)])
    t.summary.append(f"K = {float(r.value):.6g}")
    return t, code


def cmd_sw_probe(ns, rng):
    alpha = _seq(ns.alpha, ns.N, 2 * ns.N, rng)
    r = equidist.siegel_walfisz_probe(alpha, ns.N, ns.d, ns.q, ns.a, float(ns.A))
    t = Table(("N", "d", "q", "a", "A", "value_num", "value_den", "value_float", "envelope", "ratio"),
              [(r.N, r.d, r.q, r.a, r.A, r.value.numerator, r.value.denominator, float(r.value), r.envelope, r.ratio)])
    t.summary.append(f"deviation {float(r.value):.6g} vs envelope {r.envelope:.6g}")
    return t, EXIT_OK


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=0, help="seed for randomized inputs (default 0)")
    g.add_argument("--workers", type=positive_int, default=None,
                   help="worker processes (default $SIEVELAB_WORKERS or 1)")
    g.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="report format")
    g.add_argument("--output", default=None, help="report path (default stdout)")
    g.add_argument("--save-config", default=None, help="also write this run as a key=value file")


def _triple_flags(p):
    p.add_argument("--mode", choices=("exponent", "integer"), default="exponent",
                   help="exponent: d given in log-x units; integer: d an integer at scale --x")
    p.add_argument("--delta", type=rational, default=Fraction(1, 2000), help="delta, rational (default 1/2000)")
    p.add_argument("--epsilon", type=rational, default=Fraction(1, 100), help="epsilon for MAINPROP (default 1/100)")
    p.add_argument("--n-exp", type=rational, default=Fraction(1, 3), help="N = x^n_exp, rational (default 1/3)")
    p.add_argument("--nu", type=rational, action="append",
                   help="named prime exponent in log-x units; repeat for several primes")
    p.add_argument("--mass", type=rational, default=None,
                   help="small-prime mass in log-x units (default: fill up to the D exponent)")
    p.add_argument("--d", type=positive_int, default=None, help="integer d (integer mode)")
    p.add_argument("--x", type=positive_int, default=None, help="scale x (integer mode)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sievelab", description="Sieve-weight and equidistribution experiments.")
    parser.add_argument("--config", default=None, help="run the command stored in a key=value file")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=func)
        _common(p)
        return p

    p = add("hb-verify", cmd_hb_verify, "check Heath-Brown's identity exactly for n <= limit")
    p.add_argument("--limit", type=positive_int, default=5000, help="largest n checked")
    p.add_argument("--k", type=positive_int, default=3, help="number of Moebius factors, 1..4")
    p.add_argument("--x-rule", default="n", help="'n' for x = n, or a fixed x")
    p.add_argument("--cutoff", type=rational, default=Fraction(2), help="m_i <= cutoff * x^(1/k) (default 2)")
    p.add_argument("--sign", choices=heath_brown.SIGNS, default="resolved",
                   help="'resolved' uses (-1)^(j-1); 'printed' uses (-1)^j")

    p = add("dplus-enum", cmd_dplus_enum, "list D+(D) up to a limit")
    p.add_argument("--D", type=rational, required=True, help="sieve level D (rational)")
    p.add_argument("--limit", type=positive_int, required=True, help="largest d listed")

    p = add("dplus-split", cmd_dplus_split, "split d in D+(D) as d1 d2 with d1 <= D1, d2 <= D2")
    p.add_argument("--d", type=positive_int, required=True, help="integer to split, must lie in D+(D)")
    p.add_argument("--D", type=rational, required=True, help="level D (rational)")
    p.add_argument("--D1", type=rational, default=None, help="first level (rational)")
    p.add_argument("--D2", type=rational, default=None, help="second level (default D / D1)")
    p.add_argument("--t", type=rational, default=None, help="use D1 = D^t, D2 = D^(1-t)")

    p = add("triple-factor", cmd_triple_factor, "three-way factorization d = d1 d2 d3 by the case analysis")
    _triple_flags(p)
    p.add_argument("--random", type=int, default=0, help="run this many random exponent-mode instances instead")
    p.add_argument("--oracle-every", type=int, default=0, help="cross-check every k-th random instance")

    p = add("triple-oracle", cmd_triple_oracle, "exhaustive feasibility search for a triple")
    _triple_flags(p)
    p.add_argument("--set", choices=tuple(triple_factor.CONSTRAINT_SETS), default="PROP91",
                   help="constraint set (PROP91 uses delta with <=, MAINPROP uses epsilon with <)")

    p = add("extremal", cmd_extremal, "extremal configuration at D = x^(7/12 + delta') and its in-range control")
    p.add_argument("--delta-prime", type=rational, default=Fraction(1, 100), help="delta', rational in (0, 1/100]")
    p.add_argument("--constraint-delta", type=rational, default=None, help="delta in the constraints (default delta')")
    p.add_argument("--delta", type=rational, default=Fraction(1, 2000), help="delta of the in-range control")
    p.add_argument("--n-exp", type=rational, default=Fraction(1, 3), help="N = x^n_exp")

    p = add("weil-scan", cmd_weil_scan, "scan |S(a,b;q)| <= tau(q) q^(1/2) (a,b,q)^(1/2)")
    p.add_argument("--qmax", type=positive_int, default=100, help="largest modulus q (at most 2000)")
    p.add_argument("--qmin", type=positive_int, default=1, help="smallest modulus q")

    p = add("kloosterman", cmd_kloosterman, "evaluate one Kloosterman sum")
    p.add_argument("--a", type=int, required=True, help="coefficient of x (integer)")
    p.add_argument("--b", type=int, required=True, help="coefficient of x^-1 (integer)")
    p.add_argument("--q", type=positive_int, required=True, help="modulus")

    p = add("poisson-check", cmd_poisson_check, "compare both sides of truncated Poisson summation")
    p.add_argument("--M", type=positive_int, default=1000, help="length scale M (upper bound with --random)")
    p.add_argument("--q", type=positive_int, default=7, help="modulus (upper bound with --random)")
    p.add_argument("--a", type=int, default=3, help="residue class a mod q")
    p.add_argument("--H", type=int, default=None, help="frequency cutoff (default 100 q/M + 100)")
    p.add_argument("--random", type=int, default=0, help="draw this many (M, q, a) with M, q up to --M, --q")

    p = add("bv-table", cmd_bv_table, "sum over q of sup_a |pi(x;q,a) - pi(x)/phi(q)|")
    p.add_argument("--x", type=positive_int, required=True, help="count primes below x (at most 10^7)")
    p.add_argument("--qmax", type=int, default=None, help="largest modulus")
    p.add_argument("--B", type=float, default=None, help="use Q = x^(1/2) / (log x)^B")
    p.add_argument("--A", type=float, default=None, help="also normalize by x / (log x)^A")

    p = add("weighted-discrepancy", cmd_weighted_discrepancy, "sum_q lambda_q (pi(x;q,a) - pi(x)/phi(q))")
    p.add_argument("--x", type=positive_int, required=True, help="count primes below x")
    p.add_argument("--a", type=int, default=1, help="residue class a")
    p.add_argument("--weights", choices=("lambda-plus", "delta-one", "zero"), default="lambda-plus",
                   help="weight family lambda_q")
    p.add_argument("--D", type=rational, default=None, help="sieve level for lambda-plus weights")

    p = add("delta-q", cmd_delta_q, "bilinear discrepancy Delta(q) of alpha * beta")
    p.add_argument("--q", type=positive_int, required=True, help="modulus")
    p.add_argument("--a", type=int, default=1, help="residue class a mod q")
    p.add_argument("--N", type=positive_int, required=True, help="alpha lives on (N, 2N]")
    p.add_argument("--M", type=positive_int, required=True, help="beta lives on (M, 2M]")
    p.add_argument("--alpha", choices=SEQ_KINDS, default="ones", help="alpha sequence (random uses --seed)")
    p.add_argument("--beta", choices=SEQ_KINDS, default="ones", help="beta sequence (random uses --seed)")
    p.add_argument("--check-oracle", action="store_true", help="compare with the double-loop oracle")

    p = add("fundamental-check", cmd_fundamental_check, "rough numbers in a progression vs 1/phi(q) of all")
    p.add_argument("--q", type=positive_int, required=True, help="modulus")
    p.add_argument("--b", type=int, required=True, help="residue class b, coprime to q")
    p.add_argument("--t", type=positive_int, required=True, help="count n <= t")
    p.add_argument("--z", type=float, default=equidist.DEFAULT_Z, help="sifting bound (default 7)")

    p = add("double-divisor", cmd_double_divisor, "smoothed double-divisor discrepancy K")
    p.add_argument("--q", type=positive_int, required=True, help="modulus")
    p.add_argument("--a", type=int, default=1, help="residue class a, coprime to q")
    p.add_argument("--M", type=positive_int, required=True, help="alpha lives on (M, 2M]")
    p.add_argument("--N1", type=positive_int, required=True, help="scale of the first smooth variable")
    p.add_argument("--N2", type=positive_int, required=True, help="scale of the second smooth variable, >= N1")
    p.add_argument("--alpha", choices=SEQ_KINDS, default="ones", help="alpha sequence (random uses --seed)")
    p.add_argument("--epsilon", type=rational, default=None, help="compare with x / (q x^epsilon)")
    p.add_argument("--check-oracle", action="store_true", help="compare with the triple-loop oracle")

    p = add("sw-probe", cmd_sw_probe, "Siegel-Walfisz deviation of a sequence on (N, 2N]")
    p.add_argument("--N", type=positive_int, required=True, help="sequence lives on (N, 2N]")
    p.add_argument("--d", type=positive_int, default=1, help="restrict to (n, d) = 1")
    p.add_argument("--q", type=positive_int, required=True, help="modulus")
    p.add_argument("--a", type=int, default=1, help="residue class a, coprime to q")
    p.add_argument("--A", type=rational, default=Fraction(1), help="log power in the envelope")
    p.add_argument("--alpha", choices=SEQ_KINDS, default="mobius", help="sequence (random uses --seed)")
    return parser


def _to_config(ns) -> RunConfig:
    params = {}
    for k, v in vars(ns).items():
        if k in META or v is None:
            continue
        if isinstance(v, bool):
            params[k] = "true" if v else "false"
        elif isinstance(v, list):
            params[k] = ",".join(str(i) for i in v)
        else:
            params[k] = str(v)
    return RunConfig(ns.command, params, ns.seed, ns.workers, ns.format, ns.output)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.config is not None:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = RunConfig.from_text(fh.read())
            ns = parser.parse_args(cfg.to_argv())
        if ns.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"sievelab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"sievelab: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if ns.workers is None:
        ns.workers = _default_workers()
    try:
        if ns.save_config:
            with open(ns.save_config, "w", encoding="utf-8") as fh:
                fh.write(_to_config(ns).to_text())
        table, code = ns.func(ns, random.Random(ns.seed))
        data = emit_report(table, ns.format)
        if ns.output:
            with open(ns.output, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        for line in table.summary:
            print(line, file=sys.stderr)
        return code
    except InvariantViolation as exc:
        print(f"sievelab: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DomainError as exc:
        print(f"sievelab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ResourceError, NumericError, OSError) as exc:
        print(f"sievelab: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SievelabError as exc:
        print(f"sievelab: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())
