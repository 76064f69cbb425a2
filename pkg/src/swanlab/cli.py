"""Command line interface: ``swanlab <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 precision exhausted, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import bestform, extfield, oracle
from .cases import bundled_names, load_case
from .errors import (
    BelowThreshold,
    CapExceeded,
    DivisionByZero,
    InputError,
    InvalidBreaks,
    InvalidEmbedding,
    NoConvergence,
    PrecisionExhausted,
    SearchSpaceTooLarge,
)
from .extfield import CaseLimits, base_change_char, case_rng, random_case, verify_main_theorem

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECISION, EXIT_CAP = range(5)


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _out(line=""):
    sys.stdout.write(line + "\n")


def _vec(a):
    return "(" + ", ".join(str(c) for c in a.components) + ")"


def _require(case, what):
    value = case.character_spec() if what == "character" else case.embedding_spec()
    if value is None:
        raise InputError(f"case {case.name!r} has no {what}")
    return value


# -- swan / rsw / delta-tor ---------------------------------------------------------


def cmd_swan(args):
    case = load_case(args.case)
    chi = _require(case, "character")
    red = bestform.reduce_to_best(chi.components)
    _out(f"Sw_K = {bestform.swan_conductor(chi.components)}")
    _out(f"best_K = {_vec(red.best)}")
    emb = case.embedding_spec()
    if emb is not None:
        sw, steps, prec, _ = extfield.swan_over_l(chi, emb)
        best_l = bestform.reduce_to_best(base_change_char(chi, emb, prec=prec)).best
        _out(f"e = {emb.e}")
        _out(f"delta_tor = {emb.delta_tor()}")
        _out(f"Sw_L = {sw}")
        _out(f"best_L = {_vec(best_l)}")
    return EXIT_OK


def _form_lines(form, m):
    names = [f"d{n}" for n in form.field.names] + ["dlog t"]
    for name, c in zip(names, form.coefficients):
        yield f"  {name}: {c.truncate(-m)}"


def cmd_rsw(args):
    case = load_case(args.case)
    chi = _require(case, "character")
    emb = case.embedding_spec()
    a = chi.components
    if emb is not None:
        a = base_change_char(chi, emb)
    if bestform.swan_conductor(a) < 1:
        raise InputError("the refined Swan conductor needs Swan conductor at least 1")
    rs = bestform.refined_swan(a)
    _out(f"over = {'L' if emb is not None else 'K'}")
    _out(f"window = ({rs.n}, {rs.m})")
    _out(f"best = {_vec(rs.best)}")
    _out(f"rsw (mod F_{rs.m}) =")
    for line in _form_lines(rs.form, rs.m):
        _out(line)
    return EXIT_OK


def cmd_delta_tor(args):
    case = load_case(args.case)
    emb = _require(case, "embedding")
    _out(f"e = {emb.e}")
    _out(f"delta_tor = {emb.delta_tor()}")
    return EXIT_OK


# -- verify ---------------------------------------------------------------------------


def _record(case_name, index, kind, chi, emb):
    rep = verify_main_theorem(chi, emb)
    rec = {
        "case": case_name,
        "index": index,
        "kind": kind,
        "p": chi.p,
        "s": chi.s,
        "r": emb.r,
        "f": str(emb.f),
        "character": [c.to_expr() for c in chi.components.components],
    }
    rec.update(rep.as_dict())
    return rec


def _random_record(job):
    case_name, seed, index, limits = job
    chi, emb = random_case(case_rng(seed, index), limits)
    return _record(case_name, index, "random", chi, emb)


def _text_line(rec):
    status = "PASS" if rec["pass"] else ("FAIL" if rec["in_hypothesis"] else "OUT-OF-HYPOTHESIS")
    rel = "=" if rec["equal"] else "!="
    return (
        f"{rec['case']}[{rec['index']}] p={rec['p']} s={rec['s']} r={rec['r']} e={rec['e']} "
        f"delta_tor={rec['delta_tor']} Sw_K={rec['sw_k']} threshold={rec['threshold']} "
        f"predicted={rec['predicted']} {rel} computed={rec['computed']} {status}"
    )


def _verify_jobs(args):
    """Jobs in case order: (name, chi, emb) for a given pair, (name, seed, index, limits)
    for a random case.  Random cases are generated around the case's p, s and r."""
    cases = []
    if args.corpus:
        cases = [load_case(n) for n in bundled_names()]
    elif args.case:
        cases = [load_case(args.case)]
    jobs = []
    if not cases:
        trials = 20 if args.trials is None else args.trials
        seed = 0 if args.seed is None else args.seed
        jobs += [("random", seed, i, CaseLimits()) for i in range(trials)]
        return jobs
    for case in cases:
        chi, emb = case.character_spec(), case.embedding_spec()
        start = 0
        if chi is not None and emb is not None:
            jobs.append((case.name, chi, emb))
            start = 1
        trials = case.trials if args.trials is None else args.trials
        seed = case.seed if args.seed is None else args.seed
        limits = CaseLimits(primes=(case.p,), max_s=case.s, max_r=case.r)
        jobs += [(case.name, seed, i, limits) for i in range(start, start + trials)]
    return jobs


def _run_job(job):
    if len(job) == 3:
        name, chi, emb = job
        return _record(name, 0, "given", chi, emb)
    return _random_record(job)


def cmd_verify(args):
    jobs = _verify_jobs(args)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        records = [_run_job(j) for j in jobs]
    sink = open(args.jsonl, "w") if args.jsonl else None
    try:
        for rec in records:
            line = json.dumps(rec, sort_keys=True)
            if sink:
                sink.write(line + "\n")
            _out(line if args.json else _text_line(rec))
    finally:
        if sink:
            sink.close()
    inside = [r for r in records if r["in_hypothesis"]]
    failed = [r for r in inside if not r["pass"]]
    outside = [r for r in records if not r["in_hypothesis"]]
    summary = (
        f"{len(records)} cases: {len(inside)} in hypothesis, {len(inside) - len(failed)} passed, "
        f"{len(failed)} failed; {len(outside)} out of hypothesis "
        f"({sum(r['equal'] for r in outside)} with equality)"
    )
    if args.json:
        sys.stderr.write(summary + "\n")
    else:
        _out(summary)
    return EXIT_FAIL if failed else EXIT_OK


# -- psi -------------------------------------------------------------------------------


def cmd_psi(args):
    if args.mixed:
        p = args.p if args.p is not None else args.char_p
        if args.eK is None or p is None:
            raise InputError("--mixed needs --eK and the residue characteristic (--p or --char-p)")
        value = extfield.psi_ab_asymptotic(args.t, args.e, args.delta, p, e_k=args.eK)
    else:
        p = args.char_p if args.char_p is not None else args.p
        if p is None:
            raise InputError("give --char-p P (or --mixed --p P --eK EK)")
        value = extfield.psi_ab_asymptotic(args.t, args.e, args.delta, p)
    _out(str(value))
    return EXIT_OK


def cmd_psi_classical(args):
    if args.breaks is not None:
        br = extfield.parse_breaks(args.breaks, e=args.e)
    elif args.case is not None:
        br = load_case(args.case).psi_breaks()
        if br is None:
            raise InputError("case has no breaks")
    else:
        raise InputError("give --breaks or --case")
    _out(f"psi({args.t}) = {extfield.classical_psi(br, args.t)}")
    _out(f"dlog_different = {extfield.dlog_different(br)}")
    _out(f"last_upper_break = {br.last_upper()}")
    return EXIT_OK


# -- oracle ------------------------------------------------------------------------------


def cmd_oracle(args):
    status = EXIT_OK
    case = load_case(args.case)
    chi = case.character_spec()
    if chi is not None:
        a = chi.components
        if args.over_l:
            a = base_change_char(chi, _require(case, "embedding"))
        bounds = oracle.SearchBounds.for_vector(a, degree=args.degree)
        res = oracle.brute_force_best(a, bounds)
        best3 = bestform.is_best(a)
        best2 = bestform.is_best_by_positions(a)
        _out(f"vector = {_vec(a)}")
        _out(f"valuation = {res.original_valuation}")
        _out(f"is_best (v = v_log(da)) = {best3}")
        _out(f"is_best (relevant positions) = {best2}")
        _out(f"search size = {res.size}, searched = {res.searched}")
        _out(f"window: {res.note}")
        if res.found:
            _out(f"witness = {_vec(res.witness)} (valuation {res.original_valuation} -> {res.improved_valuation})")
        else:
            _out("witness = none found")
        agree = best3 == best2 == (not res.found)
        _out(f"agreement = {agree}")
        if not agree:
            status = EXIT_FAIL
    if args.ghost_trials:
        rep = oracle.ghost_check(args.ghost_trials, case.p, case.s, seed=case.seed)
        _out(
            f"ghost p={rep.p} s={rep.s} trials={rep.trials} "
            f"add_failures={rep.add_failures} neg_failures={rep.neg_failures}"
        )
        if not rep.ok:
            status = EXIT_FAIL
    return status


# -- entry point ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="swanlab", description="Swan conductors of Artin-Schreier-Witt characters")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("swan", help="Swan conductor over K and, with an embedding, over L")
    sp.add_argument("case")
    sp.set_defaults(func=cmd_swan)

    sp = sub.add_parser("rsw", help="refined Swan conductor and its window (n, n//p)")
    sp.add_argument("case")
    sp.set_defaults(func=cmd_rsw)

    sp = sub.add_parser("delta-tor", help="ramification index and delta_tor of the embedding")
    sp.add_argument("case")
    sp.set_defaults(func=cmd_delta_tor)

    sp = sub.add_parser("verify", help="randomized check of Sw(chi_L) = e Sw(chi) - delta_tor")
    sp.add_argument("case", nargs="?")
    sp.add_argument("--corpus", action="store_true", help="run every bundled case")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true", help="print one JSON record per case")
    sp.add_argument("--jsonl", metavar="PATH", help="also write JSON records to PATH")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("psi", help="asymptotic psi^ab = e t - delta_tor")
    sp.add_argument("--e", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--t", type=_fraction, required=True)
    sp.add_argument("--char-p", type=int, dest="char_p")
    sp.add_argument("--mixed", action="store_true")
    sp.add_argument("--p", type=int)
    sp.add_argument("--eK", type=int)
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("psi-classical", help="Herbrand psi from lower breaks")
    sp.add_argument("--breaks", help='"u1:g1,u2:g2,..." with |G_u| = g_i on (u_{i-1}, u_i]')
    sp.add_argument("--e", type=int, help="|G_0| if larger than the first order (tame part)")
    sp.add_argument("--case")
    sp.add_argument("--t", type=_fraction, required=True)
    sp.set_defaults(func=cmd_psi_classical)

    sp = sub.add_parser("oracle", help="brute-force best-ness and ghost checks")
    sp.add_argument("case")
    sp.add_argument("--degree", type=int, default=2)
    sp.add_argument("--over-l", action="store_true", dest="over_l")
    sp.add_argument("--ghost-trials", type=int, default=0, dest="ghost_trials")
    sp.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidBreaks, InvalidEmbedding, BelowThreshold, DivisionByZero, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (PrecisionExhausted, NoConvergence) as exc:
        sys.stderr.write(f"precision: {exc}\n")
        return EXIT_PRECISION
    except (CapExceeded, SearchSpaceTooLarge) as exc:
        sys.stderr.write(f"cap: {exc}\n")
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
