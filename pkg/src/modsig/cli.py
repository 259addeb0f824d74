"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 verification
failure. ``--format kv`` switches to one ``key=value`` line per datum with
exact rationals only; the table format also shows 12-digit decimals.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence, TextIO

from .dsl.files import (
    elaborate,
    format_partition,
    load_distribution,
    load_system,
    SystemSpec,
    parse_partition,
)
from .dsl.parser import parse_structure
from .errors import ParseError, SignatureError, ValidationError
from .modular import (
    compose_tail,
    recover_q_via_conjunctions,
    redundancy_report,
    verify_composition_theorem,
)
from .oracle import LifetimeSampler, monte_carlo_signature
from .quality import (
    DecompositionCoefficients,
    check_decomposable,
    event_probability,
    is_partition_exchangeable,
    is_partition_symmetric,
    is_symmetric,
    marginals,
    q_from_order_distribution,
    hypergeometric_coefficients,
)
from .signatures import (
    cumulative,
    probability_signature,
    structural_signature,
    structural_tail_signature,
    tail_probability_signature,
)
from .structure import ModularSystem, StructureFunction, compose

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_VERIFICATION = 4


def exact(x) -> str:
    return str(Fraction(x))


def decimal(x) -> str:
    return format(float(x), ".12g")


def yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def subset_label(mask: int) -> str:
    items = [str(i + 1) for i in range(mask.bit_length()) if (mask >> i) & 1]
    return "{" + ",".join(items) + "}"


class Report:
    """Collects results, then renders them as a table or as key=value lines."""

    def __init__(self):
        self.items: list[tuple] = []

    def value(self, key: str, title: str | None, value) -> None:
        self.items.append(("value", key, title, value))

    def vector(self, key: str, title: str, entries: Sequence, start: int) -> None:
        self.items.append(("vector", key, title, [(start + i, e) for i, e in enumerate(entries)]))

    def rows(self, key: str, title: str, header: Sequence[str], rows: Sequence[tuple[str, Sequence]]) -> None:
        self.items.append(("rows", key, title, (header, rows)))

    def render(self, fmt: str, out: TextIO) -> None:
        if fmt == "kv":
            for kind, key, _title, payload in self.items:
                if kind == "value":
                    out.write(f"{key}={self._kv(payload)}\n")
                elif kind == "vector":
                    for i, e in payload:
                        out.write(f"{key}.{i}={exact(e)}\n")
                else:
                    header, rows = payload
                    for label, values in rows:
                        for h, v in zip(header, values):
                            out.write(f"{key}.{label}.{h}={self._kv(v)}\n")
            return
        for kind, _key, title, payload in self.items:
            if kind == "value" and title is None:
                out.write(f"{self._kv(payload)}\n")
            elif kind == "value":
                out.write(f"{title}: {self._kv(payload)}\n")
            elif kind == "vector":
                out.write(f"{title}\n")
                for i, e in payload:
                    out.write(f"  {i:>3}  {exact(e):<16} {decimal(e)}\n")
            else:
                header, rows = payload
                out.write(f"{title}\n")
                out.write("  " + f"{'':<12}" + "".join(f"{h:<28}" for h in header).rstrip() + "\n")
                for label, values in rows:
                    cells = "".join(f"{self._cell(v):<28}" for v in values)
                    out.write(f"  {label:<12}{cells}".rstrip() + "\n")

    @staticmethod
    def _kv(v) -> str:
        if isinstance(v, bool):
            return yes_no(v)
        if isinstance(v, Fraction):
            return exact(v)
        return str(v)

    @staticmethod
    def _cell(v) -> str:
        if isinstance(v, bool):
            return yes_no(v)
        if isinstance(v, Fraction):
            return f"{exact(v)} ({decimal(v)})" if v.denominator != 1 else exact(v)
        return str(v)


class VerificationFailure(Exception):
    """Raised after the report is written when a claimed identity fails."""


def _load(path: str):
    spec = load_system(path)
    return spec, elaborate(spec)


def _flatten(obj) -> StructureFunction:
    return compose(obj) if isinstance(obj, ModularSystem) else obj


def _distribution_path(args, spec):
    if getattr(args, "distribution", None):
        return Path(args.distribution)
    return spec.distribution


# -- subcommands --------------------------------------------------------------


def cmd_signature(args, report: Report) -> None:
    spec, obj = _load(args.system)
    phi = _flatten(obj)
    report.value("n", "components", phi.n)
    dist_path = _distribution_path(args, spec)
    if dist_path is None:
        report.value("kind", "signature kind", "structural")
        sig = structural_signature(phi)
        tail = structural_tail_signature(phi)
        names = ("s", "structural signature s", "tail structural signature", "cumulative structural signature")
    else:
        dist = load_distribution(dist_path)
        if dist.n != phi.n:
            raise ValidationError(f"distribution has {dist.n} components, system {phi.n}")
        q = q_from_order_distribution(dist)
        report.value("kind", "signature kind", "probability")
        sig = probability_signature(phi, q)
        tail = tail_probability_signature(phi, q)
        names = ("p", "probability signature p", "tail probability signature", "cumulative probability signature")
    report.vector(names[0], names[1], sig.entries, 1)
    report.vector("tail", names[2], tail.entries, 0)
    report.vector("cumulative", names[3], cumulative(tail), 0)


def cmd_compose(args, report: Report) -> None:
    spec, obj = _load(args.system)
    if not isinstance(obj, ModularSystem):
        raise ValidationError("compose needs a modular system file (module and organizer lines)")
    report.value("n", "components", obj.n)
    report.value("partition", "partition", format_partition(obj.partition))
    dist_path = _distribution_path(args, spec)
    ok = True
    if args.coeffs == "hypergeometric":
        coeffs = hypergeometric_coefficients(obj.partition)
        tails = [structural_tail_signature(chi) for chi in obj.modules]
        composed = compose_tail(obj.organizer, tails, coeffs)
        direct = structural_tail_signature(compose(obj))
        report.vector("composed", "composed tail signature (hypergeometric coefficients)", composed.entries, 0)
        report.vector("direct", "direct tail structural signature", direct.entries, 0)
        ok = composed == direct
        report.value("verdict", "verdict", "exact match" if ok else "MISMATCH")
    elif dist_path is None:
        raise ValidationError("--coeffs from-distribution needs --distribution or a distribution line")
    if dist_path is not None:
        dist = load_distribution(dist_path)
        if dist.n != obj.n:
            raise ValidationError(f"distribution has {dist.n} components, system {obj.n}")
        result = verify_composition_theorem(obj, dist)
        report.value("decomposable", "decomposable", result.decomposable)
        if result.decomposable:
            report.vector("composed_p", "composed tail probability signature", result.composed.entries, 0)
            report.vector("direct_p", "direct tail probability signature", result.direct.entries, 0)
            report.value("distribution_verdict", "distribution verdict", "exact match" if result.match else "MISMATCH")
            ok = ok and bool(result.match)
        else:
            cx = result.counterexample
            report.value("counterexample", "counterexample subset", subset_label(cx.subset))
            report.value("reason", "reason", cx.reason)
            ok = False
    if not ok:
        raise VerificationFailure()


def cmd_quality(args, report: Report) -> None:
    dist = load_distribution(args.distribution)
    partition = parse_partition(args.partition, dist.n)
    q = q_from_order_distribution(dist)
    block_q = marginals(dist, partition)
    report.value("partition", "partition", format_partition(partition))
    c_sym = is_partition_symmetric(q, partition)
    if args.action == "check-symmetric":
        report.value("symmetric", "symmetric", is_symmetric(q))
        report.value("partition_symmetric", "C-symmetric", c_sym)
        report.value("marginals_symmetric", "block marginals symmetric", all(is_symmetric(m) for m in block_q))
        report.value("partition_exchangeable", "C-exchangeable", is_partition_exchangeable(dist, partition))
        return
    verdict = check_decomposable(q, block_q, partition)
    decomposable = isinstance(verdict, DecompositionCoefficients)
    if args.action == "check-decomposable":
        if args.format == "kv":
            report.value("decomposable", "decomposable", decomposable)
            report.value("partition_symmetric", "C-symmetric", c_sym)
        else:
            report.value("summary", None, f"decomposable: {yes_no(decomposable)}; C-symmetric: {yes_no(c_sym)}")
        if not decomposable:
            report.value("counterexample", "counterexample subset", subset_label(verdict.subset))
            report.value("reason", "reason", verdict.reason)
        return
    # show-coeffs
    report.value("decomposable", "decomposable", decomposable)
    if not decomposable:
        report.value("counterexample", "counterexample subset", subset_label(verdict.subset))
        raise VerificationFailure()
    rows = []
    for a, c in verdict.values.items():
        label = "(" + ",".join(map(str, a)) + ")"
        rows.append((label, (c, event_probability(q, partition, a))))
    report.rows("coeff", "decomposition coefficients by block counts", ("c", "event_probability"), rows)


def cmd_recover_q(args, report: Report) -> None:
    dist = load_distribution(args.distribution)
    partition = parse_partition(args.partition, dist.n)
    recovered = recover_q_via_conjunctions(dist, partition)
    direct = q_from_order_distribution(dist)
    rows = []
    ok = True
    for b in range(1 << dist.n):
        match = recovered[b] == direct[b]
        ok = ok and match
        rows.append((subset_label(b), (recovered[b], direct[b], match)))
    report.value("partition", "partition", format_partition(partition))
    report.rows("q", "quality function: recovered from conjunction systems vs direct", ("recovered", "direct", "match"), rows)
    report.value("verdict", "verdict", "exact match" if ok else "MISMATCH")
    if not ok:
        raise VerificationFailure()


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"{text!r} is not a comma-separated list of numbers") from None


def _sampler(args, n: int) -> LifetimeSampler:
    if args.sampler == "iid":
        return LifetimeSampler.iid(n, _float_list(args.rates)[0])
    if args.sampler == "exchangeable-pairs":
        return LifetimeSampler.exchangeable_pairs(
            n, _float_list(args.shock_rates)[0], _float_list(args.rates)[0]
        )
    if not args.blocks:
        raise ValidationError("--sampler block-product needs --blocks")
    partition = parse_partition(args.blocks, n)
    r = partition.r
    rates = _float_list(args.rates)
    shocks = _float_list(args.shock_rates)
    rates = rates * r if len(rates) == 1 else rates
    shocks = shocks * r if len(shocks) == 1 else shocks
    return LifetimeSampler.block_product(partition.blocks, shocks, rates)


def cmd_simulate(args, report: Report) -> None:
    _spec, obj = _load(args.system)
    phi = _flatten(obj)
    sampler = _sampler(args, phi.n)
    mc = monte_carlo_signature(phi, sampler, args.trials, args.seed)
    report.value("sampler", "sampler", sampler.kind)
    report.value("trials", "trials", mc.trials)
    report.value("seed", "seed", args.seed)
    report.value("resamples", "tie resamples", mc.resamples)
    rows = []
    reference = structural_signature(phi).entries if sampler.exchangeable else None
    for k, (est, se) in enumerate(zip(mc.estimates, mc.std_errors), start=1):
        cells = [format(est, ".6f"), format(se, ".6f")]
        if reference is not None:
            cells.append(reference[k - 1])
        rows.append((str(k), cells))
    header = ("estimate", "std_error") + (("exact",) if reference is not None else ())
    report.rows("p", "Monte Carlo signature estimate", header, rows)
    if reference is not None:
        report.value("within_4se", "within 4 standard errors of exact", mc.within(reference))


def cmd_redundancy(args, report: Report) -> None:
    path = Path(args.structure)
    if path.exists():
        _spec, obj = _load(args.structure)
    else:
        try:
            expr = parse_structure(args.structure)
        except ParseError as exc:
            raise ParseError(exc.message, exc.line, exc.column, "<argument>") from None
        obj = elaborate(SystemSpec(structure=expr))
    chi = _flatten(obj)
    rep = redundancy_report(chi)
    report.value("n", "components", chi.n)
    report.vector("S", "cumulative structural signature S", rep.base, 0)
    report.vector("S1", "system-level redundancy S(1)", rep.system_level, 0)
    report.vector("S2", "component-level redundancy S(2)", rep.component_level, 0)
    report.value("closed_forms_match", "closed forms equal generic computation", rep.closed_forms_match)
    report.value("ordering", "S(2)_k <= S(1)_k for all k", rep.component_level_dominates)
    if not (rep.closed_forms_match and rep.component_level_dominates):
        raise VerificationFailure()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "kv"), default="table", help="output format")

    parser = argparse.ArgumentParser(prog="modsig", description="Exact signatures of modular semicoherent systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signature", parents=[common], help="structural or probability signature of a system")
    p.add_argument("system")
    p.add_argument("--distribution")
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("compose", parents=[common], help="compose module signatures and compare with direct computation")
    p.add_argument("system")
    p.add_argument("--coeffs", choices=("hypergeometric", "from-distribution"), default="hypergeometric")
    p.add_argument("--distribution")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("quality", parents=[common], help="symmetry and decomposability of a quality function")
    p.add_argument("distribution")
    p.add_argument("action", choices=("check-symmetric", "check-decomposable", "show-coeffs"))
    p.add_argument("--partition", required=True, help='blocks such as "1,2|3,4"')
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("recover-q", parents=[common], help="rebuild q from signatures of conjunction systems")
    p.add_argument("distribution")
    p.add_argument("--partition", required=True)
    p.set_defaults(func=cmd_recover_q)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo signature estimate")
    p.add_argument("system")
    p.add_argument("--sampler", choices=("iid", "exchangeable-pairs", "block-product"), default="iid")
    p.add_argument("--blocks", help='blocks for block-product, such as "1,2|3,4"')
    p.add_argument("--rates", default="1", help="individual exponential rate(s), comma separated")
    p.add_argument("--shock-rates", default="1", help="common-shock rate(s), comma separated")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("redundancy", parents=[common], help="system- versus component-level redundancy")
    p.add_argument("structure", help="system file or inline expression such as 'koutofn(2; x1, x2, x3)'")
    p.set_defaults(func=cmd_redundancy)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    report = Report()
    code = EXIT_OK
    try:
        args.func(args, report)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (SignatureError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except VerificationFailure:
        code = EXIT_VERIFICATION
    report.render(args.format, out)
    if code == EXIT_VERIFICATION:
        err.write("verification failed\n")
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
