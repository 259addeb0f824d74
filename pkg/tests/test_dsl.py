import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modsig import (
    ModularSystem,
    OrderDistribution,
    ParseError,
    Partition,
    StructureFunction,
    ValidationError,
    block_product,
    compose,
    make_k_out_of_n,
)
from modsig.dsl import (
    elaborate,
    format_distribution,
    format_partition,
    load_distribution,
    load_system,
    parse_distribution,
    parse_partition,
    parse_structure,
    parse_system,
    to_text,
)
from modsig.dsl.files import expression_table
from modsig.dsl.parser import Component, KOutOfN, Name, Parallel, Series
from helpers import random_distribution, skewed_pair_distribution

DATA = Path(__file__).parent / "data"


def evaluate(expr, working):
    """Direct recursive evaluation of an expression on a set of working atoms."""
    if isinstance(expr, (Component, Name)):
        return int(expr in working)
    values = [evaluate(a, working) for a in expr.args]
    if isinstance(expr, Series):
        return min(values)
    if isinstance(expr, Parallel):
        return max(values)
    return int(sum(values) >= expr.k)


class TestParser:
    def test_phi1(self):
        expr = parse_structure("min(x1, x4, max(x2, x3))")
        assert expr == Series((Component(1), Component(4), Parallel((Component(2), Component(3)))))

    def test_koutofn(self):
        assert parse_structure("koutofn(2; x1, x2, x3)") == KOutOfN(2, (Component(1), Component(2), Component(3)))

    def test_aliases(self):
        assert parse_structure("series(x1, x2)") == parse_structure("min(x1,x2)")
        assert parse_structure("parallel(x1, x2)") == parse_structure("max( x1 , x2 )")

    def test_duplicate(self):
        with pytest.raises(ParseError) as info:
            parse_structure("series(x1, x1)")
        assert (info.value.line, info.value.column) == (1, 12)

    @pytest.mark.parametrize("text", ["koutofn(0; x1, x2)", "koutofn(3; x1, x2)"])
    def test_threshold_range(self, text):
        with pytest.raises(ParseError):
            parse_structure(text)

    @pytest.mark.parametrize(
        "text,column",
        [("series(x1, x2", 14), ("series(x1 x2)", 11), ("foo(x1)", 1), ("series(x1, $)", 12), ("x0", 1), ("", 1)],
    )
    def test_syntax_errors(self, text, column):
        with pytest.raises(ParseError) as info:
            parse_structure(text)
        assert info.value.column == column

    def test_error_message_format(self):
        err = ParseError("bad", 3, 7, "sys.txt")
        assert str(err) == "sys.txt:3:7: bad"


def expressions(max_atoms=6):
    """Expressions whose atoms are a permutation of x1..xm."""

    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_atoms))
        atoms = [Component(i) for i in draw(st.permutations(range(1, m + 1)))]

        def rec(items):
            if len(items) == 1 and draw(st.booleans()):
                return items[0]
            cuts = sorted(draw(st.sets(st.integers(1, len(items) - 1), max_size=3))) if len(items) > 1 else []
            if cuts:
                bounds = [0, *cuts, len(items)]
                args = tuple(rec(items[a:b]) for a, b in zip(bounds, bounds[1:]))
            else:
                args = tuple(items)
            kind = draw(st.sampled_from(["series", "parallel", "koutofn"]))
            if kind == "series":
                return Series(args)
            if kind == "parallel":
                return Parallel(args)
            return KOutOfN(draw(st.integers(1, len(args))), args)

        return rec(atoms)

    return build()


@settings(max_examples=150, deadline=None)
@given(expr=expressions())
def test_print_parse_round_trip(expr):
    assert parse_structure(to_text(expr)) == expr


@settings(max_examples=80, deadline=None)
@given(expr=expressions())
def test_expression_table_matches_evaluation(expr):
    comps = _atoms(expr)
    n = max(c.index for c in comps)
    phi = expression_table(expr, {Component(i): i - 1 for i in range(1, n + 1)}, n)
    for mask in range(1 << n):
        working = {Component(i + 1) for i in range(n) if (mask >> i) & 1}
        assert phi[mask] == evaluate(expr, working)


def _atoms(expr):
    if isinstance(expr, Component):
        return [expr]
    return [a for sub in expr.args for a in _atoms(sub)]


class TestSystemFiles:
    def test_flat(self):
        phi = elaborate(load_system(DATA / "phi1.sys"))
        expected = StructureFunction.from_function(4, lambda a: min(0 in a, 3 in a, max(1 in a, 2 in a)))
        assert phi == expected

    def test_modular(self):
        system = elaborate(load_system(DATA / "phi1_modular.sys"))
        assert isinstance(system, ModularSystem) and system.partition.r == 2
        assert system.partition == Partition.of((0, 3), (1, 2))
        assert compose(system) == elaborate(load_system(DATA / "phi1.sys"))

    def test_bridge_paths(self):
        phi = elaborate(load_system(DATA / "bridge.sys"))
        paths = [{0, 3}, {1, 4}, {0, 2, 4}, {1, 2, 3}]
        for mask in range(32):
            working = {i for i in range(5) if (mask >> i) & 1}
            assert phi[mask] == int(any(p <= working for p in paths))

    def test_twelve_components(self):
        system = elaborate(load_system(DATA / "twelve.sys"))
        assert system.n == 12 and system.partition.sizes == (4, 4, 4)
        assert system.organizer == make_k_out_of_n(2, 3)

    def test_distribution_reference(self):
        spec = load_system(DATA / "phi1_pairs.sys")
        assert spec.distribution == DATA / "pairs.dist"

    def test_partition_not_covering(self):
        text = "components 4\nmodule A {1, 2} = series(x1, x2)\nmodule B {3} = x3\norganizer series(A, B)\n"
        with pytest.raises(ValidationError):
            elaborate(parse_system(text))

    def test_overlapping_modules(self):
        text = "module A {1, 2} = series(x1, x2)\nmodule B {2, 3} = series(x2, x3)\norganizer series(A, B)\n"
        with pytest.raises(ValidationError):
            elaborate(parse_system(text))

    def test_unknown_module_name(self):
        text = "module A {1} = x1\nmodule B {2} = x2\norganizer series(A, C)\n"
        with pytest.raises(ValidationError):
            elaborate(parse_system(text))

    def test_organizer_arity(self):
        text = "module A {1} = x1\nmodule B {2} = x2\norganizer series(A)\n"
        with pytest.raises(ValidationError):
            elaborate(parse_system(text))

    def test_component_outside_module(self):
        text = "module A {1} = x2\nmodule B {2} = x1\norganizer series(A, B)\n"
        with pytest.raises(ValidationError):
            elaborate(parse_system(text))

    def test_component_beyond_n(self):
        with pytest.raises(ValidationError):
            elaborate(parse_system("components 2\nstructure series(x1, x3)\n"))

    def test_parse_errors_carry_position(self):
        with pytest.raises(ParseError) as info:
            parse_system("components 2\nstructure series(x1 x2)\n", source="s.sys")
        assert (info.value.line, info.value.column, info.value.source) == (2, 21, "s.sys")
        with pytest.raises(ParseError):
            parse_system("frobnicate 3\n")
        with pytest.raises(ParseError):
            parse_system("components 2\n")
        with pytest.raises(ParseError):
            parse_system("module A {1} = x1\n")
        with pytest.raises(ParseError):
            parse_system("structure x1\npaths {1}\n")

    def test_comments_and_blank_lines(self):
        text = "# header\n\ncomponents 2   # two\nstructure max(x1, x2)  # parallel\n"
        assert elaborate(parse_system(text)) == StructureFunction.from_values(2, [0, 1, 1, 1])


class TestPartitionText:
    def test_round_trip(self):
        p = parse_partition("1,2|3,4")
        assert p == Partition.of((0, 1), (2, 3))
        assert format_partition(p) == "1,2|3,4"

    def test_errors(self):
        with pytest.raises(ValidationError):
            parse_partition("1,2|2,3")
        with pytest.raises(ValidationError):
            parse_partition("1,2", n=3)
        with pytest.raises(ParseError):
            parse_partition("1,a|2")
        with pytest.raises(ParseError):
            parse_partition("1||2")


class TestDistributionFiles:
    def test_worked_example_file(self):
        assert load_distribution(DATA / "example.dist") == skewed_pair_distribution()

    def test_uniform(self):
        assert parse_distribution("uniform n=3\n") == OrderDistribution.uniform(3)

    def test_product(self):
        dist = load_distribution(DATA / "pairs.dist")
        expected = block_product(
            Partition.of((0, 1), (2, 3)),
            [[Fraction(1, 3), Fraction(2, 3), 0], [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]],
        )
        assert dist == expected

    def test_format_round_trip(self):
        dist = skewed_pair_distribution()
        assert parse_distribution(format_distribution(dist)) == dist
        rng = random.Random(0)
        other = random_distribution(rng, 5, support=0.2)
        assert parse_distribution(format_distribution(other)) == other

    @pytest.mark.parametrize(
        "text,error",
        [
            ("", ParseError),
            ("orders n=2\n", ParseError),
            ("order-distribution n=2\n1 2 1/2\n", ValidationError),
            ("order-distribution n=2\n1 1 1\n", ValidationError),
            ("order-distribution n=2\n1 2 x\n", ParseError),
            ("order-distribution n=2\n1 2\n", ParseError),
            ("order-distribution n=2\n1 2 1/2\n1 2 1/2\n", ValidationError),
            ("uniform n=2\n1 2 1\n", ParseError),
            ("product n=3\nblock 1 2 : 1\n", ValidationError),
        ],
    )
    def test_errors(self, text, error):
        with pytest.raises(error):
            parse_distribution(text)
