import random

import pytest

from oracles import s3_first_match
from mls import values
from mls.values import MlsError


def run(interp, src):
    return interp.eval_source(src)


def define_generic(interp, name):
    run(interp, f'{name} <- function(x) UseMethod("{name}")')


def test_direct_hit(interp):
    define_generic(interp, "show1")
    run(interp, 'show1.lm <- function(x) "from lm"')
    run(interp, 'obj <- set_attr(1, "class", c("lm"))')
    assert run(interp, "show1(obj)").payload == ["from lm"]


def test_inherited_hit_walks_class_vector(interp):
    define_generic(interp, "show2")
    run(interp, 'show2.lm <- function(x) "from lm"')
    run(interp, 'obj <- set_attr(1, "class", c("glm", "lm"))')
    assert run(interp, "show2(obj)").payload == ["from lm"]


def test_default_method(interp):
    define_generic(interp, "show3")
    run(interp, 'show3.default <- function(x) "fallback"')
    run(interp, 'obj <- set_attr(1, "class", c("mystery"))')
    assert run(interp, "show3(obj)").payload == ["fallback"]


def test_no_applicable_method(interp):
    define_generic(interp, "show4")
    run(interp, 'obj <- set_attr(1, "class", c("mystery"))')
    with pytest.raises(MlsError, match="no applicable method for 'show4'"):
        run(interp, "show4(obj)")


def test_instance_based_dispatch_posix_style(interp):
    """Two objects share the leading class string; with only the shared
    method they dispatch identically, with specialized methods they part
    ways. The inheritance lives in each instance, not in a registry."""
    run(interp, 'ct <- set_attr(1, "class", c("POSIXt", "POSIXct"))')
    run(interp, 'lt <- set_attr(1, "class", c("POSIXt", "POSIXlt"))')

    define_generic(interp, "fmt_shared")
    run(interp, 'fmt_shared.POSIXt <- function(x) "shared"')
    assert run(interp, "fmt_shared(ct)").payload == ["shared"]
    assert run(interp, "fmt_shared(lt)").payload == ["shared"]

    define_generic(interp, "fmt_split")
    run(interp, 'fmt_split.POSIXct <- function(x) "ct"')
    run(interp, 'fmt_split.POSIXlt <- function(x) "lt"')
    assert run(interp, "fmt_split(ct)").payload == ["ct"]
    assert run(interp, "fmt_split(lt)").payload == ["lt"]


def test_dispatch_does_not_force_other_arguments(interp):
    run(interp, 'peek <- function(x, extra) UseMethod("peek")')
    run(interp, 'peek.default <- function(x, extra) x + 1')
    assert run(interp, "peek(1, stop('never'))").payload == [2]


def test_method_promises_stay_single_force(interp):
    ticks = []
    interp.register_foreign("tick", lambda i, a: (ticks.append(1), values.scalar_int(len(ticks)))[1])
    run(interp, 'twice <- function(x, y) UseMethod("twice")')
    run(interp, "twice.default <- function(x, y) y + y")
    assert run(interp, 'twice(1, foreign("tick"))').payload == [2]
    assert len(ticks) == 1


def test_renaming_a_method_changes_dispatch(interp):
    define_generic(interp, "show5")
    run(interp, 'show5.alpha <- function(x) "alpha"')
    run(interp, 'show5.default <- function(x) "default"')
    run(interp, 'obj <- set_attr(1, "class", c("alpha"))')
    assert run(interp, "show5(obj)").payload == ["alpha"]
    # rebinding under a different pattern removes the method from dispatch
    run(interp, "show5.beta <- show5.alpha")
    run(interp, "show5.alpha <- 42")
    assert run(interp, "show5(obj)").payload == ["default"]


def test_inherits(interp):
    run(interp, 'obj <- set_attr(1, "class", c("glm", "lm"))')
    assert run(interp, 'inherits(obj, "lm")').payload == [True]
    assert run(interp, 'inherits(obj, "aov")').payload == [False]
    assert run(interp, 'inherits(1.5, "numeric")').payload == [True]


def test_generic_value_returned(interp):
    define_generic(interp, "area6")
    run(interp, "area6.sq <- function(x) x$side * x$side")
    run(interp, 'sq <- set_attr(list(side = 3), "class", c("sq"))')
    assert run(interp, "area6(sq)").payload == [9]


# -- binary operator dispatch --------------------------------------------------

MONEY_PRELUDE = """
money <- function(amount) set_attr(amount, "class", c("money"))
strip <- function(m) set_attr(m, "class", NULL)
`+.money` <- function(e1, e2) money(strip(e1) + strip(e2))
"""


def test_binary_dispatch_left_operand(interp):
    run(interp, MONEY_PRELUDE)
    v = run(interp, "money(2) + 3")
    assert v.payload == [5]
    assert values.implicit_class(v).payload == ["money"]


def test_binary_dispatch_right_operand(interp):
    run(interp, MONEY_PRELUDE)
    v = run(interp, "3 + money(2)")
    assert values.implicit_class(v).payload == ["money"]


def test_binary_dispatch_both_same_method_no_warning(capture):
    run(capture, MONEY_PRELUDE)
    v = run(capture, "money(2) + money(3)")
    assert v.payload == [5]
    assert capture.err.getvalue() == ""


def test_binary_dispatch_incompatible_methods_warns_left_wins(capture):
    run(capture, MONEY_PRELUDE)
    run(capture, '`+.points` <- function(e1, e2) "points-win"')
    run(capture, 'p <- set_attr(1, "class", c("points"))')
    v = run(capture, "money(2) + p")
    assert values.implicit_class(v).payload == ["money"]
    assert 'incompatible methods' in capture.err.getvalue()


def test_unclassed_operands_use_builtin(interp):
    run(interp, MONEY_PRELUDE)
    v = run(interp, "1 + 2")
    assert v.payload == [3] and "class" not in v.attributes


def test_comparison_dispatch(interp):
    run(interp, '`<.version` <- function(e1, e2) "compared"')
    run(interp, 'v <- set_attr(1, "class", c("version"))')
    assert run(interp, "v < 2").payload == ["compared"]


def test_operator_method_local_to_a_function(interp):
    run(
        interp,
        """
use_local <- function(v) {
  `+.tagged` <- function(e1, e2) "local-method"
  t <- set_attr(v, "class", c("tagged"))
  t + 1
}
""",
    )
    assert run(interp, "use_local(5)").payload == ["local-method"]
    # the method never leaked into the global environment
    with pytest.raises(MlsError, match="not found"):
        run(interp, "`+.tagged`")


def test_use_method_with_named_first_argument(interp):
    define_generic(interp, "show7")
    run(interp, 'show7.lm <- function(x) "hit"')
    run(interp, 'obj <- set_attr(1, "class", c("lm"))')
    assert run(interp, "show7(x = obj)").payload == ["hit"]


# -- oracle equivalence ---------------------------------------------------------

def test_dispatch_oracle_equivalence(interp):
    alphabet = ["c1", "c2", "c3", "c4", "c5", "c6"]
    rnd = random.Random(99)
    for case in range(120):
        g = f"orc{case}"
        n_methods = rnd.randint(0, 4)
        defined = set(rnd.sample(alphabet, n_methods))
        if rnd.random() < 0.5:
            defined.add("default")
        run(interp, f'{g} <- function(x) UseMethod("{g}")')
        for cls in defined:
            run(interp, f'`{g}.{cls}` <- function(x) "{cls}"')
        class_vector = [rnd.choice(alphabet) for _ in range(rnd.randint(1, 4))]
        classes = ", ".join(f'"{c}"' for c in class_vector)
        run(interp, f'obj <- set_attr(1, "class", c({classes}))')
        expected = s3_first_match(class_vector, defined)
        if expected is None:
            with pytest.raises(MlsError, match="no applicable method"):
                run(interp, f"{g}(obj)")
        else:
            assert run(interp, f"{g}(obj)").payload == [expected], (class_vector, defined)
