import pytest

from helpers import PureProgramGenerator, frame_matches_snapshot, snapshot_frame
from mls import values
from mls.values import MlsError


def run(interp, src):
    return interp.eval_source(src)


# -- arithmetic and coercion ---------------------------------------------------

def test_basic_arithmetic(interp):
    assert run(interp, "1 + 2").payload == [3]
    assert run(interp, "1 + 2").kind == values.INTEGER
    assert run(interp, "2 * 3.5").payload == [7.0]
    assert run(interp, "2 * 3.5").kind == values.DOUBLE
    assert run(interp, "7 / 2").payload == [3.5]
    assert run(interp, "7 / 2").kind == values.DOUBLE
    assert run(interp, "TRUE + TRUE").payload == [2]


def test_vector_recycling(interp):
    assert run(interp, "c(1, 2, 3) + 10").payload == [11, 12, 13]
    assert run(interp, "c(1, 2) * c(3, 4)").payload == [3, 8]
    with pytest.raises(MlsError, match="lengths do not match"):
        run(interp, "c(1, 2) + c(1, 2, 3)")


def test_empty_vector_propagates(interp):
    v = run(interp, "rng_draw(0) < 0.5")
    assert v.kind == values.LOGICAL and v.payload == []
    assert run(interp, "sum(rng_draw(0) < 0.5)").payload == [0]


def test_division_by_zero_gives_infinities(interp):
    assert run(interp, "1 / 0").payload[0] == float("inf")
    assert run(interp, "-1 / 0").payload[0] == float("-inf")
    out = run(interp, "0 / 0").payload[0]
    assert out != out  # NaN


def test_string_arithmetic_rejected(interp):
    with pytest.raises(MlsError, match="non-numeric"):
        run(interp, '"a" + 1')


def test_comparisons(interp):
    assert run(interp, "c(1, 5, 3) < 4").payload == [True, False, True]
    assert run(interp, '"apple" < "banana"').payload == [True]
    with pytest.raises(MlsError, match="compatible types"):
        run(interp, '"a" < 1')


def test_short_circuit(interp):
    assert run(interp, "FALSE && stop()").payload == [False]
    assert run(interp, "TRUE || stop()").payload == [True]
    assert run(interp, "TRUE && FALSE").payload == [False]


# -- environments and assignment -------------------------------------------------

def test_local_assignment_does_not_leak(interp):
    run(interp, "x <- 10; f <- function() { x <- 99; x }; f()")
    assert run(interp, "x").payload == [10]


def test_copy_on_modify_for_arguments(interp):
    run(interp, "f <- function(x) { x[1] <- 99; x }; y <- c(1, 2, 3); out <- f(y)")
    assert run(interp, "y").payload == [1, 2, 3]
    assert run(interp, "out").payload == [99, 2, 3]


def test_superassign_counter(interp):
    run(interp, "make <- function() { n <- 0; function() { n <<- n + 1; n } }; inc <- make()")
    assert run(interp, "inc()").payload == [1]
    assert run(interp, "inc()").payload == [2]
    assert run(interp, "inc()").payload == [3]


def test_superassign_falls_back_to_global(interp):
    run(interp, "f <- function() { brand_new <<- 42 }; f()")
    assert run(interp, "brand_new").payload == [42]


def test_superassign_at_top_level_targets_global(interp):
    run(interp, "tl <- 1; tl <<- 2")
    assert run(interp, "tl").payload == [2]


def test_rebinding_last_wins(interp):
    assert run(interp, "x <- 1; x <- 2; x").payload == [2]


def test_unbound_symbol_reports_location(interp):
    with pytest.raises(MlsError) as exc:
        run(interp, "1 + nope")
    assert "object 'nope' not found" in exc.value.message
    assert exc.value.loc == (1, 5)


def test_environment_values_alias(interp):
    run(interp, "e <- environment(); e$stash <- 7")
    assert run(interp, "stash").payload == [7]
    run(interp, "e2 <- e; e2$stash <- 8")
    assert run(interp, "stash").payload == [8]


def test_deep_copied_environment_still_aliases(interp):
    run(interp, "e <- globalenv(); e2 <- copy(e); e2$k <- 5")
    assert run(interp, "k").payload == [5]


def test_assign_builtin(interp):
    run(interp, "f <- function() { assign('local_only', 1); local_only }")
    assert run(interp, "f()").payload == [1]
    with pytest.raises(MlsError, match="not found"):
        run(interp, "local_only")
    run(interp, "g <- function() assign('seen', 2, globalenv()); g()")
    assert run(interp, "seen").payload == [2]


# -- argument matching -------------------------------------------------------------

def test_default_evaluates_in_call_env(interp):
    assert run(interp, "f <- function(x, y = x * 2) y; f(3)").payload == [6]


def test_exact_name_then_position(interp):
    assert run(interp, "f <- function(x, y) x - y; f(y = 5, 4)").payload == [-1]


def test_unused_argument_errors(interp):
    with pytest.raises(MlsError, match="unused argument 'z'"):
        run(interp, "f <- function(x) x; f(z = 1)")
    with pytest.raises(MlsError, match="unused argument"):
        run(interp, "f <- function(x) x; f(1, 2)")


def test_matched_by_multiple_errors(interp):
    with pytest.raises(MlsError, match="matched by multiple"):
        run(interp, "f <- function(x) x; f(x = 1, x = 2)")


def test_missing_argument_errors_on_force(interp):
    run(interp, "f <- function(a, b) a")
    assert run(interp, "f(1)").payload == [1]
    with pytest.raises(MlsError, match="argument 'b' is missing, with no default"):
        run(interp, "g <- function(a, b) b; g(1)")


def test_default_cycle_detected(interp):
    with pytest.raises(MlsError, match="cycle"):
        run(interp, "f <- function(a = b, b = a) a; f()")


# -- laziness ------------------------------------------------------------------

def test_unforced_error_argument_is_harmless(interp):
    assert run(interp, 'g <- function(a, b) a; g(1, stop("boom"))').payload == [1]


def test_defaults_are_lazy(interp):
    assert run(interp, 'f <- function(a, b = stop("no")) a; f(5)').payload == [5]


def test_promise_memoization(interp):
    ticks = []
    interp.register_foreign("tick", lambda i, args: (ticks.append(1), values.scalar_int(len(ticks)))[1])
    run(interp, 'h <- function(p, q) { u <- p; v <- p; u + v }; out <- h(foreign("tick"), 0)')
    assert len(ticks) == 1
    assert run(interp, "out").payload == [2]


def test_unforced_side_effect_never_runs(interp):
    ticks = []
    interp.register_foreign("tick", lambda i, args: (ticks.append(1), values.scalar_int(1))[1])
    run(interp, 'h <- function(p, q) q; h(foreign("tick"), 7)')
    assert ticks == []


# -- interpreter state builtins ------------------------------------------------------

def test_options_roundtrip(interp):
    run(interp, 'options("tol", 1e-8)')
    assert run(interp, 'get_option("tol")').payload == [1e-8]
    assert run(interp, 'get_option("unset")').kind == values.NULL


def test_get_option_from(interp):
    assert run(interp, 'get_option_from(list(tol = 2), "tol")').payload == [2]
    assert run(interp, 'get_option_from(list(), "tol")').kind == values.NULL


def test_foreign_stub_and_unknown_tag(interp):
    assert run(interp, 'foreign("identity", 42)').payload == [42]
    with pytest.raises(MlsError, match="unknown foreign tag 'nope'"):
        run(interp, 'foreign("nope")')


def test_stop_carries_message_and_location(interp):
    with pytest.raises(MlsError) as exc:
        run(interp, 'f <- function() stop("bad thing")\nf()')
    assert exc.value.message == "bad thing"
    assert exc.value.loc is not None


# -- indexing -------------------------------------------------------------------

def test_indexing_variants(interp):
    assert run(interp, "x <- c(10, 20, 30); x[2]").payload == [20]
    assert run(interp, "x[c(1, 3)]").payload == [10, 30]
    assert run(interp, "x[x > 15]").payload == [20, 30]
    assert run(interp, 'y <- c(a = 1, b = 2); y["b"]').payload == [2]


def test_indexing_errors(interp):
    run(interp, "x <- c(1, 2)")
    with pytest.raises(MlsError, match="out of bounds"):
        run(interp, "x[3]")
    with pytest.raises(MlsError, match="invalid index"):
        run(interp, "x[0]")
    with pytest.raises(MlsError, match="not subsettable"):
        run(interp, "f <- function() 1; f[1]")


def test_index_assign_promotes(interp):
    v = run(interp, "x <- c(1, 2, 3); x[2] <- 0.5; x")
    assert v.kind == values.DOUBLE
    assert v.payload == [1.0, 0.5, 3.0]


def test_list_field_access_and_update(interp):
    assert run(interp, "m <- list(a = 1, b = 2); m$a").payload == [1]
    assert run(interp, "m$missing").kind == values.NULL
    run(interp, "m$c <- 3")
    assert run(interp, "names(m)").payload == ["a", "b", "c"]
    run(interp, "m$a <- NULL")
    assert run(interp, "names(m)").payload == ["b", "c"]


def test_el_extracts_list_element(interp):
    assert run(interp, "el(list(5, 6), 2)").payload == [6]


# -- control flow -----------------------------------------------------------------

def test_if_without_else_yields_null(interp):
    assert run(interp, "if (FALSE) 1").kind == values.NULL


def test_while_loop(interp):
    assert run(interp, "i <- 0; s <- 0; while (i < 5) { i <- i + 1; s <- s + i }; s").payload == [15]


def test_condition_errors(interp):
    with pytest.raises(MlsError, match="length zero"):
        run(interp, "if (c()) 1")
    with pytest.raises(MlsError, match="interpretable as logical"):
        run(interp, 'if ("x") 1')


# -- visibility --------------------------------------------------------------------

def test_top_level_visibility(capture):
    from mls import reader

    capture.run_top_level(reader.parse_program("x <- 5\nx\ninvisible(9)\nx + 1"))
    assert capture.out.getvalue() == "[1] 5\n[1] 6\n"


def test_function_value_from_assignment_is_invisible(capture):
    from mls import reader

    capture.run_top_level(reader.parse_program("f <- function() { y <- 1 }\nf()"))
    assert capture.out.getvalue() == ""


# -- miscellaneous semantics ------------------------------------------------------

def test_arithmetic_drops_attributes_except_names(interp):
    v = run(interp, 'x <- set_attr(c(a = 1, b = 2), "class", c("classy")); x + 1')
    assert "class" not in v.attributes
    assert v.attributes["names"].payload == ["a", "b"]


def test_non_function_callee_errors(interp):
    with pytest.raises(MlsError, match="non-function"):
        run(interp, "(1)(2)")


def test_function_position_lookup_skips_data(interp):
    # a data binding named like a builtin does not shadow the function
    assert run(interp, "c <- 1; c(c, 2)").payload == [1, 2]


def test_independent_interpreters_share_nothing():
    from mls.interpreter import Interpreter

    a = Interpreter()
    b = Interpreter()
    a.eval_source("x <- 1")
    with pytest.raises(MlsError, match="not found"):
        b.eval_source("x")
    a.eval_source('options("tol", 1)')
    assert b.eval_source('get_option("tol")').kind == values.NULL


def test_runaway_recursion_is_a_clean_error(interp):
    with pytest.raises(MlsError, match="nested too deeply"):
        run(interp, "f <- function() f(); f()")


def test_chained_assignment(interp):
    run(interp, "a <- b <- 2")
    assert run(interp, "a").payload == [2]
    assert run(interp, "b").payload == [2]


def test_index_assign_pulls_nonlocal_into_local_copy(interp):
    run(interp, "y <- c(1, 2, 3); f <- function() { y[1] <- 99; y }; out <- f()")
    assert run(interp, "out").payload == [99, 2, 3]
    assert run(interp, "y").payload == [1, 2, 3]


def test_default_may_reference_later_formal(interp):
    assert run(interp, "f <- function(a = b + 1, b) a; f(b = 10)").payload == [11]


def test_loop_and_bare_conditional_results_are_invisible(capture):
    from mls import reader

    capture.run_top_level(reader.parse_program("if (FALSE) 1\nwhile (FALSE) 1\nNULL"))
    assert capture.out.getvalue() == "NULL\n"


def test_evaluator_total_over_junk_programs():
    from hypothesis import HealthCheck, given, settings
    from hypothesis import strategies as st

    from mls import reader
    from mls.interpreter import Interpreter
    from mls.reader import MlsSyntaxError

    @settings(max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
    @given(st.text(alphabet='abx12 .+-*/<>=!&|(){}[]$,;"\n', max_size=30))
    def fuzz(text):
        try:
            exprs = reader.parse_program(text)
        except MlsSyntaxError:
            return
        try:
            Interpreter(max_call_depth=50).eval_program(exprs)
        except MlsError:
            pass

    fuzz()


# -- locality property ---------------------------------------------------------------

def test_random_pure_programs_preserve_globals():
    from mls.interpreter import Interpreter

    gen = PureProgramGenerator(1234)
    for _ in range(25):
        program, call = gen.program()
        interp = Interpreter()
        interp.eval_source(program)
        snap = snapshot_frame(interp.global_env)
        interp.eval_source(call)
        assert frame_matches_snapshot(interp.global_env, snap), program
