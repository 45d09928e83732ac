from mls import printer, values


def fmt(interp, src):
    return printer.format_value(interp.eval_source(src), interp)


def test_double_formatting():
    assert printer.format_double(120.0) == "120"
    assert printer.format_double(0.1) == "0.1"
    assert printer.format_double(float("nan")) == "NaN"
    assert printer.format_double(float("inf")) == "Inf"
    assert printer.format_double(float("-inf")) == "-Inf"
    assert printer.format_double(1e-8) == "1e-08"


def test_vector_formats(interp):
    assert fmt(interp, "c(1, 2, 3)") == "[1] 1 2 3"
    assert fmt(interp, "c(TRUE, FALSE)") == "[1] TRUE FALSE"
    assert fmt(interp, 'c("a", "b")') == '[1] "a" "b"'
    assert fmt(interp, "NULL") == "NULL"
    assert fmt(interp, "rng_draw(0)") == "numeric(0)"
    assert fmt(interp, "c(1, 2) == c(1, 3)") == "[1] TRUE FALSE"


def test_list_format(interp):
    assert fmt(interp, "list(a = 1, 2)") == "$a\n[1] 1\n\n[[2]]\n[1] 2\n"
    assert fmt(interp, "list()") == "list()"


def test_attribute_trailer(interp):
    out = fmt(interp, 'set_attr(c(1, 2), "class", c("money"))')
    assert out == '[1] 1 2\nattr(,"class")\n[1] "money"'


def test_closure_format(interp):
    assert fmt(interp, "function(x, y = 2) x * y") == "function(x, y = 2) x * y"


def test_s4_instance_format(interp):
    interp.eval_source('setClass("Pt", slots = list(x = "numeric"))')
    out = fmt(interp, 'new("Pt", x = 3)')
    assert out == 'An object of class "Pt"\nSlot "x":\n[1] 3\n'


def test_ref_instance_format(interp):
    interp.eval_source(
        'K <- setRefClass("K", fields = list(v = "numeric", '
        "twice = list(get = function() v * 2)), "
        "methods = list(poke = function() v))"
    )
    out = fmt(interp, "K(v = 4)")
    assert out == (
        'Reference class object of class "K"\n'
        'Field "v":\n[1] 4\n\n'
        'Field "twice":\n[1] 8\n'
    )


def test_generator_and_builtin_format(interp):
    interp.eval_source('G <- setRefClass("G", fields = list())')
    assert fmt(interp, "G") == 'Generator for class "G"'
    assert fmt(interp, "sum") == "<builtin 'sum'>"


def test_environment_format(interp):
    assert fmt(interp, "globalenv()") == "<environment: global>"
