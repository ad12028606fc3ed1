"""Unit and property tests for the tolerant surface scanner."""

import collections

import pytest
from hypothesis import given, settings, strategies as st

from apiswap.surface import (
    MethodDeclaration,
    MethodKind,
    classify_method,
    parse_file,
    parse_fragment,
)
from corpus_gen import generate_corpus
from oracle_parser import ParseError, reference_parse


def decl_multiset(surface):
    return collections.Counter((d.simple_name, d.arity) for d in surface.declarations)


def call_multiset(surface):
    return collections.Counter((i.simple_name, i.arg_count) for i in surface.invocations)


# ---------------------------------------------------------------------------
# single-construct extraction
# ---------------------------------------------------------------------------


def test_single_declaration_no_calls():
    s = parse_file("class A { int f(int x){return x;} }")
    assert [(d.simple_name, d.arity) for d in s.declarations] == [("f", 1)]
    assert s.invocations == []
    assert not s.parse_degraded


def test_invocations_qualified_and_bare():
    src = "class A { void g(){ h(1,2); obj.k(); } }"
    s = parse_file(src)
    got = [(i.simple_name, i.arg_count, i.receiver_text) for i in s.invocations]
    assert got == [("h", 2, ""), ("k", 0, "obj")]
    # independent route: the reference parser sees the same calls
    ref = reference_parse(src)
    assert collections.Counter(ref.calls) == call_multiset(s)


def test_deleted_helper_method_shape():
    src = """
public class UserService {
    public static int indexOf(String[] array, String name) {
        for (int i = 0; i < array.length; i++) {
            if (array[i].equals(name)) { return i; }
        }
        return -1;
    }
}
"""
    s = parse_file(src)
    assert len(s.declarations) == 1
    d = s.declarations[0]
    assert d.simple_name == "indexOf"
    assert d.arity == 2
    assert d.body_text.strip()
    assert d.is_static
    assert d.modifiers == frozenset({"public", "static"})
    assert d.signature_text == "public static int indexOf(String[] array, String name)"
    assert d.start_line <= d.end_line


def test_imports_and_package():
    src = (
        "package com.acme.app;\n"
        "import java.util.List;\n"
        "import static java.util.Arrays.asList;\n"
        "import org.apache.commons.lang3.*;\n"
        "class A {}\n"
    )
    s = parse_file(src)
    assert s.package_name == "com.acme.app"
    assert [(i.imported_path, i.is_static, i.is_wildcard) for i in s.imports] == [
        ("java.util.List", False, False),
        ("java.util.Arrays.asList", True, False),
        ("org.apache.commons.lang3", False, True),
    ]


def test_degraded_flag_on_junk():
    s = parse_file("}} not java at all {{")
    assert s.parse_degraded
    s2 = parse_file("class A { void f() { /* unterminated")
    assert s2.parse_degraded
    assert [(d.simple_name, d.arity) for d in s2.declarations] == [("f", 0)]


def test_constructors_and_anonymous_methods_are_not_declarations():
    src = """
class Worker {
    Worker(int seed) { setup(seed); }
    void go() {
        Runnable r = new Runnable() { public void run() { step(); } };
    }
}
"""
    s = parse_file(src)
    assert sorted(d.simple_name for d in s.declarations) == ["go"]
    assert sorted(i.simple_name for i in s.invocations) == ["setup", "step"]


# ---------------------------------------------------------------------------
# fragments
# ---------------------------------------------------------------------------


def test_fragment_qualified_call():
    got = parse_fragment("ArrayUtils.contains(users, name)")
    assert [(i.simple_name, i.arg_count, i.receiver_text) for i in got] == [
        ("contains", 2, "ArrayUtils")
    ]


def test_fragment_without_call():
    assert parse_fragment("x + 1") == []
    assert parse_fragment("") == []
    assert parse_fragment("   \n ") == []


def test_fragment_nested_calls():
    got = parse_fragment("foo(bar(1), 2)")
    frozen = [("foo", 2, 0), ("bar", 1, 1)]
    assert [(i.simple_name, i.arg_count, i.call_depth) for i in got] == frozen
    # independent route: reference parser over the scaffolded fragment
    ref = reference_parse("class W { void w() { foo(bar(1), 2); } }")
    assert collections.Counter(ref.calls) == collections.Counter(
        (i.simple_name, i.arg_count) for i in got
    )


def test_fragment_truncated_call_is_marked_incomplete():
    got = parse_fragment("MathUtils.add(x,")
    assert len(got) == 1
    assert got[0].simple_name == "add"
    assert not got[0].complete


def test_fragment_with_surplus_closing_braces():
    # the tail of a deleted method: closers outnumber openers
    frag = "int x = indexOf(u, n);\nreturn x >= 0;\n}\n}\nreturn -1;"
    got = parse_fragment(frag)
    assert [(i.simple_name, i.arg_count) for i in got] == [("indexOf", 2)]


def test_fragment_containing_whole_method_declaration():
    frag = (
        "count(xs, v) != 0;\n"
        "}\n"
        "static int count(int[] xs, int v) {\n"
        "    int n = 0;\n"
        "    for (int x : xs) { if (x == v) { n++; } }\n"
        "    return n;\n"
    )
    got = parse_fragment(frag)
    # the call site comes first; the declaration header also scans as a
    # call-shaped pattern, which is fine for fragment purposes
    assert got[0].simple_name == "count"
    assert got[0].arg_count == 2


# ---------------------------------------------------------------------------
# classify_method
# ---------------------------------------------------------------------------


def _decl_of(src: str) -> MethodDeclaration:
    decls = parse_file(src).declarations
    assert len(decls) == 1
    return decls[0]


def test_classify_canonical_getter():
    d = _decl_of("class A { public String getName(){return name;} }")
    assert classify_method(d) is MethodKind.Getter


def test_classify_boolean_getter():
    d = _decl_of("class A { public boolean isOpen(){return open;} }")
    assert classify_method(d) is MethodKind.Getter


def test_classify_main():
    d = _decl_of("class A { public static void main(String[] args){ run(); } }")
    assert classify_method(d) is MethodKind.MainMethod


def test_classify_setter():
    d = _decl_of("class A { public void setCount(int c){ this.count = c; } }")
    assert classify_method(d) is MethodKind.Setter


def test_classify_is_prefixed_multistatement_method_is_ordinary():
    d = _decl_of(
        """
class A {
    public static boolean isNumeric(String str) {
        for (char c : str.toCharArray()) {
            if (!Character.isDigit(c)) { return false; }
        }
        return true;
    }
}
"""
    )
    assert classify_method(d) is MethodKind.Ordinary


def test_classify_prefix_requires_uppercase_follow():
    d = _decl_of("class A { int getaway(){return 1;} }")
    assert classify_method(d) is MethodKind.Ordinary


def test_classify_getter_with_logic_is_ordinary():
    d = _decl_of(
        "class A { String getLabel(){ if (label == null) { label = make(); } return label; } }"
    )
    assert classify_method(d) is MethodKind.Ordinary


# ---------------------------------------------------------------------------
# fidelity against the reference parser
# ---------------------------------------------------------------------------

TRICKY_FILES = [
    # enum constants with arguments and bodies
    """
package p;
enum Mode {
    FAST(limit(3)), SLOW(1, pick()), LAZY {
        int weight() { return base(); }
    };
    int weight() { return 0; }
}
""",
    # anonymous class argument, generic witness, method reference
    """
package p;
class A {
    void go() {
        submit(new Runnable() { public void run() { tick(); } });
        java.util.Collections.<String>sort(names, A::cmp);
        names.forEach(n -> print(n));
    }
}
""",
    # interface with default/static/abstract members
    """
package p;
interface Store {
    int size();
    default boolean isEmpty() { return size() == 0; }
    static Store of() { return null; }
}
""",
    # field initializers, arrays, init blocks, nested class
    """
package p;
class B {
    static int[] table = {1, 2, seed()};
    java.util.List<String> names = build(10);
    static { warm(); }
    { prime(); }
    static class Inner { void hop(){ skip(1); } }
}
""",
    # comparisons that look like generics, casts that are generics
    """
package p;
class C {
    void f(int a, int b, java.util.List<String> xs) {
        check(a < b, b > a);
        java.util.List<String> ys = (java.util.List<String>) copy(xs);
        int m = java.lang.Math.max(a, b);
        if (a < xs.size() && b > 0) { bump(m); }
    }
}
""",
    # constructors, this/super delegation, method named like the class
    """
package p;
class Door extends Gate {
    Door() { this(1); }
    Door(int n) { super(n); latch(n); }
    Gate Door(int w) { return fit(w); }
}
""",
    # local class, labeled-ish structures, switch, try-with-resources
    """
package p;
class D {
    void run() throws Exception {
        class Helper { int aid() { return assist(); } }
        switch (mode()) {
            case 1: hop(); break;
            default: rest();
        }
        try (java.io.Reader r = open("f")) { pump(r); }
        catch (Exception e) { log(e); }
        finally { shut(); }
    }
}
""",
    # varargs, generic methods, throws, abstract methods
    """
package p;
abstract class E {
    abstract void sweep(String... parts);
    <T extends Comparable<T>> T top(java.util.List<T> xs) { return xs.get(count(xs)); }
    protected synchronized final long tally(int a, int b) { return plus(a, b); }
}
""",
    # string/char literals with confusing content, comments with code
    """
package p;
class F {
    String s = "no(call) { } \\" here";
    char c = ';';
    // looks(like, a, call);
    /* also.looks(1) { */
    void g() { real(s, c); }
}
""",
    # class literals, instanceof, qualified creation, array of generics
    """
package p;
class G {
    void h(Object o) {
        if (o instanceof String) { accept(String.class, o); }
        Object box = outer.new Inner(5);
        java.util.Map.Entry[] slots = new java.util.Map.Entry[form(2)];
    }
}
""",
]


@pytest.mark.parametrize("idx", range(len(TRICKY_FILES)))
def test_fidelity_tricky_file(idx):
    src = TRICKY_FILES[idx]
    ref = reference_parse(src)
    surf = parse_file(src, f"tricky{idx}.java")
    assert not surf.parse_degraded
    assert decl_multiset(surf) == collections.Counter(ref.decls)
    assert call_multiset(surf) == collections.Counter(ref.calls)
    assert [(d[0], d[1], d[2]) for d in ref.imports] == [
        (i.imported_path, i.is_static, i.is_wildcard) for i in surf.imports
    ]
    assert ref.package == surf.package_name


def test_fidelity_generated_corpus_sample():
    # a fast slice; the full >=200-file sweep runs in the acceptance suite
    mism = 0
    for k, src in enumerate(generate_corpus(60, seed=424242)):
        ref = reference_parse(src)
        surf = parse_file(src, f"gen{k}.java")
        if (
            surf.parse_degraded
            or decl_multiset(surf) != collections.Counter(ref.decls)
            or call_multiset(surf) != collections.Counter(ref.calls)
        ):
            mism += 1
    assert mism == 0


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def test_determinism_on_fixed_inputs():
    for src in TRICKY_FILES:
        a = parse_file(src, "x.java")
        b = parse_file(src, "x.java")
        assert a == b


def test_fragment_soundness_on_statements():
    frags = [
        "use(a, b);",
        "int n = helper.count(xs);",
        "if (check(v)) { fire(); }",
        "return wrap(inner(1), 2);",
        "obj.chain(1).chain(2);",
    ]
    for frag in frags:
        frag_calls = {(i.simple_name, i.arg_count) for i in parse_fragment(frag)}
        full = parse_file("class Z { void z() { " + frag + " } }")
        full_calls = {(i.simple_name, i.arg_count) for i in full.invocations}
        assert frag_calls <= full_calls and frag_calls


@given(st.text(max_size=400))
@settings(max_examples=300, deadline=None)
def test_parse_file_total_and_deterministic(src):
    a = parse_file(src, "fuzz.java")
    b = parse_file(src, "fuzz.java")
    assert a == b
    for d in a.declarations:
        assert d.simple_name and not d.simple_name.isspace()
        assert d.arity >= 0
        assert d.start_line <= d.end_line
    for i in a.invocations:
        assert i.simple_name
        assert i.arg_count >= 0


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_parse_fragment_total(frag):
    out = parse_fragment(frag)
    for i in out:
        assert i.simple_name
        assert i.arg_count >= 0
        assert i.line >= 1


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_classify_is_total_partition(seed):
    src = generate_corpus(1, seed=seed)[0]
    for d in parse_file(src).declarations:
        kind = classify_method(d)
        assert kind in (MethodKind.Getter, MethodKind.Setter, MethodKind.MainMethod, MethodKind.Ordinary)
