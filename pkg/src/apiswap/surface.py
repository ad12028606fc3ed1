"""Tolerant extraction of declarations, calls, and imports from Java-syntax text.

This is not a Java parser.  It is a single-pass token scanner that recovers
the *surface* of a compilation unit — method declarations, method call
expressions, imports, the package name — and keeps going on arbitrarily
broken input, because a large share of what the pipeline feeds it is
fragments cut out of word diffs.  On syntactically valid files the output
is expected to agree with a real parser (see the fidelity test suite); on
anything else it extracts what it can and raises a `parse_degraded` flag
instead of an exception.

Extraction model (shared with the reference parser used in tests):
  * constructors are not declarations and `new` expressions are not
    invocations (an API here is a public *method*);
  * `this(...)` / `super(...)` delegation is not an invocation;
  * anonymous-class and lambda bodies are scanned for invocations, but
    their methods are not emitted as declarations;
  * enum constants are not invocations, though calls inside their
    argument lists are.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional

__all__ = [
    "MethodDeclaration",
    "MethodInvocation",
    "ImportStatement",
    "FileSurface",
    "MethodKind",
    "parse_file",
    "parse_fragment",
    "classify_method",
]

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null""".split()
)

MODIFIER_WORDS = frozenset(
    """public protected private static final abstract native synchronized
    transient volatile strictfp default sealed""".split()
)

# tokens that may legitimately appear in a member head (modifiers, a return
# type with generics/arrays) — anything else found there is skipped
_HEAD_PUNCT = frozenset("<>[].,?&")

_GETTER_RE = re.compile(r"^(?:get|is)([A-Z])")
_SETTER_RE = re.compile(r"^set([A-Z])")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass
class MethodDeclaration:
    simple_name: str
    arity: int
    signature_text: str
    body_text: str
    file_path: str
    start_line: int
    end_line: int
    modifiers: frozenset[str]
    is_static: bool
    return_type_text: str

    def to_dict(self) -> dict:
        return {
            "simple_name": self.simple_name,
            "arity": self.arity,
            "signature_text": self.signature_text,
            "body_text": self.body_text,
            "file_path": self.file_path,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "modifiers": sorted(self.modifiers),
            "is_static": self.is_static,
            "return_type_text": self.return_type_text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MethodDeclaration":
        return cls(
            simple_name=d["simple_name"],
            arity=d["arity"],
            signature_text=d["signature_text"],
            body_text=d["body_text"],
            file_path=d["file_path"],
            start_line=d["start_line"],
            end_line=d["end_line"],
            modifiers=frozenset(d["modifiers"]),
            is_static=d["is_static"],
            return_type_text=d["return_type_text"],
        )


@dataclass
class MethodInvocation:
    simple_name: str
    arg_count: int
    receiver_text: str
    file_path: str
    line: int
    # call_depth 0 = not nested inside another call's argument list;
    # complete False = the closing ')' was cut off (diff fragment)
    call_depth: int = 0
    complete: bool = True

    def to_dict(self) -> dict:
        return {
            "simple_name": self.simple_name,
            "arg_count": self.arg_count,
            "receiver_text": self.receiver_text,
            "file_path": self.file_path,
            "line": self.line,
            "call_depth": self.call_depth,
            "complete": self.complete,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MethodInvocation":
        return cls(
            simple_name=d["simple_name"],
            arg_count=d["arg_count"],
            receiver_text=d["receiver_text"],
            file_path=d["file_path"],
            line=d["line"],
            call_depth=d.get("call_depth", 0),
            complete=d.get("complete", True),
        )


@dataclass
class ImportStatement:
    imported_path: str
    is_static: bool
    is_wildcard: bool
    file_path: str

    def to_dict(self) -> dict:
        return {
            "imported_path": self.imported_path,
            "is_static": self.is_static,
            "is_wildcard": self.is_wildcard,
            "file_path": self.file_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ImportStatement":
        return cls(d["imported_path"], d["is_static"], d["is_wildcard"], d["file_path"])


@dataclass
class FileSurface:
    declarations: list[MethodDeclaration] = field(default_factory=list)
    invocations: list[MethodInvocation] = field(default_factory=list)
    imports: list[ImportStatement] = field(default_factory=list)
    package_name: Optional[str] = None
    parse_degraded: bool = False
    file_path: str = "<memory>"

    def to_dict(self) -> dict:
        return {
            "declarations": [d.to_dict() for d in self.declarations],
            "invocations": [i.to_dict() for i in self.invocations],
            "imports": [i.to_dict() for i in self.imports],
            "package_name": self.package_name,
            "parse_degraded": self.parse_degraded,
            "file_path": self.file_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FileSurface":
        return cls(
            declarations=[MethodDeclaration.from_dict(x) for x in d["declarations"]],
            invocations=[MethodInvocation.from_dict(x) for x in d["invocations"]],
            imports=[ImportStatement.from_dict(x) for x in d["imports"]],
            package_name=d["package_name"],
            parse_degraded=d["parse_degraded"],
            file_path=d["file_path"],
        )


class MethodKind(enum.Enum):
    Getter = "Getter"
    Setter = "Setter"
    MainMethod = "MainMethod"
    Ordinary = "Ordinary"


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------


class _Tok:
    __slots__ = ("kind", "text", "line", "pos")

    def __init__(self, kind: str, text: str, line: int, pos: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.pos = pos

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"_Tok({self.kind},{self.text!r},L{self.line})"


def _lex(source: str) -> tuple[list[_Tok], bool]:
    """Split source into tokens, dropping comments. Never raises."""
    toks: list[_Tok] = []
    degraded = False
    i, n, line = 0, len(source), 1
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if ch == "/" and i + 1 < n:
            nxt = source[i + 1]
            if nxt == "/":
                j = source.find("\n", i)
                i = n if j < 0 else j
                continue
            if nxt == "*":
                j = source.find("*/", i + 2)
                if j < 0:
                    degraded = True
                    line += source.count("\n", i)
                    i = n
                else:
                    line += source.count("\n", i, j)
                    i = j + 2
                continue
        if ch == '"':
            if source.startswith('"""', i):
                j = source.find('"""', i + 3)
                if j < 0:
                    degraded = True
                    i = n
                    continue
                text = source[i : j + 3]
                toks.append(_Tok("str", text, line, i))
                line += text.count("\n")
                i = j + 3
                continue
            j = i + 1
            closed = False
            while j < n:
                c = source[j]
                if c == "\\":
                    j += 2
                    continue
                if c == '"':
                    closed = True
                    break
                if c == "\n":
                    break
                j += 1
            if closed:
                toks.append(_Tok("str", source[i : j + 1], line, i))
                i = j + 1
            else:
                # string cut off mid-line (diff fragment); keep what we saw
                degraded = True
                toks.append(_Tok("str", source[i:j], line, i))
                i = j
            continue
        if ch == "'":
            j = i + 1
            closed = False
            while j < n:
                c = source[j]
                if c == "\\":
                    j += 2
                    continue
                if c == "'":
                    closed = True
                    break
                if c == "\n":
                    break
                j += 1
            if closed:
                toks.append(_Tok("chr", source[i : j + 1], line, i))
                i = j + 1
            else:
                degraded = True
                toks.append(_Tok("chr", source[i:j], line, i))
                i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i + 1
            while j < n:
                c = source[j]
                if c in "eE" and j + 1 < n and source[j + 1] in "+-":
                    j += 2
                    continue
                if c.isalnum() or c in "._":
                    j += 1
                    continue
                break
            toks.append(_Tok("num", source[i:j], line, i))
            i = j
            continue
        if ch.isalpha() or ch in "_$":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            toks.append(_Tok("id", source[i:j], line, i))
            i = j
            continue
        toks.append(_Tok("punct", ch, line, i))
        i += 1
    return toks, degraded


def _print_tokens(toks: list[_Tok]) -> str:
    """Canonical one-line rendering used for signature and receiver text."""
    out: list[str] = []
    prev: Optional[_Tok] = None
    for t in toks:
        if prev is not None:
            glue = (
                t.text in (")", "]", ".", ",", ";", "(", "[", "<", ">")
                or prev.text in ("(", "[", ".", "@", "<")
            )
            if not glue:
                out.append(" ")
        out.append(t.text)
        prev = t
    return "".join(out)


def _strip_angle_groups(toks: list[_Tok]) -> list[_Tok]:
    """Drop balanced <...> runs (type-argument context: every < opens)."""
    out: list[_Tok] = []
    depth = 0
    for t in toks:
        if t.text == "<":
            depth += 1
            continue
        if t.text == ">" and depth > 0:
            depth -= 1
            continue
        if depth == 0:
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# scanner
# ---------------------------------------------------------------------------

_F_FILE, _F_TYPE, _F_BODY = 0, 1, 2


class _Frame:
    __slots__ = ("kind", "type_name", "emit", "enum_constants", "paren_depth", "head", "seen_eq")

    def __init__(self, kind: int, type_name: str = "", emit: bool = True, enum_constants: bool = False):
        self.kind = kind
        self.type_name = type_name
        self.emit = emit
        self.enum_constants = enum_constants
        self.paren_depth = 0
        self.head: list[int] = []
        self.seen_eq = False


class _Scanner:
    def __init__(self, toks: list[_Tok], source: str, file_path: str):
        self.toks = toks
        self.src = source
        self.path = file_path
        self.n = len(toks)
        self.decls: list[MethodDeclaration] = []
        self.invs: list[MethodInvocation] = []
        self.imports: list[ImportStatement] = []
        self.package: Optional[str] = None
        self.degraded = False
        self.open_calls: list[int] = []  # close-token index of each active call

    # -- small helpers -----------------------------------------------------

    def _generic_group_end(self, open_idx: int) -> int:
        """If toks[open_idx] ('<') opens a plausible type-argument group,
        return the index of its matching '>'; otherwise -1.  Contents must
        look like types — an operator or literal means `<` was a comparison.
        """
        toks = self.toks
        depth = 0
        limit = min(self.n, open_idx + 60)
        for i in range(open_idx, limit):
            t = toks[i]
            x = t.text
            if x == "<":
                depth += 1
            elif x == ">":
                depth -= 1
                if depth == 0:
                    return i
            elif t.kind == "id" or x in (".", ",", "?", "[", "]", "&"):
                continue
            else:
                return -1
        return -1

    def _angle_is_generic(self, i: int) -> int:
        """Decide whether '<' at i starts type arguments inside an expression.

        Returns the matching '>' index when it does, -1 when it is an
        operator.  The deciding context: a witness (`obj.<T>call`), a
        generic constructor (`new Map<K,V>(..)`), or a closed group followed
        by something only a type can precede (cast, dims, method ref).
        """
        close = self._generic_group_end(i)
        if close < 0:
            return -1
        toks = self.toks
        prev = toks[i - 1] if i > 0 else None
        nxt = toks[close + 1] if close + 1 < self.n else None
        if prev is None:
            return -1
        if prev.text == ".":
            return close if (nxt is not None and nxt.kind == "id") else -1
        if prev.kind == "id":
            start = self._dotted_chain_start(i - 1)
            if start - 1 >= 0 and toks[start - 1].text == "new":
                return close if (nxt is not None and nxt.text == "(") else -1
            if nxt is not None and nxt.text in (")", ".", "[", "::"):
                return close
        return -1

    def _match_call(self, open_idx: int) -> tuple[int, int, bool]:
        """Scan forward from an argument-list '(' in *expression* context.

        Returns (arg_count, close_idx, complete).  Plausible type-argument
        groups are jumped over so their commas don't count; any other `<`
        is a comparison.  For a truncated list, arg_count counts the
        arguments actually begun.
        """
        toks, n = self.toks, self.n
        paren, bracket, brace = 1, 0, 0
        commas = 0
        any_tok = False
        i = open_idx + 1
        while i < n:
            t = toks[i]
            x = t.text
            if x == "(":
                paren += 1
            elif x == ")":
                paren -= 1
                if paren == 0:
                    args = 0 if (not any_tok) else commas + 1
                    return args, i, True
            elif x == "[":
                bracket += 1
            elif x == "]":
                bracket = max(0, bracket - 1)
            elif x == "{":
                brace += 1
            elif x == "}":
                brace = max(0, brace - 1)
            elif x == "<":
                close = self._angle_is_generic(i)
                if close >= 0:
                    any_tok = True
                    i = close + 1
                    continue
            elif x == "," and paren == 1 and bracket == 0 and brace == 0:
                commas += 1
                i += 1
                continue
            any_tok = True
            i += 1
        # ran off the end of the fragment
        trailing = self._has_sig_tokens_after_last_comma(open_idx + 1, n)
        args = commas + (1 if trailing else 0)
        return args, n, False

    def _has_sig_tokens_after_last_comma(self, lo: int, hi: int) -> bool:
        depth = 0
        last = lo - 1
        for i in range(lo, hi):
            x = self.toks[i].text
            if x in "([{":
                depth += 1
            elif x in ")]}":
                depth -= 1
            elif x == "," and depth == 0:
                last = i
        return any(True for i in range(last + 1, hi))

    def _match_params(self, open_idx: int) -> tuple[int, int, bool]:
        """Scan a declaration parameter list: every `<` is a generic open."""
        toks, n = self.toks, self.n
        paren, angle, bracket = 1, 0, 0
        commas = 0
        any_tok = False
        i = open_idx + 1
        while i < n:
            x = toks[i].text
            if x == "(":
                paren += 1
            elif x == ")":
                paren -= 1
                if paren == 0:
                    return (0 if not any_tok else commas + 1), i, True
            elif x == "<":
                angle += 1
            elif x == ">":
                angle = max(0, angle - 1)
            elif x == "[":
                bracket += 1
            elif x == "]":
                bracket = max(0, bracket - 1)
            elif x == "," and paren == 1 and angle == 0 and bracket == 0:
                commas += 1
                i += 1
                continue
            any_tok = True
            i += 1
        return (0 if not any_tok else commas + 1), n, False

    def _match_brace(self, open_idx: int) -> tuple[int, bool]:
        depth = 0
        for i in range(open_idx, self.n):
            x = self.toks[i].text
            if x == "{":
                depth += 1
            elif x == "}":
                depth -= 1
                if depth == 0:
                    return i, True
        return self.n - 1, False

    def _skip_annotation(self, i: int) -> int:
        """i points at '@'. Skip @Name(.Name)* and an optional (...) group."""
        i += 1
        if i < self.n and self.toks[i].kind == "id":
            i += 1
            while i + 1 < self.n and self.toks[i].text == "." and self.toks[i + 1].kind == "id":
                i += 2
        if i < self.n and self.toks[i].text == "(":
            depth = 0
            while i < self.n:
                x = self.toks[i].text
                if x == "(":
                    depth += 1
                elif x == ")":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                i += 1
        return i

    def _skip_to_brace(self, i: int) -> int:
        """Advance to the next '{' at angle-depth 0 (type header tail)."""
        angle = 0
        while i < self.n:
            x = self.toks[i].text
            if x == "<":
                angle += 1
            elif x == ">":
                angle = max(0, angle - 1)
            elif x == "{" and angle == 0:
                return i
            elif x == ";" and angle == 0:
                return i  # headerless oddity; caller treats as no body
            i += 1
        return self.n

    def _dotted_chain_start(self, idx: int) -> int:
        """idx points at the last id of a dotted name; return chain start idx."""
        i = idx
        while i - 2 >= 0 and self.toks[i - 1].text == "." and self.toks[i - 2].kind == "id":
            i -= 2
        return i

    def _is_ctor_call(self, name_idx: int) -> bool:
        j = self._dotted_chain_start(name_idx)
        return j - 1 >= 0 and self.toks[j - 1].text == "new"

    def _receiver_text(self, name_idx: int) -> str:
        toks = self.toks
        if name_idx - 1 < 0 or toks[name_idx - 1].text != ".":
            return ""
        j = name_idx - 2  # last token of the receiver chain
        lo = j
        steps = 0
        while lo >= 0 and steps < 120:
            steps += 1
            t = toks[lo]
            if t.text in (")", "]"):
                # walk back over the bracketed group
                close = t.text
                opener = "(" if close == ")" else "["
                depth = 0
                k = lo
                while k >= 0:
                    if toks[k].text == close:
                        depth += 1
                    elif toks[k].text == opener:
                        depth -= 1
                        if depth == 0:
                            break
                    k -= 1
                if k < 0:
                    break
                lo = k
                # a call/array group binds to a preceding identifier
                if lo - 1 >= 0 and toks[lo - 1].kind in ("id", "str"):
                    lo -= 1
                if lo - 1 >= 0 and toks[lo - 1].text == ".":
                    lo -= 2
                    continue
                break
            if t.kind in ("id", "str", "num", "chr"):
                if lo - 1 >= 0 and toks[lo - 1].text == ".":
                    lo -= 2
                    continue
                break
            if t.text == ">":
                # explicit type-argument witness: hop over <...> backwards
                depth = 0
                k = lo
                while k >= 0:
                    if toks[k].text == ">":
                        depth += 1
                    elif toks[k].text == "<":
                        depth -= 1
                        if depth == 0:
                            break
                    k -= 1
                if k < 0 or k - 1 < 0 or toks[k - 1].text != ".":
                    lo = max(k, 0)
                    break
                lo = k - 2
                continue
            break
        lo = max(lo, 0)
        if steps >= 120:
            return ""
        return _print_tokens(toks[lo : name_idx - 1])

    def _call_depth(self, name_idx: int) -> int:
        while self.open_calls and self.open_calls[-1] <= name_idx:
            self.open_calls.pop()
        return len(self.open_calls)

    def _record_call(self, i: int) -> int:
        """toks[i] is an id followed by '('. Record an invocation if it is one.

        Always returns i+2 so the scan continues *into* the argument list
        (nested calls are found by the main walk, not by recursion here).
        """
        t = self.toks[i]
        name = t.text
        if name in KEYWORDS:
            return i + 2
        prev = self.toks[i - 1] if i > 0 else None
        if prev is not None and prev.text == "new":
            return i + 2
        if prev is not None and prev.text == "." and self._is_ctor_call(i):
            return i + 2
        arg_count, close_idx, complete = self._match_call(i + 1)
        depth = self._call_depth(i)
        self.invs.append(
            MethodInvocation(
                simple_name=name,
                arg_count=arg_count,
                receiver_text=self._receiver_text(i),
                file_path=self.path,
                line=t.line,
                call_depth=depth,
                complete=complete,
            )
        )
        self.open_calls.append(close_idx)
        return i + 2

    # -- member emission ----------------------------------------------------

    def _emit_member(self, frame: _Frame, name_idx: int) -> int:
        """Handle `ident (` in a type body when it is a member declaration.

        Returns the next scan index; pushes a body frame if the member has one.
        """
        toks = self.toks
        name_tok = toks[name_idx]
        arity, close_idx, complete = self._match_params(name_idx + 1)
        if not complete:
            self.degraded = True
            frame.head = []
            return self.n

        # look past throws-clauses / legacy array dims / annotations
        j = close_idx + 1
        while j < self.n:
            x = toks[j]
            if x.text == "@":
                j = self._skip_annotation(j)
                continue
            if x.kind == "id" and x.text == "throws":
                j += 1
                while j < self.n and (toks[j].kind == "id" or toks[j].text in (".", ",")):
                    j += 1
                continue
            if x.text in ("[", "]"):
                j += 1
                continue
            break

        terminator = toks[j] if j < self.n else None
        if terminator is None:
            self.degraded = True
            frame.head = []
            return self.n

        is_default_value = terminator.kind == "id" and terminator.text == "default"
        if terminator.text not in ("{", ";") and not is_default_value:
            # not a declaration after all — treat the parens as a call
            return self._record_call(name_idx)

        head_toks = _strip_angle_groups([toks[k] for k in frame.head])
        modifiers = []
        k = 0
        while k < len(head_toks) and head_toks[k].kind == "id" and head_toks[k].text in MODIFIER_WORDS:
            modifiers.append(head_toks[k].text)
            k += 1
        ret_toks = head_toks[k:]
        is_ctor = name_tok.text == frame.type_name and not ret_toks

        param_toks = _strip_angle_groups(toks[name_idx + 1 : close_idx + 1])
        head_text = _print_tokens(head_toks) if head_toks else ""
        sig = (head_text + " " if head_text else "") + name_tok.text + _print_tokens(param_toks)
        start_line = (head_toks[0].line if head_toks else name_tok.line)
        frame.head = []
        frame.seen_eq = False

        if terminator.text == "{":
            body_close, ok = self._match_brace(j)
            if not ok:
                self.degraded = True
            body_text = self.src[toks[j].pos : toks[body_close].pos + 1]
            end_line = toks[body_close].line
            if frame.emit and not is_ctor:
                self.decls.append(
                    MethodDeclaration(
                        simple_name=name_tok.text,
                        arity=arity,
                        signature_text=sig,
                        body_text=body_text,
                        file_path=self.path,
                        start_line=start_line,
                        end_line=end_line,
                        modifiers=frozenset(modifiers),
                        is_static="static" in modifiers,
                        return_type_text=_print_tokens(ret_toks),
                    )
                )
            self.frames.append(_Frame(_F_BODY))
            return j + 1

        if is_default_value:
            # annotation member default: skip the constant up to ';'
            depth = 0
            while j < self.n:
                x = toks[j].text
                if x in "([{":
                    depth += 1
                elif x in ")]}":
                    depth -= 1
                elif x == ";" and depth <= 0:
                    break
                j += 1
        end_line = toks[j].line if j < self.n else name_tok.line
        if frame.emit and not is_ctor:
            self.decls.append(
                MethodDeclaration(
                    simple_name=name_tok.text,
                    arity=arity,
                    signature_text=sig,
                    body_text="",
                    file_path=self.path,
                    start_line=start_line,
                    end_line=end_line,
                    modifiers=frozenset(modifiers),
                    is_static="static" in modifiers,
                    return_type_text=_print_tokens(ret_toks),
                )
            )
        return j + 1

    def _enter_named_type(self, frame: _Frame, i: int, kind_word: str) -> int:
        """toks[i] is `class`/`interface`/`enum`. Enter the nested type."""
        j = i + 1
        name = ""
        if j < self.n and self.toks[j].kind == "id":
            name = self.toks[j].text
            j += 1
        brace = self._skip_to_brace(j)
        frame.head = []
        frame.seen_eq = False
        if brace >= self.n or self.toks[brace].text == ";":
            return brace + 1
        self.frames.append(_Frame(_F_TYPE, type_name=name, emit=True, enum_constants=(kind_word == "enum")))
        return brace + 1

    def _enter_record(self, frame: _Frame, i: int) -> int:
        """toks[i] is contextual `record` followed by Name( — coarse support."""
        name = self.toks[i + 1].text
        _, close_idx, complete = self._match_params(i + 2)
        if not complete:
            self.degraded = True
            return self.n
        brace = self._skip_to_brace(close_idx + 1)
        frame.head = []
        frame.seen_eq = False
        if brace >= self.n or self.toks[brace].text == ";":
            return brace + 1
        self.frames.append(_Frame(_F_TYPE, type_name=name, emit=True))
        return brace + 1

    def _classify_open_brace(self, i: int) -> _Frame:
        """Decide whether `{` starts an anonymous class body or plain code."""
        toks = self.toks
        if i == 0:
            return _Frame(_F_BODY)
        p = toks[i - 1]
        if p.text == ")":
            depth = 0
            k = i - 1
            while k >= 0:
                if toks[k].text == ")":
                    depth += 1
                elif toks[k].text == "(":
                    depth -= 1
                    if depth == 0:
                        break
                k -= 1
            if k > 0:
                q = k - 1
                if toks[q].text == ">":
                    # new Foo<...>(...) { — hop back over the type arguments
                    a = 0
                    while q >= 0:
                        if toks[q].text == ">":
                            a += 1
                        elif toks[q].text == "<":
                            a -= 1
                            if a == 0:
                                break
                        q -= 1
                    q -= 1
                if q >= 0 and toks[q].kind == "id" and toks[q].text not in KEYWORDS:
                    start = self._dotted_chain_start(q)
                    if start - 1 >= 0 and toks[start - 1].text == "new":
                        return _Frame(_F_TYPE, type_name="", emit=False)
        return _Frame(_F_BODY)

    # -- the walk -----------------------------------------------------------

    def scan(self) -> None:
        self.frames: list[_Frame] = [_Frame(_F_FILE)]
        toks, n = self.toks, self.n
        i = 0
        while i < n:
            start_i = i
            frame = self.frames[-1]
            t = toks[i]
            x = t.text

            if frame.kind == _F_FILE:
                i = self._scan_file(frame, i, t, x)
            elif frame.kind == _F_TYPE:
                i = self._scan_type(frame, i, t, x)
            else:
                i = self._scan_body(frame, i, t, x)

            if i <= start_i:  # safety net: the walk must always advance
                self.degraded = True
                i = start_i + 1

        if len(self.frames) > 1:
            self.degraded = True

    def _scan_file(self, frame: _Frame, i: int, t: _Tok, x: str) -> int:
        toks, n = self.toks, self.n
        if t.kind == "id":
            if x == "package":
                parts = []
                j = i + 1
                while j < n and toks[j].text != ";":
                    if toks[j].kind == "id" or toks[j].text == ".":
                        parts.append(toks[j].text)
                    j += 1
                if parts and self.package is None:
                    self.package = "".join(parts)
                return j + 1
            if x == "import":
                j = i + 1
                is_static = False
                if j < n and toks[j].text == "static":
                    is_static = True
                    j += 1
                parts = []
                while j < n and toks[j].text != ";":
                    if toks[j].kind == "id" or toks[j].text in (".", "*"):
                        parts.append(toks[j].text)
                    j += 1
                raw = "".join(parts)
                is_wildcard = raw.endswith(".*")
                path = raw[:-2] if is_wildcard else raw
                if path:
                    self.imports.append(ImportStatement(path, is_static, is_wildcard, self.path))
                return j + 1
            if x in ("class", "interface", "enum"):
                return self._enter_named_type(frame, i, x)
            if x == "record" and i + 2 < n and toks[i + 1].kind == "id" and toks[i + 2].text == "(":
                return self._enter_record(frame, i)
            return i + 1
        if x == "@":
            # could be @interface or a normal annotation
            if i + 1 < n and toks[i + 1].text == "interface":
                return self._enter_named_type(frame, i + 1, "interface")
            return self._skip_annotation(i)
        if x == "{":
            self.degraded = True
            self.frames.append(_Frame(_F_BODY))
            return i + 1
        if x == "}":
            self.degraded = True
            return i + 1
        return i + 1

    def _scan_type(self, frame: _Frame, i: int, t: _Tok, x: str) -> int:
        toks, n = self.toks, self.n

        if frame.enum_constants:
            if x == ";":
                if frame.paren_depth == 0:
                    frame.enum_constants = False
                return i + 1
            if x == "}":
                self.frames.pop()
                return i + 1
            if x == "{":
                if frame.paren_depth == 0:
                    self.frames.append(_Frame(_F_TYPE, type_name="", emit=False))
                else:
                    self.frames.append(self._classify_open_brace(i))
                return i + 1
            if x == "(":
                frame.paren_depth += 1
                return i + 1
            if x == ")":
                frame.paren_depth = max(0, frame.paren_depth - 1)
                return i + 1
            if t.kind == "id" and i + 1 < n and toks[i + 1].text == "(":
                frame.paren_depth += 1  # '(' is consumed either way below
                if frame.paren_depth == 1:
                    return i + 2  # the constant's own argument list
                return self._record_call(i)
            if x == "@":
                return self._skip_annotation(i)
            return i + 1

        if x == "}":
            self.frames.pop()
            return i + 1
        if x == ";":
            frame.head = []
            frame.seen_eq = False
            return i + 1
        if x == "=":
            frame.seen_eq = True
            return i + 1
        if x == "@":
            if i + 1 < n and toks[i + 1].text == "interface":
                return self._enter_named_type(frame, i + 1, "interface")
            return self._skip_annotation(i)
        if x == "{":
            if frame.seen_eq:
                self.frames.append(_Frame(_F_BODY))
                return i + 1
            head_toks = [toks[k] for k in frame.head]
            only_mods = all(h.kind == "id" and h.text in MODIFIER_WORDS for h in head_toks)
            compact_ctor = (
                head_toks
                and head_toks[-1].kind == "id"
                and head_toks[-1].text == frame.type_name
                and all(h.kind == "id" and h.text in MODIFIER_WORDS for h in head_toks[:-1])
            )
            if not (only_mods or compact_ctor):
                self.degraded = True
            frame.head = []
            self.frames.append(_Frame(_F_BODY))
            return i + 1
        if t.kind == "id":
            if not frame.seen_eq:
                if x in ("class", "interface", "enum"):
                    return self._enter_named_type(frame, i, x)
                if x == "record" and i + 2 < n and toks[i + 1].kind == "id" and toks[i + 2].text == "(":
                    return self._enter_record(frame, i)
            if i + 1 < n and toks[i + 1].text == "(":
                if frame.seen_eq or x in KEYWORDS:
                    return self._record_call(i)
                return self._emit_member(frame, i)
            if not frame.seen_eq:
                frame.head.append(i)
            return i + 1
        if not frame.seen_eq and x in _HEAD_PUNCT:
            frame.head.append(i)
            return i + 1
        return i + 1

    def _scan_body(self, frame: _Frame, i: int, t: _Tok, x: str) -> int:
        toks, n = self.toks, self.n
        if x == "}":
            self.frames.pop()
            return i + 1
        if x == "{":
            self.frames.append(self._classify_open_brace(i))
            return i + 1
        if x == "@":
            return self._skip_annotation(i)
        if t.kind == "id":
            if x in ("class", "interface", "enum") and (i == 0 or toks[i - 1].text != "."):
                # `.class` is a class literal, not a declaration
                return self._enter_named_type(frame, i, x)
            if x == "record" and i + 2 < n and toks[i + 1].kind == "id" and toks[i + 2].text == "(":
                # local records: only treat as a declaration when a body follows,
                # otherwise `record(...)` is a perfectly good method call
                _, close_idx, complete = self._match_params(i + 2)
                if complete:
                    after = close_idx + 1
                    if after < n and (toks[after].text == "{" or (toks[after].kind == "id" and toks[after].text == "implements")):
                        return self._enter_record(frame, i)
            if i + 1 < n and toks[i + 1].text == "(":
                return self._record_call(i)
            return i + 1
        return i + 1


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def parse_file(source: str, file_path: str = "<memory>") -> FileSurface:
    """Extract the surface of one compilation unit. Never raises on bad text."""
    toks, lex_degraded = _lex(source)
    sc = _Scanner(toks, source, file_path)
    sc.scan()
    return FileSurface(
        declarations=sc.decls,
        invocations=sc.invs,
        imports=sc.imports,
        package_name=sc.package,
        parse_degraded=lex_degraded or sc.degraded,
        file_path=file_path,
    )


_FRAGMENT_HEADER_LINES = 2  # class line + method line prepended by the scaffold


def parse_fragment(fragment: str) -> list[MethodInvocation]:
    """Extract call expressions from a possibly-truncated code fragment."""
    if not fragment.strip():
        return []
    # a fragment may carry more `}` than `{` (e.g. the tail of a deleted
    # method); pre-open enough blocks that those closers never unwind the
    # scaffold and drop us out of statement context
    toks, _ = _lex(fragment)
    bal = 0
    deficit = 0
    for t in toks:
        if t.text == "{":
            bal += 1
        elif t.text == "}":
            bal -= 1
            deficit = max(deficit, -bal)
    pad = "{\n" * deficit
    scaffold = "class __W {\nvoid __w() {\n" + pad + fragment
    surface = parse_file(scaffold, "<fragment>")
    offset = _FRAGMENT_HEADER_LINES + deficit
    out = []
    for inv in surface.invocations:
        inv.file_path = "<fragment>"
        inv.line = max(1, inv.line - offset)
        out.append(inv)
    return out


def _statement_count(body_text: str) -> int:
    toks, _ = _lex(body_text)
    return sum(1 for t in toks if t.text == ";")


def classify_method(decl: MethodDeclaration) -> MethodKind:
    """Bucket a declaration as Getter / Setter / MainMethod / Ordinary."""
    if decl.simple_name == "main" and decl.is_static and decl.arity == 1:
        return MethodKind.MainMethod
    if _GETTER_RE.match(decl.simple_name) and decl.arity == 0 and _statement_count(decl.body_text) <= 1:
        return MethodKind.Getter
    if _SETTER_RE.match(decl.simple_name) and decl.arity == 1 and _statement_count(decl.body_text) <= 1:
        return MethodKind.Setter
    return MethodKind.Ordinary
