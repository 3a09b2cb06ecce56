"""Line-based text format for VPA files.

::

    # comment
    alphabet internal: a b
    alphabet call: c
    alphabet return: r
    states: q0 q1 qf
    initial: q0
    final: qf
    internal: q0 a q1
    call: q1 c q0
    return: q0 r q1 qf

Tokens are separated by whitespace; ``#`` starts a comment.  Declaration
order fixes the integer ids.  Repeated transition lines collapse to one.
"""

from __future__ import annotations

from pathlib import Path

from .vpa import CALL, INTERNAL, RETURN, Alphabet, Vpa


class VpaSyntaxError(ValueError):
    def __init__(self, line: int | None, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}" if line else reason)


_DECLS = ("alphabet internal", "alphabet call", "alphabet return", "states", "initial", "final")
_ARITY = {"internal": 3, "call": 3, "return": 4}
_KIND = {"internal": INTERNAL, "call": CALL, "return": RETURN}


def parse(text: str) -> Vpa:
    decls: dict[str, tuple[int, list[str]]] = {}
    trans: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise VpaSyntaxError(lineno, f"expected '<keyword>: ...', got {line!r}")
        head = " ".join(head.split())
        toks = rest.split()
        if head in _DECLS:
            if head in decls:
                raise VpaSyntaxError(lineno, f"duplicate '{head}:' line (first on line {decls[head][0]})")
            decls[head] = (lineno, toks)
        elif head in _ARITY:
            if len(toks) != _ARITY[head]:
                raise VpaSyntaxError(lineno, f"'{head}:' needs {_ARITY[head]} fields, got {len(toks)}")
            trans.append((lineno, head, toks))
        else:
            raise VpaSyntaxError(lineno, f"unknown keyword {head!r}")

    for need in ("states", "initial"):
        if need not in decls:
            raise VpaSyntaxError(None, f"missing '{need}:' section")
    st_line, states = decls["states"]
    if not states:
        raise VpaSyntaxError(st_line, "no states")
    _no_dups(st_line, states, "state")
    sid = {name: i for i, name in enumerate(states)}

    parts = {}
    for kind in ("internal", "call", "return"):
        line, syms = decls.get(f"alphabet {kind}", (None, []))
        _no_dups(line, syms, "symbol")
        parts[kind] = tuple(syms)
    seen: dict[str, str] = {}
    for kind, syms in parts.items():
        for s in syms:
            if s in seen:
                line = decls[f"alphabet {kind}"][0]
                raise VpaSyntaxError(line, f"symbol {s!r} declared as both {seen[s]} and {kind}")
            seen[s] = kind
    alpha = Alphabet(internal=parts["internal"], call=parts["call"], ret=parts["return"])

    def state(line: int, name: str) -> int:
        if name not in sid:
            raise VpaSyntaxError(line, f"unknown state {name!r}")
        return sid[name]

    def symbol(line: int, kind: str, name: str) -> int:
        if name not in seen:
            raise VpaSyntaxError(line, f"unknown symbol {name!r}")
        if seen[name] != kind:
            raise VpaSyntaxError(line, f"symbol {name!r} is a {seen[name]} symbol, not {kind}")
        return alpha.id(name)

    init_line, init = decls["initial"]
    if not init:
        raise VpaSyntaxError(init_line, "no initial states")
    initial = {state(init_line, q) for q in init}
    fin_line, fin = decls.get("final", (None, []))
    final = {state(fin_line, q) for q in fin}

    rows: dict[str, set] = {"internal": set(), "call": set(), "return": set()}
    for line, kind, toks in trans:
        if kind == "return":
            src, sym, stk, dst = toks
            rows[kind].add((state(line, src), symbol(line, kind, sym), state(line, stk), state(line, dst)))
        else:
            src, sym, dst = toks
            rows[kind].add((state(line, src), symbol(line, kind, sym), state(line, dst)))
    return Vpa(tuple(states), alpha, rows["internal"], rows["call"], rows["return"], initial, final)


def _no_dups(line, names, what) -> None:
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise VpaSyntaxError(line, f"duplicate {what} {sorted(dup)[0]!r}")


def serialize(vpa: Vpa) -> str:
    st = vpa.states
    sym = vpa.alphabet.name
    out = [
        "alphabet internal: " + " ".join(vpa.alphabet.internal),
        "alphabet call: " + " ".join(vpa.alphabet.call),
        "alphabet return: " + " ".join(vpa.alphabet.ret),
        "states: " + " ".join(st),
        "initial: " + " ".join(st[q] for q in sorted(vpa.initial)),
        "final: " + " ".join(st[q] for q in sorted(vpa.final)),
    ]
    out += [f"internal: {st[p]} {sym(a)} {st[q]}" for p, a, q in sorted(vpa.internal)]
    out += [f"call: {st[p]} {sym(c)} {st[q]}" for p, c, q in sorted(vpa.call)]
    out += [f"return: {st[p]} {sym(r)} {st[s]} {st[q]}" for p, r, s, q in sorted(vpa.ret)]
    return "\n".join(line.rstrip() for line in out) + "\n"


def load(path: str | Path) -> Vpa:
    return parse(Path(path).read_text(encoding="utf-8"))


def dump(vpa: Vpa, path: str | Path) -> None:
    Path(path).write_text(serialize(vpa), encoding="utf-8")
