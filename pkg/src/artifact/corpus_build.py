"""Generator for the toy-machine corpus shipped in data/corpus.json.

Each program is built from a template whose halting set is known by
construction.  The halting-time table is filled by simulation and checked
against that set before anything is written.

    python -m artifact.corpus_build [output.json]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .toy_machine import Halted, _default_corpus_path, parse_program, program_code, run_program

TABLE_INPUTS = 16
DIVERGENCE_FUEL = 100_000
HALTING_FUEL = 10_000_000

# r0 holds the input, r1 is never written so "JZ r1 t" is an unconditional jump.


def _lines(*ins: str) -> str:
    return "\n".join(ins)


def _count_down(k: int, on_zero: str, loop_label: str, halt_label: str) -> list[str]:
    """k rounds of 'if r0 == 0 goto on_zero; DEC r0'."""
    target = {"loop": loop_label, "halt": halt_label}[on_zero]
    out = []
    for _ in range(k):
        out += [f"JZ r0 {target}", "DEC r0"]
    return out


def _resolve(ins: list[str], labels: dict[str, int]) -> str:
    out = []
    for line in ins:
        parts = line.split()
        if parts[0] == "JZ" and parts[2] in labels:
            parts[2] = str(labels[parts[2]])
        out.append(" ".join(parts))
    return "\n".join(out)


def _with_tail(body: list[str]) -> str:
    """Append LOOP (self-jump) and HALT and resolve their labels."""
    loop_at = len(body)
    halt_at = loop_at + 1
    ins = body + [f"JZ r1 {loop_at}", "HALT"]
    return _resolve(ins, {"LOOP": loop_at, "HALT": halt_at})


def mod_program(p: int, halt_on_multiple: bool) -> str:
    body = []
    for j in range(p):
        if j == 0:
            body.append("JZ r0 " + ("HALT" if halt_on_multiple else "LOOP"))
        else:
            body.append("JZ r0 " + ("LOOP" if halt_on_multiple else "HALT"))
        body.append("DEC r0")
    body.append("JZ r1 0")
    return _with_tail(body)


def ge_program(k: int) -> str:
    return _with_tail(_count_down(k, "loop", "LOOP", "HALT") + ["JZ r1 HALT"])


def lt_program(k: int) -> str:
    return _with_tail(_count_down(k, "halt", "LOOP", "HALT") + ["JZ r1 LOOP"])


def ne_program(d: int) -> str:
    return _with_tail(_count_down(d, "halt", "LOOP", "HALT") + ["JZ r0 LOOP", "JZ r1 HALT"])


def eq_program(d: int) -> str:
    return _with_tail(_count_down(d, "loop", "LOOP", "HALT") + ["JZ r0 HALT", "JZ r1 LOOP"])


def finite_set_program(members: tuple[int, ...]) -> str:
    body = []
    for i in range(max(members) + 1):
        body += ["JZ r0 " + ("HALT" if i in members else "LOOP"), "DEC r0"]
    body.append("JZ r1 LOOP")
    return _with_tail(body)


DECREMENT = _lines("JZ r0 3", "DEC r0", "JZ r1 0", "HALT")

DOUBLE = _lines(
    "JZ r0 5", "DEC r0", "INC r2", "INC r2", "JZ r1 0",
    "JZ r2 9", "DEC r2", "INC r0", "JZ r1 5", "HALT",
)

TRIANGLE = _lines(
    "JZ r0 11", "DEC r0",
    "JZ r0 7", "DEC r0", "INC r2", "INC r3", "JZ r1 2",
    "JZ r3 0", "DEC r3", "INC r0", "JZ r1 7",
    "HALT",
)

POWER_OF_TWO = _lines(
    "INC r2",
    "JZ r0 12", "DEC r0",
    "JZ r2 8", "DEC r2", "INC r3", "INC r3", "JZ r1 3",
    "JZ r3 1", "DEC r3", "INC r2", "JZ r1 8",
    "HALT",
)


def _triangle_ne(d: int) -> str:
    # run TRIANGLE on a copy kept in r4, then compare the copy with d
    head = [
        "JZ r0 4", "DEC r0", "INC r4", "JZ r1 0",  # move r0 -> r4 (0..3)
        "JZ r4 9", "DEC r4", "INC r0", "INC r5", "JZ r1 4",  # r4 -> r0 and r5 (4..8)
    ]
    # TRIANGLE shifted by 9, exits to the compare block instead of halting
    tri = [
        "JZ r0 20", "DEC r0",
        "JZ r0 16", "DEC r0", "INC r2", "INC r3", "JZ r1 11",
        "JZ r3 9", "DEC r3", "INC r0", "JZ r1 16",
    ]
    compare = []
    for _ in range(d):
        compare += ["JZ r5 HALT", "DEC r5"]
    compare += ["JZ r5 LOOP", "JZ r1 HALT"]
    return _with_tail(head + tri + compare)


def templates() -> list[tuple[str, str, str, tuple[str, ...]]]:
    """(name, source, domain predicate over m, tags)."""
    out = [
        ("halt", "HALT", "True", ("constant-time",)),
        ("tight_loop", "JZ r1 0", "False", ("diverges-everywhere",)),
        ("halt_iff_zero", _with_tail(["JZ r0 HALT", "JZ r1 LOOP"]), "m == 0", ()),
        ("decrement_to_zero", DECREMENT, "True", ("linear-time",)),
        ("double", DOUBLE, "True", ("linear-time",)),
        ("triangle", TRIANGLE, "True", ("quadratic-time",)),
        ("power_of_two", POWER_OF_TWO, "True", ("exponential-time",)),
    ]
    for c in range(1, 6):
        out.append((f"add_{c}", _lines(*(["INC r0"] * c), "HALT"), "True", ("constant-time",)))
    for p in range(2, 7):
        name = "halt_iff_even" if p == 2 else f"halt_iff_mult_{p}"
        out.append((name, mod_program(p, True), f"m % {p} == 0", ()))
        out.append((f"halt_iff_not_mult_{p}", mod_program(p, False), f"m % {p} != 0", ()))
    for k in range(1, 10):
        out.append((f"halt_iff_ge_{k}", ge_program(k), f"m >= {k}", ()))
    for k in range(2, 9):
        out.append((f"halt_iff_lt_{k}", lt_program(k), f"m < {k}", ()))
    for d in range(0, 7):
        out.append((f"halt_unless_{d}", ne_program(d), f"m != {d}", ()))
    for d in range(1, 6):
        out.append((f"halt_iff_eq_{d}", eq_program(d), f"m == {d}", ()))
    out.append(("halt_iff_in_0_2_4", finite_set_program((0, 2, 4)), "m in (0, 2, 4)", ()))
    for d in (3, 5):
        out.append((f"triangle_unless_{d}", _triangle_ne(d), f"m != {d}", ("quadratic-time",)))
    return out


def build() -> dict:
    programs = []
    seen = set()
    for name, source, domain, tags in templates():
        prog = parse_program(source)
        index = program_code(prog)
        if index in seen:
            raise ValueError(f"duplicate program {name}")
        seen.add(index)
        total = domain == "True"
        times = []
        for m in range(TABLE_INPUTS):
            expected = eval(domain, {"__builtins__": {}}, {"m": m})
            res = run_program(prog, m, HALTING_FUEL if expected else DIVERGENCE_FUEL)
            if isinstance(res, Halted) != expected:
                raise AssertionError(f"{name}: simulation disagrees with construction on input {m}")
            times.append(res.steps if isinstance(res, Halted) else None)
        tags = tags + (("total",) if total else ("non-total",))
        programs.append(
            {
                "index": index,
                "name": name,
                "source": source,
                "total": total,
                "domain": domain,
                "tags": list(tags),
                "halting_times": times,
            }
        )
    return {
        "format": "toy-corpus/1",
        "table_inputs": TABLE_INPUTS,
        "divergence_fuel": DIVERGENCE_FUEL,
        "programs": programs,
    }


def render() -> str:
    return json.dumps(build(), indent=1, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    target = Path(argv[0]) if argv else _default_corpus_path()
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render())
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
