"""Counter machines with a Goedel numbering and a step-bounded runtime predicate.

Programs are lists of INC r, DEC r, JZ r t, HALT.  The input sits in r0 and
the output is r0 at halt.  Every executed instruction costs one step,
including the final HALT; running past the last instruction halts as if a
HALT were there.  DEC on an empty register leaves it at zero.

Numbering: an instruction code c has kind c % 4 (HALT, INC, DEC, JZ) and
payload c // 4, which is the register for INC/DEC and the Cantor pair <r, t>
for JZ.  A program with codes c_1..c_L has index n where the binary digits
of n + 1 after its leading 1 are the Elias gamma codes of c_1 + 1, ...,
c_L + 1 in order.  decode() is total: an unfinished trailing gamma code is
dropped, an empty program becomes HALT, and out-of-range jump targets are
redirected to a trailing HALT.  The HALT program has index 2 and index 0
also decodes to HALT.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .encodings import pair, unpair

CORPUS_ENV = "ARTIFACT_CORPUS"


@dataclass(frozen=True)
class Instr:
    op: str  # "HALT", "INC", "DEC", "JZ"
    reg: int = 0
    target: int = 0

    def text(self) -> str:
        match self.op:
            case "HALT":
                return "HALT"
            case "JZ":
                return f"JZ r{self.reg} {self.target}"
            case _:
                return f"{self.op} r{self.reg}"


@dataclass(frozen=True)
class ToyProgram:
    instructions: tuple[Instr, ...]

    def text(self) -> str:
        return "\n".join(i.text() for i in self.instructions)

    def __str__(self) -> str:
        return " | ".join(i.text() for i in self.instructions)


def normalize(p: ToyProgram) -> ToyProgram:
    """Redirect out-of-range jumps to a trailing HALT; empty becomes HALT."""
    ins = list(p.instructions)
    if not ins:
        return ToyProgram((Instr("HALT"),))
    n = len(ins)
    if any(i.op == "JZ" and i.target >= n for i in ins):
        if ins[-1].op != "HALT":
            ins.append(Instr("HALT"))
        end = len(ins) - 1
        ins = [Instr("JZ", i.reg, end) if i.op == "JZ" and i.target >= n else i for i in ins]
    # canonical HALT carries no operands
    ins = [Instr("HALT") if i.op == "HALT" else i for i in ins]
    return ToyProgram(tuple(ins))


def parse_program(text: str) -> ToyProgram:
    """One instruction per line (or separated by '|'); '#' starts a comment."""
    ins = []
    for lineno, raw in enumerate(text.replace("|", "\n").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0].upper()

        def reg(tok: str) -> int:
            if not (tok.lower().startswith("r") and tok[1:].isdigit()):
                raise ValueError(f"line {lineno}: bad register {tok!r}")
            return int(tok[1:])

        if op == "HALT" and len(parts) == 1:
            ins.append(Instr("HALT"))
        elif op in ("INC", "DEC") and len(parts) == 2:
            ins.append(Instr(op, reg(parts[1])))
        elif op == "JZ" and len(parts) == 3 and parts[2].isdigit():
            ins.append(Instr("JZ", reg(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    return ToyProgram(tuple(ins))


def _instr_code(i: Instr) -> int:
    match i.op:
        case "HALT":
            return 0
        case "INC":
            return 1 + 4 * i.reg
        case "DEC":
            return 2 + 4 * i.reg
        case "JZ":
            return 3 + 4 * pair((i.reg, i.target))
    raise ValueError(f"unknown op {i.op}")


def _instr_decode(c: int) -> Instr:
    kind, payload = c % 4, c // 4
    if kind == 0:
        return Instr("HALT")
    if kind == 1:
        return Instr("INC", payload)
    if kind == 2:
        return Instr("DEC", payload)
    r, t = unpair(payload, 2)
    return Instr("JZ", r, t)


def _gamma(v: int) -> str:
    b = bin(v)[2:]
    return "0" * (len(b) - 1) + b


def program_code(p: ToyProgram) -> int:
    p = normalize(p)
    bits = "".join(_gamma(_instr_code(i) + 1) for i in p.instructions)
    return int("1" + bits, 2) - 1


@lru_cache(maxsize=4096)
def decode(n: int) -> ToyProgram:
    if n < 0:
        raise ValueError("program index must be a natural number")
    bits = bin(n + 1)[3:]
    codes = []
    pos = 0
    while pos < len(bits):
        zeros = 0
        while pos + zeros < len(bits) and bits[pos + zeros] == "0":
            zeros += 1
        end = pos + 2 * zeros + 1
        if end > len(bits):
            break
        codes.append(int(bits[pos + zeros:end], 2) - 1)
        pos = end
    return normalize(ToyProgram(tuple(_instr_decode(c) for c in codes)))


# ------------------------------------------------------------------ running


@dataclass(frozen=True)
class Halted:
    steps: int
    output: int


@dataclass(frozen=True)
class Running:
    fuel: int


@dataclass
class MachineState:
    pc: int = 0
    registers: dict[int, int] = field(default_factory=dict)
    steps: int = 0
    halted: bool = False


def _compile(p: ToyProgram) -> list[tuple[int, int, int]]:
    ops = {"HALT": 0, "INC": 1, "DEC": 2, "JZ": 3}
    return [(ops[i.op], i.reg, i.target) for i in p.instructions]


def step_until(code: list[tuple[int, int, int]], state: MachineState, fuel: int) -> MachineState:
    """Advance state in place until it halts or has used `fuel` steps."""
    pc, regs, steps = state.pc, state.registers, state.steps
    n = len(code)
    halted = state.halted
    while not halted and steps < fuel:
        steps += 1
        if pc >= n:
            halted = True
            break
        op, r, t = code[pc]
        if op == 0:
            halted = True
        elif op == 1:
            regs[r] = regs.get(r, 0) + 1
            pc += 1
        elif op == 2:
            v = regs.get(r, 0)
            if v:
                regs[r] = v - 1
            pc += 1
        elif regs.get(r, 0) == 0:
            pc = t
        else:
            pc += 1
    state.pc, state.steps, state.halted = pc, steps, halted
    return state


class _RunCache:
    """Resumable simulations keyed by (program, input).

    Results are a pure function of (n, m, fuel); the cache only avoids
    recomputing prefixes of the same run.
    """

    def __init__(self, limit: int = 200_000):
        self.limit = limit
        self.runs: dict[tuple[int, int], MachineState] = {}
        self.lock = threading.Lock()

    def run(self, n: int, m: int, fuel: int) -> Halted | Running:
        key = (n, m)
        with self.lock:
            state = self.runs.get(key)
            if state is None:
                if len(self.runs) >= self.limit:
                    self.runs.clear()
                state = MachineState(registers={0: m} if m else {})
                self.runs[key] = state
            if not state.halted and state.steps < fuel:
                step_until(_compiled(n), state, fuel)
            if state.halted and state.steps <= fuel:
                return Halted(state.steps, state.registers.get(0, 0))
            return Running(fuel)


@lru_cache(maxsize=4096)
def _compiled(n: int) -> list[tuple[int, int, int]]:
    return _compile(decode(n))


_CACHE = _RunCache()


def run_bounded(n: int, m: int, fuel: int) -> Halted | Running:
    """Run program n on input m for at most `fuel` steps."""
    return _CACHE.run(n, m, fuel)


def run_program(p: ToyProgram, m: int, fuel: int) -> Halted | Running:
    """Uncached run of an explicit program (used as an independent check)."""
    state = MachineState(registers={0: m} if m else {})
    step_until(_compile(normalize(p)), state, fuel)
    if state.halted:
        return Halted(state.steps, state.registers.get(0, 0))
    return Running(fuel)


def psi(n: int, m: int, k: int) -> int:
    """Runtime predicate: 1 iff program n halts on m within k steps."""
    return 1 if isinstance(run_bounded(n, m, k), Halted) else 0


def g_psi_member(variant: tuple[str, int] | str, m: int) -> int:
    """Decidable sets behind D(e_n) in Sigma_1 and A_T in Pi_2.

    ("domain", n): m in G_n iff psi(n, w2(m), w1(m)) = 1 with (w1, w2) = unpair(m).
    "totality": m in G iff psi(t3, t1, t2) = 1 with (t1, t2, t3) = unpair(m, 3).
    """
    if variant == "totality":
        t1, t2, t3 = unpair(m, 3)
        return psi(t3, t1, t2)
    kind, n = variant
    if kind != "domain":
        raise ValueError(f"unknown variant {variant!r}")
    k, j = unpair(m, 2)
    return psi(n, j, k)


# ------------------------------------------------------------------- corpus


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    name: str
    source: str
    total: bool
    domain: str  # predicate over the input m, in Python syntax
    tags: tuple[str, ...]
    halting_times: tuple[int | None, ...]  # per input 0..len-1, None = diverges

    @property
    def program(self) -> ToyProgram:
        return parse_program(self.source)

    def halts_on(self, m: int) -> bool:
        return bool(eval(self.domain, {"__builtins__": {}}, {"m": m}))

    def first_divergent(self) -> int | None:
        for m, t in enumerate(self.halting_times):
            if t is None:
                return m
        return None


def _default_corpus_path() -> Path:
    return Path(str(resources.files("artifact").joinpath("data/corpus.json")))


def corpus_path() -> Path:
    override = os.environ.get(CORPUS_ENV)
    return Path(override) if override else _default_corpus_path()


def load_corpus(path: Path | str | None = None) -> list[CorpusEntry]:
    raw = json.loads(Path(path or corpus_path()).read_text())
    out = []
    for e in raw["programs"]:
        out.append(
            CorpusEntry(
                index=int(e["index"]),
                name=e["name"],
                source=e["source"],
                total=bool(e["total"]),
                domain=e["domain"],
                tags=tuple(e["tags"]),
                halting_times=tuple(e["halting_times"]),
            )
        )
    return out


_CORPUS: dict[str, list[CorpusEntry]] = {}


def corpus() -> list[CorpusEntry]:
    key = str(corpus_path())
    if key not in _CORPUS:
        _CORPUS[key] = load_corpus(key)
    return _CORPUS[key]


def corpus_entry(n: int) -> CorpusEntry | None:
    for e in corpus():
        if e.index == n:
            return e
    return None


def corpus_by_name(name: str) -> CorpusEntry:
    for e in corpus():
        if e.name == name:
            return e
    raise KeyError(name)


@dataclass(frozen=True)
class Oracle:
    """Halting or totality oracle.

    mode "ground-truth" answers from corpus construction facts only;
    mode "fuel" simulates and returns None when the fuel runs out.
    """

    kind: str  # "halting" or "totality"
    mode: str = "ground-truth"
    fuel: int = 10_000

    def halts(self, n: int, m: int) -> int | None:
        if self.mode == "ground-truth":
            entry = corpus_entry(n)
            if entry is None:
                raise LookupError(f"program {n} is not in the corpus; ground truth unavailable")
            return int(entry.halts_on(m))
        return 1 if isinstance(run_bounded(n, m, self.fuel), Halted) else None

    def total(self, n: int) -> int:
        if self.mode != "ground-truth":
            raise LookupError("totality has no honest fuel-bounded answer")
        entry = corpus_entry(n)
        if entry is None:
            raise LookupError(f"program {n} is not in the corpus; ground truth unavailable")
        return int(entry.total)
