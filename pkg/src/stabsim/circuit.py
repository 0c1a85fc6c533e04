"""Line-oriented circuit format, runner and trace emitter.

Grammar (keywords are case-insensitive, ``#`` starts a comment, qubits are
numbered from 1)::

    qubits N
    input q zero|data [NAME]
    stabilizer <pauli>          # declare an initial stabilizer row
    R q | P q | X q | Y q | Z q
    CNOT c t
    MEASURE <pauli> [-> bit] [random]
    IF bit APPLY <pauli>
    DROP q
    STEP [label text]           # start a new trace block

``<pauli>`` is written at the current qubit count. ``DROP`` removes a qubit
and renumbers the ones after it, so later lines address the smaller register.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import oracle as _oracle
from .pauli import PauliError, PauliOperator, membership, parse_pauli
from .tableau import InputKind, MeasureCase, MeasurementRecord, Tableau, TableauError

__all__ = [
    "CircuitError",
    "CircuitSyntaxError",
    "Gate",
    "Measure",
    "Conditional",
    "Drop",
    "Step",
    "Instruction",
    "Circuit",
    "TraceBlock",
    "Trace",
    "parse",
    "format_circuit",
    "run",
    "format_trace",
    "format_records",
    "initial_tableau",
]

SINGLE_QUBIT = ("R", "P", "X", "Y", "Z")
NON_CLIFFORD = {"T", "TDG", "TOFFOLI", "CCX", "CCNOT", "SQRTCNOT", "RX", "RY", "RZ", "U", "U3", "PI8", "CSWAP"}


class CircuitError(ValueError):
    """Runtime failure, annotated with the source line when known."""


class CircuitSyntaxError(CircuitError):
    def __init__(self, message: str, line: int, col: int = 1):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    line: int = field(default=0, compare=False)

    def describe(self) -> str:
        if self.name == "CNOT":
            return f"CNOT({self.qubits[0] + 1}->{self.qubits[1] + 1})"
        return f"{self.name}({self.qubits[0] + 1})"


@dataclass(frozen=True)
class Measure:
    observable: PauliOperator
    bit: str | None = None
    mode: str = "force_plus"
    line: int = field(default=0, compare=False)

    def describe(self) -> str:
        sign = "-" if self.observable.sign_exp == 2 else ""
        return f"Measure {sign}{self.observable.letters}"


@dataclass(frozen=True)
class Conditional:
    bit: str
    correction: PauliOperator
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Drop:
    qubit: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Step:
    label: str | None = None
    line: int = field(default=0, compare=False)


Instruction = Union[Gate, Measure, Conditional, Drop, Step]


@dataclass(frozen=True)
class Circuit:
    n: int
    inputs: tuple[InputKind, ...]
    instructions: tuple[Instruction, ...] = ()
    names: tuple[str | None, ...] = ()
    stabilizers: tuple[PauliOperator, ...] = ()

    @property
    def bits(self) -> tuple[str, ...]:
        return tuple(i.bit for i in self.instructions if isinstance(i, Measure) and i.bit)

    @property
    def has_random(self) -> bool:
        return any(isinstance(i, Measure) and i.mode == "random" for i in self.instructions)

    @property
    def labels(self) -> list[str]:
        return [self.names[j] or str(j + 1) for j in range(self.n)
                if self.inputs[j] is InputKind.DATA]

    def gate_list(self) -> list[tuple]:
        """``(name, *qubits)`` for a measurement-free circuit."""
        out = []
        for ins in self.instructions:
            if isinstance(ins, Gate):
                out.append((ins.name, *ins.qubits))
            elif not isinstance(ins, Step):
                raise CircuitError("circuit contains non-gate instructions")
        return out


# parsing -------------------------------------------------------------------
def _tokens(line: str) -> list[tuple[str, int]]:
    out, col, cur = [], 0, ""
    for i, ch in enumerate(line + " "):
        if ch.isspace():
            if cur:
                out.append((cur, col + 1))
                cur = ""
        else:
            if not cur:
                col = i
            cur += ch
    return out


def parse(text: str) -> Circuit:
    n: int | None = None
    inputs: list[InputKind | None] = []
    names: list[str | None] = []
    stabilizers: list[PauliOperator] = []
    instructions: list[Instruction] = []
    bits: set[str] = set()
    current_n = 0
    dropped = 0
    header_done = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = _tokens(body)
        if not toks:
            continue
        head, hcol = toks[0]
        kw = head.upper()
        args = toks[1:]

        def fail(msg: str, col: int = hcol):
            raise CircuitSyntaxError(msg, lineno, col)

        def qubit(tok: tuple[str, int]) -> int:
            text_, col = tok
            try:
                q = int(text_)
            except ValueError:
                fail(f"expected a qubit index, got {text_!r}", col)
            if q < 1:
                fail(f"qubit index {q} out of range (indices start at 1)", col)
            if q > current_n:
                if q <= current_n + dropped:
                    fail(f"qubit {q} no longer exists: {dropped} qubit(s) were dropped and "
                         f"the register now has {current_n}", col)
                fail(f"qubit index {q} out of range for {current_n} qubits", col)
            return q - 1

        def pauli(tok: tuple[str, int]) -> PauliOperator:
            text_, col = tok
            try:
                return parse_pauli(text_, current_n)
            except PauliError as exc:
                try:
                    p = parse_pauli(text_)
                except PauliError:
                    fail(str(exc), col)
                if dropped and current_n < p.n <= current_n + dropped:
                    fail(f"{text_} addresses dropped qubits; the register now has {current_n}", col)
                fail(str(exc), col)

        def nargs(k: int) -> None:
            if len(args) != k:
                fail(f"{kw} expects {k} argument(s), got {len(args)}")

        if kw == "QUBITS":
            if n is not None:
                fail("duplicate 'qubits' declaration")
            nargs(1)
            try:
                n = int(args[0][0])
            except ValueError:
                fail(f"expected a qubit count, got {args[0][0]!r}", args[0][1])
            if n < 1:
                fail("qubit count must be positive", args[0][1])
            current_n = n
            inputs = [None] * n
            names = [None] * n
            continue
        if n is None:
            fail("the first statement must be 'qubits N'")

        if kw in ("INPUT", "STABILIZER"):
            if header_done:
                fail(f"'{head}' must precede all instructions")
            if kw == "INPUT":
                if len(args) not in (2, 3):
                    fail("INPUT expects: input q zero|data [name]")
                q = qubit(args[0])
                kind = args[1][0].lower()
                if kind not in ("zero", "data"):
                    fail(f"input kind must be 'zero' or 'data', got {args[1][0]!r}", args[1][1])
                if inputs[q] is not None:
                    fail(f"input {q + 1} declared twice")
                inputs[q] = InputKind(kind)
                if len(args) == 3:
                    if kind != "data":
                        fail("only data inputs carry a name", args[2][1])
                    names[q] = args[2][0]
            else:
                nargs(1)
                p = pauli(args[0])
                if not p.is_hermitian:
                    fail(f"stabilizer row {args[0][0]} is not Hermitian", args[0][1])
                stabilizers.append(p)
            continue

        header_done = True
        if kw in SINGLE_QUBIT:
            nargs(1)
            instructions.append(Gate(kw, (qubit(args[0]),), lineno))
        elif kw in ("CNOT", "CX"):
            nargs(2)
            c, t = qubit(args[0]), qubit(args[1])
            if c == t:
                fail("CNOT control and target must differ", args[1][1])
            instructions.append(Gate("CNOT", (c, t), lineno))
        elif kw == "MEASURE":
            if not args:
                fail("MEASURE expects an observable")
            obs = pauli(args[0])
            if not obs.is_hermitian:
                fail(f"non-Hermitian observable {args[0][0]}: phases +-i give imaginary eigenvalues",
                     args[0][1])
            rest = args[1:]
            bit = None
            mode = "force_plus"
            if rest and rest[0][0] == "->":
                if len(rest) < 2:
                    fail("missing bit name after '->'", rest[0][1])
                bit = rest[1][0]
                if bit in bits:
                    fail(f"classical bit {bit!r} is already bound", rest[1][1])
                bits.add(bit)
                rest = rest[2:]
            if rest and rest[0][0].lower() == "random":
                mode = "random"
                rest = rest[1:]
            if rest:
                fail(f"unexpected token {rest[0][0]!r}", rest[0][1])
            instructions.append(Measure(obs, bit, mode, lineno))
        elif kw == "IF":
            if len(args) != 3 or args[1][0].upper() != "APPLY":
                fail("IF expects: IF bit APPLY <pauli>")
            bit = args[0][0]
            if bit not in bits:
                fail(f"classical bit {bit!r} is not bound by an earlier MEASURE", args[0][1])
            corr = pauli(args[2])
            if not corr.is_hermitian:
                fail(f"correction {args[2][0]} is not Hermitian", args[2][1])
            instructions.append(Conditional(bit, corr, lineno))
        elif kw == "DROP":
            nargs(1)
            q = qubit(args[0])
            if current_n == 1:
                fail("cannot drop the last qubit")
            instructions.append(Drop(q, lineno))
            current_n -= 1
            dropped += 1
        elif kw == "STEP":
            label = body.strip()[len(head):].strip() or None
            instructions.append(Step(label, lineno))
        elif kw in NON_CLIFFORD:
            fail(f"gate {head!r} is outside the Clifford group; only R, P, CNOT and Pauli "
                 f"gates can be simulated by the stabilizer engine")
        else:
            fail(f"unknown instruction {head!r} (Clifford-only: R, P, CNOT, X, Y, Z, MEASURE, IF, DROP)")

    if n is None:
        raise CircuitSyntaxError("empty circuit: missing 'qubits N'", 1)
    kinds = []
    stab_support = 0
    for s in stabilizers:
        stab_support |= s.support
    for j, k in enumerate(inputs):
        if k is None:
            k = None if (stab_support >> j) & 1 else InputKind.DATA
        kinds.append(k)
    c = Circuit(n, tuple(kinds), tuple(instructions), tuple(names), tuple(stabilizers))
    try:
        initial_tableau(c)
    except TableauError as exc:
        raise CircuitSyntaxError(f"inconsistent initial state: {exc}", 1) from None
    return c


def initial_tableau(c: Circuit) -> Tableau:
    """Tableau for the declared inputs.

    Qubits left undeclared but covered by a ``stabilizer`` row are pinned by
    those rows alone and carry no logical pair.
    """
    if not c.stabilizers and all(k is not None for k in c.inputs):
        return Tableau.init(c.n, list(c.inputs), [c.names[j] or str(j + 1) for j in range(c.n)])
    stabs = list(c.stabilizers)
    logs = []
    for j, k in enumerate(c.inputs):
        if k is InputKind.FIXED_ZERO:
            stabs.append(PauliOperator.single(c.n, j, "Z"))
        elif k is InputKind.DATA:
            logs.append((c.names[j] or str(j + 1),
                         PauliOperator.single(c.n, j, "X"), PauliOperator.single(c.n, j, "Z")))
    return Tableau.from_generators(c.n, stabs, logs)


def format_circuit(c: Circuit) -> str:
    """Canonical text form; ``parse(format_circuit(c)) == c``."""
    lines = [f"qubits {c.n}"]
    for j, k in enumerate(c.inputs):
        if k is None:
            continue
        name = c.names[j] if j < len(c.names) and c.names[j] else None
        lines.append(f"input {j + 1} {k.value}" + (f" {name}" if name else ""))
    for s in c.stabilizers:
        lines.append(f"stabilizer {s}")
    for ins in c.instructions:
        if isinstance(ins, Gate):
            lines.append(" ".join([ins.name] + [str(q + 1) for q in ins.qubits]))
        elif isinstance(ins, Measure):
            s = f"MEASURE {ins.observable}"
            if ins.bit:
                s += f" -> {ins.bit}"
            if ins.mode == "random":
                s += " random"
            lines.append(s)
        elif isinstance(ins, Conditional):
            lines.append(f"IF {ins.bit} APPLY {ins.correction}")
        elif isinstance(ins, Drop):
            lines.append(f"DROP {ins.qubit + 1}")
        else:
            lines.append("STEP" + (f" {ins.label}" if ins.label else ""))
    return "\n".join(lines) + "\n"


# running -------------------------------------------------------------------
@dataclass(frozen=True)
class TraceBlock:
    label: str
    rows: tuple[str, ...]
    fidelity: float | None = None


@dataclass
class Trace:
    blocks: list[TraceBlock]
    measurements: list[MeasurementRecord]
    bits: dict[str, int]
    tableau: Tableau | None = None
    state: _oracle.DenseState | None = None
    # (tableau case, oracle probability of +1, outcome) per measurement
    oracle_checks: list[tuple[MeasureCase, float, int]] = field(default_factory=list)
    stabilizer_checks: list[bool] = field(default_factory=list)

    @property
    def fidelities(self) -> list[float | None]:
        return [b.fidelity for b in self.blocks]

    @property
    def deterministic_agreement(self) -> bool:
        ok = True
        for case, p_plus, outcome in self.oracle_checks:
            if case is MeasureCase.DETERMINISTIC:
                expect = 1.0 if outcome == 1 else 0.0
                ok &= abs(p_plus - expect) < 1e-9
        return ok


def _group_steps(instructions: Sequence[Instruction]) -> list[tuple[str | None, list[Instruction]]]:
    groups: list[tuple[str | None, list[Instruction]]] = []
    explicit = any(isinstance(i, Step) for i in instructions)
    for ins in instructions:
        if isinstance(ins, Step):
            groups.append((ins.label, []))
        elif not explicit or not groups:
            # without STEP markers, and before the first one, each instruction is a block
            groups.append((None, [ins]))
        else:
            groups[-1][1].append(ins)
    return groups


def _step_name(index: int) -> str:
    letters = string.ascii_uppercase
    name = ""
    index += 1
    while index:
        index, r = divmod(index - 1, 26)
        name = letters[r] + name
    return name


def _auto_label(body: list[Instruction]) -> str:
    parts = [i.describe() for i in body if isinstance(i, (Gate, Measure))]
    return " ".join(parts) if parts else "(no gates)"


def _logical_image(t: Tableau, label: str, assign: str) -> PauliOperator:
    sign = -1 if assign.startswith("-") else 1
    letter = assign.lstrip("+-").upper()
    xb, zb = t.logical(label)
    if letter == "X":
        op = xb
    elif letter == "Z":
        op = zb
    elif letter == "Y":
        op = (xb * zb).times_phase(1)
    else:
        raise CircuitError(f"logical assignment must be one of +-X, +-Y, +-Z, got {assign!r}")
    return -op if sign < 0 else op


def run(c: Circuit, backend: str = "tableau", seed: int | None = None,
        data: np.ndarray | None = None, assignment: Sequence[str] | None = None,
        oracle_limit: int = _oracle.DEFAULT_LIMIT, check: bool = False) -> Trace:
    """Execute ``c``; one trace block for the start and one per step.

    ``backend`` is ``"tableau"``, ``"oracle"`` or ``"both"``. The oracle side
    needs an input for the data qubits: either ``data`` (amplitudes over the
    logical basis, first logical most significant) or ``assignment`` (a
    signed Pauli letter per logical, e.g. ``"+Z"``; the default is all
    ``+Z``). With an assignment the tableau is shadowed by a full-rank copy
    that fixes the data, which makes every step reconstructible; with dense
    data the reconstruction stops after the first logical-constraining
    measurement. ``check`` validates tableau invariants after every step.
    """
    if backend not in ("tableau", "oracle", "both"):
        raise CircuitError(f"unknown backend {backend!r}")
    if c.has_random and seed is None:
        raise CircuitError("circuit has random-mode measurements: a seed is required")
    rng = np.random.default_rng(seed)
    t = initial_tableau(c)
    use_oracle = backend != "tableau"
    full: Tableau | None = None
    state: _oracle.DenseState | None = None
    data_vec = None
    if use_oracle:
        if t.n > oracle_limit:
            raise CircuitError(f"{t.n} qubits exceeds the oracle limit of {oracle_limit}")
        if data is not None:
            data_vec = np.asarray(data, dtype=complex)
            data_vec = data_vec / np.linalg.norm(data_vec)
            state = _oracle.tableau_state(t, data_vec, oracle_limit)
        else:
            labels = t.labels
            assign = list(assignment) if assignment is not None else ["+Z"] * len(labels)
            if len(assign) != len(labels):
                raise CircuitError(f"{len(assign)} assignments for {len(labels)} data qubits")
            full = t.copy()
            for label, s in zip(labels, assign):
                full.measure(_logical_image(full, label, s))
            state = _oracle.stabilizer_to_state(full.stabilizer, oracle_limit)

    bits: dict[str, int] = {}
    records: list[MeasurementRecord] = []
    trace = Trace([], records, bits)
    reconstructible = True

    def block(label: str) -> TraceBlock:
        fid = None
        if use_oracle:
            if full is not None:
                ref = _oracle.stabilizer_to_state(full.stabilizer, oracle_limit)
                fid = _oracle.fidelity(ref, state)
                mems = [membership(full.stabilizer, s) for s in t.stabilizer]
                trace.stabilizer_checks.append(all(m.in_group and m.phase == 0 for m in mems))
            else:
                if reconstructible:
                    fid = _oracle.fidelity(_oracle.tableau_state(t, data_vec, oracle_limit), state)
                trace.stabilizer_checks.append(all(_oracle.is_stabilized(state, s, 1e-9) for s in t.stabilizer))
        if check:
            t.check_invariants()
        if backend == "oracle":
            rows = tuple(_oracle.format_amplitudes(state.amps).splitlines())
        else:
            rows = tuple(t.snapshot())
        return TraceBlock(label, rows, fid)

    trace.blocks.append(block("Start"))
    for k, (label, body) in enumerate(_group_steps(c.instructions)):
        for ins in body:
            try:
                if isinstance(ins, Gate):
                    if ins.name in ("R", "P", "CNOT"):
                        t.apply_gate(ins.name, *ins.qubits)
                        if full is not None:
                            full.apply_gate(ins.name, *ins.qubits)
                    else:
                        e = PauliOperator.single(t.n, ins.qubits[0], ins.name)
                        t.apply_pauli(e)
                        if full is not None:
                            full.apply_pauli(e)
                    if state is not None:
                        state = _oracle.apply(state, ins.name, *ins.qubits)
                elif isinstance(ins, Measure):
                    obs = ins.observable
                    forced = None
                    if full is not None:
                        forced = full.measure(obs, "random", rng).outcome
                    elif state is not None:
                        _, forced, _ = _oracle.measure_pauli(state, obs, rng)
                    rec = t.measure(obs, ins.mode, rng, forced)
                    if rec.case is MeasureCase.LOGICAL_CONSTRAINING:
                        reconstructible = False
                    if state is not None:
                        state, _, p_plus = _oracle.measure_pauli(state, obs, outcome=rec.outcome)
                        trace.oracle_checks.append((rec.case, p_plus, rec.outcome))
                        if rec.corrected:
                            state = _oracle.apply_pauli(state, rec.witness)
                    if full is not None and rec.corrected:
                        full.apply_pauli(rec.witness)
                    records.append(rec)
                    if ins.bit:
                        bits[ins.bit] = rec.bit
                elif isinstance(ins, Conditional):
                    if bits.get(ins.bit):
                        t.apply_pauli(ins.correction)
                        if full is not None:
                            full.apply_pauli(ins.correction)
                        if state is not None:
                            state = _oracle.apply_pauli(state, ins.correction)
                elif isinstance(ins, Drop):
                    t.drop_qubit(ins.qubit)
                    if full is not None:
                        full.drop_qubit(ins.qubit)
                    if state is not None:
                        state = _oracle.drop_qubit(state, ins.qubit)
            except (TableauError, PauliError, _oracle.OracleError) as exc:
                raise CircuitError(f"line {ins.line}: {exc}") from exc
        text = label if label else _auto_label(body)
        trace.blocks.append(block(f"{_step_name(k)}: {text}"))
    trace.tableau = t
    trace.state = state
    return trace


def format_trace(trace: Trace) -> str:
    out = []
    for b in trace.blocks:
        out.append(f"== {b.label}")
        out.extend(b.rows)
    return "\n".join(out) + "\n"


def format_records(trace: Trace) -> str:
    """One JSON object per trace row."""
    lines = []
    for b in trace.blocks:
        for row in b.rows:
            if row.startswith("  "):
                rec = {"step": b.label, "kind": "stabilizer", "pauli": row.strip()}
            elif row.startswith(("Xbar_", "Zbar_")):
                head, pauli = row.split(": ", 1)
                rec = {"step": b.label, "kind": head[0].lower() + "bar", "label": head[5:], "pauli": pauli}
            else:
                idx, re_, im = row.split()
                rec = {"step": b.label, "kind": "amplitude", "index": int(idx),
                       "real": float(re_), "imag": float(im)}
            if b.fidelity is not None:
                rec["fidelity"] = b.fidelity
            lines.append(json.dumps(rec))
    return "\n".join(lines) + ("\n" if lines else "")
