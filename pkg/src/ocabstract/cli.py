"""Command line front end and the text formats for automata, substitutions
and semilinear sets."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .closures import closure_nfa
from .completeness import (
    as_rba,
    flatten_to_rba,
    hard_automaton,
    hard_size_literal,
    hard_size_reported,
    reduce_to_hard_full,
    to_loop_counting,
)
from .core import (
    ZERO,
    InvalidAutomaton,
    Oca,
    OcaError,
    expand_extended,
    make_oca,
    nfa_accepts,
    paper_size,
    trim,
)
from .oracle import closure_member, enumerate_parikh, nfa_parikh, words_up_to
from .parikh_fixed import (
    BoundConfig,
    LinearSet,
    SemilinearSet,
    parikh_nfa_fixed,
    parikh_semilinear,
)
from .parikh_general import DEFAULT_STATE_BUDGET, parikh_nfa_general
from .reduction import Substitution, apply_substitution, lift_abstraction


class FormatError(OcaError):
    pass


# --------------------------------------------------------------- automata

_OP_NAMES = {1: "inc", -1: "dec", 0: "noop", ZERO: "zero"}
_OP_VALUES = {v: k for k, v in _OP_NAMES.items()}


def _token(name: str, what: str) -> str:
    if not name or any(c.isspace() for c in name) or name.startswith("#"):
        raise FormatError(f"{what} {name!r} cannot be written as a token")
    return name


def format_op(op) -> str:
    return _OP_NAMES.get(op) or f"{op:+d}"


def parse_op(text: str):
    if text in _OP_VALUES:
        return _OP_VALUES[text]
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"bad counter op {text!r}") from None


def format_oca(A: Oca) -> str:
    """Text form with states, finals and transitions sorted."""
    lines = [f"kind {A.kind}"]
    lines.append(" ".join(["alphabet"] + [_token(a, "letter") for a in A.alphabet]))
    lines += [f"state {_token(q, 'state')}" for q in sorted(A.states)]
    lines.append(f"initial {A.initial}")
    lines += [f"final {q}" for q in sorted(A.finals)]
    for t in A.sorted_transitions():
        label = "eps" if t.label is None else t.label
        lines.append(f"trans {t.src} {label} {format_op(t.op)} {t.dst}")
    return "\n".join(lines) + "\n"


def parse_oca(text: str) -> Oca:
    kind = initial = None
    alphabet, states, finals, ts = [], [], [], []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "kind" and len(rest) == 1:
            kind = rest[0]
        elif head == "alphabet":
            alphabet += rest
        elif head == "state" and len(rest) == 1:
            states.append(rest[0])
        elif head == "initial" and len(rest) == 1:
            initial = rest[0]
        elif head == "final" and len(rest) == 1:
            finals.append(rest[0])
        elif head == "trans" and len(rest) == 4:
            p, a, op, q = rest
            ts.append((p, None if a == "eps" else a, parse_op(op), q))
        else:
            raise FormatError(f"line {number}: cannot parse {raw.strip()!r}")
    if kind is None or initial is None:
        raise FormatError("missing kind or initial line")
    return make_oca(kind, ts, initial, finals, states, alphabet)


def read_oca(path) -> Oca:
    try:
        return parse_oca(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise FormatError(str(e)) from None


# --------------------------------------------------------------- substitutions

def write_substitution(sigma: Substitution, directory) -> Path:
    """One NFA file per image plus sigma.sub pointing at them."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, letter in enumerate(sorted(sigma.images)):
        name = f"img{i}.nfa"
        (directory / name).write_text(format_oca(sigma.images[letter]), encoding="utf-8")
        lines.append(f"sub {_token(letter, 'letter')} -> {name}")
    path = directory / "sigma.sub"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_substitution(path) -> Substitution:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(str(e)) from None
    images = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "sub" or parts[2] != "->":
            raise FormatError(f"line {number}: expected 'sub <letter> -> <path>'")
        N = read_oca(path.parent / parts[3])
        if N.kind != "nfa":
            raise FormatError(f"image of {parts[1]!r} is not an nfa")
        images[parts[1]] = N
    return Substitution(images)


# --------------------------------------------------------------- semilinear sets

def format_semilinear(S: SemilinearSet, alphabet=None) -> str:
    lines = []
    if alphabet is not None:
        lines.append(" ".join(["alphabet"] + list(alphabet)))
    for c in S.components:
        base = " ".join(map(str, c.base))
        periods = " | ".join(" ".join(map(str, p)) for p in c.periods)
        lines.append(f"lin base= {base} ; periods= {periods}".rstrip())
    return "\n".join(lines) + "\n"


def parse_semilinear(text: str) -> tuple:
    """Returns (SemilinearSet, alphabet or None)."""
    alphabet, comps = None, []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet"):
            alphabet = tuple(line.split()[1:])
            continue
        if not line.startswith("lin base="):
            raise FormatError(f"line {number}: expected a lin line")
        body = line[len("lin base="):]
        if ";" not in body:
            raise FormatError(f"line {number}: missing '; periods='")
        base_text, period_text = body.split(";", 1)
        period_text = period_text.strip()
        if not period_text.startswith("periods="):
            raise FormatError(f"line {number}: missing 'periods='")
        period_text = period_text[len("periods="):]
        try:
            base = tuple(int(x) for x in base_text.split())
            periods = tuple(tuple(int(x) for x in p.split()) for p in period_text.split("|") if p.strip())
        except ValueError:
            raise FormatError(f"line {number}: non-integer entry") from None
        if any(len(p) != len(base) for p in periods):
            raise FormatError(f"line {number}: period length differs from base")
        comps.append(LinearSet(base, periods))
    if alphabet is not None:
        dim = len(alphabet)
    elif comps:
        dim = len(comps[0].base)
    else:
        raise FormatError("empty semilinear set needs an alphabet line")
    if any(len(c.base) != dim for c in comps):
        raise FormatError("components of different dimension")
    return SemilinearSet(tuple(comps), dim), alphabet


# --------------------------------------------------------------- commands

def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _unit_steps(A: Oca) -> Oca:
    return expand_extended(A) if A.kind == "extended" else A


def _closure(args, mode):
    A = _unit_steps(read_oca(args.file))
    _emit(format_oca(closure_nfa(A, mode)), args.output)
    return 0


def cmd_upward(args):
    return _closure(args, "up")


def cmd_downward(args):
    return _closure(args, "down")


def _bounds(args, n):
    base = BoundConfig.default(n)
    return BoundConfig(args.s_len or base.s_len, args.dir_len or base.L_dir, args.eff_max or base.E_max)


def cmd_parikh_fixed(args):
    A = _unit_steps(read_oca(args.file))
    if A.kind != "simple":
        raise InvalidAutomaton("parikh-fixed expects a simple OCA")
    if args.semilinear:
        S = parikh_semilinear(A, _bounds(args, len(A.states)))
        _emit(format_semilinear(S, A.alphabet), args.output)
        return 0
    if args.deepen:
        N = parikh_nfa_fixed(A, deepen=True)
    else:
        N = parikh_nfa_fixed(A, _bounds(args, len(A.states)))
    _emit(format_oca(N), args.output)
    return 0


def cmd_parikh_general(args):
    A = _unit_steps(read_oca(args.file))
    N = parikh_nfa_general(A, reversals=args.reversals, stack_height=args.stack_height,
                           state_budget=args.state_budget)
    _emit(format_oca(N), args.output)
    return 0


def cmd_hard_automaton(args):
    H = hard_automaton(args.n)
    head = (f"# size figure {hard_size_reported(args.n)}, "
            f"states plus add charges {hard_size_literal(args.n)}\n")
    _emit(head + format_oca(H), args.output)
    return 0


def cmd_flatten_rba(args):
    A = _unit_steps(read_oca(args.file))
    R, sigma = flatten_to_rba(A, args.reversals)
    if args.subst_dir:
        write_substitution(sigma, args.subst_dir)
    _emit(format_oca(R.automaton), args.output)
    return 0


def cmd_loop_counting(args):
    R = as_rba(read_oca(args.file))
    B, K = to_loop_counting(R, args.size)
    _emit(f"# K {K}\n" + format_oca(B.automaton), args.output)
    return 0


def cmd_reduce_hard(args):
    out = reduce_to_hard_full(as_rba(read_oca(args.file)))
    if args.subst_dir:
        write_substitution(out.sigma, args.subst_dir)
    lines = [f"m {out.m}"] + [f"chi {q} {s}" for q, s in sorted(out.chi.items(), key=lambda x: x[1])]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_apply_subst(args):
    N = read_oca(args.file)
    sigma = read_substitution(args.substitution)
    _emit(format_oca(apply_substitution(N, sigma)), args.output)
    return 0


def _parikh_candidate(A: Oca) -> Oca:
    if A.kind == "simple":
        return parikh_nfa_fixed(A, deepen=True)
    return lift_abstraction(A, 0, "parikh", lambda p, q, piece: parikh_nfa_fixed(trim(piece), deepen=True))


def _vectors(dim, bound):
    if dim == 0:
        yield ()
        return
    for first in range(bound + 1):
        for rest in _vectors(dim - 1, bound - first):
            yield (first,) + rest


def cmd_verify(args):
    A = _unit_steps(read_oca(args.file))
    mode = args.mode
    if args.candidate:
        N = read_oca(args.candidate)
    elif mode in ("up", "down"):
        N = closure_nfa(A, mode)
    elif mode == "parikh":
        N = _parikh_candidate(A)
    else:
        raise FormatError("verify exact needs --candidate")
    if N.kind != "nfa":
        raise FormatError("candidate must be an nfa")
    lines, total, bad = [], 0, 0
    if mode == "parikh":
        letters = A.alphabet
        got = nfa_parikh(N, args.norm)
        index = [N.alphabet.index(a) if a in N.alphabet else None for a in letters]
        got = {tuple(0 if i is None else v[i] for i in index) for v in got
               if all(v[j] == 0 for j, a in enumerate(N.alphabet) if a not in letters)}
        want = enumerate_parikh(A, args.norm)
        for v in _vectors(len(letters), args.norm):
            total += 1
            if (v in got) != (v in want):
                bad += 1
                lines.append(f"MISMATCH vector {' '.join(map(str, v))} oracle={int(v in want)} "
                             f"construction={int(v in got)}")
        unit = "vectors"
    else:
        for w in words_up_to(A.alphabet, args.max_len):
            total += 1
            expected = closure_member(A, w, mode)
            actual = nfa_accepts(N, w)
            if expected != actual:
                bad += 1
                lines.append(f"MISMATCH word {' '.join(w) or 'eps'} oracle={int(expected)} "
                             f"construction={int(actual)}")
        unit = "words"
    status = "FAIL" if bad else "OK"
    lines.append(f"{status} {total - bad}/{total} {unit} agree")
    _emit("\n".join(lines) + "\n", args.output)
    return 1 if bad else 0


def cmd_stats(args):
    A = read_oca(args.file)
    ops = [abs(t.op) for t in A.transitions if t.op != ZERO]
    lines = [
        f"kind {A.kind}",
        f"states {len(A.states)}",
        f"transitions {len(A.transitions)}",
        f"letters {len(A.alphabet)}",
        f"finals {len(A.finals)}",
        f"paper-size {paper_size(A)}",
        f"epsilon {'yes' if A.has_epsilon else 'no'}",
        f"zero-tests {sum(1 for t in A.transitions if t.op == ZERO)}",
        f"max-add {max(ops, default=0)}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oca", description="Regular abstractions of one-counter automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, takes_file=True):
        p = sub.add_parser(name, help=help_text)
        if takes_file:
            p.add_argument("file")
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
        return p

    command("upward", cmd_upward, "NFA for the upward closure")
    command("downward", cmd_downward, "NFA for the downward closure")
    p = command("parikh-fixed", cmd_parikh_fixed, "Parikh-equivalent NFA, fixed alphabet")
    p.add_argument("--s-len", type=int)
    p.add_argument("--dir-len", type=int)
    p.add_argument("--eff-max", type=int)
    p.add_argument("--deepen", action="store_true")
    p.add_argument("--semilinear", action="store_true", help="print the semilinear set instead")
    p = command("parikh-general", cmd_parikh_general, "Parikh-equivalent NFA, any alphabet")
    p.add_argument("--reversals", type=int)
    p.add_argument("--stack-height", type=int)
    p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    p = command("hard-automaton", cmd_hard_automaton, "the extended OCA H_n", takes_file=False)
    p.add_argument("n", type=int)
    p = command("flatten-rba", cmd_flatten_rba, "flatten a reversal-bounded simple OCA")
    p.add_argument("--reversals", type=int, required=True)
    p.add_argument("--subst-dir")
    p = command("loop-counting", cmd_loop_counting, "loop-counting form of an acyclic extended OCA")
    p.add_argument("--size", type=int, help="size n used for the constants (default: states plus add charges)")
    p = command("reduce-hard", cmd_reduce_hard, "substitution onto H_{2m}")
    p.add_argument("--subst-dir")
    p = command("apply-subst", cmd_apply_subst, "apply a substitution file to an automaton")
    p.add_argument("substitution")
    p = sub.add_parser("verify", help="compare a construction with the brute-force oracle")
    p.add_argument("mode", choices=["exact", "up", "down", "parikh"])
    p.add_argument("file")
    p.add_argument("--candidate", help="NFA file to check instead of the built-in construction")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--norm", type=int, default=8)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)
    command("stats", cmd_stats, "size report")
    return parser


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        return args.func(args)
    except (OcaError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
