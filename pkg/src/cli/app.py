"""
Command-line front-end for brownsim

Every command builds a JSON payload and an exit code: 0 when all asserted
checks pass, 1 when a check fails, 2 on a usage error.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import psutil

from ..core.brown import (
    GeneralizedIndex,
    WeightVector,
    brown_state,
    build_ub,
    check_weight_conditions,
    generalized_brown,
    ghz_state,
    prepare_brown_via_circuit,
    w_state,
    weight_entropy,
    weighted_brown,
    weighted_reductions,
)
from ..core import dense, sharing, teleport
from ..core.diagnostics import entropy_ledger
from ..core.errors import BrownSimError
from ..core.harness import ProtocolTranscript, audit
from ..core.qsim import StateVector, fidelity
from ..core.verifier import ClaimChecker, brown_expectation_checks
from ..utils.config import get_settings, parse_tolerance
from ..utils.draws import DrawSource, parse_complex_list, parse_draws, parse_floats
from ..utils.logger import get_logger, init_logging
from .reports import emit, mismatch_summary

PROTOCOLS = ("teleport1", "teleport2", "qsts1a", "qsts1b", "qsts2", "dense")
SHARING_PROTOCOLS = {"qsts1a": "p1", "qsts1b": "p2", "qsts2": "two-qubit"}
SECRET_QUBITS = {"teleport1": 1, "teleport2": 2, "qsts1a": 1, "qsts1b": 1, "qsts2": 2}
SHARE_ALIASES = {"p1": "qsts1a", "p2": "qsts1b", "two-qubit": "qsts2"}

BUILTIN_STATES: Dict[str, Callable[[], StateVector]] = {
    "brown": brown_state,
    "circuit": prepare_brown_via_circuit,
    "ghz": lambda: ghz_state(5),
    "w": lambda: w_state(5),
    "product": lambda: StateVector.basis("00000"),
}

Outcome = Tuple[Dict, int]


class UsageError(Exception):
    """Bad arguments that argparse cannot catch on its own"""


# Argument helpers

def _tolerance(args, settings: Dict) -> float:
    return args.tolerance if args.tolerance is not None else settings["tolerance"]


def _draw_source(args, settings: Dict) -> DrawSource:
    draws = None
    if getattr(args, "draws", None):
        draws = parse_draws(args.draws)
    elif getattr(args, "draw", None) is not None:
        draws = parse_draws(str(args.draw))
    if draws is not None:
        return DrawSource(draws=draws)
    seed = args.seed if getattr(args, "seed", None) is not None else settings["default_seed"]
    return DrawSource(seed=seed)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}")


def _state_from_json(obj) -> StateVector:
    """A StateVector object, a prepare payload holding one, or a plain amplitude list"""
    if isinstance(obj, dict) and "state" in obj:
        obj = obj["state"]
    if isinstance(obj, list):
        return StateVector.from_amplitudes(parse_complex_list(obj), normalize=True)
    return StateVector.from_json(obj)


def _parse_secret_text(text: str) -> StateVector:
    text = text.strip()
    if text.startswith("[") or text.startswith("{"):
        return _state_from_json(json.loads(text))
    return StateVector.from_amplitudes(parse_complex_list(p for p in text.split(",") if p.strip()), normalize=True)


def resolve_secret(args, n_qubits: int, source: DrawSource):
    """Secret from --secret, --secret-file, or a random one from the seed"""
    if getattr(args, "secret", None):
        state = _parse_secret_text(args.secret)
    elif getattr(args, "secret_file", None):
        state = _state_from_json(_read_json(args.secret_file))
    else:
        return teleport.random_secret(n_qubits, source.secret_rng())
    if state.n_qubits != n_qubits:
        raise UsageError(f"This protocol teleports {n_qubits} qubit(s), the secret has {state.n_qubits}")
    return teleport.secret_for(state)


def _alice_qubits(args) -> Tuple[int, ...]:
    raw = getattr(args, "alice_qubits", None)
    if not raw:
        return teleport.DEFAULT_ALICE_QUBITS
    return tuple(int(q) for q in raw.split(","))


# Protocol dispatch

def execute_protocol(protocol: str, variant: str, secret, source: DrawSource, message: int = 0,
                     alice_qubits: Sequence[int] = teleport.DEFAULT_ALICE_QUBITS,
                     suppress: bool = False) -> ProtocolTranscript:
    if protocol in SHARING_PROTOCOLS:
        name = SHARING_PROTOCOLS[protocol]
        sharing.check_variant(name, variant)
        draws = source.take(sharing.draws_needed(name, variant))
        return sharing.run_sharing(name, secret, draws, variant).transcript
    if variant != "standard":
        raise UsageError(f"{protocol} has no variant {variant!r}")
    if protocol == "teleport1":
        return teleport.teleport_one_qubit(secret, source.next(), suppress=suppress).transcript
    if protocol == "teleport2":
        return teleport.teleport_two_qubit(secret, source.next(), alice_qubits, suppress=suppress).transcript
    if protocol == "dense":
        return dense.run_dense(message, source.next())
    raise UsageError(f"Unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def _run_payload(protocol: str, variant: str, transcript: ProtocolTranscript, tolerance: float,
                 message: Optional[int] = None) -> Outcome:
    checker = audit(transcript, tolerance=tolerance)
    passed = checker.all_passed
    if protocol == "dense":
        passed = passed and transcript.details.get("decoded") == message
    payload = {
        "protocol": protocol,
        "variant": variant,
        "transcript": transcript.to_json(),
        "audit": checker.to_json(),
        "passed": passed,
    }
    return payload, 0 if passed else 1


# Commands

def cmd_prepare(args, settings: Dict) -> Outcome:
    """Build a state variant, verify the construction and optionally write it out"""
    ub = build_ub()
    circuit = prepare_brown_via_circuit()
    summary: Dict = {
        "variant": args.variant,
        "ub_unitary": ub.is_exactly_unitary(),
        "ub_completed": [list(entry) for entry in ub.completed],
        "circuit_fidelity": fidelity(circuit, brown_state()),
    }
    code = 0 if summary["ub_unitary"] else 1

    if args.variant == "literal":
        state = brown_state()
    elif args.variant == "circuit":
        state = circuit
    elif args.variant == "weighted":
        if not args.w:
            raise UsageError("--variant weighted needs --w a1,a2,a3,a4")
        weights = WeightVector(tuple(parse_floats(args.w)))
        state = weighted_brown(weights)
        summary.update({
            "weights": list(weights.values),
            "conditions": check_weight_conditions(weights).to_json(),
            "weight_entropy": weight_entropy(weights),
            "reductions": weighted_reductions(weights),
            "fidelity_to_literal": fidelity(state, brown_state()),
        })
    else:
        if args.n is None:
            raise UsageError("--variant generalized needs --n")
        if args.eta:
            idx = GeneralizedIndex(args.n, tuple(label.strip() for label in args.eta.split(",")))
        else:
            idx = GeneralizedIndex.default(args.n)
        state = generalized_brown(idx)
        summary.update({"n": idx.n, "eta": list(idx.eta)})

    summary["n_qubits"] = state.n_qubits
    payload: Dict = {"summary": summary}
    if args.out:
        Path(args.out).write_text(json.dumps(state.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        summary["written"] = str(args.out)
    else:
        payload["state"] = state.to_json()
    return payload, code


def cmd_diagnose(args, settings: Dict) -> Outcome:
    """Entropy ledger of a state file or a built-in state"""
    if args.builtin:
        state, source = BUILTIN_STATES[args.builtin](), args.builtin
    elif args.state_file:
        state, source = _state_from_json(_read_json(args.state_file)), args.state_file
    else:
        raise UsageError("diagnose needs a state file or --builtin")

    payload: Dict = {"source": source, "ledger": entropy_ledger(state)}
    code = 0
    if args.expect_brown:
        checker = ClaimChecker("brown expectations")
        checker.check_all(brown_expectation_checks(state))
        payload["checks"] = checker.to_json()
        code = 0 if checker.all_passed else 1
    return payload, code


def cmd_run(args, settings: Dict) -> Outcome:
    """Run one protocol and audit its transcript"""
    source = _draw_source(args, settings)
    variant = args.variant or "standard"
    secret = None
    if args.protocol != "dense":
        secret = resolve_secret(args, SECRET_QUBITS[args.protocol], source)
    transcript = execute_protocol(args.protocol, variant, secret, source, message=args.message,
                                  alice_qubits=_alice_qubits(args), suppress=args.suppress)
    return _run_payload(args.protocol, variant, transcript, _tolerance(args, settings), args.message)


def cmd_verify_tables(args, settings: Dict) -> Outcome:
    """Reconciliation ledger of every printed basis and table; mismatches are findings"""
    ub = build_ub()
    ledger: Dict[str, List[Dict]] = {
        "ub": [{"label": "ub", "match": ub.is_exactly_unitary(), "completed": [list(e) for e in ub.completed]}],
        "teleport_one_basis": teleport.reconcile_one_qubit_basis(),
        "teleport_one_corrections": [{"label": "correction_set", **teleport.reconcile_one_qubit_corrections()}],
        "teleport_two_basis": teleport.reconcile_two_qubit_basis(),
        "teleport_two_corrections": teleport.reconcile_correction_table(),
    }
    ledger.update(sharing.reconcile_all())
    ledger["dense_code_table"] = dense.reconcile_code_table()
    payload: Dict = dict(ledger)
    payload["summary"] = mismatch_summary(ledger)
    return payload, 0


def cmd_audit(args, settings: Dict) -> Outcome:
    """Audit a saved transcript, or the transcript inside a saved run payload"""
    obj = _read_json(args.transcript_file)
    if isinstance(obj, dict) and "transcript" in obj:
        obj = obj["transcript"]
    transcript = ProtocolTranscript.from_json(obj)
    checker = audit(transcript, expected=args.protocol, tolerance=_tolerance(args, settings))
    return checker.to_json(), 0 if checker.all_passed else 1


def _batch_worker(protocol: str, variant: str, tolerance: float, index: int, source: DrawSource) -> Dict:
    message = 0
    secret = None
    if protocol == "dense":
        message = int(source.secret_rng().integers(0, 2 ** dense.MESSAGE_BITS))
    else:
        secret = teleport.random_secret(SECRET_QUBITS[protocol], source.secret_rng())
    transcript = execute_protocol(protocol, variant, secret, source, message=message)
    checker = audit(transcript, tolerance=tolerance)
    passed = checker.all_passed and (protocol != "dense" or transcript.details.get("decoded") == message)
    return {
        "run": index,
        "fidelity": transcript.fidelity,
        "cbits": transcript.total_cbits,
        "audit": checker.get_summary()["status"],
        "passed": passed,
        "draws": list(transcript.draws),
    }


def batch_workers(requested: Optional[int], settings: Dict) -> int:
    workers = requested or settings["batch_workers"] or psutil.cpu_count(logical=False) or 1
    return max(1, int(workers))


def cmd_batch(args, settings: Dict) -> Outcome:
    """N seeded runs fanned out on a thread pool, gathered in submission order"""
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    variant = args.variant or "standard"
    if args.protocol in SHARING_PROTOCOLS:
        sharing.check_variant(SHARING_PROTOCOLS[args.protocol], variant)
    elif variant != "standard":
        raise UsageError(f"{args.protocol} has no variant {variant!r}")
    seed = args.seed if args.seed is not None else settings["default_seed"]
    children = DrawSource(seed=seed).spawn(args.runs)
    tolerance = _tolerance(args, settings)
    workers = batch_workers(args.workers, settings)
    get_logger().info(f"batch {args.protocol}: {args.runs} runs on {workers} workers", category="protocol")

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(_batch_worker, args.protocol, variant, tolerance, index, child)
            for index, child in enumerate(children)
        ]
        runs = [future.result() for future in futures]

    fidelities = [r["fidelity"] for r in runs if r["fidelity"] is not None]
    failed = [r["run"] for r in runs if not r["passed"]]
    payload = {
        "protocol": args.protocol,
        "variant": variant,
        "seed": seed,
        "runs": runs,
        "summary": {
            "runs": len(runs),
            "min_fidelity": min(fidelities) if fidelities else None,
            "cbits": sorted({r["cbits"] for r in runs}),
            "failed": failed,
        },
    }
    return payload, 0 if not failed else 1


def cmd_teleport(args, settings: Dict) -> Outcome:
    args.protocol = "teleport1" if args.qubits == 1 else "teleport2"
    args.variant = "standard"
    args.message = 0
    return cmd_run(args, settings)


def cmd_share(args, settings: Dict) -> Outcome:
    args.protocol = SHARE_ALIASES[args.scheme]
    args.message = 0
    args.suppress = False
    args.alice_qubits = None
    return cmd_run(args, settings)


def cmd_dense(args, settings: Dict) -> Outcome:
    """Encode a message, decode a state file, run the exchange or print the code table"""
    if args.action == "table":
        codes = dense.build_code_table()
        payload = {
            "codes": [{k: v for k, v in c.to_json().items() if k != "state"} for c in codes],
            "distinct": {k: v for k, v in dense.count_distinct_encodings().items() if k != "classes"},
            "four_bit_codes": [c.message for c in dense.four_bit_subtable()],
            "bob_reduced": dense.bob_reduced_states(),
        }
        return payload, 0
    if args.action == "encode":
        return {"message": args.message, "state": dense.encode(args.message).to_json()}, 0
    if args.action == "decode":
        if not args.state_file:
            raise UsageError("dense decode needs --state-file")
        state = _state_from_json(_read_json(args.state_file))
        return {"message": dense.decode(state)}, 0
    if args.action == "scaling":
        n_values = [int(v) for v in (args.n_values or "0,1,2,3").split(",")]
        return {"scaling": dense.scaling_report(n_values)}, 0
    args.protocol, args.variant, args.suppress, args.alice_qubits = "dense", "standard", False, None
    return cmd_run(args, settings)


# Parser

def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--format", choices=("json", "text"), default="json", help="output format")
    parent.add_argument("--tolerance", type=parse_tolerance, default=None,
                        help="fidelity tolerance (overrides BROWNSIM_TOLERANCE and settings)")
    return parent


def _randomness_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_mutually_exclusive_group()
    group.add_argument("--seed", type=int, default=None, help="seed for measurement draws and random secrets")
    group.add_argument("--draws", default=None, help="explicit comma-separated draws in [0, 1)")
    group.add_argument("--draw", type=float, default=None, help="a single explicit draw")
    return parent


def _secret_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_mutually_exclusive_group()
    group.add_argument("--secret", default=None,
                       help="amplitudes in index order, e.g. 0.6,0.8 or 0.6,0.8j (normalized on read)")
    group.add_argument("--secret-file", default=None, help="JSON state file holding the secret")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common, randomness, secret = _common_parent(), _randomness_parent(), _secret_parent()
    parser = argparse.ArgumentParser(
        prog="brownsim",
        description="Simulate and verify protocols on the five-qubit Brown state",
    )
    parser.add_argument("--log-dir", default=None, help="directory for log files")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("prepare", parents=[common], help="build and verify a state variant")
    p.add_argument("--variant", choices=("literal", "circuit", "weighted", "generalized"), default="literal")
    p.add_argument("--w", default=None, help="four weights for the weighted variant")
    p.add_argument("--n", type=int, default=None, help="prefix qubits for the generalized variant")
    p.add_argument("--eta", default=None, help="four comma-separated n-bit labels")
    p.add_argument("--out", default=None, help="write the state JSON here")
    p.set_defaults(handler=cmd_prepare)

    p = sub.add_parser("diagnose", parents=[common], help="entropy ledger of a state")
    p.add_argument("state_file", nargs="?", default=None)
    p.add_argument("--builtin", choices=sorted(BUILTIN_STATES), default=None)
    p.add_argument("--expect-brown", action="store_true", help="fail unless the Brown-state claims hold")
    p.set_defaults(handler=cmd_diagnose)

    p = sub.add_parser("run", parents=[common, randomness, secret], help="run one protocol")
    p.add_argument("protocol", choices=PROTOCOLS)
    p.add_argument("--variant", default=None, help="protocol variant (sharing protocols only)")
    p.add_argument("--message", type=int, default=0, help="five-bit message for dense")
    p.add_argument("--alice-qubits", default=None, help="Brown qubits Alice holds for teleport2, e.g. 1,2,3")
    p.add_argument("--suppress", action="store_true", help="withhold the teleportation message")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("verify-tables", parents=[common], help="reconcile printed tables with derived ones")
    p.set_defaults(handler=cmd_verify_tables)

    p = sub.add_parser("audit", parents=[common], help="audit a saved transcript")
    p.add_argument("transcript_file")
    p.add_argument("--protocol", default=None, help="contract to audit against (default: the transcript's)")
    p.set_defaults(handler=cmd_audit)

    p = sub.add_parser("batch", parents=[common], help="many seeded runs of one protocol")
    p.add_argument("protocol", choices=PROTOCOLS)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--variant", default=None)
    p.add_argument("--workers", type=int, default=None, help="thread count (default: physical cores)")
    p.set_defaults(handler=cmd_batch)

    p = sub.add_parser("teleport", parents=[common, randomness, secret], help="teleport one or two qubits")
    p.add_argument("--qubits", type=int, choices=(1, 2), default=1)
    p.add_argument("--alice-qubits", default=None)
    p.add_argument("--suppress", action="store_true")
    p.set_defaults(handler=cmd_teleport)

    p = sub.add_parser("share", parents=[common, randomness, secret], help="controlled state sharing")
    p.add_argument("--scheme", choices=sorted(SHARE_ALIASES), default="p1")
    p.add_argument("--variant", default=None)
    p.set_defaults(handler=cmd_share)

    p = sub.add_parser("dense", parents=[common, randomness], help="superdense coding")
    p.add_argument("action", choices=("run", "encode", "decode", "table", "scaling"), nargs="?", default="run")
    p.add_argument("--message", type=int, default=0)
    p.add_argument("--state-file", default=None)
    p.add_argument("--n-values", default=None, help="comma-separated n for scaling")
    p.set_defaults(handler=cmd_dense)

    return parser


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2

    logger = init_logging(args.log_dir) if args.log_dir else get_logger()
    settings = get_settings()
    stdout = stdout or sys.stdout
    try:
        payload, code = args.handler(args, settings)
    except UsageError as e:
        print(f"brownsim {args.command}: {e}", file=sys.stderr)
        logger.log_command(args.command, 2, str(e))
        return 2
    except BrownSimError as e:
        logger.error(f"{args.command} failed", e)
        print(f"brownsim {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        logger.log_command(args.command, 1, type(e).__name__)
        return 1
    except ValueError as e:
        print(f"brownsim {args.command}: {e}", file=sys.stderr)
        logger.log_command(args.command, 2, str(e))
        return 2

    emit(args.command, payload, args.format, stdout)
    logger.log_command(args.command, code)
    return code
