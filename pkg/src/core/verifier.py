"""
Claim checker for brownsim
Runs named checks, logs PASS/FAIL and summarizes them
"""

from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from ..utils.logger import get_logger
from .errors import BrownSimError
from .qsim import StateVector

Check = Tuple[str, Callable[[], Dict]]


class ClaimChecker:
    """Runs a list of named checks; each returns {"status", "message", "details"}"""

    def __init__(self, title: str, critical: Iterable[str] = ()):
        self.logger = get_logger()
        self.title = title
        self.critical = tuple(critical)
        self.results: Dict[str, Dict] = {}

    def check_all(self, checks: Sequence[Check]) -> Dict[str, Dict]:
        """Run all checks and return results"""
        self.logger.info(f"Running {self.title}", category="oracle")

        for check_name, check_func in checks:
            try:
                result = check_func()
                self.results[check_name] = result
                self.logger.log_check(
                    check_name,
                    "PASS" if result["status"] else "FAIL",
                    str(result.get("details", "")),
                )
            except BrownSimError as e:
                self.logger.error(f"Check {check_name} failed", e, category="oracle")
                self.results[check_name] = {
                    "status": False,
                    "message": f"Check failed: {e}",
                    "details": type(e).__name__,
                }

        return self.results

    @property
    def all_passed(self) -> bool:
        return bool(self.results) and all(r["status"] for r in self.results.values())

    def get_summary(self) -> Dict:
        """Get a summary of all check results"""
        if not self.results:
            return {"status": "not_run", "message": f"{self.title} not run yet"}

        passed = sum(1 for result in self.results.values() if result["status"])
        total = len(self.results)
        critical_failed = [c for c in self.critical if c in self.results and not self.results[c]["status"]]

        if critical_failed:
            return {
                "status": "failed",
                "message": f"Critical checks failed: {', '.join(critical_failed)}",
                "passed": passed,
                "total": total,
                "critical_failed": critical_failed,
            }
        elif passed == total:
            return {
                "status": "passed",
                "message": f"All {total} checks passed",
                "passed": passed,
                "total": total,
            }
        else:
            return {
                "status": "partial",
                "message": f"{passed}/{total} checks passed",
                "passed": passed,
                "total": total,
            }

    def to_json(self) -> Dict:
        return {"checks": self.results, "summary": self.get_summary()}


def _result(status: bool, message: str, details=None) -> Dict:
    return {"status": bool(status), "message": message, "details": details}


def brown_expectation_checks(state: StateVector) -> List[Check]:
    """Checks a five-qubit state must pass to carry the Brown-state entanglement claims"""
    from .diagnostics import maximal_mixedness_report, mems, split_entropies, verify_split_form

    def check_register():
        return _result(state.n_qubits == 5, f"State has {state.n_qubits} qubits", state.n_qubits)

    def check_single_purities():
        report = maximal_mixedness_report(state)
        worst = max(abs(p - 0.5) for p in report["single_purity"].values())
        return _result(worst < 1e-12, "Single-qubit purities equal 1/2", {"max_deviation": worst})

    def check_pair_purities():
        report = maximal_mixedness_report(state)
        worst = max(abs(p - 0.25) for p in report["pair_purity"].values())
        return _result(worst < 1e-12, "Two-qubit purities equal 1/4", {"max_deviation": worst})

    def check_one_vs_rest():
        records = split_entropies(state).of_size(1)
        worst = max(abs(r.entropy - 1.0) for r in records)
        return _result(worst < 1e-9, f"All {len(records)} (4|1) entropies equal 1", {"max_deviation": worst})

    def check_two_vs_rest():
        records = split_entropies(state).of_size(2)
        worst = max(abs(r.entropy - 2.0) for r in records)
        return _result(worst < 1e-9, f"All {len(records)} (3|2) entropies equal 2", {"max_deviation": worst})

    def check_mems():
        report = mems(state)
        ok = abs(report.s1 - 1.0) < 1e-9 and abs(report.s2 - 2.0) < 1e-9
        return _result(ok, f"MEMS = ({report.s1:.12f}, {report.s2:.12f})", report.to_json())

    def check_split_form():
        report = verify_split_form(state)
        failed = [r["split"] for r in report if not r["pass"]]
        return _result(not failed, f"{len(report) - len(failed)}/{len(report)} splits have the flat form", failed)

    if state.n_qubits != 5:
        return [("register", check_register)]
    return [
        ("register", check_register),
        ("single_purity", check_single_purities),
        ("pair_purity", check_pair_purities),
        ("entropy_4_1", check_one_vs_rest),
        ("entropy_3_2", check_two_vs_rest),
        ("mems", check_mems),
        ("split_form", check_split_form),
    ]
