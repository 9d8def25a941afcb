import pytest

ACCEPTANCE = {
    1: "Bell-state modulus by PPT bisection equals 1/3 (tol 1e-6, < 1 s)",
    2: "min modulus over 2000 Haar pure qubit pairs within 1e-3 of 1/3, none below (< 30 s)",
    3: "(1 - |psi><psi|)/(D-1) is PPT for 500 psi each in 2x2, 2x3, 3x3 (>= -1e-12)",
    4: "min-eigenvalue test sound on 2000 conditioned 2x3 states; fails just above L",
    5: "purity <= 1/3 implies PPT on 2000 qubit pairs; Werner just above 1/3 entangled",
    6: "3 lam_6 + 5 lam_5 >= 1 implies PPT on 2000 qubit/qutrit states",
    7: "Heisenberg: exact beta_c = ln(3)/4, product-energy bound, beta_o <= beta_c (< 10 s)",
    8: "1/l convex on 200 random qubit-pair mixtures (slack 1e-6)",
    9: "l(rho_t) = min(1, l(rho)/t) within 2e-6 on sampled 2x2 and 2x3 states",
    10: "threshold tables for 2x2 and 2x3 match the exact fractions",
    11: "all property suites pass at default sample counts in < 3 min",
}

_outcomes = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    n = marker.args[0]
    if rep.when == "call" or rep.failed:
        _outcomes[n] = _outcomes.get(n, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in ACCEPTANCE.items():
        if n not in _outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if _outcomes[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {text}")
