CRITERIA = {
    "test_criterion_1_fig5_epc": "1 published EPC sample address",
    "test_criterion_2_fig5_iso": "2 published ISO sample address",
    "test_criterion_3_fig1_urns": "3 ISO 15459 URN reproduction",
    "test_criterion_4_timing_bound": "4 median mapping time < 10 ms",
    "test_criterion_5_selection_and_padding": "5 selection/padding properties",
    "test_criterion_6_dispatch_and_structure": "6 dispatch and address structure",
    "test_criterion_7_decimal_conversion_oracle": "7 decimal conversion oracle",
    "test_criterion_8_tid_round_trip": "8 TID round-trip",
    "test_criterion_9_registry_and_service": "9 registry and service",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criteria")


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if name not in CRITERIA:
        return
    if report.when == "call" or report.outcome != "passed":
        if report.when == "call" or name not in _results:
            _results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, title in CRITERIA.items():
        if name in _results:
            verdict = "PASS" if _results[name] == "passed" else "FAIL"
            terminalreporter.write_line(f"criterion {title}: {verdict}")
