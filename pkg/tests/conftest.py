from hypothesis import settings

settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
