def pytest_terminal_summary(terminalreporter):
    """Echo one verdict line per release criterion after the test summary."""
    import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("release criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
