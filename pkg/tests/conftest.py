def pytest_configure(config):
    # compile (or load cached) kernels before any timed hypothesis example runs
    from vtrkit.scoring import hungarian_match, ned, ned_matrix

    ned("kitten", "sitting")
    ned("a" * 70, "b" * 70)
    hungarian_match(ned_matrix(["ab", "cd"], ["ab", "xd", "q"]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for name in sorted(RESULTS, key=lambda k: int(k.split()[0][1:])):
            terminalreporter.write_line(RESULTS[name])
