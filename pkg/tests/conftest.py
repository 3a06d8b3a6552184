import time

RUNTIME_LIMIT = 600.0


def pytest_configure(config):
    config.acceptance_results = {}
    config.session_start = time.monotonic()


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "acceptance_results", {})
    if not results:
        return
    elapsed = time.monotonic() - config.session_start
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        if n == 10:
            in_time = elapsed < RUNTIME_LIMIT
            detail = f"{detail}; whole session {elapsed:.0f} s (limit {RUNTIME_LIMIT:.0f} s)"
            ok = ok and in_time
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
