_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            number, title = mark.args
            _criteria.setdefault(number, {"title": title, "outcomes": []})
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[crit]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    ran = {k: v for k, v in _criteria.items() if v["outcomes"]}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ran):
        entry = ran[number]
        ok = all(o == "passed" for o in entry["outcomes"])
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {entry['title']}"
            f" ({len(entry['outcomes'])} checks)"
        )
