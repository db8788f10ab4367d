"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

from contextlib import contextmanager

RESULTS: dict[int, tuple[str, str, str]] = {}


@contextmanager
def criterion(number: int, title: str):
    info = {"detail": ""}
    try:
        yield info
    except BaseException:
        RESULTS[number] = ("FAIL", title, info["detail"])
        print(f"criterion {number}: FAIL  {title}  {info['detail']}")
        raise
    RESULTS[number] = ("PASS", title, info["detail"])
    print(f"criterion {number}: PASS  {title}  {info['detail']}")


def summary_lines() -> list[str]:
    return [f"criterion {k:>2}: {v[0]}  {v[1]}  {v[2]}".rstrip() for k, v in sorted(RESULTS.items())]
