import numpy as np
import pytest

from rirdiff.room_sim import RoomSpec, make_arc_array, reflection_coeff_for_t60


@pytest.fixture(scope="session")
def room():
    return RoomSpec()


@pytest.fixture(scope="session")
def reverb_room(room):
    return room.with_reflection(reflection_coeff_for_t60(room, 0.6))


@pytest.fixture(scope="session")
def ula(room):
    return make_arc_array(64, 0.0, room)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: dict = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line for ``test_criterion_NN_*``: ``criterion(ok, detail)`` then assert ``ok``."""
    number = int(request.node.name.split("_")[2])
    seen = []

    def record(ok, detail):
        seen.append(ok)
        _CRITERIA[number] = (bool(ok), detail)
        print(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    yield record
    if not seen:
        _CRITERIA[number] = (False, "raised before reporting a result")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {detail}")
