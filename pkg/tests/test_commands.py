import pytest
from hypothesis import given, strategies as st

from gesturepilot.commands import (
    NO_COMMAND,
    PilotCommand,
    RateLimiter,
    StateBuffers,
    generate_command,
    push_frame,
)
from gesturepilot.errors import ContractError
from gesturepilot.hands import NO_HAND, HandDetection


def stretched(x, y):
    return HandDetection("stretched_out", (x, y))


def front(x, y):
    return HandDetection("front_of_body", (x, y))


def filled(entries_out=(), entries_front=(), pad_to=60):
    buffers = StateBuffers()
    n = max(len(entries_out), len(entries_front), pad_to)
    for i in range(n):
        if i < len(entries_out) and entries_out[i] != (0, 0):
            push_frame(buffers, stretched(*entries_out[i]))
        elif i < len(entries_front) and entries_front[i] != (0, 0):
            push_frame(buffers, front(*entries_front[i]))
        else:
            push_frame(buffers, NO_HAND)
    return buffers


def test_command_invariants():
    with pytest.raises(ContractError):
        PilotCommand("planar", (1.0, 2.0, 0.5))
    with pytest.raises(ContractError):
        PilotCommand("depth", (0.0, 0.0, 0.5))
    with pytest.raises(ContractError):
        PilotCommand("depth", (1.0, 0.0, 1.0))
    with pytest.raises(ContractError):
        PilotCommand("none", (0.0, 1.0, 0.0))
    with pytest.raises(ContractError):
        PilotCommand("hover", (0.0, 0.0, 0.0))


def test_push_evicts_oldest():
    buffers = StateBuffers()
    push_frame(buffers, stretched(99, 99))
    for _ in range(60):
        push_frame(buffers, NO_HAND)
    assert (99, 99) not in buffers.stretched
    assert len(buffers.stretched) == len(buffers.front) == 60


def test_push_exclusivity():
    buffers = StateBuffers()
    push_frame(buffers, stretched(5, -3))
    assert buffers.stretched[-1] == (5, -3)
    assert buffers.front[-1] == (0, 0)
    push_frame(buffers, front(2, -9))
    assert buffers.stretched[-1] == (0, 0)
    assert buffers.front[-1] == (2, -9)
    push_frame(buffers, NO_HAND)
    assert buffers.stretched[-1] == buffers.front[-1] == (0, 0)


# -- decision tree traces -------------------------------------------------------

def test_trace_planar_no_snap():
    buffers = filled(entries_out=[(100, -10)] * 31)
    cmd = generate_command(buffers)
    assert cmd.kind == "planar"
    assert cmd.vector == (100.0, -10.0, 0.0)


def test_trace_planar_snap_straight_up():
    buffers = filled(entries_out=[(8, -90)] * 40)
    cmd = generate_command(buffers)
    assert cmd.kind == "planar"
    assert cmd.vector == (0.0, -90.0, 0.0)


def test_trace_depth_come_closer():
    buffers = filled(entries_front=[(3, -25)] * 31)
    cmd = generate_command(buffers)
    assert cmd.kind == "depth"
    assert cmd.vector == (0.0, 0.0, -1.0)


def test_trace_threshold_edge_goes_further():
    buffers = filled(entries_out=[(50, 5)] * 30,
                     entries_front=[(0, 0)] * 30 + [(1, 20)] * 31, pad_to=61)
    # 30 nonzero stretched entries is not strictly above the threshold
    cmd = generate_command(buffers)
    assert cmd.kind == "depth"
    assert cmd.vector == (0.0, 0.0, 1.0)


def test_planar_priority_over_front():
    buffers = filled(entries_out=[(60, 10)] * 31,
                     entries_front=[(0, 0)] * 31 + [(2, -40)] * 29, pad_to=60)
    assert generate_command(buffers).kind == "planar"


def test_resting_buffers_no_movement():
    assert generate_command(filled()) == NO_COMMAND


def test_warm_up_first_31_frames_silent():
    buffers = StateBuffers()
    for i in range(31):
        assert generate_command(buffers).kind == "none"
        push_frame(buffers, stretched(80, -5))
    assert generate_command(buffers).kind == "planar"


def test_none_exactly_when_all_counts_low():
    buffers = filled(entries_out=[(40, 0)] * 30,
                     entries_front=[(0, 0)] * 30 + [(0, -5)] * 15 + [(0, 5)] * 15,
                     pad_to=60)
    assert generate_command(buffers) == NO_COMMAND


def test_front_counts_ignore_zero_y():
    # y == 0 entries count toward neither n_higher nor n_lower
    buffers = filled(entries_front=[(7, 0)] * 60)
    assert generate_command(buffers) == NO_COMMAND


def test_magnitude_norm_uses_box_width():
    buffers = filled(entries_out=[(60, -25)] * 35)  # no snap: 25 <= 30
    cmd = generate_command(buffers, box_width=100)
    assert cmd.magnitude_norm == pytest.approx(0.65)
    assert generate_command(buffers).magnitude_norm == 0.0


@given(x=st.integers(-200, 200), y=st.integers(-200, 200),
       scale=st.sampled_from([1, 2, 3, 7]))
def test_snap_scale_invariant(x, y, scale):
    if (x, y) == (0, 0):
        return
    a = generate_command(filled(entries_out=[(x, y)] * 32))
    b = generate_command(filled(entries_out=[(x * scale, y * scale)] * 32))
    assert (a.vector[0] == 0.0) == (b.vector[0] == 0.0)
    assert (abs(y) > abs(0.5 * x)) == (a.vector[0] == 0.0)


def test_averaging_smoothness():
    base = [(80, -60)] * 40
    swapped = [(80, -60)] * 39 + [(20, -10)]
    a = generate_command(filled(entries_out=base))
    b = generate_command(filled(entries_out=swapped))
    assert abs(a.vector[0] - b.vector[0]) <= 60 / 40 + 1e-12
    assert abs(a.vector[1] - b.vector[1]) <= 50 / 40 + 1e-12


# -- rate limiting ---------------------------------------------------------------

def test_rate_limit_600ms_grid():
    limiter = RateLimiter()
    emitted = [t for t in range(0, 1300, 100) if limiter.allow(t)]
    assert emitted == [0, 600, 1200]


def test_rate_limit_single_command_immediate():
    assert RateLimiter().allow(12345) is True


def test_rate_limit_25hz_ten_seconds():
    limiter = RateLimiter()
    emitted = [t for t in range(0, 10000, 40) if limiter.allow(t)]
    assert len(emitted) <= 17


def test_rate_limit_reset():
    limiter = RateLimiter()
    assert limiter.allow(0)
    assert not limiter.allow(100)
    limiter.reset()
    assert limiter.allow(100)


def test_buffers_clear():
    buffers = filled(entries_out=[(10, 10)] * 40)
    buffers.clear()
    assert len(buffers.stretched) == 0 and len(buffers.front) == 0
    assert generate_command(buffers) == NO_COMMAND
