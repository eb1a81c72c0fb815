import numpy as np
import pytest

from tcfft.plan import (
    Plan,
    PlanArgumentError,
    UnsupportedSizeError,
    digit_reversal_destinations,
    plan_1d,
    plan_2d,
    schedule_radices,
)


@pytest.mark.parametrize(
    "n, schedule",
    [
        (16, (16,)),
        (256, (256,)),
        (8192, (8192,)),
        (1 << 16, (8192, 8)),
        (1 << 17, (8192, 16)),
        (1 << 20, (8192, 128)),
        (1 << 26, (8192, 8192)),
    ],
)
def test_schedule_examples(n, schedule):
    assert schedule_radices(n) == schedule


def test_schedule_covers_all_supported_exponents():
    for k in range(1, 28):
        sched = schedule_radices(1 << k)
        assert int(np.prod(sched)) == 1 << k
        assert all(2 <= r <= 8192 and (r & (r - 1)) == 0 for r in sched)


def test_schedule_rejects_non_power_of_two():
    with pytest.raises(UnsupportedSizeError):
        schedule_radices(96)
    with pytest.raises(UnsupportedSizeError):
        schedule_radices(1)


def test_plan_1d_basic():
    plan = plan_1d(256, 4)
    assert (plan.dims, plan.nx, plan.batch) == (1, 256, 4)
    assert plan.schedule_x == (256,)
    assert plan.schedule_y is None


def test_plan_1d_argument_errors():
    with pytest.raises(UnsupportedSizeError):
        plan_1d(96, 1)
    with pytest.raises(PlanArgumentError):
        plan_1d(256, 0)
    with pytest.raises(PlanArgumentError):
        plan_1d(256, 1, continuous_size=5)
    with pytest.raises(PlanArgumentError):
        plan_1d(256, 1, precision="single")


def test_plan_1d_schedule_override():
    plan = plan_1d(4096, 1, schedule=[16, 256])
    assert plan.schedule_x == (16, 256)
    with pytest.raises(UnsupportedSizeError):
        plan_1d(4096, 1, schedule=[16, 16])
    with pytest.raises(UnsupportedSizeError):
        plan_1d(4096, 1, schedule=[4096, 1])


def test_plan_2d_shapes():
    plan = plan_2d(256, 256, 2)
    assert plan.schedule_x == (256,) and plan.schedule_y == (256,)
    assert plan_2d(512, 256, 1).schedule_x == (512,)
    small = plan_2d(2, 2, 1)
    assert small.schedule_x == (2,) and small.schedule_y == (2,)


def test_plan_json_is_stable():
    a = plan_1d(131072, 3).to_json()
    b = plan_1d(131072, 3).to_json()
    assert a == b
    assert '"schedule_x": [8192, 16]' in a


def test_plan_kernels_flatten_to_sub_radices():
    plan = plan_1d(1 << 17, 1)
    assert plan.sub_radix_list(plan.schedule_x) == (16, 16, 16, 2, 16)


def test_digit_reversal_bit_reversal_case():
    dest = digit_reversal_destinations(8, (2, 2, 2))
    assert dest.tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_digit_reversal_two_hex_digits():
    dest = digit_reversal_destinations(256, (16, 16))
    i = np.arange(256)
    assert np.array_equal(dest, (i % 16) * 16 + i // 16)


def test_digit_reversal_requires_matching_product():
    with pytest.raises(ValueError):
        digit_reversal_destinations(8, (2, 2))


def test_permutation_cycles_cached_per_plan():
    plan = plan_1d(4096, 1)
    first = plan.permutation_cycles(plan.schedule_x)
    assert plan.permutation_cycles(plan.schedule_x) is first
    total = sum(arr.size for arr in first.values())
    assert total <= 4096
