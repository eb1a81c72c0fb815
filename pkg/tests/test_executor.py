import numpy as np
import pytest

from tcfft.executor import (
    BatchedTensor,
    ExecuteError,
    digit_reversal_permute,
    execute,
    read_tcf,
    strided_pass,
    write_tcf,
)
from tcfft.kernels import StageRunner
from tcfft.oracle import naive_dft
from tcfft.plan import plan_1d, plan_2d


def _half_round(z):
    return z.real.astype(np.float16).astype(np.float64) + 1j * z.imag.astype(
        np.float16
    ).astype(np.float64)


# -- BatchedTensor -------------------------------------------------------


def test_tensor_rejects_bad_pair_shape():
    with pytest.raises(ExecuteError):
        BatchedTensor(np.zeros((8, 3), np.float16), 1, 8)


def test_tensor_rejects_short_buffer():
    with pytest.raises(ExecuteError):
        BatchedTensor(np.zeros((7, 2), np.float16), 1, 8)


def test_tensor_rejects_aliasing_batches():
    with pytest.raises(ExecuteError):
        BatchedTensor(np.zeros((16, 2), np.float16), 2, 8, batch_stride=4)


def test_tensor_complex_round_trip():
    rng = np.random.default_rng(0)
    z = rng.uniform(-1, 1, (3, 8)) + 1j * rng.uniform(-1, 1, (3, 8))
    data = BatchedTensor.from_complex(z, dtype=np.float64)
    assert np.array_equal(data.to_complex(), z)


def test_tensor_strided_view_addresses():
    pairs = np.zeros((64, 2), np.float16)
    data = BatchedTensor(pairs, 2, 4, stride=8, batch_stride=32)
    assert data.offsets().tolist() == [0, 32]


# -- digit reversal ------------------------------------------------------


def test_permute_is_classic_bit_reversal_for_radix2():
    vals = np.arange(8, dtype=np.float64)
    data = BatchedTensor.from_complex(vals[None, :], dtype=np.float64)
    digit_reversal_permute(data, (2, 2, 2))
    assert data.to_complex()[0].real.tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_permute_swaps_hex_digits():
    vals = np.arange(256, dtype=np.float64)
    data = BatchedTensor.from_complex(vals[None, :], dtype=np.float64)
    digit_reversal_permute(data, (16, 16))
    got = data.to_complex()[0].real.astype(np.int64)
    i = np.arange(256)
    # value i lands at position (i % 16)*16 + i//16
    assert np.array_equal(got[(i % 16) * 16 + i // 16], i)


def test_permute_twice_with_uniform_radices_is_identity():
    rng = np.random.default_rng(1)
    z = rng.uniform(-1, 1, (2, 4096)) + 1j * rng.uniform(-1, 1, (2, 4096))
    data = BatchedTensor.from_complex(z, dtype=np.float64)
    digit_reversal_permute(data, (16, 16, 16))
    digit_reversal_permute(data, (16, 16, 16))
    assert np.array_equal(data.to_complex(), z)


# -- execute, 1D ---------------------------------------------------------


def test_impulse_has_flat_spectrum():
    z = np.zeros(16, dtype=np.complex128)
    z[0] = 1.0
    data = BatchedTensor.from_complex(z[None, :])
    execute(plan_1d(16, 1), data)
    assert np.array_equal(data.to_complex()[0], np.ones(16))


def test_tone_peaks_at_conjugate_bin():
    n = 256
    z = np.exp(-2j * np.pi * 5 * np.arange(n) / n)
    data = BatchedTensor.from_complex(z[None, :])
    execute(plan_1d(n, 1), data)
    mag = np.abs(data.to_complex()[0])
    assert mag.argmax() == n - 5
    assert abs(mag[n - 5] - n) < 0.02 * n
    assert np.delete(mag, n - 5).max() < 0.02 * n


@pytest.mark.parametrize("k", [1, 3, 6, 10])
@pytest.mark.parametrize("batch", [1, 3])
def test_double_mode_matches_naive_oracle(k, batch):
    n = 1 << k
    rng = np.random.default_rng(100 + k)
    z = rng.uniform(-1, 1, (batch, n)) + 1j * rng.uniform(-1, 1, (batch, n))
    data = BatchedTensor.from_complex(z, dtype=np.float64)
    execute(plan_1d(n, batch, precision="double"), data)
    got = data.to_complex()
    for b in range(batch):
        want = naive_dft(z[b])
        assert np.abs(got[b] - want).max() <= 1e-9 * max(np.abs(want).max(), 1)


def test_execute_validates_dtype_and_shape():
    data = BatchedTensor.from_complex(np.zeros((1, 16)), dtype=np.float64)
    with pytest.raises(ExecuteError):
        execute(plan_1d(16, 1), data)  # half plan, float64 storage
    data16 = BatchedTensor.from_complex(np.zeros((1, 16)))
    with pytest.raises(ExecuteError):
        execute(plan_1d(32, 1), data16)


def test_linearity_in_double_mode():
    rng = np.random.default_rng(2)
    n = 1024
    x = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
    y = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
    a, b = 0.75, -2.5

    def fft(v):
        d = BatchedTensor.from_complex(v[None, :], dtype=np.float64)
        execute(plan_1d(n, 1, precision="double"), d)
        return d.to_complex()[0]

    lhs = fft(a * x + b * y)
    rhs = a * fft(x) + b * fft(y)
    assert np.abs(lhs - rhs).max() <= 1e-9 * np.abs(rhs).max()


def test_parseval_in_double_mode():
    rng = np.random.default_rng(3)
    n = 4096
    x = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
    data = BatchedTensor.from_complex(x[None, :], dtype=np.float64)
    execute(plan_1d(n, 1, precision="double"), data)
    lhs = np.sum(np.abs(data.to_complex()[0]) ** 2)
    rhs = n * np.sum(np.abs(x) ** 2)
    assert abs(lhs - rhs) <= 1e-9 * rhs


# -- execute, 2D and strided passes --------------------------------------


def test_2d_impulse_has_flat_spectrum():
    z = np.zeros((16, 16), dtype=np.complex128)
    z[0, 0] = 1.0
    data = BatchedTensor.from_complex(z.reshape(1, -1))
    execute(plan_2d(16, 16, 1), data)
    assert np.array_equal(data.to_complex()[0], np.ones(256))


def test_strided_pass_stride1_degenerates_to_execute():
    rng = np.random.default_rng(4)
    n = 512
    z = rng.uniform(-1, 1, (1, n)) + 1j * rng.uniform(-1, 1, (1, n))
    via_execute = BatchedTensor.from_complex(z)
    plan = plan_1d(n, 1)
    execute(plan, via_execute)

    via_pass = BatchedTensor.from_complex(z)
    strided_pass(plan, StageRunner(), via_pass.pairs, [0], 1, n, plan.schedule_x)
    assert np.array_equal(
        via_execute.pairs.view(np.uint16), via_pass.pairs.view(np.uint16)
    )


def test_column_pass_equals_transpose_oracle():
    rng = np.random.default_rng(5)
    nx = ny = 16
    z = rng.uniform(-1, 1, (nx, ny)) + 1j * rng.uniform(-1, 1, (nx, ny))
    plan = plan_2d(nx, ny, 1)
    runner = StageRunner()

    direct = BatchedTensor.from_complex(z.reshape(1, -1))
    strided_pass(plan, runner, direct.pairs, np.arange(ny), ny, nx,
                 plan.schedule_x)

    zt = np.ascontiguousarray(z.T)
    transposed = BatchedTensor.from_complex(zt.reshape(1, -1))
    strided_pass(plan, StageRunner(), transposed.pairs,
                 np.arange(ny) * nx, 1, nx, plan.schedule_x)
    back = transposed.to_complex()[0].reshape(ny, nx).T
    got = direct.to_complex()[0].reshape(nx, ny)
    assert np.array_equal(got, back)


def test_2d_separability_against_float64_oracle():
    rng = np.random.default_rng(6)
    n = 64
    z = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    data = BatchedTensor.from_complex(z.reshape(1, -1))
    execute(plan_2d(n, n, 1), data)
    got = data.to_complex()[0].reshape(n, n)

    zh = _half_round(z)
    rows = np.stack([naive_dft(row) for row in zh])
    want = np.stack([naive_dft(col) for col in rows.T]).T
    denom = np.maximum(np.abs(want), 1e-6 * np.abs(want).max())
    assert np.mean(np.abs(got - want) / denom) < 0.035


def test_2d_requires_contiguous_rows():
    pairs = np.zeros((1024, 2), np.float16)
    data = BatchedTensor(pairs, 1, 256, stride=2)
    with pytest.raises(ExecuteError):
        execute(plan_2d(16, 16, 1), data)


# -- binary interchange format -------------------------------------------


def test_tcf_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    pairs = rng.uniform(-1, 1, (3, 64, 2)).astype(np.float16)
    path = tmp_path / "data.tcf"
    write_tcf(path, pairs, 1, 64)
    got, dims, nx, ny = read_tcf(path)
    assert (dims, nx, ny) == (1, 64, 1)
    assert np.array_equal(got.view(np.uint16), pairs.view(np.uint16))


def test_tcf_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.tcf"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ExecuteError):
        read_tcf(path)


def test_tcf_rejects_truncated_payload(tmp_path):
    pairs = np.zeros((1, 64, 2), dtype=np.float16)
    path = tmp_path / "short.tcf"
    write_tcf(path, pairs, 1, 64)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ExecuteError):
        read_tcf(path)


def test_tcf_shape_validation(tmp_path):
    with pytest.raises(ExecuteError):
        write_tcf(tmp_path / "x.tcf", np.zeros((1, 63, 2), np.float16), 1, 64)
