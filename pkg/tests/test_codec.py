import csv
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltripple.codec import (
    DecoderState,
    EncodedSymbol,
    decode_batch,
    decode_incremental,
    decode_stream,
    encode,
    n_success_monotone_check,
)
from ltripple.degree_dist import DegreeDistribution, RsdParams, ideal_soliton, robust_soliton
from ltripple.errors import InvalidParameter, SessionError

S = EncodedSymbol


def check_state(st_):
    """Structural invariants that must hold between any two operations."""
    k = st_.k
    ripple = set(st_.ripple)
    assert st_.n_processed + len(st_.ripple) + (k - st_.n_recovered) == k
    assert not any(st_.processed[i] for i in ripple)
    assert len(ripple) == len(st_.ripple)
    for nbrs, _ in st_.buffer.values():
        assert len(nbrs) >= 2
        assert not any(st_.processed[i] for i in nbrs)


def test_push_degree_one():
    st_ = DecoderState(5)
    st_.push(S((3,)))
    assert list(st_.ripple) == [3]


def test_push_fully_processed_symbol_is_redundant():
    st_ = DecoderState(3)
    st_.push(S((0,)))
    st_.push(S((1,)))
    st_.run()
    st_.push(S((0, 1)))
    assert st_.trace.redundant == 1
    assert not st_.buffer


def test_push_reduces_against_processed():
    st_ = DecoderState(3)
    st_.push(S((0,)))
    st_.process_step()
    st_.push(S((0, 1)))
    assert list(st_.ripple) == [1]


def test_step_releases_both():
    st_ = DecoderState(3)
    st_.push(S((0, 1)))
    st_.push(S((1, 2)))
    st_.push(S((1,)))
    rec = st_.process_step()
    assert sorted(st_.ripple) == [0, 2]
    assert (rec.L, rec.R, rec.releases, rec.redundant) == (2, 2, 2, 0)


def test_release_into_occupied_ripple_is_redundant():
    st_ = DecoderState(3)
    st_.push(S((0, 1)))
    st_.push(S((0,)))
    st_.push(S((1,)))
    rec = st_.process_step()
    assert rec.releases == 1 and rec.redundant == 1
    assert list(st_.ripple) == [1]


def test_last_step_completes():
    st_ = DecoderState(1)
    st_.push(S((0,)))
    rec = st_.process_step()
    assert rec.L == 0 and st_.done


def test_empty_ripple_step_rejected():
    with pytest.raises(RuntimeError):
        DecoderState(3).process_step()


@pytest.mark.parametrize("sym", [S(()), S((0, 0)), S((5,)), S((-1,))])
def test_push_validates(sym):
    with pytest.raises(SessionError):
        DecoderState(4).push(sym)


def test_payload_length_checked():
    st_ = DecoderState(2, block_len=4)
    with pytest.raises(SessionError):
        st_.push(S((0,), b"abc"))
    with pytest.raises(SessionError):
        st_.push(S((0,)))


def test_decoder_state_validation():
    with pytest.raises(InvalidParameter):
        DecoderState(0)
    with pytest.raises(InvalidParameter):
        DecoderState(3, discipline="stack")
    with pytest.raises(InvalidParameter):
        DecoderState(3, discipline="random")


def test_point_mass_k():
    syms = encode(7, DegreeDistribution.point_mass(7, 7), np.random.default_rng(0), 20)
    assert all(sorted(s.neighbors) == list(range(7)) for s in syms)


def test_encode_neighbors_distinct(rng):
    for s in encode(50, ideal_soliton(50), rng, 2000):
        assert len(set(s.neighbors)) == s.degree
        assert all(0 <= i < 50 for i in s.neighbors)


def test_encode_distribution_mismatch(rng):
    with pytest.raises(InvalidParameter):
        encode(10, ideal_soliton(9), rng, 1)


def test_payload_degree_one(rng):
    data = rng.integers(0, 256, size=(6, 16), dtype=np.uint8)
    for s in encode(6, DegreeDistribution.point_mass(6, 1), rng, 20, data=data):
        assert s.payload == data[s.neighbors[0]].tobytes()


def test_payload_is_xor(rng):
    data = rng.integers(0, 256, size=(30, 16), dtype=np.uint8)
    for s in encode(30, ideal_soliton(30), rng, 200, data=data):
        want = np.zeros(16, dtype=np.uint8)
        for i in s.neighbors:
            want ^= data[i]
        assert s.payload == want.tobytes()


@pytest.mark.parametrize("seed", range(20))
def test_payload_round_trip(seed):
    rng = np.random.default_rng(seed)
    k = 64
    data = rng.integers(0, 256, size=(k, 16), dtype=np.uint8)
    trace = decode_incremental(k, robust_soliton(k, RsdParams(0.1, 0.5)), rng, cap=4 * k, data=data)
    assert trace.success
    np.testing.assert_array_equal(trace.recovered_data, data)


def test_payload_and_symbolic_traces_agree():
    k = 80
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    data = np.random.default_rng(1).integers(0, 256, size=(k, 16), dtype=np.uint8)
    a = decode_incremental(k, dist, np.random.default_rng(42), 3 * k, data=data)
    b = decode_incremental(k, dist, np.random.default_rng(42), 3 * k)
    assert a.steps == b.steps
    assert (a.n_success, a.redundant, a.consumed) == (b.n_success, b.redundant, b.consumed)
    assert [s.neighbors for s in a.symbols] == [s.neighbors for s in b.symbols]


def test_conservation_every_step():
    rng = np.random.default_rng(77)
    k = 40
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    for _ in range(200):
        st_ = DecoderState(k)
        for sym in encode(k, dist, rng, 2 * k):
            st_.push(sym)
            check_state(st_)
            while st_.ripple:
                st_.process_step()
                check_state(st_)


def test_step_accounting():
    rng = np.random.default_rng(3)
    k = 60
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    for _ in range(50):
        st_ = DecoderState(k)
        for sym in encode(k, dist, rng, int(1.3 * k)):
            st_.push(sym)
        prev_L = st_.L
        while st_.ripple:
            before = len(st_.ripple)
            rec = st_.process_step()
            assert rec.L == prev_L - 1
            assert rec.R - before + 1 == rec.releases - rec.redundant
            prev_L = rec.L


def test_batch_and_stream_thresholds_agree():
    rng = np.random.default_rng(11)
    k = 50
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    for _ in range(30):
        seq = encode(k, dist, rng, 3 * k)
        n = decode_stream(k, seq).n_success
        assert n is not None
        assert decode_batch(k, seq[:n]).success
        assert not decode_batch(k, seq[: n - 1]).success


def test_monotone_on_random_realizations():
    rng = np.random.default_rng(2718)
    k = 20
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    realizations = [encode(k, dist, rng, 3 * k) for _ in range(100)]
    assert n_success_monotone_check(k, realizations)


def test_monotone_check_flags_counterexample(monkeypatch):
    # a decoder that "fails" on long prefixes breaks the check
    import ltripple.codec as codec

    real = codec.decode_batch

    def flaky(k, seq, *a, **kw):
        tr = real(k, seq, *a, **kw)
        if len(seq) > 8:
            tr.success = False
        return tr

    monkeypatch.setattr(codec, "decode_batch", flaky)
    seq = encode(3, DegreeDistribution.point_mass(3, 1), np.random.default_rng(0), 12)
    assert not n_success_monotone_check(3, [seq])


def test_coupon_collector():
    rng = np.random.default_rng(16)
    k = 16
    one = DegreeDistribution.point_mass(k, 1)
    counts = [decode_incremental(k, one, rng, cap=1000).n_success for _ in range(10_000)]
    harmonic = sum(1 / i for i in range(1, k + 1))
    assert k * harmonic == pytest.approx(54.09, abs=0.01)
    assert abs(np.mean(counts) - k * harmonic) <= 2


def test_k1_geometric():
    dist = DegreeDistribution(1, [1.0])
    tr = decode_incremental(1, dist, np.random.default_rng(0), cap=1)
    assert tr.success and tr.n_success == 1


def test_cap_too_small():
    with pytest.raises(InvalidParameter):
        decode_incremental(10, ideal_soliton(10), np.random.default_rng(0), cap=9)


def test_cap_failure():
    # degree-2 only: nothing ever enters the ripple
    tr = decode_incremental(10, DegreeDistribution.point_mass(10, 2), np.random.default_rng(0), cap=30)
    assert not tr.success and tr.n_success is None and tr.consumed == 30


@pytest.mark.parametrize("discipline", ["fifo", "lifo", "random"])
def test_disciplines_share_threshold(discipline):
    # which ripple member is processed first never changes what is eventually recovered
    rng = np.random.default_rng(5)
    k = 60
    dist = robust_soliton(k, RsdParams(0.1, 0.5))
    for _ in range(20):
        seq = encode(k, dist, rng, 2 * k)
        ref = decode_batch(k, seq)
        tr = decode_batch(k, seq, discipline=discipline, rng=np.random.default_rng(1))
        assert tr.success == ref.success
        assert len(tr.steps) == len(ref.steps)


def test_trace_csv(tmp_path):
    k = 30
    tr = decode_incremental(k, robust_soliton(k, RsdParams(0.1, 0.5)), np.random.default_rng(8), 3 * k)
    tr.to_csv(tmp_path / "t.csv")
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["step", "L", "R", "releases", "redundant"]
    assert len(rows) == len(tr.steps) + 1
    assert [int(r[1]) for r in rows[1:]] == list(range(k - 1, k - 1 - len(tr.steps), -1))


def test_ripple_by_L_bounds():
    k = 50
    seq = encode(k, robust_soliton(k, RsdParams(0.1, 0.5)), np.random.default_rng(4), int(1.5 * k))
    R = decode_batch(k, seq).ripple_by_L()
    assert np.all(R >= 0)
    assert np.all(R <= np.arange(k + 1))


@settings(max_examples=40)
@given(k=st.integers(1, 25), seed=st.integers(0, 2**32 - 1), extra=st.integers(0, 40))
def test_batch_invariants_property(k, seed, extra):
    rng = np.random.default_rng(seed)
    seq = encode(k, ideal_soliton(k), rng, k + extra)
    tr = decode_batch(k, seq)
    assert tr.success == (len(tr.steps) == k)
    assert [s.L for s in tr.steps] == list(range(k - 1, k - 1 - len(tr.steps), -1))
    assert all(0 <= s.R <= s.L for s in tr.steps)
    assert tr.redundant <= len(seq)
