import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussunc.channel import NoiseOracle
from gaussunc.errors import ParameterError, ProtocolViolation
from gaussunc.hashing import eval_hash, extract
from gaussunc.protocol import (NoiselessLink, ProtocolParams, RevealClaim, Transcript, ceil_bits,
                               commit, desk_params, honest_run, replay, reveal, shared_code)
from gaussunc.rates import ChannelParams, capacity_lower_bound
from gaussunc.streams import Streams


@pytest.fixture(scope="module")
def params():
    return desk_params()


@pytest.fixture(scope="module")
def code(params):
    return shared_code(params, 0)


class TestParams:
    def test_desk_derived(self, params):
        d = params.derived()
        assert d["m"] == 12 and d["message_bits_capped"]
        assert params.rate_bar == pytest.approx(0.5 * math.log2(10 / 0.5) + 0.25)
        assert d["l_g2"] == ceil_bits(128 * 0.1) == 13
        assert d["l_ext"] == math.ceil(128 * (capacity_lower_bound(10, params.channel) - 0.2))
        assert params.alpha1 == 0.6

    def test_beta3_constraint_named(self):
        with pytest.raises(ParameterError, match=r"beta3 > beta1 \+ beta2"):
            desk_params(beta3=0.05)

    def test_eta_constraint(self):
        with pytest.raises(ParameterError, match="eta < beta1"):
            desk_params(eta=0.06)

    def test_rate_floor_constraint(self):
        with pytest.raises(ParameterError, match="R_bar > 0.5 log2"):
            desk_params(rate_margin=-0.1)

    def test_zero_elasticity_rejected(self):
        with pytest.raises(ParameterError, match="elasticity"):
            ProtocolParams(16, 1.0, ChannelParams(1, 1), 0.5)

    def test_errors_aggregated(self):
        with pytest.raises(ParameterError) as ei:
            desk_params(beta3=0.01, eta=0.3)
        assert len(ei.value.errors) == 2

    def test_zero_beta2_allowed(self, params):
        p = params.with_(beta2=0.0)
        assert p.l_g2 == 0

    def test_fingerprint_and_dict_roundtrip(self, params):
        back = ProtocolParams.from_dict(params.to_dict())
        assert back == params and back.fingerprint() == params.fingerprint()

    def test_independence_capped(self, params):
        assert params.xi_g1 == params.g1_max_independence < params.xi_g1_uncapped


class TestLink:
    def test_order_enforced(self):
        link = NoiselessLink()
        with pytest.raises(ProtocolViolation, match="C4"):
            link.send("alice", "h1", 0)

    def test_incomplete_transcript(self):
        with pytest.raises(ProtocolViolation):
            NoiselessLink().transcript()

    def test_transcript_fields_exact(self):
        assert list(Transcript.__dataclass_fields__) == [
            "g1_key", "h1", "g2_key", "h2", "ext_key", "otp"]


def test_honest_accept(params, code):
    va, vb, v = honest_run(params, code, 1.0, seed=3, trial=0)
    assert v.accepted
    t = va.transcript
    assert t.h1 == eval_hash(params.g1_spec, t.g1_key, va.u)
    assert t.h2 == eval_hash(params.g2_spec, t.g2_key, va.u)
    assert t.otp ^ extract(params.ext_spec, t.ext_key, va.u) == va.c


def test_deterministic(params, code):
    a = honest_run(params, code, 1.2, 5, 7)
    b = honest_run(params, code, 1.2, 5, 7)
    assert a[0].transcript == b[0].transcript and np.array_equal(a[1].y, b[1].y)


def test_trials_differ(params, code):
    assert honest_run(params, code, 1.2, 5, 1)[0].transcript != \
        honest_run(params, code, 1.2, 5, 2)[0].transcript


def test_reject_reasons(params, code):
    va, vb, _ = honest_run(params, code, 1.0, 9, 0)
    t = va.transcript
    other_c = va.c ^ 1
    assert reveal(vb, t, RevealClaim(other_c, va.u)).reason == "otp"
    outside = next(u for u in range(1 << params.m) if u not in vb.decode_list)
    assert reveal(vb, t, RevealClaim(va.c, outside)).reason == "list"
    assert reveal(vb, t, RevealClaim(va.c, 1 << params.m)).reason == "malformed"
    assert reveal(vb, t, RevealClaim(1 << params.l_ext, va.u)).reason == "malformed"
    assert reveal(vb, t, RevealClaim(0.5, va.u)).reason == "malformed"


def test_hash_rejections(params, code):
    va, vb, _ = honest_run(params, code, 1.0, 9, 1)
    t = va.transcript
    claim = RevealClaim(va.c, va.u)
    assert reveal(vb, replace(t, h1=t.h1 ^ 1), claim).reason == "hash1"
    assert reveal(vb, replace(t, h2=t.h2 ^ 1), claim).reason == "hash2"


def test_commit_checks(params, code):
    s = Streams(0, 0)
    with pytest.raises(ParameterError):
        commit(params, code, 1 << params.l_ext, NoiseOracle(params.channel, 1.0), s.alice, s.bob,
               s.channel)
    with pytest.raises(ProtocolViolation):
        commit(params, code, 0, NoiseOracle(ChannelParams(1, 3), 1.0), s.alice, s.bob, s.channel)
    with pytest.raises(ProtocolViolation):
        honest_run(params, code, 2.0, 0, 0)


def test_not_instantiable():
    p = desk_params(p=1.2, beta_tilde=0.05)
    if p.instantiable:
        pytest.skip("rate positive at this power")
    with pytest.raises(ParameterError, match="not instantiable"):
        honest_run(p, shared_code(p, 0), 1.0, 0, 0)


def test_transcript_hex_roundtrip_and_replay(params, code):
    va, vb, v = honest_run(params, code, 1.3, 2, 0)
    t = Transcript.from_dict(va.transcript.to_dict())
    assert t == va.transcript
    assert replay(params, code, vb.y, t, RevealClaim(va.c, va.u)).accepted


def test_chosen_message(params, code):
    va, _, v = honest_run(params, code, 1.0, 2, 0, c=12345)
    assert va.c == 12345 and v.accepted


@settings(max_examples=20, deadline=None)
@given(st.floats(1.0, 1.5), st.integers(0, 2 ** 31))
def test_honest_acceptance_property(theta2, seed):
    p = desk_params()
    code = shared_code(p, 0)
    acc = sum(honest_run(p, code, theta2, seed, i)[2].accepted for i in range(30))
    assert acc >= 28
