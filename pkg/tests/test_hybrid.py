import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from hyltl.config import builtin_examples
from hyltl.hybrid import (
    GapOrOverlap, HybridArc, NegativeInterval, NonConsecutiveJ, NonzeroOrigin, NotInDomain,
    Ordering, PropositionSet, UnknownProposition, compare_hybrid_times, dump_trace, load_trace,
    read_trace, sample_at, validate_domain, write_csv, write_trace,
)
from hyltl.simulate import SimOptions, simulate


class TestValidateDomain:
    def test_two_phase_domain(self):
        d = validate_domain([(0, 0, 1.4142), (1, 1.4142, 2.8)])
        assert len(d.phases) == 2 and d.last.t_end == 2.8

    def test_nonzero_origin(self):
        with pytest.raises(NonzeroOrigin):
            validate_domain([(0, 0.5, 1.0)])
        with pytest.raises(NonzeroOrigin):
            validate_domain([(1, 0, 1.0)])

    def test_gap(self):
        with pytest.raises(GapOrOverlap):
            validate_domain([(0, 0, 1), (1, 2, 3)])

    def test_negative_interval(self):
        with pytest.raises(NegativeInterval):
            validate_domain([(0, 0, 1), (1, 1, 0.5)])

    def test_nonconsecutive_j(self):
        with pytest.raises(NonConsecutiveJ):
            validate_domain([(0, 0, 1), (2, 1, 2)])

    def test_point_phases_allowed(self):
        d = validate_domain([(0, 0, 0), (1, 0, 0), (2, 0, 1)])
        assert d.contains((0, 1)) and not d.contains((0.5, 1))


class TestCompare:
    dom = validate_domain([(0, 0, 1), (1, 1, 2)])

    def test_examples(self):
        assert compare_hybrid_times((1.0, 0), (1.0, 1), self.dom) is Ordering.BEFORE
        assert compare_hybrid_times((0.5, 0), (0.5, 0), self.dom) is Ordering.EQUAL
        assert compare_hybrid_times((2.0, 1), (1.0, 1), self.dom) is Ordering.AFTER

    def test_not_in_domain(self):
        with pytest.raises(NotInDomain):
            compare_hybrid_times((0.5, 1), (0, 0), self.dom)


@st.composite
def domains(draw):
    durations = draw(st.lists(
        st.one_of(st.just(0.0), st.floats(0.001, 5.0)), min_size=1, max_size=12))
    t = 0.0
    phases = []
    for j, d in enumerate(durations):
        phases.append((j, t, t + d))
        t += d
    return validate_domain(phases)


@given(domains())
def test_sum_is_injective_on_endpoints(dom):
    pts = dom.endpoints()
    sums = [t + j for t, j in pts]
    assert len(set(sums)) == len(sums)
    # and strictly increasing along the natural order
    assert all(a < b for a, b in zip(sums, sums[1:]))


@given(domains(), st.data())
def test_compare_is_a_total_order(dom, data):
    pts = dom.endpoints()
    a, b, c = (data.draw(st.sampled_from(pts)) for _ in range(3))
    ab = compare_hybrid_times(a, b, dom)
    ba = compare_hybrid_times(b, a, dom)
    assert ab.value == -ba.value
    assert (ab is Ordering.EQUAL) == (a == b)
    bc = compare_hybrid_times(b, c, dom)
    if ab is Ordering.BEFORE and bc is Ordering.BEFORE:
        assert compare_hybrid_times(a, c, dom) is Ordering.BEFORE
    # consistent with the phase order
    if a[1] < b[1]:
        assert ab is Ordering.BEFORE


@pytest.fixture(scope="module")
def ball_arc():
    bb = builtin_examples()["bouncing_ball"]
    return simulate(bb.system, (1, 0), SimOptions(t_max=10, j_max=3)).arc


class TestSampleAt:
    def test_post_jump_point(self, ball_arc):
        x = sample_at(ball_arc, (math.sqrt(2), 1))
        assert x[0] == pytest.approx(0.0, abs=1e-6)
        assert x[1] == pytest.approx(math.sqrt(2) / 2, abs=1e-6)

    def test_initial_point(self, ball_arc):
        assert sample_at(ball_arc, (0.0, 0)) == (1.0, 0.0)

    def test_interpolated_flight(self, ball_arc):
        t = 0.7071
        x = sample_at(ball_arc, (t, 0))
        assert x[0] == pytest.approx(1 - t * t / 2, abs=1e-6)
        assert x[1] == pytest.approx(-t, abs=1e-9)

    def test_outside(self, ball_arc):
        with pytest.raises(NotInDomain):
            sample_at(ball_arc, (0.1, 1))

    def test_exact_at_every_sample(self, ball_arc):
        for (t, j), x in zip(ball_arc.points(), ball_arc.states):
            assert sample_at(ball_arc, (t, j)) == x

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 1.4))
    def test_continuity_within_phase(self, ball_arc, t):
        eps = 1e-9
        a = sample_at(ball_arc, (t, 0))
        b = sample_at(ball_arc, (t + eps, 0))
        assert max(abs(u - v) for u, v in zip(a, b)) < 1e-6


class TestTraceFormat:
    def test_round_trip(self, ball_arc, tmp_path):
        text = dump_trace(ball_arc, {"system": "bouncing_ball"})
        arc, meta = load_trace(text)
        assert arc == ball_arc and meta == {"system": "bouncing_ball"}
        data = json.loads(text)
        assert set(data) == {"dim", "phases", "samples", "meta"}
        path = tmp_path / "t.json"
        write_trace(str(path), ball_arc)
        assert read_trace(str(path))[0] == ball_arc

    def test_csv(self, ball_arc, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(str(path), ball_arc)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,j,x1,x2"
        assert len(lines) == len(ball_arc) + 1
        t, j, x1, x2 = lines[1].split(",")
        assert (float(t), int(j), float(x1), float(x2)) == (0.0, 0, 1.0, 0.0)

    def test_bad_samples_rejected(self):
        dom = validate_domain([(0, 0, 1)])
        with pytest.raises(Exception):
            HybridArc(dom, [[(0.0, (0.0,)), (0.5, (1.0,))]], 1)


class TestPropositions:
    def test_unknown_and_duplicate(self):
        ps = PropositionSet()
        ps.add("p", lambda x: x[0] <= 0, lambda x: x[0])
        with pytest.raises(UnknownProposition):
            ps.get("q")
        with pytest.raises(Exception):
            ps.add("p", lambda x: True)

    def test_margin_consistency(self):
        ps = builtin_examples()["bouncing_ball"].props
        pts = [(a / 7.0, b / 5.0) for a in range(-10, 11) for b in range(-15, 16)]
        assert ps.check_margins(pts) == []
        assert ps.holds("x2_le_0", (0.0, 1e-8), tol=1e-7)
        assert not ps.holds("x2_le_0", (0.0, 1e-8))
