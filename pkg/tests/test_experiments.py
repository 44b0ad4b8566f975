import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinoeqc.experiments import (
    DecodeError,
    DetectionSettings,
    GroverCase,
    decode_answer,
    effective_pure_report,
    grover_circuit,
    grover_diffusion,
    grover_oracle,
    grover_report,
    hadamard_pulse_sequence,
    relabel_unitary,
    run_effective_pure_pipeline,
    run_grover_pipeline,
    run_id,
)
from spinoeqc.quantum import DensityMatrix, apply_unitary, compose, populations
from spinoeqc.readout import Channel, PeakLine, PeakTable
from spinoeqc.spinoe import ScheduleMode, SpinoeParams
from spinoeqc.spins import PulseTarget, SpinSystemConfig, pulse_unitary

CFG = SpinSystemConfig()
ALL_CASES = [GroverCase(t) for t in ("00", "01", "10", "11")]


def peaks(h0, h1, c0, c1):
    j2 = CFG.j_coupling / 2
    return (
        PeakTable(Channel.H, (PeakLine(j2, h0, 0), PeakLine(-j2, h1, 1))),
        PeakTable(Channel.C, (PeakLine(j2, c0, 0), PeakLine(-j2, c1, 1))),
    )


class TestGroverUnitaries:
    def test_oracle_marks_one_element(self):
        assert_allclose(grover_oracle(GroverCase("11")).matrix, np.diag([1, 1, 1, -1]))
        assert_allclose(grover_oracle(GroverCase("00")).matrix, np.diag([-1, 1, 1, 1]))

    @pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.target)
    def test_oracle_and_diffusion_are_involutions(self, case):
        o = grover_oracle(case).matrix
        d = grover_diffusion().matrix
        assert_allclose(o @ o, np.eye(4), atol=1e-14)
        assert_allclose(d @ d, np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.target)
    def test_circuit_finds_marked_element_from_00(self, case):
        out = apply_unitary(DensityMatrix.basis_state(0), grover_circuit(case))
        expected = np.zeros(4)
        expected[case.index] = 1.0
        assert_allclose(populations(out), expected, atol=1e-12)

    def test_mixed_state_is_invariant(self):
        out = apply_unitary(DensityMatrix.maximally_mixed(), grover_circuit(GroverCase("01")))
        assert_allclose(out.matrix, np.eye(4) / 4, atol=1e-14)

    @pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.target)
    def test_effective_pure_contract(self, case):
        q1, q2 = -2.5, 10.0
        rho = DensityMatrix(q1 * np.eye(4) + q2 * DensityMatrix.basis_state(0).matrix)
        out = apply_unitary(rho, grover_circuit(case))
        expected = q1 * np.eye(4) + q2 * DensityMatrix.basis_state(case.index).matrix
        assert np.abs(out.matrix - expected).max() < 1e-12

    def test_case_validation(self):
        with pytest.raises(ValueError):
            GroverCase("02")

    def test_hadamard_pulse_sequence_matches_gate(self):
        seq = hadamard_pulse_sequence(PulseTarget.H)
        u = compose(*[pulse_unitary(p) for p in seq]).matrix
        h = np.kron(np.array([[1, 1], [1, -1]]) / np.sqrt(2), np.eye(2))
        phase = h[0, 0] / u[0, 0]
        assert abs(abs(phase) - 1) < 1e-12
        assert_allclose(u * phase, h, atol=1e-12)

    @pytest.mark.parametrize("ground", range(4))
    def test_relabel_moves_ground_to_00(self, ground):
        u = relabel_unitary(ground)
        out = apply_unitary(DensityMatrix.basis_state(ground), u)
        assert_allclose(populations(out), [1, 0, 0, 0], atol=1e-14)


class TestDecode:
    @pytest.mark.parametrize(
        "table,expected",
        [
            (( 10.0, 0.0,  10.0, 0.0), "00"),
            (( 0.0, 10.0, -10.0, 0.0), "01"),
            ((-10.0, 0.0,  0.0, 10.0), "10"),
            (( 0.0, -10.0, 0.0, -10.0), "11"),
        ],
    )
    def test_clean_patterns(self, table, expected):
        assert decode_answer(*peaks(*table)) == expected

    def test_silence_is_ambiguous(self):
        with pytest.raises(DecodeError, match="no readout signal"):
            decode_answer(*peaks(0.0, 0.0, 0.0, 0.0))

    def test_comparable_lines_are_ambiguous(self):
        with pytest.raises(DecodeError, match="comparable"):
            decode_answer(*peaks(10.0, 9.0, 10.0, 0.0))

    def test_channel_disagreement_detected(self):
        # H claims H=0 partner C=0; C claims C=0 partner H=1
        with pytest.raises(DecodeError, match="disagree"):
            decode_answer(*peaks(10.0, 0.0, 0.0, 10.0))

    def test_scale_invariance(self):
        # dominant negative H line at partner 0, dominant positive C line
        # at partner 1: the answer is |10>
        a = decode_answer(*peaks(-8.0, 0.4, 0.3, 7.0))
        b = decode_answer(*peaks(-8e6, 0.4e6, 0.3e6, 7e6))
        assert a == b == "10"


class TestEffectivePurePipeline:
    def test_thermal_inputs_unit_weights_unit_enhancement(self):
        p = SpinoeParams(eps0_h=1.0, eps0_c=1.0)
        for mode in ScheduleMode:
            run = run_effective_pure_pipeline(p, CFG, mode)
            assert_allclose(run.result.weights, [1.0, 1.0, 1.0], atol=1e-9)
            assert run.enhancement == pytest.approx(1.0, abs=1e-12)

    def test_multi_sample_hits_the_constant_enhancement_ceiling(self):
        run = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.MULTI_SAMPLE)
        assert run.result.ground == 2
        assert run.enhancement == pytest.approx(12.4, rel=1e-9)

    def test_single_sample_below_ceiling(self):
        run = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.SINGLE_SAMPLE)
        multi = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.MULTI_SAMPLE)
        assert run.enhancement < multi.enhancement
        assert 9.0 < run.enhancement < 12.4
        assert run.result.residual < 1e-9 * np.abs(run.result.diagonal).max()

    def test_records_are_complete_and_traceless(self):
        run = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.SINGLE_SAMPLE)
        assert [r.perm_id.value for r in run.records] == ["identity", "cycle", "cycle2"]
        assert [r.schedule_time for r in run.records] == [25.0, 145.0, 265.0]
        assert [r.probe_time for r in run.records] == [0.0, 120.0, 240.0]
        for rec in run.records:
            assert abs(rec.probed_diagonal.sum()) < 1e-9
            assert rec.weights_used is not None
            assert rec.readout_h.values.size == 4096

    def test_weighted_sum_spectrum_shows_pure_signature(self):
        from spinoeqc.readout import integrate_peaks

        run = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.SINGLE_SAMPLE)
        # ground |10>: dominant negative H line at partner 0, positive C line
        ph = integrate_peaks(run.sum_readout_h, CFG)
        pc = integrate_peaks(run.sum_readout_c, CFG)
        assert ph.integral(0) < 0
        assert pc.integral(1) > 0
        assert abs(ph.integral(1)) < 1e-2 * abs(ph.integral(0))
        assert abs(pc.integral(0)) < 1e-2 * abs(pc.integral(1))

    def test_jitter_determinism_under_fixed_seed(self):
        p = SpinoeParams(reproducibility_jitter=0.05, seed=5)
        a = run_effective_pure_pipeline(p, CFG, ScheduleMode.MULTI_SAMPLE)
        b = run_effective_pure_pipeline(p, CFG, ScheduleMode.MULTI_SAMPLE)
        for ra, rb in zip(a.records, b.records):
            assert np.array_equal(ra.probed_diagonal, rb.probed_diagonal)
            assert np.array_equal(ra.readout_h.values, rb.readout_h.values)
        assert a.enhancement == b.enhancement

    def test_jitter_varies_across_samples(self):
        p = SpinoeParams(reproducibility_jitter=0.05, seed=5)
        run = run_effective_pure_pipeline(p, CFG, ScheduleMode.MULTI_SAMPLE)
        d0, d1 = run.records[0].probed_diagonal, run.records[1].probed_diagonal
        assert not np.allclose(d0, d1)


class TestGroverPipeline:
    def test_thermal_inputs_case_00(self):
        p = SpinoeParams(eps0_h=1.0, eps0_c=1.0)
        run = run_grover_pipeline(p, CFG, GroverCase("00"))
        assert run.decoded == "00"
        assert run.peaks_h.integral(0) > 0
        assert run.peaks_c.integral(0) > 0
        assert run.enhancement == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.target)
    def test_all_cases_decode_with_enhanced_single_sample(self, case):
        run = run_grover_pipeline(SpinoeParams(), CFG, case)
        assert run.decoded == case.target
        assert 2.0 <= run.enhancement <= 7.0

    def test_demonstration_schedule_lands_in_reported_band(self):
        run = run_grover_pipeline(
            SpinoeParams(), CFG, GroverCase("11"), ScheduleMode.SINGLE_SAMPLE
        )
        assert 2.0 <= run.enhancement <= 7.0

    def test_fresh_sample_would_exceed_band(self):
        run = run_grover_pipeline(
            SpinoeParams(), CFG, GroverCase("11"), ScheduleMode.SINGLE_SAMPLE, sample_age=0.0
        )
        assert run.enhancement > 7.0

    def test_determinism(self):
        p = SpinoeParams(reproducibility_jitter=0.03, seed=11)
        a = run_grover_pipeline(p, CFG, GroverCase("10"), ScheduleMode.MULTI_SAMPLE)
        b = run_grover_pipeline(p, CFG, GroverCase("10"), ScheduleMode.MULTI_SAMPLE)
        assert a.decoded == b.decoded
        assert a.enhancement == b.enhancement
        assert np.array_equal(a.sum_readout_h.values, b.sum_readout_h.values)


class TestReports:
    def test_effective_pure_report_layout(self):
        run = run_effective_pure_pipeline(SpinoeParams(), CFG, ScheduleMode.SINGLE_SAMPLE)
        report = effective_pure_report(run, {"seed": 0})
        assert report["schedule"]["times_s"] == [25.0, 145.0, 265.0]
        assert len(report["experiments"]) == 3
        assert report["enhancement"] == run.enhancement
        assert report["ground_state"] == 2
        assert len(report["weights"]) == 3

    def test_grover_report_layout(self):
        run = run_grover_pipeline(SpinoeParams(), CFG, GroverCase("01"))
        report = grover_report(run, {"seed": 0})
        assert report["target"] == "01"
        assert report["decoded"] == "01"
        assert set(report["peak_integrals"]) == {"h", "c"}

    def test_run_id_deterministic_and_config_sensitive(self):
        assert run_id({"a": 1}) == run_id({"a": 1})
        assert run_id({"a": 1}) != run_id({"a": 2})
        assert run_id({"a": 1}, "00") != run_id({"a": 1}, "01")


class TestDetectionSettings:
    def test_validation(self):
        with pytest.raises(ValueError):
            DetectionSettings(n_points=100)
        with pytest.raises(ValueError):
            DetectionSettings(dwell=0.0)
