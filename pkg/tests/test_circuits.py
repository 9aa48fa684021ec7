"""Readout circuit tests: dividers, serial chains, and the op-amp front end."""

import math
import random
from dataclasses import replace

import pytest

from cmutkit import (
    AmplifierSpec,
    ContactError,
    FixedResistance,
    LinearOgmrCircuit,
    MatchedResistance,
    OgmrSerialCircuit,
    SgsrCircuit,
    linear_noise,
    linear_output,
    linear_snr,
    ogmr_bandwidth,
    ogmr_noise,
    ogmr_output,
    ogmr_snr,
    ogmr_snr_closed_form,
    resolved_resistance,
    sgsr_noise,
    sgsr_output,
    thermal_noise_density,
)
from cmutkit.circuits import BOLTZMANN_CONSTANT

GAP = 0.7e-6
REST_C = 2.8709736184148159e-13  # F, exact cell value

# Bench reference point: 0.287 pF cell read at 1.753 MHz through 316.5 kohm.
C_BENCH = 0.287e-12
F_BENCH = 1.753e6
OMEGA_BENCH = 2.0 * math.pi * F_BENCH
R_BENCH = 3.165e5

# Frozen values computed independently at 40-digit precision.
KT_OVER_C_BENCH = 1.4431871080139373e-08
KT_OVER_C0 = 1.4426976874440739e-08
Z_BENCH = 316341.60869449353            # 1/(w*C), bench values
IN_Z_SQ_BENCH = 4.8434854481447312e-11  # (22 pA/rtHz * |Z|)^2
SGSR_OUT_BENCH = 3.5346489010823072
SGSR_NOISE_BENCH = 1.5370128748109227e-04
BANDWIDTH_N8_FIXED = 14016981.738804352
OGMR_NOISE_MATCHED = {
    1: 1.5368632197439036e-04,
    4: 3.0737264394878072e-04,
    8: 4.3469056177484213e-04,
}
ETA1_AMPFREE_BENCH = 13873.544428500576
ETA1_AMPFREE_EXACT = 13875.897458632066
LIN_NOISE_SQ_1 = 4.2467586730591245e-05
LIN_ETA_1_BENCH = 255.75254166150045
LIN_ETA_1_EXACT = 255.83928836219342
NOISE_DENSITY_1K = 4.0703547756921632e-09
SQRT_8 = 2.8284271247461901

QUIET = AmplifierSpec(current_noise_density=0.0, voltage_noise_density=0.0)


def rel(a, b):
    return abs(a - b) / abs(b)


def bench_sgsr(resistance=R_BENCH):
    return SgsrCircuit(resistance=resistance, rest_capacitance=C_BENCH,
                       input_amplitude=5.0, angular_frequency=OMEGA_BENCH,
                       temperature=300.0)


def bench_ogmr(n, rule):
    return OgmrSerialCircuit(sensor_count=n, resistance_rule=rule,
                             per_sensor_capacitance=C_BENCH,
                             input_amplitude=5.0,
                             angular_frequency=OMEGA_BENCH, temperature=300.0)


def bench_linear(n, bandwidth=F_BENCH, **kwargs):
    return LinearOgmrCircuit(sensor_count=n, rest_capacitance=C_BENCH,
                             gap=GAP, input_amplitude=5.0,
                             angular_frequency=OMEGA_BENCH, temperature=300.0,
                             bandwidth=bandwidth, **kwargs)


class TestSgsrOutput:

    def test_low_frequency_passthrough(self):
        circuit = SgsrCircuit(resistance=R_BENCH, rest_capacitance=C_BENCH,
                              input_amplitude=5.0, angular_frequency=1e-3,
                              temperature=300.0)
        assert rel(abs(sgsr_output(circuit, 0.0)), 5.0) < 1e-12

    def test_corner_attenuation(self):
        # R = 1/(w C) puts the divider at its corner: |V_out| = V_in/sqrt(2).
        circuit = bench_sgsr(resistance=1.0 / (OMEGA_BENCH * C_BENCH))
        assert rel(abs(sgsr_output(circuit, 0.0)), 5.0 / math.sqrt(2.0)) < 1e-12

    def test_frozen_bench_point(self):
        out = abs(sgsr_output(bench_sgsr(), 0.0))
        assert rel(out, SGSR_OUT_BENCH) < 1e-12
        # 316.5 kohm sits close to the corner, so close to 5/sqrt(2).
        assert rel(out, 5.0 / math.sqrt(2.0)) < 0.005

    def test_excursion_attenuates(self):
        circuit = bench_sgsr()
        assert abs(sgsr_output(circuit, 0.1 * C_BENCH)) < abs(sgsr_output(circuit, 0.0))

    def test_capacitance_must_stay_positive(self):
        circuit = bench_sgsr()
        with pytest.raises(ValueError):
            sgsr_output(circuit, -C_BENCH)


class TestSgsrNoise:

    def test_frozen_bench_point(self):
        assert rel(sgsr_noise(bench_sgsr(), F_BENCH), SGSR_NOISE_BENCH) < 1e-12

    def test_ktc_floor(self):
        # A vanishing resistor leaves only the sampled kT/C term.
        tiny_r = bench_sgsr(resistance=1e-30)
        assert rel(sgsr_noise(tiny_r, F_BENCH) ** 2, KT_OVER_C_BENCH) < 1e-9

    def test_monotone_in_bandwidth(self):
        circuit = bench_sgsr()
        assert sgsr_noise(circuit, 2e6) > sgsr_noise(circuit, 1e6)

    def test_rejects_bad_bandwidth(self):
        with pytest.raises(ValueError):
            sgsr_noise(bench_sgsr(), 0.0)
        with pytest.raises(ValueError):
            sgsr_noise(bench_sgsr(), math.inf)


class TestOgmrOutput:

    def test_single_cell_matches_divider_bitwise(self):
        # n = 1 with the same resistor must reproduce the divider output
        # exactly, not approximately.
        rng = random.Random(12345)
        for _ in range(200):
            resistance = 10.0 ** rng.uniform(2.0, 7.0)
            capacitance = 10.0 ** rng.uniform(-14.0, -11.0)
            omega = 10.0 ** rng.uniform(5.0, 8.0)
            amplitude = rng.uniform(0.5, 20.0)
            delta_c = rng.uniform(-0.5, 3.0) * capacitance
            chain = OgmrSerialCircuit(
                sensor_count=1, resistance_rule=FixedResistance(resistance),
                per_sensor_capacitance=capacitance, input_amplitude=amplitude,
                angular_frequency=omega, temperature=300.0)
            divider = SgsrCircuit(
                resistance=resistance, rest_capacitance=capacitance,
                input_amplitude=amplitude, angular_frequency=omega,
                temperature=300.0)
            assert ogmr_output(chain, delta_c) == sgsr_output(divider, delta_c)

    def test_matched_chain_at_rest(self):
        # Matched R makes w R C = n: V_out = n V_in / (n + j n) = V_in (1-j)/2.
        circuit = bench_ogmr(4, MatchedResistance())
        out = ogmr_output(circuit, 0.0)
        assert rel(out.real, 2.5) < 1e-12
        assert rel(out.imag, -2.5) < 1e-12
        assert rel(abs(out), 5.0 / math.sqrt(2.0)) < 1e-12

    def test_resistance_resolution(self):
        assert resolved_resistance(bench_ogmr(3, FixedResistance(1234.5))) == 1234.5
        for n in (1, 8):
            matched = resolved_resistance(bench_ogmr(n, MatchedResistance()))
            assert rel(matched, n * Z_BENCH) < 1e-12

    def test_capacitance_must_stay_positive(self):
        with pytest.raises(ValueError):
            ogmr_output(bench_ogmr(2, MatchedResistance()), -C_BENCH)


class TestOgmrBandwidth:

    @pytest.mark.parametrize("n", [1, 2, 8])
    def test_matched_pins_bandwidth_to_carrier(self, n):
        # R = n/(w C) cancels n: the chain bandwidth stays w/(2 pi).
        circuit = bench_ogmr(n, MatchedResistance())
        assert rel(ogmr_bandwidth(circuit), OMEGA_BENCH / (2.0 * math.pi)) < 1e-12

    def test_frozen_fixed_resistor_point(self):
        circuit = bench_ogmr(8, FixedResistance(R_BENCH))
        assert rel(ogmr_bandwidth(circuit), BANDWIDTH_N8_FIXED) < 1e-12

    def test_halves_with_doubled_resistor(self):
        narrow = ogmr_bandwidth(bench_ogmr(2, FixedResistance(2.0 * R_BENCH)))
        wide = ogmr_bandwidth(bench_ogmr(2, FixedResistance(R_BENCH)))
        assert wide == 2.0 * narrow


class TestOgmrNoise:

    @pytest.mark.parametrize("n", [1, 4, 8])
    def test_frozen_matched_points(self, n):
        circuit = bench_ogmr(n, MatchedResistance())
        assert rel(ogmr_noise(circuit), OGMR_NOISE_MATCHED[n]) < 1e-12

    def test_matched_closed_form(self):
        # Matched: noise = sqrt(n (2/pi + 1) kB T / C).
        for n in (1, 2, 4, 8, 16):
            circuit = bench_ogmr(n, MatchedResistance())
            want = math.sqrt(n * (2.0 / math.pi + 1.0)
                             * BOLTZMANN_CONSTANT * 300.0 / C_BENCH)
            assert rel(ogmr_noise(circuit), want) < 1e-12

    def test_sqrt_n_growth_when_matched(self):
        base = ogmr_noise(bench_ogmr(1, MatchedResistance()))
        assert rel(ogmr_noise(bench_ogmr(4, MatchedResistance())), 2.0 * base) < 1e-12

    def test_cold_circuit_is_quiet(self):
        cold = replace(bench_ogmr(1, MatchedResistance()), temperature=1e-12)
        assert ogmr_noise(cold) < 1e-11

    def test_monotone(self):
        assert (ogmr_noise(replace(bench_ogmr(1, MatchedResistance()),
                                   temperature=600.0))
                > ogmr_noise(bench_ogmr(1, MatchedResistance())))
        assert (ogmr_noise(bench_ogmr(8, FixedResistance(R_BENCH)))
                > ogmr_noise(bench_ogmr(1, FixedResistance(R_BENCH))))


class TestOgmrSnr:

    def test_linear_in_small_excursions(self):
        circuit = bench_ogmr(1, MatchedResistance())
        slope_a = ogmr_snr(circuit, 1e-6 * C_BENCH) / 1e-6
        slope_b = ogmr_snr(circuit, 2e-6 * C_BENCH) / 2e-6
        assert rel(slope_a, slope_b) < 1e-3

    def test_scales_with_input(self):
        quiet = bench_ogmr(2, MatchedResistance())
        loud = replace(quiet, input_amplitude=10.0)
        assert rel(ogmr_snr(loud, 1e-3 * C_BENCH),
                   2.0 * ogmr_snr(quiet, 1e-3 * C_BENCH)) < 1e-12

    def test_matched_rule_trades_snr_for_bandwidth(self):
        # With R = n|Z| the signal is n-independent while the noise grows
        # as sqrt(n): the definition gives eta(n) = eta(1)/sqrt(n).
        delta_c = 1e-3 * C_BENCH
        base = ogmr_snr(bench_ogmr(1, MatchedResistance()), delta_c)
        for n in (2, 4, 8, 16):
            eta = ogmr_snr(bench_ogmr(n, MatchedResistance()), delta_c)
            assert rel(eta * math.sqrt(n), base) < 1e-9

    def test_oversized_fixed_resistor_recovers_sqrt_n(self):
        # R >> n|Z| holds the bandwidth term negligible and the chain gain
        # proportional to n: eta then grows as sqrt(n).
        rule = FixedResistance(1e4 * Z_BENCH)
        delta_c = 1e-3 * C_BENCH
        base = ogmr_snr(bench_ogmr(1, rule), delta_c)
        for n in (2, 4, 8):
            ratio = ogmr_snr(bench_ogmr(n, rule), delta_c) / base
            assert 0.995 * math.sqrt(n) < ratio < 1.005 * math.sqrt(n)

    def test_rejects_bad_excursion(self):
        circuit = bench_ogmr(1, MatchedResistance())
        with pytest.raises(ValueError):
            ogmr_snr(circuit, 0.0)
        with pytest.raises(ValueError):
            ogmr_snr(circuit, math.inf)


class TestClosedForm:

    def test_matched_ratio_is_sqrt_8(self):
        ratio = (ogmr_snr_closed_form(8, 5.16e4, matched=True)
                 / ogmr_snr_closed_form(1, 5.16e4, matched=True))
        assert rel(ratio, SQRT_8) < 1e-12
        assert f"{ratio:.3g}" == "2.83"

    def test_matched_quarters_the_coefficient(self):
        assert ogmr_snr_closed_form(1, 5.16e4, matched=True) == 1.29e4
        assert ogmr_snr_closed_form(4, 5.16e4, matched=True) == 2.58e4

    def test_short_resistor_limit(self):
        # z_over_r -> 0 removes the divider loss entirely.
        for n in (1, 2, 9):
            assert (ogmr_snr_closed_form(n, 7.0, z_over_r=0.0)
                    == 7.0 * math.sqrt(n))

    def test_loaded_chain_decays(self):
        assert ogmr_snr_closed_form(1, 7.0, z_over_r=1.0) == 7.0 / 4.0
        assert (ogmr_snr_closed_form(64, 7.0, z_over_r=1.0)
                < ogmr_snr_closed_form(1, 7.0, z_over_r=1.0))

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            ogmr_snr_closed_form(0, 5.16e4)


class TestLinearOutput:

    def test_rest_state(self):
        assert linear_output(bench_linear(1), 0.0) == (-5.0, 0.0)
        assert linear_output(bench_linear(8), 0.0) == (-40.0, 0.0)

    def test_third_gap_excursion(self):
        _, ac1 = linear_output(bench_linear(1), GAP / 3.0)
        assert rel(ac1, 5.0 / 3.0) < 1e-12
        dc8, ac8 = linear_output(bench_linear(8), GAP / 3.0)
        assert dc8 == -40.0
        assert rel(ac8, 40.0 / 3.0) < 1e-12

    def test_rejects_contact_and_negative(self):
        circuit = bench_linear(1)
        with pytest.raises(ContactError):
            linear_output(circuit, GAP)
        with pytest.raises(ContactError):
            linear_output(circuit, 2.0 * GAP)
        with pytest.raises(ValueError):
            linear_output(circuit, -1e-9)
        with pytest.raises(ValueError):
            linear_output(circuit, math.nan)


class TestLinearNoise:

    @pytest.mark.parametrize("n", [1, 4])
    def test_ktc_floor(self, n):
        circuit = bench_linear(n, amplifier=QUIET)
        want = math.sqrt(n * BOLTZMANN_CONSTANT * 300.0 / C_BENCH)
        assert rel(linear_noise(circuit), want) < 1e-12

    def test_current_noise_coefficient(self):
        # Unit-ish bandwidth and zeroed voltage noise expose the
        # (I_N |Z|)^2 coefficient: at n = 1 the n^2/(n+1) factor is 1/2,
        # so bandwidth 2 Hz returns the bare coefficient.
        current_only = AmplifierSpec(current_noise_density=22e-12,
                                     voltage_noise_density=0.0)
        circuit = bench_linear(1, bandwidth=2.0, amplifier=current_only)
        floor = bench_linear(1, bandwidth=2.0, amplifier=QUIET)
        excess = linear_noise(circuit) ** 2 - linear_noise(floor) ** 2
        assert rel(excess, IN_Z_SQ_BENCH) < 1e-9
        assert rel(linear_noise(floor) ** 2, KT_OVER_C_BENCH) < 1e-9

    def test_voltage_noise_coefficient(self):
        voltage_only = AmplifierSpec(current_noise_density=0.0,
                                     voltage_noise_density=1.673e-9)
        circuit = bench_linear(1, bandwidth=1.0, amplifier=voltage_only)
        floor = bench_linear(1, bandwidth=1.0, amplifier=QUIET)
        excess = linear_noise(circuit) ** 2 - linear_noise(floor) ** 2
        # The term sits ten decades under the kTC floor, so squaring the
        # rounded rms values leaves ~1e-6 of cancellation error.
        assert rel(excess, (1.673e-9) ** 2) < 1e-5
        assert rel(excess, 2.8e-18) < 0.01

    def test_frozen_total(self):
        assert rel(linear_noise(bench_linear(1)) ** 2, LIN_NOISE_SQ_1) < 1e-12


class TestLinearSnr:

    def test_frozen_bench_points(self):
        circuit = bench_linear(1)
        assert rel(linear_snr(circuit, GAP / 3.0), LIN_ETA_1_BENCH) < 1e-9
        amp_free = linear_snr(circuit, GAP / 3.0, include_amp_noise=False)
        assert rel(amp_free, ETA1_AMPFREE_BENCH) < 1e-9
        assert rel(amp_free, 1.39e4) < 0.02

    def test_frozen_exact_cell_points(self):
        circuit = LinearOgmrCircuit(
            sensor_count=1, rest_capacitance=REST_C, gap=GAP,
            input_amplitude=5.0, angular_frequency=OMEGA_BENCH,
            temperature=300.0, bandwidth=F_BENCH)
        assert rel(linear_snr(circuit, GAP / 3.0), LIN_ETA_1_EXACT) < 1e-9
        assert rel(linear_snr(circuit, GAP / 3.0, include_amp_noise=False),
                   ETA1_AMPFREE_EXACT) < 1e-9

    def test_amp_free_sqrt_n(self):
        base = linear_snr(bench_linear(1), GAP / 3.0, include_amp_noise=False)
        for n in (2, 4, 8, 16, 64):
            eta = linear_snr(bench_linear(n), GAP / 3.0, include_amp_noise=False)
            assert rel(eta, math.sqrt(n) * base) < 1e-12
        eta64 = linear_snr(bench_linear(64), GAP / 3.0, include_amp_noise=False)
        assert rel(eta64, 8.0 * base) < 1e-12

    def test_amp_noise_costs_snr(self):
        circuit = bench_linear(4)
        assert (linear_snr(circuit, GAP / 3.0)
                < linear_snr(circuit, GAP / 3.0, include_amp_noise=False))


class TestThermalNoiseDensity:

    def test_degenerate_inputs(self):
        assert thermal_noise_density(0.0, 300.0) == 0.0
        assert thermal_noise_density(1000.0, 0.0) == 0.0

    def test_frozen_point(self):
        assert rel(thermal_noise_density(1000.0, 300.0), NOISE_DENSITY_1K) < 1e-12

    def test_quarter_r_halves(self):
        assert (thermal_noise_density(4000.0, 300.0)
                == 2.0 * thermal_noise_density(1000.0, 300.0))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            thermal_noise_density(-1.0, 300.0)
        with pytest.raises(ValueError):
            thermal_noise_density(1000.0, -1.0)


class TestConstruction:

    def test_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            SgsrCircuit(resistance=0.0, rest_capacitance=C_BENCH,
                        input_amplitude=5.0, angular_frequency=OMEGA_BENCH,
                        temperature=300.0)
        with pytest.raises(ValueError):
            FixedResistance(0.0)
        with pytest.raises(ValueError):
            bench_ogmr(0, MatchedResistance())
        with pytest.raises(TypeError):
            bench_ogmr(2, "matched")
        with pytest.raises(ValueError):
            AmplifierSpec(current_noise_density=-1e-12)
        with pytest.raises(ValueError):
            bench_linear(1, bandwidth=0.0)
        with pytest.raises(ValueError):
            bench_linear(0)
