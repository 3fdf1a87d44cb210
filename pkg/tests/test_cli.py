"""Tests for the command-line entry point: outputs, exit codes and usage errors"""
import io
import json

import pytest

from ovlf.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, build_parser, run

pytestmark = pytest.mark.usefixtures("config")

T32 = "01101001100101101001011001101001"
H32 = "00100110100101100110100110010110"

SUBCOMMANDS = ["gen", "sd", "sd-curve", "estimate", "sigma", "decode", "validate", "classify",
               "families", "enumerate", "overlap", "powerfree", "fragility", "weyl", "verify",
               "sweep"]


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


class TestUsage:
    @pytest.mark.parametrize("command", SUBCOMMANDS)
    def test_help(self, command, capsys):
        assert run([command, "--help"]) == EXIT_OK
        assert "usage: ovlf " + command in capsys.readouterr().out

    def test_every_subcommand_registered(self):
        actions = [a for a in build_parser()._actions if a.dest == "command"]
        assert sorted(actions[0].choices) == sorted(SUBCOMMANDS)

    def test_missing_command(self):
        assert run([]) == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["sd", "0110"],
        ["gen", "t"],
        ["decode", "2(31)", "-n", "x"],
        ["sd", "0110", "1101", "--tol", "abc"],
        ["sd", "0110", "1101", "--format", "xml"],
        ["verify", "nonsense"],
        ["fragility", "--flips", "a,b"],
    ])
    def test_bad_arguments(self, argv):
        assert run(argv) == EXIT_USAGE

    def test_bad_configuration(self):
        assert run(["sd", "0110", "1101", "--tail-fraction", "2"]) == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["sd", "0110", "011"],
        ["sd", "t", "h"],
        ["gen", "q", "-n", "4"],
        ["classify", "1(3)"],
        ["decode", "1(0)", "-n", "4"],
        ["powerfree", "-q"],
        ["verify", "lemma", "--n-max", "20", "-q"],
    ])
    def test_domain_errors_are_usage_errors(self, argv):
        code, _ = invoke(*argv)
        assert code == EXIT_USAGE


class TestWords:
    def test_gen(self):
        assert invoke("gen", "t", "-n", "32") == (EXIT_OK, T32 + "\n")

    def test_gen_start_and_width(self):
        code, out = invoke("gen", "~t", "-n", "8", "--start", "4", "--width", "4")
        assert code == EXIT_OK
        assert out.splitlines() == ["0110", "0110"]

    def test_sd(self):
        assert invoke("sd", "0110", "1101") == (EXIT_OK, "1/4\n")

    def test_sd_float(self):
        assert invoke("sd", "0110", "1101", "--float") == (EXIT_OK, "1/4 0.2500000000\n")

    def test_sd_specs(self):
        code, out = invoke("sd", "t", "~t", "-n", "64")
        assert (code, out) == (EXIT_OK, "0/1\n")

    def test_sd_curve(self):
        code, out = invoke("sd-curve", "t", "t", "-n", "4")
        assert code == EXIT_OK
        assert out.splitlines() == ["# x=t y=t horizon=4 stride=1",
                                    "prefix_length,sd_num,sd_den,sd_float",
                                    "1,1,1,1.0000000000", "2,1,1,1.0000000000",
                                    "3,1,1,1.0000000000", "4,1,1,1.0000000000"]

    def test_sd_curve_to_file(self, tmp_path):
        target = tmp_path / "curve.tsv"
        code, out = invoke("sd-curve", "h", "t", "-n", "64", "--stride", "8", "--float",
                           "--format", "tsv", "--csv", str(target))
        assert code == EXIT_OK
        assert out == ""
        lines = target.read_text().splitlines()
        assert lines[1] == "prefix_length\tsd_num\tsd_den\tsd_float"
        assert len(lines) == 2 + 8

    def test_estimate(self):
        code, out = invoke("estimate", "t", "t", "-n", "1024")
        assert code == EXIT_OK
        assert out.splitlines() == ["lsd_lower: 1/1", "usd_upper: 1/1"]

    def test_weyl(self):
        code, out = invoke("weyl", "t", "~t", "-n", "256", "--min-exp", "4", "--max-exp", "5")
        assert code == EXIT_OK
        assert out.splitlines() == ["block_length,inf,sup", "16,0/1,0/1", "32,0/1,0/1"]


class TestSigma:
    def test_table(self):
        code, out = invoke("sigma", "--max", "3")
        assert code == EXIT_OK
        assert out.splitlines() == ["k,num,den,float", "0,1,1,1.0000000000",
                                    "1,-1,3,-0.3333333333", "2,-1,3,-0.3333333333",
                                    "3,1,3,0.3333333333"]

    def test_shift_density(self):
        code, out = invoke("sigma", "--max", "3", "--shift-density")
        assert code == EXIT_OK
        assert out.splitlines() == ["k,num,den,float", "1,1,3,0.3333333333",
                                    "2,1,3,0.3333333333", "3,2,3,0.6666666667"]

    def test_empirical(self):
        code, out = invoke("sigma", "--empirical", "2", "1024", "--format", "tsv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "k\tempirical\texact"
        assert lines[1] == "0\t1/1\t1/1"
        assert len(lines) == 4


class TestFife:
    def test_decode(self):
        assert invoke("decode", "2(31)", "-n", "32") == (EXIT_OK, H32 + "\n")

    def test_decode_power_sugar(self):
        code, out = invoke("decode", "0^2 2(31)", "-n", "8")
        assert code == EXIT_OK
        assert len(out.strip()) == 8

    def test_validate(self):
        assert invoke("validate", "2(31)") == (EXIT_OK, "valid\n")
        assert invoke("validate", "1(3)") == (EXIT_FAIL, "invalid\n")

    def test_classify(self):
        assert invoke("classify", "2(31)") == (EXIT_OK, "Case2\n")
        assert invoke("classify", "(0)@1") == (EXIT_OK, "Case1\n")

    def test_families(self):
        assert invoke("families", "(2)") == (EXIT_OK, "none\n")
        assert invoke("families", "2(31)") == (EXIT_OK, "edge-words\n")

    def test_enumerate(self):
        code, out = invoke("enumerate", "--depth", "1", "--emit-words")
        assert code == EXIT_OK
        assert out.splitlines() == ["path,end_state,decoded_length,word", "0,A,0,", "1,B,1,0",
                                    "2,C,2,00", "3,D,1,1", "4,E,2,11"]

    def test_enumerate_without_words(self):
        code, out = invoke("enumerate", "--depth", "2")
        lines = out.splitlines()
        assert code == EXIT_OK
        assert lines[0] == "path,end_state,decoded_length"
        assert len(lines) == 1 + 15

    def test_enumerate_emit_length(self):
        code, out = invoke("enumerate", "--depth", "2", "--emit-words", "--emit-length", "1")
        assert code == EXIT_OK
        assert "41,C,4,1" in out.splitlines()

    def test_zero_tail_with_leading_zero(self):
        assert invoke("classify", "01(0)") == (EXIT_OK, "Case1\n")
        assert invoke("families", "01(0)") == (EXIT_OK, "zero-tail\n")


class TestPowerFree:
    def test_overlap(self):
        assert invoke("overlap", "01010") == (EXIT_OK,
                                              "overlap at 0, period 2, length 5: 01010\n")
        assert invoke("overlap", "t", "-n", "512") == (EXIT_OK, "overlap-free\n")

    def test_powerfree_word(self):
        code, out = invoke("powerfree", "0110", "--p", "2", "--q", "1")
        assert (code, out) == (EXIT_OK, "true (critical exponent 2/1)\n")
        code, out = invoke("powerfree", "0110", "--p", "2", "--q", "1", "--strict")
        assert out.startswith("false")

    def test_powerfree_enumerate(self):
        code, out = invoke("powerfree", "--enumerate", "10", "--p", "2", "--q", "1")
        assert code == EXIT_OK
        assert "count: 44" in out

    def test_fragility(self):
        assert invoke("fragility", "--flips", "0", "--window", "64") == (
            EXIT_OK, "overlap at 0, period 1, length 3\n")

    def test_fragility_random_is_reproducible(self):
        first = invoke("fragility", "--random", "3", "--window", "256", "--seed", "7")
        second = invoke("fragility", "--random", "3", "--window", "256", "--seed", "7")
        assert first == second
        assert first[0] in (EXIT_OK, EXIT_INCONCLUSIVE)
        assert first[1].startswith("flips: ")

    def test_fragility_needs_positions(self):
        assert run(["fragility", "--window", "64"]) == EXIT_USAGE
        assert run(["fragility", "--flips", "1", "--random", "2"]) == EXIT_USAGE


class TestVerify:
    def test_single_check(self, tmp_path):
        target = tmp_path / "report.json"
        code, out = invoke("verify", "tightness", "--n-max", "4", "--json", str(target))
        assert code == EXIT_OK
        assert "CHECK: tightness" in out
        data = json.loads(target.read_text())
        assert data['reports'][0]['verdict'] == "PASS"
        assert data['reports'][0]['parameters'] == {'n_max': 4}
        assert 'verify.tightness' in data['timings']['latencies']

    def test_irrelevant_overrides_are_ignored(self):
        code, out = invoke("verify", "duality", "--n-max", "3", "--horizon", "1024")
        assert code == EXIT_OK

    def test_sweep_to_stdout(self):
        code, out = invoke("sweep", "--depth", "5", "--length", "32")
        assert code in (EXIT_OK, EXIT_FAIL)
        lines = out.splitlines()
        assert lines[0] == "# depth=5 prefix_length=32 tail_fraction=1/2"
        assert lines[1].startswith("path,case,")

    def test_sweep_files(self, tmp_path):
        csv_path, json_path = tmp_path / "sweep.csv", tmp_path / "sweep.json"
        code, out = invoke("sweep", "--depth", "5", "--length", "32", "--csv", str(csv_path),
                           "--json", str(json_path))
        assert code in (EXIT_OK, EXIT_FAIL)
        assert "SWEEP RESULTS" in out
        summary = json.loads(json_path.read_text())
        assert summary['prefix_length'] == 32
        assert len(csv_path.read_text().splitlines()) == summary['rows'] + 2
