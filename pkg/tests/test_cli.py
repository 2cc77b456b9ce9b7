import os

import numpy as np
import pytest

from adigelab.cli import load_trajectory_csv, main, parse_config, run
from adigelab.errors import ConfigError

MINIMAL = """
[scenario]
name = demo

[problem]
id = quad1d

[system]
kind = adige_v
phi = viscous:1.0
x0 = 3
v0 = 1

[integrator]
h = 1e-3
T = 10
record_every = 10

[diagnostics]
energy_monotone = slack=1e-9
"""

FIG3_SWEEP = """
[scenario]
name = bowl-sweep
[problem]
id = quad1d
[system]
kind = adige_v
phi = power:r=1,p=2
x0 = 3
v0 = 1
[integrator]
h = 1e-3
T = 60
record_every = 20
[sweep]
param = phi.p
values = 2,3,4,5,6,7
"""

FIG2_STYLE = """
[scenario]
name = stiff-plane
[problem]
id = illcond2d
[system]
kind = open_loop
gamma = 3.1/t
beta = 0
x0 = 1,1
v0 = 0,0
t0 = 1
[integrator]
h = 1e-3
T = 15
record_every = 10
[diagnostics]
crossings = a=0,b=0,component=1
[sweep]
param = beta
values = 0,1
"""

ALGO = """
[scenario]
name = prox-run
[problem]
id = quad1d
[system]
kind = prox_inertial
phi = viscous:1.0
x0 = 3
max_iter = 500
stop_tol = 0
[integrator]
h = 0.5
[diagnostics]
certificate = gamma=1,L=1
"""


class TestParse:
    def test_minimal_config(self):
        cfg = parse_config(MINIMAL)
        assert cfg.name == "demo"
        assert cfg.problem_id == "quad1d"
        assert cfg.system_kind == "adige_v"
        assert cfg.phi == ("viscous", {"gamma": 1.0})
        assert cfg.h == pytest.approx(1e-3)
        assert cfg.T == pytest.approx(10.0)
        assert cfg.checks == [("energy_monotone", {"slack": 1e-9})]

    def test_invalid_power_exponent(self):
        bad = MINIMAL.replace("phi = viscous:1.0", "phi = power:r=1,p=0.5")
        with pytest.raises(ConfigError) as exc:
            parse_config(bad)
        assert any("p must be >= 1" in msg for _, msg in exc.value.errors)

    def test_error_lines_are_reported(self):
        text = "[system]\nkind = adige_v\nbogus_key = 1\n[problem]\nid = quad1d\n"
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        lines = dict(exc.value.errors)
        assert any("bogus_key" in m for m in lines.values())
        assert any(n == 3 for n in lines)

    def test_unknown_section_and_stray_keys(self):
        text = "[nonsense]\nfoo = 1\n"
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        msgs = [m for _, m in exc.value.errors]
        assert any("unknown section" in m for m in msgs)

    def test_duplicate_key_rejected(self):
        text = MINIMAL + "\n[integrator]\nh = 2e-3\n"
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        assert any("duplicate" in m for _, m in exc.value.errors)

    def test_sweep_expands_to_plan(self):
        cfg = parse_config(FIG3_SWEEP)
        assert cfg.sweep == ("phi.p", [2.0, 3.0, 4.0, 5.0, 6.0, 7.0])

    def test_sweep_parameter_must_resolve(self):
        bad = FIG3_SWEEP.replace("param = phi.p", "param = phi.zeta")
        with pytest.raises(ConfigError) as exc:
            parse_config(bad)
        assert any("sweep" in m for _, m in exc.value.errors)

    def test_unknown_problem(self):
        bad = MINIMAL.replace("id = quad1d", "id = mystery")
        with pytest.raises(ConfigError) as exc:
            parse_config(bad)
        assert any("unknown problem" in m for _, m in exc.value.errors)

    def test_yosida_scheme(self):
        text = MINIMAL + "\n[integrator]\nscheme = yosida:0.05\n"
        text = text.replace("[integrator]\nh = 1e-3", "[integrator]\nh = 1e-3", 1)
        # move the scheme into the existing integrator section instead
        text = MINIMAL.replace("record_every = 10",
                               "record_every = 10\nscheme = yosida:0.05")
        cfg = parse_config(text)
        assert cfg.scheme == "yosida_rk4"
        assert cfg.yosida_lambda == pytest.approx(0.05)


class TestRun:
    def test_artifacts_written(self, tmp_path):
        cfg = parse_config(MINIMAL)
        arts = run(cfg, str(tmp_path))
        assert len(arts) == 1
        a = arts[0]
        assert a.ok
        assert os.path.exists(a.trajectory_csv_path)
        assert os.path.exists(a.report_path)
        assert os.path.exists(a.plot_script_path)
        header = open(a.trajectory_csv_path).readline().strip()
        assert header == "t,x_0,v_0,energy,grad_norm"

    def test_csv_roundtrip_full_precision(self, tmp_path):
        cfg = parse_config(MINIMAL)
        arts = run(cfg, str(tmp_path))
        traj = load_trajectory_csv(arts[0].trajectory_csv_path)
        from adigelab import AdigeV, DynamicsSpec, IntegratorConfig, Viscous, quad1d, simulate
        spec = DynamicsSpec(AdigeV(Viscous(1.0)), quad1d().objective, [3.0], [1.0])
        ref = simulate(spec, IntegratorConfig(h=1e-3, T=10.0, record_every=10))
        np.testing.assert_array_equal(traj.x, ref.x)
        np.testing.assert_array_equal(traj.energy, ref.energy)

    def test_determinism_byte_identical(self, tmp_path):
        cfg = parse_config(MINIMAL)
        a = run(cfg, str(tmp_path / "a"), seed=7)[0]
        b = run(cfg, str(tmp_path / "b"), seed=7)[0]
        assert open(a.trajectory_csv_path, "rb").read() == \
            open(b.trajectory_csv_path, "rb").read()

    def test_sweep_outputs_and_parallel_isolation(self, tmp_path):
        cfg = parse_config(FIG3_SWEEP)
        seq = run(cfg, str(tmp_path / "seq"), jobs=1)
        par = run(cfg, str(tmp_path / "par"), jobs=4)
        assert len(seq) == 6
        names = [os.path.basename(a.trajectory_csv_path) for a in seq]
        assert names[0] == "bowl-sweep__p=2.csv"
        assert names[-1] == "bowl-sweep__p=7.csv"
        assert seq[0].plot_script_path is not None
        plot = open(seq[0].plot_script_path).read()
        for n in names:
            assert n in plot
        for a, b in zip(seq, par):
            assert open(a.trajectory_csv_path, "rb").read() == \
                open(b.trajectory_csv_path, "rb").read()

    def test_oscillation_comparison_scenario(self, tmp_path):
        # the Hessian-damped run crosses the slow axis far less often
        cfg = parse_config(FIG2_STYLE)
        arts = run(cfg, str(tmp_path))
        assert len(arts) == 2
        counts = []
        for a in arts:
            for line in open(a.report_path):
                if line.startswith("PASS crossings") or line.startswith("FAIL crossings"):
                    counts.append(int(line.rsplit("total=", 1)[1]))
        assert counts[1] * 5 <= counts[0]

    def test_algorithm_run_with_certificate(self, tmp_path):
        cfg = parse_config(ALGO)
        arts = run(cfg, str(tmp_path))
        assert arts[0].ok
        report = open(arts[0].report_path).read()
        assert "certificate: violations=0" in report

    def test_diagnostics_report_populated(self, tmp_path):
        cfg = parse_config(MINIMAL)
        art = run(cfg, str(tmp_path))[0]
        rep = art.diagnostics
        assert rep is not None
        assert rep.energy_violations == (0, pytest.approx(rep.energy_violations[1]))
        assert rep.energy_violations[0] == 0
        assert rep.terminal_grad_norm is not None and rep.terminal_grad_norm >= 0

    def test_angle_check_through_cli(self, tmp_path):
        text = MINIMAL.replace(
            "energy_monotone = slack=1e-9",
            "angle = lam=0.25,gamma=0.5,delta=1,M=1,R=2,eps=1,grid_n=21")
        cfg = parse_config(text)
        art = run(cfg, str(tmp_path), seed=11)[0]
        assert art.ok
        assert "angle: bound=0.025" in open(art.report_path).read()

    def test_empty_diagnostics_only_writes_csv(self, tmp_path):
        cfg = parse_config(MINIMAL.replace(
            "[diagnostics]\nenergy_monotone = slack=1e-9", ""))
        arts = run(cfg, str(tmp_path))
        assert arts[0].ok
        report = open(arts[0].report_path).read()
        assert "PASS" not in report and "FAIL" not in report


class TestMain:
    def _write(self, tmp_path, text, name="cfg.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    def test_exit_zero_on_success(self, tmp_path, capsys):
        rc = main(["simulate", self._write(tmp_path, MINIMAL), "-o", str(tmp_path)])
        assert rc == 0

    def test_exit_one_on_diagnostic_failure(self, tmp_path):
        failing = MINIMAL.replace("energy_monotone = slack=1e-9",
                                  "terminal_grad = max=1e-30")
        rc = main(["simulate", self._write(tmp_path, failing), "-o", str(tmp_path)])
        assert rc == 1

    def test_exit_two_on_config_error(self, tmp_path, capsys):
        rc = main(["simulate", self._write(tmp_path, "[system]\nkind = bogus\n"),
                   "-o", str(tmp_path)])
        assert rc == 2

    def test_exit_three_on_divergence(self, tmp_path):
        diverging = """
[scenario]
name = blowup
[problem]
id = illcond2d
[system]
kind = adige_v
phi = viscous:1.0
x0 = 1,1
v0 = 0,0
[integrator]
h = 0.1
T = 50
"""
        rc = main(["simulate", self._write(tmp_path, diverging), "-o", str(tmp_path)])
        assert rc == 3

    def test_algorithm_subcommand_rejects_dynamics_config(self, tmp_path):
        rc = main(["algorithm", self._write(tmp_path, MINIMAL), "-o", str(tmp_path)])
        assert rc == 2

    def test_verify_round_trip(self, tmp_path):
        path = self._write(tmp_path, MINIMAL)
        assert main(["simulate", path, "-o", str(tmp_path)]) == 0
        assert main(["verify", path, "-o", str(tmp_path)]) == 0

    def test_verify_missing_csv(self, tmp_path):
        path = self._write(tmp_path, MINIMAL)
        assert main(["verify", path, "-o", str(tmp_path / "empty")]) == 2

    def test_catalog_listing(self, capsys):
        assert main(["catalog"]) == 0
        out = capsys.readouterr().out
        assert "quad1d" in out and "flatbottom" in out
