import pytest

from gl_lab.config import Problem, load_config, parse_epsilons, validate_config
from gl_lab.errors import ConfigurationError
from gl_lab.grid import DomainKind

MINIMAL = """\
domain: {kind: UnitDisk, resolution: 32}
boundary: {type: cos, amplitude: 0.5}
problem: Single
epsilons: [0.4, 0.2, 0.1]
"""


def _problems(text):
    with pytest.raises(ConfigurationError) as info:
        validate_config(text)
    return info.value.problems


def test_minimal_document_is_defaulted():
    cfg = validate_config(MINIMAL)
    assert cfg.kind is DomainKind.UNIT_DISK and cfg.resolution == 32
    assert cfg.problem is Problem.SINGLE
    assert cfg.epsilons == (0.4, 0.2, 0.1)
    assert cfg.solver.tau == pytest.approx(0.25 * 0.1**2)
    assert cfg.solver.residual_tol == 1e-9 and cfg.solver.newton and cfg.solver.continuation
    assert cfg.dump_fields is False
    assert cfg.thresholds == {}
    assert cfg.solver.at(0.4).step == pytest.approx(0.0025)


def test_eps_must_decrease():
    probs = _problems(MINIMAL.replace("[0.4, 0.2, 0.1]", "[0.1, 0.2]"))
    assert any("epsilons must be strictly decreasing" in p for p in probs)


def test_pair_needs_two_specs():
    probs = _problems(MINIMAL.replace("Single", "SymmetricPair"))
    assert any("two boundary specs required" in p for p in probs)


def test_every_violation_is_listed_with_lines():
    text = """\
domain:
  kind: Torus
  resolution: 3
boundary: {type: cos, amplitude: .nan}
problem: Single
epsilons: [0.2, -0.1]
solver:
  tau: 1.0
  newton: maybe
thresholds: {C9: 1}
"""
    probs = _problems(text)
    joined = "\n".join(probs)
    assert "line 2: domain.kind" in joined
    assert "line 3: domain.resolution" in joined
    assert "line 4: boundary.amplitude" in joined
    assert "line 6: epsilons" in joined
    assert "line 9: solver.newton" in joined
    assert "line 10: thresholds.C9" in joined
    assert len(probs) >= 6


def test_tau_above_stability_guard():
    probs = _problems(MINIMAL + "solver: {tau: 0.01}\n")
    assert any("solver.tau" in p and "0.25*min(epsilon)^2" in p for p in probs)


def test_invalid_yaml_has_line():
    probs = _problems("domain: {kind: UnitDisk\nproblem: [")
    assert probs[0].startswith("line ")


def test_overrides():
    cfg = validate_config(MINIMAL, overrides={"epsilons": [0.3, 0.15], "resolution": 16, "output": "/tmp/x"})
    assert cfg.epsilons == (0.3, 0.15)
    assert cfg.resolution == 16
    assert cfg.output == "/tmp/x"
    assert cfg.solver.tau == pytest.approx(0.25 * 0.15**2)


def test_beta_and_harmonic_need_no_epsilons():
    text = """\
domain: {kind: UnitSquare, resolution: 16}
boundary:
  - {type: cos, amplitude: 0.5}
  - {type: constant}
problem: BetaMinimizer
"""
    cfg = validate_config(text)
    assert cfg.epsilons == () and len(cfg.boundary) == 2
    one = validate_config(text.replace("BetaMinimizer", "HarmonicOnly"))
    assert one.problem is Problem.HARMONIC_ONLY


def test_initial_v_only_for_pairs():
    probs = _problems(MINIMAL + "initial: {u: a.csv, v: b.csv}\n")
    assert any("initial.v" in p for p in probs)


def test_load_config_resolves_relative_paths(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(MINIMAL)
    cfg = load_config(path)
    assert cfg.resolve("table.csv") == tmp_path / "table.csv"


def test_parse_epsilons():
    assert parse_epsilons("0.4,0.2, 0.1") == [0.4, 0.2, 0.1]
    with pytest.raises(ConfigurationError):
        parse_epsilons("0.4,abc")


def test_as_dict_roundtrip():
    cfg = validate_config(MINIMAL)
    d = cfg.as_dict()
    assert d["problem"] == "Single" and d["domain"]["kind"] == "UnitDisk"
    assert d["solver"]["tau"] == cfg.solver.tau
