"""Scenario grammar: expressions, sections, prerequisites."""

import numpy as np
import pytest

from dualband import (InnerFunction, LaurentSymbol, ScenarioError,
                      build_space, parse_scenario, parse_scenario_text)
from dualband.scenario import check_prerequisites, parse_expression

NILPOTENT = """
[scenario]
name = nilpotent

[space]
theta = mono(2)
phi = mono(0)
psi = mono(3)

[operator]
g = mono(3)

[tasks]
run = all

[lambdas]
values = 0.3, 0.5 + 0.4i, 2.0

[rfactors]
values = poly([-0.3, 1]), poly([1, -2.5, 1])

[numerics]
grid = 2048
tol = 1e-9
cutoff = 64
"""

FREE = """
[space]
theta = blaschke([-0.4])
aplus = poly([2.5])
aminus = poly([2.5])

[tasks]
run = spectrum
"""


class TestExpressions:
    def test_monomial(self):
        s = parse_expression("mono(3)")
        assert isinstance(s, LaurentSymbol)
        assert s.support() == (3, 3)

    def test_poly_with_offset(self):
        s = parse_expression("poly([2, 1], -1)")
        assert s.support() == (-1, 0)
        cd = s.coeff_dict()
        assert cd[-1] == pytest.approx(2.0)
        assert cd[0] == pytest.approx(1.0)

    def test_rational(self):
        s = parse_expression("rat([0.75], [1, 0, 0, 0, -0.5])")
        assert s.eval_at(0.5) == pytest.approx(0.75 / (1 - 0.5 ** 5))

    def test_conj(self):
        s = parse_expression("conj(mono(2))")
        assert s.support() == (-2, -2)

    def test_complex_literals(self):
        assert parse_expression("0.5 + 0.4i") == 0.5 + 0.4j
        assert parse_expression("2j") == 2j
        assert parse_expression("-i") == -1j
        assert parse_expression("1.5e-1") == pytest.approx(0.15)

    def test_arithmetic(self):
        s = parse_expression("mono(1) * mono(2)")
        assert s.support() == (3, 3)
        s = parse_expression("(1 + 2i) * mono(0) - mono(1)")
        cd = s.coeff_dict()
        assert cd[0] == pytest.approx(1 + 2j)
        assert cd[1] == pytest.approx(-1.0)

    def test_blaschke_as_symbol(self):
        s = parse_expression("blaschke([0.5])")
        assert isinstance(s, LaurentSymbol)
        theta = InnerFunction.blaschke([0.5])
        assert s.eval_at(0.3) == pytest.approx(theta.eval_at(0.3))

    def test_inner_mode(self):
        f = parse_expression("blaschke([0, 0.5])", mode="inner")
        assert isinstance(f, InnerFunction)
        assert f.degree() == 2
        f = parse_expression("atomic([(1, 1), (-1, 0.5)])", mode="inner")
        assert f.kind == "atomic_singular"
        assert len(f.points) == 2

    def test_inner_product(self):
        f = parse_expression("mono(1) * blaschke([0.5])", mode="inner")
        assert f.kind == "product"

    def test_unknown_name(self):
        with pytest.raises(ScenarioError, match="unknown"):
            parse_expression("wavelet(2)")

    def test_atomic_rejected_as_symbol(self):
        with pytest.raises(ScenarioError):
            parse_expression("atomic([(1, 1)])")

    def test_inner_sum_rejected(self):
        with pytest.raises(ScenarioError):
            parse_expression("mono(1) + mono(2)", mode="inner")

    def test_zero_outside_disc_rejected(self):
        with pytest.raises(ScenarioError):
            parse_expression("blaschke([2])", mode="inner")

    def test_trailing_garbage(self):
        with pytest.raises(ScenarioError):
            parse_expression("mono(1) mono(2)")


class TestSections:
    def test_full_roundtrip(self):
        scn = parse_scenario_text(NILPOTENT)
        assert scn.name == "nilpotent"
        assert scn.realized
        assert scn.theta.degree() == 2
        assert scn.g.support() == (3, 3)
        assert scn.tasks == ("validate", "spectrum", "kernel", "factorize",
                             "resolvent", "norm")
        assert scn.lambdas == (0.3 + 0j, 0.5 + 0.4j, 2.0 + 0j)
        assert len(scn.rfactors) == 2
        assert scn.rfactors[1].support() == (0, 2)
        assert scn.grid == 2048
        assert scn.tol == pytest.approx(1e-9)
        assert scn.cutoff == 64

    def test_task_dedup_keeps_order(self):
        text = NILPOTENT.replace("run = all", "run = norm, all, norm")
        scn = parse_scenario_text(text)
        assert scn.tasks == ("norm", "validate", "spectrum", "kernel",
                             "factorize", "resolvent")

    def test_name_falls_back_to_hint(self):
        scn = parse_scenario_text(FREE, name_hint="free_case")
        assert scn.name == "free_case"
        assert not scn.realized

    def test_digest_tracks_text(self):
        a = parse_scenario_text(NILPOTENT)
        b = parse_scenario_text(NILPOTENT)
        c = parse_scenario_text(NILPOTENT + "\n# trailing comment\n")
        assert a.digest == b.digest
        assert a.digest != c.digest

    def test_comments_ignored(self):
        text = NILPOTENT.replace("theta = mono(2)",
                                 "theta = mono(2)  # squared shift")
        scn = parse_scenario_text(text)
        assert scn.theta.degree() == 2

    def test_unknown_section(self):
        with pytest.raises(ScenarioError, match="line 2.*unknown section"):
            parse_scenario_text("\n[bogus]\nkey = 1\n")

    def test_unknown_key(self):
        with pytest.raises(ScenarioError, match="unknown key 'weight'"):
            parse_scenario_text("[space]\nweight = 2\n")

    def test_duplicate_key(self):
        text = "[space]\ntheta = mono(2)\ntheta = mono(3)\n"
        with pytest.raises(ScenarioError, match="line 3.*duplicate"):
            parse_scenario_text(text)

    def test_key_outside_section(self):
        with pytest.raises(ScenarioError, match="outside any section"):
            parse_scenario_text("theta = mono(2)\n")

    def test_unterminated_header(self):
        with pytest.raises(ScenarioError, match="unterminated"):
            parse_scenario_text("[space\ntheta = mono(2)\n")

    def test_missing_theta(self):
        with pytest.raises(ScenarioError, match="missing .space. theta"):
            parse_scenario_text("[tasks]\nrun = spectrum\n")

    def test_missing_tasks(self):
        text = "[space]\ntheta = mono(2)\nphi = mono(0)\npsi = mono(3)\n"
        with pytest.raises(ScenarioError, match="missing .tasks. run"):
            parse_scenario_text(text)

    def test_unknown_task(self):
        text = NILPOTENT.replace("run = all", "run = validate, audit")
        with pytest.raises(ScenarioError, match="unknown task 'audit'"):
            parse_scenario_text(text)

    def test_half_realized_space(self):
        text = NILPOTENT.replace("psi = mono(3)\n", "")
        with pytest.raises(ScenarioError, match="both phi and psi"):
            parse_scenario_text(text)

    def test_half_free_space(self):
        text = FREE.replace("aminus = poly([2.5])\n", "")
        with pytest.raises(ScenarioError, match="phi/psi or aplus/aminus"):
            parse_scenario_text(text)

    def test_rfactor_must_be_symbol(self):
        text = NILPOTENT.replace("values = poly([-0.3, 1]), poly([1, -2.5, 1])",
                                 "values = 3.0")
        with pytest.raises(ScenarioError, match="rfactors"):
            parse_scenario_text(text)

    def test_bad_tol(self):
        text = NILPOTENT.replace("tol = 1e-9", "tol = -1e-9")
        with pytest.raises(ScenarioError, match="tol must be positive"):
            parse_scenario_text(text)

    def test_bad_grid(self):
        text = NILPOTENT.replace("grid = 2048", "grid = 12.5")
        with pytest.raises(ScenarioError, match="grid must be a positive"):
            parse_scenario_text(text)


class TestPrerequisites:
    def test_factorize_needs_lambdas(self):
        text = FREE.replace("run = spectrum", "run = factorize")
        with pytest.raises(ScenarioError, match="needs a .lambdas."):
            parse_scenario_text(text)

    def test_validate_needs_operator(self):
        text = NILPOTENT.replace("[operator]\ng = mono(3)\n\n", "")
        with pytest.raises(ScenarioError, match="needs an .operator."):
            parse_scenario_text(text)

    def test_norm_needs_realized_space(self):
        scn = parse_scenario_text(FREE + "\n[operator]\ng = mono(1)\n")
        with pytest.raises(ScenarioError, match="realized"):
            check_prerequisites(scn, tasks=("norm",))

    def test_unknown_task_name(self):
        scn = parse_scenario_text(FREE)
        with pytest.raises(ScenarioError, match="unknown task"):
            check_prerequisites(scn, tasks=("audit",))

    def test_subset_passes(self):
        scn = parse_scenario_text(FREE)
        check_prerequisites(scn, tasks=("spectrum", "kernel"))


class TestBuild:
    def test_realized(self):
        scn = parse_scenario_text(NILPOTENT)
        sp = build_space(scn)
        assert sp.mode == "realized"
        assert sp.n == 2

    def test_free(self):
        scn = parse_scenario_text(FREE)
        sp = build_space(scn)
        assert sp.mode == "free"
        assert sp.n == 1
        ap0, amb0 = sp.split_constants()
        assert ap0 == pytest.approx(2.5)
        assert amb0 == pytest.approx(2.5)

    def test_from_file(self, tmp_path):
        p = tmp_path / "case_a.scn"
        p.write_text(FREE, encoding="utf-8")
        scn = parse_scenario(str(p))
        assert scn.name == "case_a"
        assert scn.path == str(p)
