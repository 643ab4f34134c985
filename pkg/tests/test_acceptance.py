"""One test per acceptance criterion; the terminal summary prints PASS/FAIL per line."""

import json
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from hankelcert.bernstein import catalog_ids, diff_matrix, golden_matrix, subdivide_axes, tensor_matrices, to_bernstein
from hankelcert.certify import (
    Policy,
    certify_max,
    certify_nonneg,
    h3_master,
    replay_document,
)
from hankelcert.cli import main
from hankelcert.exactalg import Box, MultiPoly, hankel_det
from hankelcert.functional import (
    BRANCHES,
    coeff_formulas,
    cks_y,
    convexity_tree,
    h2_functional,
    h2_reduction,
    h3_functional,
    majorant_chain,
    golden_grouping,
    schwarz_substitute,
)
from hankelcert.golden_forms import (
    BLASCHKE_TAYLOR,
    BLASCHKE_VARS,
    C_VARS,
    G0_EXTENDED,
    GHALF_EXTENDED,
    PSI,
    PSI_VARS,
    PX_VARS,
    golden_poly,
)
from hankelcert.maminda import QComplex, boundary_min, check_phi, phi
from hankelcert.series import SchwarzSpec, expand_subordinate, hankel_from_taylor, schwarz_series

UNIT_PX = Box.unit(PX_VARS)


@pytest.fixture(scope="module")
def chain():
    return majorant_chain()


@pytest.fixture(scope="module")
def catalog(chain):
    return tensor_matrices(chain)


@pytest.fixture(scope="module")
def master():
    return h3_master()


def _max(catalog, entry_id):
    return max(v for row in catalog[entry_id].matrix() for v in row)


def test_criterion_1_golden_matrices(catalog, master):
    for entry_id in catalog_ids():
        assert not diff_matrix(catalog[entry_id].matrix(), golden_matrix(entry_id)), entry_id
    assert _max(catalog, "b0") == F(123, 2)
    assert _max(catalog, "bhalf") == F(127, 2)
    expected = {
        "g0": ([F(483, 8), F(991, 20), F(5267, 128), F(5087, 128)],
               [F(1923, 32), F(14701, 256), F(7067867, 131072), F(13970539, 262144)]),
        "ghalf": ([F(487, 8), F(18241, 320), F(12921, 256), F(26721, 512)],
                  [F(1927, 32), F(301427, 5120), F(14781075, 262144), F(7446495, 131072)]),
    }
    for tag, (quads, subquads) in expected.items():
        assert [_max(catalog, f"q{i}-{tag}") for i in range(1, 5)] == quads
        assert [_max(catalog, f"q1{i}-{tag}") for i in range(1, 5)] == subquads
    g2 = master[1].parts["g2"][0]
    assert master[1].stages["g2"] == [F(1217, 20), F(39295, 768)]
    assert g2.detail["index"] == [3, 3, 3]
    top = [c for c in g2.children if c.bound == F(39295, 768)]
    assert len(top) == 1 and top[0].detail["argmax"] == [5, 2, 3]
    assert top[0].box.intervals[:2] == ((0, F(1, 2)), (F(1, 2), 1))
    assert json.dumps([[str(v) for v in row] for row in catalog["g2k3"].matrix()]).count('"1217/20"') == 1
    assert main(["reproduce", "g2k3"]) == 0


def test_criterion_2_theorem2_end_to_end(master, chain, tmp_path, capsys):
    bound, cert = master
    assert bound == F(1, 144) and cert.is_valid()
    cert.replay()
    assert replay_document(json.loads(json.dumps(cert.to_json()))) == F(1, 144)
    for branch in ("g0", "ghalf"):
        root = cert.parts[branch][0]
        q1 = root.children[0]
        assert q1.kind == "split"
        q11 = q1.children[0]
        assert q11.kind == "vertex_dominated" and q11.box == Box.parse(PX_VARS, "0:1/4,0:1/4")
        assert all(c.kind == "enclosed" for c in root.children[1:] + q1.children[1:])
    assert cert.attainment == {"0": 60, "1/4": 60, "1/2": 60}
    # staged narrative: depth 0 fails at the root, depth 1 without the endgame fails only on Q1
    d0 = certify_max(chain.G0, UNIT_PX, 60, Policy(max_depth=0), (6, 4))
    assert [(leaf.box, leaf.detail["witness_max"], leaf.detail["index"]) for leaf in d0.failures()] == [
        (UNIT_PX, F(123, 2), [1, 1])
    ]
    d1 = certify_max(chain.G0, UNIT_PX, 60, Policy(max_depth=1), (6, 4))
    assert [(f.box, f.detail["witness_max"]) for f in d1.failures()] == [(Box.parse(PX_VARS, "0:1/2,0:1/2"), F(483, 8))]
    assert [c.bound for c in d1.children[1:]] == [F(991, 20), F(5267, 128), F(5087, 128)]
    out = tmp_path / "cert.json"
    assert main(["h3-certify", "--depth", "0", "--out", str(out)]) == 1
    report = json.loads(capsys.readouterr().out)
    failed = report["outputs"]["failure"]
    assert failed["branch"] == "g0" and failed["failed_boxes"][0]["witness_max"] == "123/2"
    assert failed["failed_boxes"][0]["box"] == [["0/1", "1/1"], ["0/1", "1/1"]]
    assert main(["h3-certify", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert json.loads(capsys.readouterr().out)["outputs"]["bound"] == "1/144"
    assert main(["h3-certify", "--workers", "2", "--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_criterion_3_theorem1(capsys):
    def cli_bound(t):
        assert main(["h2", "--t", t]) == 0
        return F(json.loads(capsys.readouterr().out)["outputs"]["bound"])

    for t in ("0", "1/8", "1/4"):
        assert cli_bound(t) == F(1, 36)
    for t in (F(1, 4), F(3, 8), F(1, 2)):
        assert cli_bound(str(t)) == (4 + (4 * t - 1) ** 2 / (8 + 20 * t - 16 * t * t)) / 144
    r = h2_reduction(F(1, 2))
    assert r.h2_bound == F(19, 672) and r.maximizer == F(1, 7)
    psi = golden_poly(PSI, PSI_VARS)
    grid = max(psi.eval((F(k, 1000), F(1, 2))) for k in range(1001))
    assert grid <= r.bound and r.bound - grid <= r.bound / 1000


def test_criterion_4_symbolic_identities(chain):
    cf = coeff_formulas()
    a2, a3, a4, a5 = cf.taylor()
    assert h3_functional() == 8640 * (a3 * (a2 * a4 - a3 * a3) - a4 * (a4 - a2 * a3) + a5 * (a3 - a2 * a2))
    grouped = schwarz_substitute(h3_functional())
    assert grouped == golden_grouping()
    y = MultiPoly.var("y", chain.H.variables)
    assert chain.H1 - chain.H == chain.Lterm.align(chain.H.variables) * (1 - y)
    assert chain.G0 == golden_poly(G0_EXTENDED, PX_VARS)
    assert chain.Ghalf == golden_poly(GHALF_EXTENDED, PX_VARS)


def test_criterion_5_sharpness_witnesses():
    for t in (F(0), F(1, 4), F(1, 2)):
        a = expand_subordinate(schwarz_series(SchwarzSpec.monomial(2), 5), t, 5)
        assert a[1:4] == [0, F(1, 6), 0]
        assert hankel_det(a, 2, 2) == -F(1, 36)
        a = expand_subordinate(schwarz_series(SchwarzSpec.monomial(3), 5), t, 5)
        assert a[1:5] == [0, 0, F(1, 12), 0]
        assert hankel_det(a, 3, 1) == -F(1, 144)
    x, t = MultiPoly.gens(BLASCHKE_VARS)
    a = expand_subordinate(schwarz_series(SchwarzSpec.blaschke(x), 5), t, 5)
    for k, name in ((1, "a2"), (2, "a3"), (3, "a4")):
        assert a[k] == golden_poly(BLASCHKE_TAYLOR[name], BLASCHKE_VARS)
    h2, _ = hankel_from_taylor(a[1:])
    s2 = {"s": x * x, "t": t}
    assert -144 * h2 == golden_poly(PSI, PSI_VARS).compose(s2, BLASCHKE_VARS)


def test_criterion_6_nonnegativity_certificates(chain, master):
    cert = master[1]
    assert chain.lterm_cert.is_valid()
    assert cert.nonneg_parts["convexity_in_t"][0].is_valid()
    domain = Box.of(p=(0, 1), x=(0, 1), t=(0, F(1, 2)))
    assert certify_nonneg(convexity_tree(), domain).is_valid()
    labels = [g.poly for g in chain.group_certificates]
    bracket = golden_poly("-7+3*p^2+8*t^2*(-7+p^2)+4*t*(2+p^2)", ("p", "t"))
    assert bracket in labels
    for g in chain.group_certificates:
        assert g.cert.is_valid()
    assert next(g for g in chain.group_certificates if g.poly == bracket).sign == -1


def _disk_oracle(A, B, C, nr=300, na=1200):
    r = np.linspace(0.0, 1.0, nr + 1)[:, None]
    th = np.linspace(0.0, 2 * np.pi, na, endpoint=False)[None, :]
    z = r * np.exp(1j * th)
    vals = np.abs(A + B * z + C * z * z) + 1 - np.abs(z) ** 2
    lipschitz = abs(B) + 2 * abs(C) + 2
    return float(vals.max()), lipschitz * (1 / (2 * nr) + np.pi / na)


def test_criterion_7_property_suites(chain):
    rng = random.Random(20261016)
    # Bernstein invariants on 200 random cubic/quartic instances
    for _ in range(200):
        deg = rng.choice((3, 4))
        terms = {}
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                if rng.random() < 0.6:
                    terms[(a, b)] = F(rng.randint(-9, 9), rng.randint(1, 5))
        p = MultiPoly(("x", "y"), terms)
        lo = [F(rng.randint(-4, 4), 4) for _ in range(2)]
        box = Box(("x", "y"), tuple((l, l + F(rng.randint(1, 8), 4)) for l in lo))
        b = to_bernstein(p, (deg, deg), box)
        blo, bhi = min(b.coeffs), max(b.coeffs)
        pt = tuple(l + F(rng.randint(0, 16), 16) * w for l, w in zip(box.lo(), box.widths()))
        assert blo <= p.eval(pt) <= bhi
        assert all(v == p.eval(c) for c, v in b.corner_values().items())
        for child in subdivide_axes(b):
            assert blo <= min(child.coeffs) and max(child.coeffs) <= bhi
            assert child == to_bernstein(p, (deg, deg), child.box)
    # series route vs coefficient formulas on 50 random Schwarz coefficient tuples
    cf, h3 = coeff_formulas(), h3_functional()
    for _ in range(50):
        cs = [F(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(4)]
        t = F(rng.randint(0, 10), 20)
        a = expand_subordinate(schwarz_series(SchwarzSpec.explicit(cs), 5), t, 5)
        point = (*cs, t)
        assert a[1:5] == [cf.a2.eval(point), cf.a3.eval(point), cf.a4.eval(point), cf.a5.eval(point)]
        assert hankel_det(a, 3, 1) * 8640 == h3.eval(point)
        assert hankel_det(a, 2, 2) * 144 == h2_functional().eval((cs[0], cs[1], cs[2], t))
    # cks_y against the disk-grid oracle on 100 random triples
    for _ in range(100):
        A, B, C = (F(rng.randint(-40, 40), 20) for _ in range(3))
        value, branch = cks_y(A, B, C)
        assert branch in BRANCHES
        oracle, slack = _disk_oracle(float(A), float(B), float(C))
        v = float(value)
        assert oracle <= v + 1e-9 and v - oracle <= slack, (A, B, C, value, branch, oracle)
    # domination necessity: corner boxes of G0 never enclose below 60
    for depth in range(5):
        w = F(1, 4) / 2 ** depth
        corner = to_bernstein(chain.G0, (6, 4), Box.of(p=(0, w), x=(0, w)))
        assert max(corner.coeffs) > 60


def test_criterion_8_maminda():
    table = {
        (1, 2): (True, True, True),
        (1, 3): (True, True, True),
        (1, 1): (False, False, False),
        (2, 3): (False, False, True),
        (4, 5): (False, False, True),
    }
    for (m, n), flags in table.items():
        r = check_phi(m, n)
        assert (r.univalent, r.starlike, r.re_positive) == flags, (m, n)
        assert r.maminda_admissible == all(flags)
        if r.witness:
            z1, z2 = r.witness
            assert z1 != z2 and z1.abs2() < 1 and z2.abs2() < 1
            assert phi(r.a, z1) - phi(r.a, z2) == QComplex(F(0))
        a = r.a
        formula = a if a <= F(1, 4) else 1 - a - 1 / (8 * a)
        assert r.boundary_min == formula == boundary_min(a)
        net = min(1 + math.cos(k * math.pi / 720) + float(a) * math.cos(2 * k * math.pi / 720) for k in range(721))
        assert float(formula) <= net + 1e-12 and net - float(formula) <= (1 + 2 * float(a)) * math.pi / 720
    assert boundary_min(F(85, 100)) > 0 > boundary_min(F(86, 100))
