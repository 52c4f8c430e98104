import pytest

from stratakit.corpus import load_fixture
from stratakit.modules import (
    injective_module,
    is_isomorphic,
    projective_module,
    regular_module,
    simple_module,
)
from stratakit.specfile import build_algebra
from stratakit.strat import (
    Poset,
    PosetError,
    Stratification,
    StratificationError,
    filtration_search,
    porism_check,
    profile_consistency_checks,
    synthesize_projective_cover,
)

ALL = ["FIX-A2", "FIX-A3", "FIX-NAK", "FIX-DUAL", "FIX-KRO", "FIX-LOOP"]


def strat_of(fix, check=True):
    spec = load_fixture(fix)
    a = build_algebra(spec)
    ss = spec.stratification
    poset = Poset.from_pairs(ss.poset.elements, ss.poset.leq)
    return Stratification(a, poset, ss.rho, ss.epsilon, check=check)


@pytest.fixture(scope="module")
def strats():
    return {fix: strat_of(fix) for fix in ALL}


def test_poset_validation():
    with pytest.raises(PosetError):
        Poset.from_pairs(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(PosetError):
        Poset.from_pairs([], [])
    p = Poset.from_pairs(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")  # transitivity closed
    assert p.lower_sets() == [
        frozenset(),
        frozenset({"a"}),
        frozenset({"a", "b"}),
        frozenset({"a", "b", "c"}),
    ]
    assert p.linear_extension() == ("a", "b", "c")


def test_antichain_lower_sets():
    p = Poset.from_pairs(["a", "b"], [])
    assert len(p.lower_sets()) == 4
    assert p.maximal_in(frozenset({"a", "b"})) == ["a", "b"]


def test_structure_checks_pass(strats):
    for fix, s in strats.items():
        notes = s.run_structure_checks()
        assert any(tag == "S3" for tag, _ in notes), fix


def test_single_stratum_is_whole_algebra():
    spec = load_fixture("FIX-DUAL")
    a = build_algebra(spec)
    s = strat_of("FIX-DUAL")
    assert s.lower_algebra(frozenset({"l"})).algebra == a
    assert s.stratum("l").algebra.dim == a.dim


def test_strata_dimensions(strats):
    assert strats["FIX-A2"].stratum("x").algebra.dim == 1
    assert strats["FIX-A2"].stratum("y").algebra.dim == 1
    assert strats["FIX-NAK"].stratum("x").algebra.dim == 1
    assert strats["FIX-NAK"].stratum("y").algebra.dim == 1
    assert strats["FIX-KRO"].stratum("u").algebra.dim == 2  # dual numbers corner
    assert strats["FIX-KRO"].stratum("z").algebra.dim == 1
    assert strats["FIX-LOOP"].stratum("u").algebra.dim == 2


def test_rho_must_be_total_and_surjective():
    spec = load_fixture("FIX-A2")
    a = build_algebra(spec)
    poset = Poset.from_pairs(["x", "y"], [("x", "y")])
    with pytest.raises(StratificationError):
        Stratification(a, poset, {"1": "x"}, check=False)
    with pytest.raises(StratificationError):
        Stratification(a, poset, {"1": "x", "2": "x"}, check=False)


def test_classify_simples_all_fixtures(strats):
    for fix, s in strats.items():
        table = s.classify_simples()
        assert set(table) == set(s.algebra.vertex_names), fix
        for b, (lam, l_gamma) in table.items():
            assert lam == s.rho[b]
            assert l_gamma.dim == 1


def test_standard_objects_spec_values(strats):
    a2 = strats["FIX-A2"].standard_objects()
    assert a2["1"].std.dim == 1 and a2["1"].proper_std.dim == 1
    assert a2["2"].std.dim == 1 and a2["2"].costd.dim == 2 and a2["2"].proper_costd.dim == 2
    nak = strats["FIX-NAK"].standard_objects()
    assert nak["2"].std.dim == 2 and nak["2"].proper_std.dim == 2
    dual = strats["FIX-DUAL"].standard_objects()
    assert dual["1"].std.dim == 2 and dual["1"].proper_std.dim == 1


def test_standard_canonical_maps(strats):
    for fix in ("FIX-A2", "FIX-KRO", "FIX-LOOP"):
        fams = strats[fix].standard_objects()
        for b, fam in fams.items():
            assert fam.std_to_proper.is_surjective()
            assert fam.proper_to_simple.is_surjective()
            assert fam.proper_to_simple.target.dim == 1
            assert fam.simple_to_proper.is_injective()
            assert fam.proper_to_costd.is_injective()


def test_filtration_single_layer(strats):
    s = strats["FIX-A2"]
    fams = s.standard_objects()
    cert = filtration_search(fams["2"].std, [("std(2)", fams["2"].std)], "exact-layers", oracle=True)
    assert cert is not None and len(cert.layers) == 1


def test_filtration_a2_projective(strats):
    s = strats["FIX-A2"]
    fams = s.standard_objects()
    p1, _ = projective_module(s.algebra, "1")
    allowed = [("std(1)", fams["1"].std), ("std(2)", fams["2"].std)]
    cert = filtration_search(p1, allowed, "exact-layers", oracle=True)
    assert cert is not None
    assert [l.allowed_name for l in cert.layers] == ["std(2)", "std(1)"]
    # chain is strictly increasing and nested
    dims = [l.above.dim for l in cert.layers]
    assert dims == sorted(dims)
    for lower_layer, upper_layer in zip(cert.layers, cert.layers[1:]):
        assert upper_layer.above.contains_space(lower_layer.above)


def test_filtration_nak_fails_exact_mode(strats):
    s = strats["FIX-NAK"]
    fams = s.standard_objects()
    p1, _ = projective_module(s.algebra, "1")
    allowed = [("std(1)", fams["1"].std), ("std(2)", fams["2"].std)]
    assert filtration_search(p1, allowed, "exact-layers", oracle=True) is None


def test_filtration_rejects_bad_allowed(strats):
    s = strats["FIX-A2"]
    reg = regular_module(s.algebra)  # top is not simple
    with pytest.raises(ValueError):
        filtration_search(reg, [("A", reg)], "exact-layers", oracle=True)


def test_oracle_requires_finite_field():
    import json

    from stratakit.specfile import parse_spec

    data = json.loads(
        '{"field": {"kind": "Q"}, "quiver": {"vertices": ["1", "2"],'
        ' "arrows": [{"name": "a", "from": "1", "to": "2"}]}}'
    )
    a = build_algebra(parse_spec(data))
    s1 = simple_module(a, "1")
    with pytest.raises(ValueError):
        filtration_search(s1, [("S1", s1)], "exact-layers", oracle=True)


def test_porism_every_vertex(strats):
    for fix, s in strats.items():
        for b in s.algebra.vertex_names:
            res = porism_check(s, b)
            assert res.kernel_module.dim + s.standard_objects()[b].std.dim == \
                projective_module(s.algebra, b)[0].dim


def test_porism_nak_proper_quotient_layer(strats):
    """The porism kernel at vertex 1 is a proper quotient of std(2): the
    quotient-layers certificate exists even though the exact filtration does
    not (see test_filtration_nak_fails_exact_mode)."""
    s = strats["FIX-NAK"]
    res = porism_check(s, "1")
    assert res.kernel_module.dim == 1
    assert [l.allowed_name for l in res.certificate.layers] == ["std(2)"]
    assert s.standard_objects()["2"].std.dim == 2  # strictly bigger than the layer


def test_porism_maximal_vertex_trivial(strats):
    s = strats["FIX-A2"]
    res = porism_check(s, "2")
    assert res.kernel_module.dim == 0
    assert res.certificate.layers == ()


def test_synthesis_every_vertex(strats):
    for fix, s in strats.items():
        for t in s.algebra.vertex_names:
            res = synthesize_projective_cover(s, t)
            assert res.matches_direct_cover
            direct, _ = projective_module(s.algebra, t)
            assert res.module.dim == direct.dim


def test_synthesis_audit_a2(strats):
    s = strats["FIX-A2"]
    res = synthesize_projective_cover(s, "1")
    assert [a.layer for a in res.audit] == ["x", "y"]
    assert res.audit[1].iterations == 1
    assert res.audit[1].multiplicities == (("2", 1),)


def test_synthesis_maximal_vertex_no_extension(strats):
    s = strats["FIX-A3"]
    res = synthesize_projective_cover(s, "3")
    assert all(a.iterations == 0 for a in res.audit)
    assert res.module.dim == 1


def test_composition_profiles(strats):
    for fix, s in strats.items():
        mods = [regular_module(s.algebra)]
        for v in s.algebra.vertex_names:
            mods.append(projective_module(s.algebra, v)[0])
            mods.append(injective_module(s.algebra, v))
            mods.append(simple_module(s.algebra, v))
        for m in mods:
            profile_consistency_checks(s, m)


def test_duality_swaps_standard_sides(strats):
    """Over the opposite algebra, standards become the duals of costandards."""
    from stratakit.algebra import opposite
    from stratakit.modules import dual_module

    for fix in ("FIX-A2", "FIX-NAK", "FIX-LOOP"):
        s = strats[fix]
        aop = opposite(s.algebra)
        sop = Stratification(aop, s.poset, s.rho, s.epsilon, check=False)
        fams = s.standard_objects()
        fams_op = sop.standard_objects()
        for b in s.algebra.vertex_names:
            assert is_isomorphic(dual_module(fams[b].costd), fams_op[b].std).isomorphic
            assert is_isomorphic(dual_module(fams[b].proper_costd), fams_op[b].proper_std).isomorphic
            assert is_isomorphic(dual_module(fams[b].std), fams_op[b].costd).isomorphic


def test_certificates_verify_independently(strats):
    from stratakit.strat import verify_filtration_certificate

    s = strats["FIX-A2"]
    fams = s.standard_objects()
    p1, _ = projective_module(s.algebra, "1")
    cert = filtration_search(
        p1, [("std(1)", fams["1"].std), ("std(2)", fams["2"].std)],
        "exact-layers", oracle=True,
    )
    assert verify_filtration_certificate(cert)
    for fix, st in strats.items():
        for b in st.algebra.vertex_names:
            res = porism_check(st, b)
            assert verify_filtration_certificate(res.certificate), (fix, b)


def test_rational_field_end_to_end():
    """The whole pipeline over the rationals (heuristic search mode)."""
    import json

    from stratakit.analyze import is_epsilon_stratified, is_highest_weight, sign_patterns
    from stratakit.corpus import fixture_bytes
    from stratakit.specfile import parse_spec

    data = json.loads(fixture_bytes("fix_a2.json"))
    data["field"] = {"kind": "Q"}
    spec = parse_spec(data, name="a2-rational")
    a = build_algebra(spec)
    ss = spec.stratification
    poset = Poset.from_pairs(ss.poset.elements, ss.poset.leq)
    s = Stratification(a, poset, ss.rho, check=True)
    s.classify_simples()
    for b in a.vertex_names:
        assert synthesize_projective_cover(s, b).matches_direct_cover
        assert porism_check(s, b, oracle=False).certificate is not None
    for eps in sign_patterns(poset):
        res = is_epsilon_stratified(s, eps, oracle=False)
        assert res.agreement and res.verdict
    hw = is_highest_weight(a, poset, ss.rho, oracle=False, strat=s)
    assert hw.verdict and hw.agreement
